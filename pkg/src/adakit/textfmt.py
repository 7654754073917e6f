"""Small helpers for canonical text output."""


def is_atomic(s: str) -> bool:
    """No top-level + or - (a leading sign or one after ^ does not count)."""
    depth = 0
    prev = ""
    for pos, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-" and pos > 0 and prev != "^":
            return False
        elif depth == 0 and ch == " ":
            return False
        prev = ch
    return True


def wrap(s: str) -> str:
    """Parenthesize s unless it is atomic."""
    return s if is_atomic(s) else f"({s})"
