from adakit.cli import main

main()
