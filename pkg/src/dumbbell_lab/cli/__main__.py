"""Allow ``python -m dumbbell_lab.cli``."""

from dumbbell_lab.cli._parser import main

main()
