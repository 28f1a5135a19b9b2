"""Entry point for ``python -m stopspacing``."""

from .cli import main

main()
