"""Allow ``python -m bell_gamma_toolkit``."""

from .cli import main

if __name__ == "__main__":
    main()
