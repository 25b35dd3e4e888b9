"""Allow ``python -m mimkit`` to invoke the experiment CLI."""
import sys

from .experiment_cli import main

if __name__ == "__main__":
    sys.exit(main())
