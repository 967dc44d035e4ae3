# main_cli.py
import sys

from skipless.cli import main

if __name__ == "__main__":
    sys.exit(main())
