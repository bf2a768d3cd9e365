#!/usr/bin/env python
import sys

from fspcr.commands import main  # pylint: disable=wrong-import-position

if __name__ == "__main__":
    sys.exit(main(prog="python -m fspcr.run"))
