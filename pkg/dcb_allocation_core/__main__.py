# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import sys

from dcb_allocation_core.cli import main

if __name__ == "__main__":
    sys.exit(main())
