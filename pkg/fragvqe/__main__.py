"""Allow ``python -m fragvqe``."""

import sys

from .cli import main

sys.exit(main())
