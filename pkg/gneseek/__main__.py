"""Allow ``python -m gneseek``."""

import sys

from .cli import main

sys.exit(main())
