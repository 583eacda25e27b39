"""Allow ``python -m distnet.cli``."""

import sys

from distnet.cli.main import main

sys.exit(main())
