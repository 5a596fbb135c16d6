import sys

from tdss.cli import main

sys.exit(main())
