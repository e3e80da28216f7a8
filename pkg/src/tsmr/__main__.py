import sys

from tsmr.cli import main

sys.exit(main())
