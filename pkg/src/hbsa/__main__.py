import sys

from hbsa.cli import main

sys.exit(main())
