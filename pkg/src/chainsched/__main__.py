import sys

from chainsched.cli import main

sys.exit(main())
