import sys

from isac_drt.cli import main

sys.exit(main())
