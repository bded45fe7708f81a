import sys

from minorsep.cli import main

sys.exit(main())
