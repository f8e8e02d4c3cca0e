import sys

from acidlab.lab.cli import main

sys.exit(main())
