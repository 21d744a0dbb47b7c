import sys

from oneswitch.cli import main

sys.exit(main())
