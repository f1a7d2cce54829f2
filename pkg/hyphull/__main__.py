import sys

from hyphull.cli.main import main

sys.exit(main())
