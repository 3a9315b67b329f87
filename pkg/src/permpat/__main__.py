import sys

from permpat.cli import main

sys.exit(main())
