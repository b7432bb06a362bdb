import sys

from hjconvex.cli import main

sys.exit(main())
