import sys

from kitaevlab.cli import main

sys.exit(main())
