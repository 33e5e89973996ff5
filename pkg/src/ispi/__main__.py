import sys

from ispi.app.cli import main

sys.exit(main())
