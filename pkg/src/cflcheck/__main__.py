import sys

from cflcheck.cli import main

sys.exit(main())
