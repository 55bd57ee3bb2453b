import sys

from sebbkit.cli import main

sys.exit(main())
