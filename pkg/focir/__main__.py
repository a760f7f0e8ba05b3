import sys

from focir.cli import main

sys.exit(main())
