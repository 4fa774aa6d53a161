import sys

from equiteam.cli import main

sys.exit(main())
