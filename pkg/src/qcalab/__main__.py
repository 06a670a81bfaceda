import sys

from qcalab.cli import main

sys.exit(main())
