import sys

from twsc.cli import main

sys.exit(main())
