import sys

from sno.main import main

sys.exit(main())
