import sys

from bayeslens.main import main

sys.exit(main())
