import sys

from src.oil_forest.run import main

sys.exit(main())
