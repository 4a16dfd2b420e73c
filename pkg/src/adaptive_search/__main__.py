import sys

from adaptive_search.bench.cli import main

sys.exit(main())
