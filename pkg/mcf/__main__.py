import sys

from mcf.bench_cli import main

sys.exit(main())
