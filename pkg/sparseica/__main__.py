import sys

from sparseica.run_bench import main

sys.exit(main())
