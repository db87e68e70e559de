import sys

from eigqubo.cli import main

sys.exit(main())
