import sys
from hotword.cli import main
sys.exit(main())
