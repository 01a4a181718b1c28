import sys

from convrunner import main

if __name__ == "__main__":
    sys.exit(main())
