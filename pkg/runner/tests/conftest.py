import sys
from pathlib import Path

RUNNER_SRC = Path(__file__).resolve().parent.parent / "src"
if str(RUNNER_SRC) not in sys.path:
    sys.path.insert(0, str(RUNNER_SRC))
