import sys
from pathlib import Path

# frozen oracle values live next to the tests
sys.path.insert(0, str(Path(__file__).parent))
