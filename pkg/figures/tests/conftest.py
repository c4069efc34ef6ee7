import sys
from pathlib import Path

# Make render.py importable whether or not the figures package is installed.
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))
