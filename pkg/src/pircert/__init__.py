"""Translation validation for a small PIR-like intermediate language."""

import sys

# terms are walked recursively; the corpus and the timelock stay far below this
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

__version__ = "0.1.0"
