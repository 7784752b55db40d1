"""High-dimensional pairwise-kernel statistics with bootstrap inference.

The heavy lifting lives in the compiled extension `_ustatboot`; this package
re-exports its functions.
"""

from ._ustatboot import *  # noqa: F401,F403
from ._ustatboot import __version__  # noqa: F401
