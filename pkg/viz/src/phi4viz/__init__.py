"""Static figures from phi4 experiment outputs.

Consumes only the tool's public interfaces: the frozen CSV schemas
(``ftle.csv``, ``steer.csv``, ``wick.csv``) and the documented snapshot
path-file format.
"""

__version__ = "0.1.0"

from .figures import KINDS, FigureSpec, plot
from .tables import SchemaError, read_ftle, read_steer, read_wick
