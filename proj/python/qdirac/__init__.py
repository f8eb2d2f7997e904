"""q-Dirac spectral solver: q-calculus primitives, basic trigonometric
functions, lattice solutions, and eigenvalue location."""

from ._qdirac import *  # noqa: F401,F403
from ._qdirac import __version__  # noqa: F401
