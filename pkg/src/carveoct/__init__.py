"""Carved linearized octrees with matrix-free FEM on the retained subdomain."""

__version__ = "0.1.0"

from .lattice import MAX_LEVEL, LinearOctree, OctantKey, cell, root
from .sfc import HilbertOracle, MortonOracle, treesort, unique_finest

__all__ = [
    "MAX_LEVEL",
    "LinearOctree",
    "OctantKey",
    "cell",
    "root",
    "MortonOracle",
    "HilbertOracle",
    "treesort",
    "unique_finest",
]
