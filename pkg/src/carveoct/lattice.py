"""Octant keys on the integer lattice and the arithmetic every other module builds on.

The root cube is ``[0, 2**MAX_LEVEL)**dim``.  A key at refinement ``level`` has
side ``2**(MAX_LEVEL - level)`` lattice units and its anchor (lower corner) is
aligned to that side.  Arrays of keys are stored as ``(n, dim + 1)`` int64
arrays with columns ``x, y[, z], level``; single keys are ``OctantKey``.

Bit-interleaving convention: axis 0 is the least significant bit.  This choice
is part of the on-disk format (checkpoints store anchors, node ids follow the
interleaved order), so it must not change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError

MAX_LEVEL = 30


@dataclass(frozen=True)
class OctantKey:
    """One octant (quadrant in 2D): dimension, anchor on the lattice, level."""

    dim: int
    anchor: tuple[int, ...]
    level: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DomainError(f"dim must be 2 or 3, got {self.dim}")
        if not 0 <= self.level <= MAX_LEVEL:
            raise DomainError(f"level {self.level} outside [0, {MAX_LEVEL}]")
        if len(self.anchor) != self.dim:
            raise DomainError("anchor length does not match dim")
        side = 1 << (MAX_LEVEL - self.level)
        for a in self.anchor:
            if not 0 <= a < (1 << MAX_LEVEL):
                raise DomainError(f"anchor coordinate {a} outside the root cube")
            if a % side:
                raise DomainError(
                    f"anchor coordinate {a} not aligned to level-{self.level} lattice"
                )

    @property
    def side(self) -> int:
        return 1 << (MAX_LEVEL - self.level)

    def bounds(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Closed-open lattice bounds (lo, hi) of the octant's region."""
        hi = tuple(a + self.side for a in self.anchor)
        return self.anchor, hi


def cell(dim: int, level: int, *coords: int) -> OctantKey:
    """Key from coordinates given on the level's own lattice (0 .. 2**level - 1)."""
    shift = MAX_LEVEL - level
    return OctantKey(dim, tuple(c << shift for c in coords), level)


ROOT2 = OctantKey(2, (0, 0), 0)
ROOT3 = OctantKey(3, (0, 0, 0), 0)


def root(dim: int) -> OctantKey:
    return ROOT2 if dim == 2 else ROOT3


def morton_index(key: OctantKey, at_level: int) -> int:
    """Morton child number of key's ancestor at depth ``at_level`` within its parent.

    Axis 0 contributes the least significant bit.  ``at_level=0`` returns 0
    (the root occupies the only slot at depth zero).
    """
    if at_level > key.level:
        raise DomainError(f"at_level {at_level} exceeds key level {key.level}")
    if at_level == 0:
        return 0
    bit = MAX_LEVEL - at_level
    out = 0
    for axis, a in enumerate(key.anchor):
        out |= ((a >> bit) & 1) << axis
    return out


def parent(key: OctantKey) -> OctantKey:
    if key.level < 1:
        raise DomainError("root has no parent")
    side2 = 1 << (MAX_LEVEL - key.level + 1)
    anchor = tuple((a // side2) * side2 for a in key.anchor)
    return OctantKey(key.dim, anchor, key.level - 1)


def child(key: OctantKey, morton_child: int) -> OctantKey:
    if key.level >= MAX_LEVEL:
        raise DomainError("cannot refine past MAX_LEVEL")
    if not 0 <= morton_child < (1 << key.dim):
        raise DomainError(f"child number {morton_child} outside 0..{(1 << key.dim) - 1}")
    half = key.side >> 1
    anchor = tuple(
        a + (half if (morton_child >> axis) & 1 else 0)
        for axis, a in enumerate(key.anchor)
    )
    return OctantKey(key.dim, anchor, key.level + 1)


def same_level_neighbors(key: OctantKey) -> list[OctantKey]:
    """All face/edge/corner neighbors at key's level inside the root cube."""
    side = key.side
    limit = 1 << MAX_LEVEL
    out = []
    offsets = [(-side, 0, side)] * key.dim
    for delta in _product(offsets):
        if all(d == 0 for d in delta):
            continue
        anchor = tuple(a + d for a, d in zip(key.anchor, delta))
        if all(0 <= a < limit for a in anchor):
            out.append(OctantKey(key.dim, anchor, key.level))
    return out


def _product(choices):
    if len(choices) == 2:
        for x in choices[0]:
            for y in choices[1]:
                yield (x, y)
    else:
        for x in choices[0]:
            for y in choices[1]:
                for z in choices[2]:
                    yield (x, y, z)


def is_ancestor(a: OctantKey, b: OctantKey) -> bool:
    """True iff a's region strictly contains b's (a is a proper ancestor)."""
    if a.level >= b.level:
        return False
    side = a.side
    return all((bb // side) * side == aa for aa, bb in zip(a.anchor, b.anchor))


# ---------------------------------------------------------------------------
# array form

def keys_to_array(keys: Iterable[OctantKey], dim: int | None = None) -> np.ndarray:
    keys = list(keys)
    if not keys:
        if dim is None:
            raise DomainError("cannot infer dim from an empty key list")
        return np.empty((0, dim + 1), dtype=np.int64)
    d = keys[0].dim
    if dim is not None and dim != d:
        raise DomainError("explicit dim disagrees with keys")
    if any(k.dim != d for k in keys):
        raise DomainError("mixed dimensions in key list")
    return np.array([(*k.anchor, k.level) for k in keys], dtype=np.int64)


def array_to_keys(arr: np.ndarray) -> list[OctantKey]:
    dim = arr.shape[1] - 1
    return [OctantKey(dim, tuple(int(c) for c in row[:dim]), int(row[dim])) for row in arr]


def array_parent(arr: np.ndarray) -> np.ndarray:
    dim = arr.shape[1] - 1
    lev = arr[:, dim]
    if np.any(lev < 1):
        raise DomainError("root has no parent")
    out = arr.copy()
    side2 = (np.int64(1) << (MAX_LEVEL - lev + 1)).astype(np.int64)
    for a in range(dim):
        out[:, a] = (arr[:, a] // side2) * side2
    out[:, dim] = lev - 1
    return out


def array_child_num(arr: np.ndarray, at_level: np.ndarray | int) -> np.ndarray:
    """Vectorized morton_index over key rows (at_level may be scalar or per-row)."""
    dim = arr.shape[1] - 1
    bit = MAX_LEVEL - np.asarray(at_level)
    out = np.zeros(len(arr), dtype=np.int64)
    for a in range(dim):
        out |= ((arr[:, a] >> bit) & 1) << a
    return out


def array_is_ancestor_or_equal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rowwise: a[i] is an ancestor of b[i] or equal to it."""
    dim = a.shape[1] - 1
    ok = a[:, dim] <= b[:, dim]
    side = np.int64(1) << (MAX_LEVEL - a[:, dim])
    for ax in range(dim):
        ok &= (b[:, ax] // side) * side == a[:, ax]
    return ok


# ---------------------------------------------------------------------------
# interleaved codes (Morton).  Coordinates up to 2**31 are supported so the
# same routines serve both cell anchors (2**MAX_LEVEL) and order-2 node
# lattices (2**(MAX_LEVEL+1)).

def _spread2(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    x = (x | (x << 16)) & 0x0000FFFF0000FFFF
    x = (x | (x << 8)) & 0x00FF00FF00FF00FF
    x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0F
    x = (x | (x << 2)) & 0x3333333333333333
    x = (x | (x << 1)) & 0x5555555555555555
    return x


def _spread3(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64) & 0x1FFFFF
    x = (x | (x << 32)) & 0x1F00000000FFFF
    x = (x | (x << 16)) & 0x1F0000FF0000FF
    x = (x | (x << 8)) & 0x100F00F00F00F00F
    x = (x | (x << 4)) & 0x10C30C30C30C30C3
    x = (x | (x << 2)) & 0x1249249249249249
    return x


def interleave_hi_lo(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Morton code of (n, dim) integer coordinates split into (hi, lo) int64 words."""
    dim = coords.shape[1]
    if dim == 2:
        lo = _spread2(coords[:, 0] & 0xFFFFFFFF) | (_spread2(coords[:, 1] & 0xFFFFFFFF) << 1)
        hi = np.zeros(len(coords), dtype=np.int64)
        return hi, lo
    lo = (
        _spread3(coords[:, 0])
        | (_spread3(coords[:, 1]) << 1)
        | (_spread3(coords[:, 2]) << 2)
    )
    hi = (
        _spread3(coords[:, 0] >> 21)
        | (_spread3(coords[:, 1] >> 21) << 1)
        | (_spread3(coords[:, 2] >> 21) << 2)
    )
    return hi, lo


def morton_order(coords: np.ndarray) -> np.ndarray:
    """argsort of integer points by Morton code (axis 0 least significant)."""
    hi, lo = interleave_hi_lo(coords)
    return np.lexsort((lo, hi))


def key_code(arr: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(hi, lo, level) triplet whose lexicographic order is Morton pre-order."""
    dim = arr.shape[1] - 1
    hi, lo = interleave_hi_lo(arr[:, :dim])
    return hi, lo, arr[:, dim]


# ---------------------------------------------------------------------------
# linear octree container

class LinearOctree:
    """SFC-sorted leaf list of a (possibly incomplete) octree.

    ``data`` is the ``(n, dim + 1)`` int64 array; whether it is sorted is
    tracked by the ``sorted`` flag set by the producing algorithm.
    """

    def __init__(self, dim: int, data: np.ndarray, sorted: bool = False):
        self.dim = dim
        self.data = np.asarray(data, dtype=np.int64).reshape(-1, dim + 1)
        self.sorted = sorted

    @classmethod
    def from_keys(cls, keys: Iterable[OctantKey], dim: int | None = None,
                  sorted: bool = False) -> "LinearOctree":
        arr = keys_to_array(keys, dim)
        return cls(arr.shape[1] - 1, arr, sorted)

    def __len__(self) -> int:
        return len(self.data)

    def key(self, i: int) -> OctantKey:
        row = self.data[i]
        return OctantKey(self.dim, tuple(int(c) for c in row[: self.dim]), int(row[self.dim]))

    def keys(self) -> Iterator[OctantKey]:
        for i in range(len(self.data)):
            yield self.key(i)

    @property
    def levels(self) -> np.ndarray:
        return self.data[:, self.dim]

    @property
    def anchors(self) -> np.ndarray:
        return self.data[:, : self.dim]

    def validate(self) -> None:
        """Raise ContractError unless sorted, duplicate-free and ancestor-free."""
        from .errors import ContractError

        if len(self.data) < 2:
            return
        hi, lo, lev = key_code(self.data)
        worse = (hi[:-1] > hi[1:]) | ((hi[:-1] == hi[1:]) & (lo[:-1] > lo[1:])) | (
            (hi[:-1] == hi[1:]) & (lo[:-1] == lo[1:]) & (lev[:-1] >= lev[1:])
        )
        if np.any(worse):
            raise ContractError("leaf list is not strictly increasing in SFC pre-order")
        if np.any(array_is_ancestor_or_equal(self.data[:-1], self.data[1:])):
            raise ContractError("leaf list contains ancestor/descendant overlap")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinearOctree)
            and self.dim == other.dim
            and self.data.shape == other.data.shape
            and bool(np.all(self.data == other.data))
        )
