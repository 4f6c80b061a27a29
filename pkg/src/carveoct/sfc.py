"""Space-filling-curve oracles and the bucketed MSD radix sort (treesort).

The sort is a top-down pass: keys whose level equals the current depth are
emitted first (ancestors precede descendants), the rest are bucketed by their
child number at the next depth, the buckets are permuted into regional SFC
order by the oracle, and each bucket recurses with the oracle's child state.
Equal keys keep their input order (stable partitioning throughout).
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, DomainError
from .lattice import (
    MAX_LEVEL,
    LinearOctree,
    OctantKey,
    array_child_num,
    array_is_ancestor_or_equal,
    keys_to_array,
    array_to_keys,
)


class MortonOracle:
    """Identity oracle: regional SFC order equals Morton child order."""

    curve = "morton"

    def __init__(self, dim: int):
        if dim not in (2, 3):
            raise DomainError("dim must be 2 or 3")
        self.dim = dim

    def sfc_to_morton(self, c_sfc: int) -> int:
        return c_sfc

    def sfc_of_morton(self) -> np.ndarray:
        return np.arange(1 << self.dim, dtype=np.int64)

    def child(self, c_sfc: int) -> "MortonOracle":
        return self


class HilbertOracle:
    """Table-driven 2D Hilbert oracle.

    Each state is an orientation of the base U-shaped motif; the table maps
    (state, sfc child rank) -> (morton quadrant, child state).  The table is
    generated once at import from the orientation group rather than typed in
    by hand.  3D tables are not provided; Morton is the working curve there.
    """

    curve = "hilbert"

    def __init__(self, dim: int = 2, state: int = 0):
        if dim != 2:
            raise DomainError("Hilbert oracle is only provided for dim=2; use Morton for 3D")
        self.dim = dim
        self.state = state

    def sfc_to_morton(self, c_sfc: int) -> int:
        return _HILBERT2D_MORTON[self.state][c_sfc]

    def sfc_of_morton(self) -> np.ndarray:
        return _HILBERT2D_RANK_OF_MORTON[self.state]

    def child(self, c_sfc: int) -> "HilbertOracle":
        return HilbertOracle(2, _HILBERT2D_CHILD[self.state][c_sfc])


def _build_hilbert2d_tables():
    # States are transforms (perm, flip) mapping raw quadrant bits into the
    # base frame where the visit order is (0,0) (0,1) (1,1) (1,0).
    base_rank = {(0, 0): 0, (0, 1): 1, (1, 1): 2, (1, 0): 3}
    rank_bits = {v: k for k, v in base_rank.items()}
    # Extra transform applied to the sub-quadrant frame after entering a
    # quadrant of the base motif (the classic rotate step).
    step = {
        (0, 0): ((1, 0), (0, 0)),  # transpose
        (1, 0): ((1, 0), (1, 1)),  # anti-transpose
        (0, 1): ((0, 1), (0, 0)),
        (1, 1): ((0, 1), (0, 0)),
    }

    def compose(t2, t1):
        # apply t1 (raw -> frame) then t2 (frame -> frame')
        p1, f1 = t1
        p2, f2 = t2
        perm = tuple(p1[p2[a]] for a in range(2))
        flip = tuple(f1[p2[a]] ^ f2[a] for a in range(2))
        return perm, flip

    ident = ((0, 1), (0, 0))
    states = {ident: 0}
    order = [ident]
    morton_tab, child_tab = [], []
    i = 0
    while i < len(order):
        t = order[i]
        perm, flip = t
        mort_row, child_row = [], []
        for rank in range(4):
            bits = rank_bits[rank]
            # solve t(raw) = bits for raw
            raw = [0, 0]
            for a in range(2):
                raw[perm[a]] = bits[a] ^ flip[a]
            mort_row.append(raw[0] | (raw[1] << 1))
            child_t = compose(step[bits], t)
            if child_t not in states:
                states[child_t] = len(order)
                order.append(child_t)
            child_row.append(states[child_t])
        morton_tab.append(mort_row)
        child_tab.append(child_row)
        i += 1
    rank_of_morton = [
        np.argsort(np.array(row, dtype=np.int64)).astype(np.int64) for row in morton_tab
    ]
    return morton_tab, child_tab, rank_of_morton


_HILBERT2D_MORTON, _HILBERT2D_CHILD, _HILBERT2D_RANK_OF_MORTON = _build_hilbert2d_tables()


def sfc_rank_path(key: OctantKey, oracle) -> tuple[int, ...]:
    """Regional SFC digits of the key's ancestor chain, root downward.

    Tuples compare in SFC pre-order: a prefix (ancestor) sorts before any
    extension (descendant).  This is the comparison-sort encoding the radix
    sort is tested against, and what splitter bisection uses.
    """
    digits = []
    state = oracle
    for lev in range(1, key.level + 1):
        bit = MAX_LEVEL - lev
        morton = 0
        for axis in range(key.dim):
            morton |= ((key.anchor[axis] >> bit) & 1) << axis
        rank = int(state.sfc_of_morton()[morton])
        digits.append(rank)
        state = state.child(rank)
    return tuple(digits)


def treesort_array(arr: np.ndarray, oracle) -> np.ndarray:
    """MSD radix sort of key rows into SFC pre-order (stable for equal keys)."""
    if len(arr) == 0:
        return arr.copy()
    dim = arr.shape[1] - 1
    out = np.empty_like(arr)
    pos = 0

    def rec(seg: np.ndarray, depth: int, state) -> None:
        nonlocal pos
        here = seg[:, dim] == depth
        n_here = int(np.count_nonzero(here))
        if n_here:
            out[pos : pos + n_here] = seg[here]
            pos += n_here
            seg = seg[~here]
        if len(seg) == 0:
            return
        if len(seg) == 1:
            out[pos] = seg[0]
            pos += 1
            return
        cnum = array_child_num(seg, depth + 1)
        rank = state.sfc_of_morton()[cnum]
        order = np.argsort(rank, kind="stable")
        seg = seg[order]
        counts = np.bincount(rank, minlength=1 << dim)
        offs = np.concatenate(([0], np.cumsum(counts)))
        for r in range(1 << dim):
            if counts[r]:
                rec(seg[offs[r] : offs[r + 1]], depth + 1, state.child(r))

    rec(arr, 0, oracle)
    return out


def treesort(keys, oracle=None):
    """Sort keys (list[OctantKey] or LinearOctree) into SFC pre-order."""
    if isinstance(keys, LinearOctree):
        oracle = oracle or MortonOracle(keys.dim)
        if oracle.dim != keys.dim:
            raise DomainError("oracle dimension does not match octree")
        return LinearOctree(keys.dim, treesort_array(keys.data, oracle), sorted=True)
    keys = list(keys)
    if not keys:
        return []
    arr = keys_to_array(keys)
    oracle = oracle or MortonOracle(arr.shape[1] - 1)
    if oracle.dim != arr.shape[1] - 1:
        raise DomainError("oracle dimension does not match keys")
    return array_to_keys(treesort_array(arr, oracle))


def unique_finest_array(arr: np.ndarray, check_sorted: bool = True) -> np.ndarray:
    """Drop duplicates and ancestors from an SFC-pre-order-sorted key array.

    In pre-order an ancestor immediately precedes its descendants, so one
    adjacent-pair sweep removes every overlap: keep row i unless it is an
    ancestor of (or equal to) row i+1.  The sweep is curve-agnostic; the
    optional sortedness check assumes the Morton ordering (pass
    ``check_sorted=False`` for Hilbert-sorted input).
    """
    if len(arr) < 2:
        return arr.copy()
    if check_sorted:
        _assert_preorder(arr)
    drop = array_is_ancestor_or_equal(arr[:-1], arr[1:])
    keep = np.concatenate((~drop, [True]))
    return arr[keep]


def _assert_preorder(arr: np.ndarray) -> None:
    from .lattice import key_code

    hi, lo, lev = key_code(arr)
    bad = (hi[:-1] > hi[1:]) | ((hi[:-1] == hi[1:]) & (lo[:-1] > lo[1:])) | (
        (hi[:-1] == hi[1:]) & (lo[:-1] == lo[1:]) & (lev[:-1] > lev[1:])
    )
    if np.any(bad):
        raise ContractError("unique_finest requires SFC-sorted input")


def unique_finest(keys, check_sorted: bool = True):
    if isinstance(keys, LinearOctree):
        out = unique_finest_array(keys.data, check_sorted)
        return LinearOctree(keys.dim, out, sorted=True)
    keys = list(keys)
    if not keys:
        return []
    return array_to_keys(unique_finest_array(keys_to_array(keys), check_sorted))
