"""Slater-determinant basis of n fermions on m orbitals.

A basis state is stored as an integer bitmask; bit ``s`` set means orbital
``s`` is occupied.  The creation operators of a determinant are always taken
in ascending orbital order, ``a+_{f1} ... a+_{fn} |0>`` with ``f1 < ... < fn``,
and every fermionic sign in the package follows from that convention.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .exceptions import BasisTooLarge, IndexOutOfRange, InvalidDimensions

DEFAULT_MAX_BASIS = 10**6


@dataclass(frozen=True, order=True)
class OrbitalSet:
    """Occupation bitmask of one Slater determinant."""

    mask: int

    @classmethod
    def from_orbitals(cls, orbitals: Iterable[int]) -> "OrbitalSet":
        mask = 0
        for s in orbitals:
            if s < 0:
                raise IndexOutOfRange(f"negative orbital index {s}")
            if mask >> s & 1:
                raise InvalidDimensions(f"orbital {s} listed twice")
            mask |= 1 << s
        return cls(mask)

    @property
    def n(self) -> int:
        return self.mask.bit_count()

    @property
    def orbitals(self) -> tuple[int, ...]:
        out = []
        mask, s = self.mask, 0
        while mask:
            if mask & 1:
                out.append(s)
            mask >>= 1
            s += 1
        return tuple(out)

    def occupied(self, s: int) -> bool:
        return bool(self.mask >> s & 1)

    def __repr__(self) -> str:
        return f"OrbitalSet({set(self.orbitals) or '{}'})"


class FockBasis:
    """Ordered list of all ``binomial(m, n)`` determinants, ascending by mask.

    Attributes
    ----------
    n, m : int
        Particle and orbital counts.
    masks : ndarray of int64
        Bitmask of state ``k`` at position ``k``; strictly increasing.
    """

    def __init__(self, n: int, m: int, masks: np.ndarray):
        self.n = n
        self.m = m
        self.masks = masks
        self.masks.setflags(write=False)
        self._index = {int(b): k for k, b in enumerate(masks)}

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self):
        return (OrbitalSet(int(b)) for b in self.masks)

    @property
    def states(self) -> list[OrbitalSet]:
        return list(self)

    def state_at(self, k: int) -> OrbitalSet:
        return OrbitalSet(int(self.masks[k]))

    def index_of(self, state: OrbitalSet | int) -> int:
        mask = state.mask if isinstance(state, OrbitalSet) else int(state)
        try:
            return self._index[mask]
        except KeyError:
            raise IndexOutOfRange(f"{OrbitalSet(mask)!r} is not in this basis") from None

    def __contains__(self, state: OrbitalSet | int) -> bool:
        mask = state.mask if isinstance(state, OrbitalSet) else int(state)
        return mask in self._index

    def occupations(self) -> np.ndarray:
        """(N, m) 0/1 matrix of orbital occupations."""
        bits = np.arange(self.m, dtype=np.int64)
        return ((self.masks[:, None] >> bits[None, :]) & 1).astype(np.int8)

    def __repr__(self) -> str:
        return f"FockBasis(n={self.n}, m={self.m}, N={len(self)})"


def enumerate_basis(n: int, m: int, max_size: int = DEFAULT_MAX_BASIS) -> FockBasis:
    """All n-particle determinants on m orbitals, sorted by integer mask."""
    if n < 0 or m < 0 or n > m:
        raise InvalidDimensions(f"need 0 <= n <= m, got n={n}, m={m}")
    if m > 62:
        raise InvalidDimensions("at most 62 orbitals fit the int64 mask")
    size = math.comb(m, n)
    if size > max_size:
        raise BasisTooLarge(f"binomial({m}, {n}) = {size} exceeds cap {max_size}")
    masks = [sum(1 << s for s in combo) for combo in itertools.combinations(range(m), n)]
    masks.sort()
    return FockBasis(n, m, np.array(masks, dtype=np.int64))


def _below(mask: int, s: int) -> int:
    return (mask & ((1 << s) - 1)).bit_count()


def _apply_pair_mask(mask: int, p: int, q: int, r: int, s: int) -> Optional[tuple[int, int]]:
    # a+_p a+_q a_s a_r, rightmost operator acts first
    if p == q or r == s:
        return None
    if not (mask >> r & 1):
        return None
    sign = _below(mask, r)
    mask ^= 1 << r
    if not (mask >> s & 1):
        return None
    sign += _below(mask, s)
    mask ^= 1 << s
    if mask >> q & 1:
        return None
    sign += _below(mask, q)
    mask |= 1 << q
    if mask >> p & 1:
        return None
    sign += _below(mask, p)
    mask |= 1 << p
    return mask, -1 if sign & 1 else 1


def apply_pair_operator(
    state: OrbitalSet, p: int, q: int, r: int, s: int, m: Optional[int] = None
) -> Optional[tuple[OrbitalSet, int]]:
    """Apply ``a+_p a+_q a_s a_r`` to a determinant.

    Returns the resulting determinant and its sign (+1 or -1), or None when
    the operator annihilates the state.  ``p == q`` or ``r == s`` gives None
    since the square of a fermion operator vanishes.

    Raises
    ------
    IndexOutOfRange
        If any index is negative or, when `m` is given, not below `m`.
    """
    for x in (p, q, r, s):
        if x < 0 or (m is not None and x >= m):
            raise IndexOutOfRange(f"orbital index {x} outside [0, {m})")
    out = _apply_pair_mask(state.mask, p, q, r, s)
    if out is None:
        return None
    return OrbitalSet(out[0]), out[1]


def orbital_distance(a: OrbitalSet, b: OrbitalSet) -> int:
    """Number of orbitals occupied in `a` but empty in `b`."""
    return (a.mask & ~b.mask).bit_count()


def interaction_steps(a: OrbitalSet, b: OrbitalSet) -> int:
    """Two-body steps needed to connect `a` and `b`: ceil(distance / 2)."""
    return -(-orbital_distance(a, b) // 2)


def pair_index_table(m: int) -> np.ndarray:
    """(m, m) lookup giving the position of pair (p, q), p < q, in lex order; -1 elsewhere."""
    table = -np.ones((m, m), dtype=np.int64)
    for k, (p, q) in enumerate(itertools.combinations(range(m), 2)):
        table[p, q] = k
    return table


@functools.lru_cache(maxsize=8)
def two_body_transitions(n: int, m: int) -> dict[str, np.ndarray]:
    """Every nonzero action of ``a+_p a+_q a_s a_r`` (p<q, r<s) on the basis.

    Returned arrays are aligned: basis state ``col`` is mapped to ``row`` with
    ``sign`` by the operator whose created pair has index ``create`` and whose
    annihilated pair has index ``annihilate`` (see :func:`pair_index_table`).
    The structure depends only on (n, m), so it is cached and shared by all
    random realizations.
    """
    basis = enumerate_basis(n, m)
    pidx = pair_index_table(m)
    rows, cols, cre, ann, sgn = [], [], [], [], []
    index = basis._index
    for col, mask in enumerate(basis.masks.tolist()):
        occ = [s for s in range(m) if mask >> s & 1]
        for r, s in itertools.combinations(occ, 2):
            rest = mask & ~(1 << r) & ~(1 << s)
            free = [x for x in range(m) if not rest >> x & 1]
            a = pidx[r, s]
            for p, q in itertools.combinations(free, 2):
                new, sign = _apply_pair_mask(mask, p, q, r, s)
                rows.append(index[new])
                cols.append(col)
                cre.append(pidx[p, q])
                ann.append(a)
                sgn.append(sign)
    out = {
        "row": np.array(rows, dtype=np.int64),
        "col": np.array(cols, dtype=np.int64),
        "create": np.array(cre, dtype=np.int64),
        "annihilate": np.array(ann, dtype=np.int64),
        "sign": np.array(sgn, dtype=np.int8),
    }
    for arr in out.values():
        arr.setflags(write=False)
    return out
