"""Finite sets of single-qubit unitaries and unitary t-design checks.

Sets are stored modulo global phase: each member is scaled so its first
nonzero entry (row-major) is real positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .tensor import H, I2, S, X, Y, Z, dag

DEDUP_TOL = 1e-9


def canonical_phase(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    flat = u.reshape(-1)
    k = int(np.flatnonzero(np.abs(flat) > 1e-12)[0])
    out = u * (np.conj(flat[k]) / abs(flat[k]))
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class UnitarySet:
    """Named list of qubit unitaries, one representative per phase class."""

    name: str
    members: tuple[np.ndarray, ...]

    def __post_init__(self):
        members = tuple(canonical_phase(u) for u in self.members)
        for u in members:
            if np.max(np.abs(u @ dag(u) - I2)) > 1e-12:
                raise ValueError(f"{self.name}: member is not unitary")
        for i, u in enumerate(members):
            for v in members[:i]:
                if abs(np.trace(dag(u) @ v)) > 2 - DEDUP_TOL:
                    raise ValueError(f"{self.name}: members proportional to each other")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _contains(members: list[np.ndarray], u: np.ndarray) -> bool:
    return any(np.max(np.abs(u - v)) < DEDUP_TOL for v in members)


def closure(generators, limit: int = 1000) -> list[np.ndarray]:
    """Group generated by ``generators`` modulo phase (breadth-first)."""
    gens = [canonical_phase(g) for g in generators]
    members = [canonical_phase(I2)]
    frontier = list(members)
    while frontier:
        new = []
        for u in frontier:
            for g in gens:
                v = canonical_phase(g @ u)
                if not _contains(members, v):
                    members.append(v)
                    new.append(v)
        if len(members) > limit:
            raise RuntimeError("closure did not terminate; generators may not form a finite group")
        frontier = new
    return members


@lru_cache(maxsize=None)
def pauli_set() -> UnitarySet:
    return UnitarySet("pauli", (I2, X, Y, Z))


@lru_cache(maxsize=None)
def clifford_mod_phase() -> UnitarySet:
    """The 24 phase classes of the single-qubit Clifford group, from H and S."""
    return UnitarySet("clifford", tuple(closure([H, S])))


V = H @ S


@lru_cache(maxsize=None)
def g_bar() -> UnitarySet:
    """``{1, V, V^2} x {1, X, Y, Z}`` with ``V = HS``; 12 members."""
    cyc = (I2, V, V @ V)
    return UnitarySet("gbar", tuple(c @ p for c in cyc for p in (I2, X, Y, Z)))


@lru_cache(maxsize=None)
def g_bar2() -> UnitarySet:
    """``{1, V, V^2} x {1, X}``; 6 members."""
    cyc = (I2, V, V @ V)
    return UnitarySet("gbar2", tuple(c @ p for c in cyc for p in (I2, X)))


SETS = {
    "pauli": pauli_set,
    "clifford": clifford_mod_phase,
    "gbar": g_bar,
    "gbar2": g_bar2,
}


def get_set(name: str) -> UnitarySet:
    try:
        return SETS[name]()
    except KeyError:
        raise KeyError(f"unknown unitary set {name!r}; choose from {sorted(SETS)}") from None


def frame_potential(us, t: int) -> float:
    """``(1/|U|^2) sum_{j,k} |tr(U_j^dag U_k)|^{2t}``."""
    members = np.array(list(us.members if hasattr(us, "members") else us))
    gram = np.einsum("jab,kab->jk", members.conj(), members)
    return float(np.mean(np.abs(gram) ** (2 * t)))


def _partitions(t: int, max_len: int):
    def rec(rem, largest, prefix):
        if rem == 0:
            yield tuple(prefix)
            return
        if len(prefix) == max_len:
            return
        for k in range(min(rem, largest), 0, -1):
            yield from rec(rem - k, k, prefix + [k])

    yield from rec(t, t, [])


def _irrep_dim(shape: tuple[int, ...]) -> int:
    # hook length formula
    t = sum(shape)
    cols = [sum(1 for r in shape if r > j) for j in range(shape[0])]
    hooks = 1
    for i, row in enumerate(shape):
        for j in range(row):
            hooks *= (row - j - 1) + (cols[j] - i - 1) + 1
    return math.factorial(t) // hooks


def haar_frame_potential(t: int, d: int = 2) -> float:
    """Haar value of the t-th frame potential: sum of squared S_t irrep
    dimensions over partitions of ``t`` with at most ``d`` rows."""
    if t not in (1, 2, 3):
        raise ValueError("t must be 1, 2 or 3")
    return float(sum(_irrep_dim(p) ** 2 for p in _partitions(t, d)))


def is_t_design(us, t: int, tol: float = 1e-9) -> bool:
    return frame_potential(us, t) <= haar_frame_potential(t) + tol
