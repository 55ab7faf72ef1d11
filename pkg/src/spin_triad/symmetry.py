"""Permutation operators, (anti)symmetric projectors and twirls."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError
from .tensor import I2, dag, kron, kron_power, ket, num_qubits

SQRT2 = math.sqrt(2)

# symmetric two-qubit basis ket (|01> + |10>)/sqrt(2) and the singlet
SYM_S = (ket("01") + ket("10")) / SQRT2
SINGLET = (ket("01") - ket("10")) / SQRT2
SYM2_BASIS = (ket("00"), SYM_S, ket("11"))


@dataclass(frozen=True)
class Permutation:
    """Bijection of party indices ``0..n-1``; ``image[i]`` is where ``i`` goes.

    Composition follows function composition: ``(s * t)(i) == s(t(i))``.
    """

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if sorted(image) != list(range(len(image))):
            raise ValueError(f"{self.image} is not a bijection on 0..{len(image) - 1}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def cycle(cls, n: int, *points: int) -> "Permutation":
        """Cycle ``points[0] -> points[1] -> ... -> points[0]`` on ``n`` parties."""
        image = list(range(n))
        for a, b in zip(points, points[1:] + points[:1]):
            image[a] = b
        return cls(tuple(image))

    def __len__(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if len(other) != len(self):
            raise ValueError("permutations act on different party counts")
        return Permutation(tuple(self.image[other.image[i]] for i in range(len(self))))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    @property
    def parity(self) -> int:
        seen, sign = set(), 1
        for start in range(len(self)):
            if start in seen:
                continue
            length, j = 0, start
            while j not in seen:
                seen.add(j)
                j = self.image[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        return sign


def all_permutations(n: int) -> list[Permutation]:
    return [Permutation(p) for p in itertools.permutations(range(n))]


@lru_cache(maxsize=None)
def _perm_matrix(image: tuple[int, ...]) -> np.ndarray:
    n = len(image)
    w = np.zeros((2**n, 2**n), dtype=complex)
    for x in range(2**n):
        bits = [(x >> (n - 1 - i)) & 1 for i in range(n)]
        out = [0] * n
        for i, b in enumerate(bits):
            out[image[i]] = b
        y = int("".join(map(str, out)), 2)
        w[y, x] = 1.0
    w.setflags(write=False)
    return w


def permutation_operator(sigma: Permutation | Sequence[int], n: int | None = None) -> np.ndarray:
    """Unitary that moves the tensor factor at position ``i`` to ``sigma(i)``.

    Satisfies ``W(s) @ W(t) == W(s * t)``.
    """
    if not isinstance(sigma, Permutation):
        sigma = Permutation(tuple(sigma))
    if n is not None and n != len(sigma):
        raise ShapeError(f"permutation acts on {len(sigma)} parties, not {n}")
    if len(sigma) > 4:
        raise ShapeError("register capped at 4 qubits")
    return _perm_matrix(sigma.image)


@lru_cache(maxsize=None)
def sym_projector(n: int) -> np.ndarray:
    """Projector onto the symmetric subspace of ``n`` qubits (rank ``n + 1``)."""
    if not 1 <= n <= 4:
        raise ShapeError("n must be between 1 and 4")
    p = sum(permutation_operator(s) for s in all_permutations(n)) / math.factorial(n)
    p.setflags(write=False)
    return p


@lru_cache(maxsize=None)
def antisym_projector(n: int) -> np.ndarray:
    """Projector onto the antisymmetric subspace of ``n`` qubits."""
    if not 1 <= n <= 4:
        raise ShapeError("n must be between 1 and 4")
    p = sum(s.parity * permutation_operator(s) for s in all_permutations(n))
    p = p / math.factorial(n)
    p.setflags(write=False)
    return p


def sym2_state(a: complex, b: complex, c: complex, phi: float = 0.0) -> np.ndarray:
    """``a|00> + b|S> + c e^{i phi}|11>`` with ``|S> = (|01> + |10>)/sqrt(2)``."""
    return a * SYM2_BASIS[0] + b * SYM2_BASIS[1] + c * np.exp(1j * phi) * SYM2_BASIS[2]


def sym2_coefficients(phi: np.ndarray) -> np.ndarray:
    """Amplitudes of a two-qubit ket on ``|00>, |S>, |11>``."""
    return np.array([np.vdot(b, phi) for b in SYM2_BASIS])


def t_psi_closed_form(a: float, b: float, c: float, tol: float = 1e-9) -> np.ndarray:
    """Haar twirl of ``(a|00> + b|S> + c e^{i phi}|11>) (x) |0>`` in closed form.

    The result does not depend on the relative phase ``phi``.
    """
    if abs(a * a + b * b + c * c - 1) > tol:
        raise ValueError("coefficients must satisfy a^2 + b^2 + c^2 = 1")
    p3 = sym_projector(3)
    p2i = kron(sym_projector(2), I2)
    return (3 * a * a + 2 * b * b + c * c) / 12 * p3 + (b * b + 2 * c * c) / 6 * (p2i - p3)


def twirl_over_set(o: np.ndarray, unitaries: Iterable[np.ndarray], t: int) -> np.ndarray:
    """Average of ``U^{(x)t} o U^{dag (x)t}`` over a finite set of qubit unitaries."""
    o = np.asarray(o, dtype=complex)
    if o.ndim != 2 or num_qubits(o) != t:
        raise ShapeError(f"operator does not act on {t} qubits")
    if hasattr(unitaries, "members"):
        unitaries = unitaries.members
    unitaries = list(unitaries)
    acc = np.zeros_like(o)
    for u in unitaries:
        ut = kron_power(u, t)
        acc += ut @ o @ dag(ut)
    return acc / len(unitaries)
