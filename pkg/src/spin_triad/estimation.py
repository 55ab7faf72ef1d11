"""Estimation fidelity of qubit POVMs acting on ``N`` copies of a pure state.

For a POVM element ``M`` on ``N`` qubits the map

    Q(M) = (N+1)! tr_{0..N-1}[P_{N+1} (M (x) 1)]

returns a single-qubit operator whose largest eigenvalue, summed over
elements and divided by ``d (d+1) ... (d+N)``, is the best average
fidelity reachable with that POVM. The optimal guess for outcome ``j`` is
the top eigenvector of ``Q(M_j)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import _parallel
from .errors import InvalidPovmError, ShapeError
from .symmetry import antisym_projector, sym_projector
from .tensor import (
    I2,
    check_hermitian,
    dag,
    from_dict,
    haar_states,
    herm_eig,
    kron,
    num_qubits,
    partial_trace,
    spectral_norm,
    to_dict,
)

POVM_TOL = 1e-10
PRUNE_TRACE = 1e-12


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators summing to ``space`` (identity by default).

    Elements with trace below ``1e-12`` are dropped on construction.
    Incomplete POVMs are expressed by passing a projector as ``space``.
    """

    elements: tuple[np.ndarray, ...]
    space: np.ndarray | None = None
    labels: tuple[str, ...] | None = None
    tol: float = field(default=POVM_TOL, repr=False)

    def __post_init__(self):
        elems = [np.array(e, dtype=complex) for e in self.elements]
        if not elems and self.space is None:
            raise InvalidPovmError("POVM has no elements")
        labels = list(self.labels) if self.labels is not None else [str(i) for i in range(len(elems))]
        if len(labels) != len(elems):
            raise InvalidPovmError("label count does not match element count")
        try:
            n = num_qubits(elems[0] if elems else np.asarray(self.space))
            for e in elems:
                if e.ndim != 2 or num_qubits(e) != n:
                    raise ShapeError("elements act on different registers")
        except ShapeError as exc:
            raise InvalidPovmError(str(exc)) from exc
        space = np.eye(2**n, dtype=complex) if self.space is None else np.array(self.space, dtype=complex)
        if space.shape != (2**n, 2**n):
            raise InvalidPovmError("space operator does not match the element register")

        kept = [(e, l) for e, l in zip(elems, labels) if abs(np.trace(e)) >= PRUNE_TRACE]
        if not kept and np.max(np.abs(space)) > self.tol:
            raise InvalidPovmError("every element is zero")
        for e, label in kept:
            try:
                check_hermitian(e, self.tol)
            except ValueError as exc:
                raise InvalidPovmError(f"element {label}: {exc}") from exc
            lo = np.linalg.eigvalsh(e)[0]
            if lo < -self.tol:
                raise InvalidPovmError(f"element {label} has eigenvalue {lo:.3e} < 0")
        total = sum((e for e, _ in kept), np.zeros_like(space))
        err = float(np.max(np.abs(total - space)))
        if err > self.tol:
            raise InvalidPovmError(f"elements sum to the space only within {err:.3e}")
        for e, _ in kept:
            e.setflags(write=False)
        space.setflags(write=False)
        object.__setattr__(self, "elements", tuple(e for e, _ in kept))
        object.__setattr__(self, "labels", tuple(l for _, l in kept))
        object.__setattr__(self, "space", space)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, j: int) -> np.ndarray:
        return self.elements[j]

    @property
    def n_qubits(self) -> int:
        return num_qubits(self.space)

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        """Born-rule outcome probabilities for a ket or density matrix."""
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim == 1:
            return np.array([np.vdot(rho, e @ rho).real for e in self.elements])
        return np.array([np.trace(e @ rho).real for e in self.elements])

    def to_dict(self) -> dict:
        return {
            "elements": [to_dict(e) for e in self.elements],
            "space": to_dict(self.space),
            "labels": list(self.labels),
        }

    @classmethod
    def from_dict(cls, d) -> "Povm":
        """Accepts the :meth:`to_dict` form or a bare list of operator records."""
        try:
            if isinstance(d, list):
                return cls(tuple(from_dict(e) for e in d))
            space = from_dict(d["space"]) if d.get("space") is not None else None
            labels = tuple(d["labels"]) if d.get("labels") is not None else None
            return cls(tuple(from_dict(e) for e in d["elements"]), space, labels)
        except (KeyError, TypeError, AttributeError, ShapeError) as exc:
            raise InvalidPovmError(f"malformed POVM record: {exc}") from exc


def q_map(m: np.ndarray, n: int | None = None) -> np.ndarray:
    """Single-qubit operator ``(n+1)! tr_{0..n-1}[P_{n+1} (m (x) 1)]``."""
    m = np.asarray(m, dtype=complex)
    k = num_qubits(m)
    if m.ndim != 2 or (n is not None and k != n):
        raise ShapeError(f"operator acts on {k} qubits, expected {n}")
    if k > 3:
        raise ShapeError("q_map supports at most 3 copies")
    big = sym_projector(k + 1) @ kron(m, I2)
    return math.factorial(k + 1) * partial_trace(big, keep=[k])


def fidelity_divisor(n: int, d: int = 2) -> int:
    return math.prod(range(d, d + n + 1))


def estimation_fidelity(p: Povm) -> float:
    """Sum of spectral norms of ``Q(M_j)`` over ``d (d+1) ... (d+N)``."""
    n = p.n_qubits
    return sum(spectral_norm(q_map(m)) for m in p) / fidelity_divisor(n)


def optimal_estimators(p: Povm) -> list[np.ndarray]:
    """Top eigenvector of ``Q(M_j)`` for every element (phase-fixed)."""
    return [herm_eig(q_map(m))[1][0] for m in p]


def _mc_block(elements: np.ndarray, estimators: np.ndarray, n: int, sample_outcomes: bool):
    def run(rng: np.random.Generator, count: int):
        psi = haar_states(rng, count)
        big = psi
        for _ in range(n - 1):
            big = np.einsum("sa,sb->sab", big, psi).reshape(count, -1)
        probs = np.einsum("sa,jab,sb->sj", big.conj(), elements, big).real.clip(min=0)
        fids = np.abs(psi.conj() @ estimators.T) ** 2
        if not sample_outcomes:
            return _parallel.moments((probs * fids).sum(axis=1))
        cdf = np.cumsum(probs, axis=1)
        u = rng.random(count) * cdf[:, -1]
        js = np.minimum((cdf < u[:, None]).sum(axis=1), len(elements) - 1)
        return _parallel.moments(fids[np.arange(count), js])

    return run


def average_fidelity_mc(
    p: Povm,
    estimators: Sequence[np.ndarray],
    samples: int,
    seed: int,
    workers: int = 1,
    sample_outcomes: bool = True,
) -> tuple[float, float]:
    """Monte Carlo average fidelity over Haar-random input states.

    Each sample draws a state, draws an outcome from the Born rule and
    scores the overlap of the state with that outcome's estimator. With
    ``sample_outcomes=False`` the outcome is averaged out exactly instead,
    which lowers the variance (to zero for covariant POVMs).

    Returns ``(mean, standard error)``. Results depend only on
    ``(samples, seed)``; ``workers`` only changes wall-clock time.
    """
    if len(estimators) != len(p):
        raise ValueError(f"{len(estimators)} estimators for {len(p)} POVM elements")
    elements = np.array(p.elements)
    est = np.array([np.asarray(e, dtype=complex) for e in estimators])
    block = _mc_block(elements, est, p.n_qubits, sample_outcomes)
    parts = _parallel.run_blocks(block, samples, seed, workers)
    n, mean, m2 = _parallel.merge_moments(parts)
    var = m2 / (n - 1) if n > 1 else 0.0
    return mean, math.sqrt(var / n)


def _restrict(p: Povm, proj_first: np.ndarray) -> Povm:
    n = p.n_qubits
    if n < 2:
        raise ShapeError("restriction needs at least two copies")
    proj = kron(proj_first, I2)
    elems = [proj @ m @ proj for m in p]
    return Povm(tuple(elems), space=proj, labels=p.labels)


def restrict_sym(p: Povm) -> Povm:
    """Conjugate every element by ``P_{N-1} (x) 1``; zero elements are dropped."""
    return _restrict(p, sym_projector(p.n_qubits - 1))


def restrict_antisym(p: Povm) -> Povm:
    """Conjugate every element by ``P^A_{N-1} (x) 1``; zero elements are dropped."""
    return _restrict(p, antisym_projector(p.n_qubits - 1))


def coarse_grain(p: Povm, lam: np.ndarray, tol: float = 1e-12) -> Povm:
    """Post-process outcomes: ``A_j = sum_k lam[j, k] B_k``.

    ``lam`` must be column-stochastic with one column per element of ``p``.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 2 or lam.shape[1] != len(p):
        raise ValueError(f"stochastic matrix needs {len(p)} columns, got shape {lam.shape}")
    if np.any(lam < -tol) or np.max(np.abs(lam.sum(axis=0) - 1)) > 1e-9:
        raise ValueError("matrix is not column-stochastic")
    stack = np.array(p.elements)
    elems = np.einsum("jk,kab->jab", lam, stack)
    return Povm(tuple(elems), space=p.space)


def random_povm(
    rng: np.random.Generator, n_qubits: int = 3, n_elements: int = 6, rank: int = 1
) -> Povm:
    """Random complete POVM: ``S^{-1/2} A_k S^{-1/2}`` for random PSD ``A_k``."""
    dim = 2**n_qubits
    if n_elements * rank < dim:
        raise ValueError(f"need n_elements * rank >= {dim} for a complete POVM")
    parts = []
    for _ in range(n_elements):
        g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
        parts.append(g @ dag(g))
    total = sum(parts)
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(w**-0.5) @ dag(v)
    elems = []
    for a in parts:
        e = inv_sqrt @ a @ inv_sqrt
        elems.append((e + dag(e)) / 2)
    # absorb rounding so completeness holds to machine precision
    resid = np.eye(dim) - sum(elems)
    elems[-1] = elems[-1] + resid
    return Povm(tuple(elems))


@dataclass
class FidelityReport:
    strategy: str
    analytic: float | None
    computed: float
    mc_mean: float | None = None
    mc_stderr: float | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def abs_error(self) -> float | None:
        if self.analytic is None:
            return None
        return abs(self.computed - self.analytic)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["abs_error"] = self.abs_error
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


FIDELITY_REPORT_SCHEMA = {
    "type": "object",
    "required": ["strategy", "analytic", "computed", "mc_mean", "mc_stderr", "samples", "seed"],
    "properties": {
        "strategy": {"type": "string"},
        "analytic": {"type": ["number", "null"]},
        "computed": {"type": "number"},
        "mc_mean": {"type": ["number", "null"]},
        "mc_stderr": {"type": ["number", "null"]},
        "samples": {"type": ["integer", "null"]},
        "seed": {"type": ["integer", "null"]},
        "abs_error": {"type": ["number", "null"]},
    },
}
