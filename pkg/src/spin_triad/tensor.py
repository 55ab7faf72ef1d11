"""Dense linear algebra on small qubit registers.

Operators and kets are plain complex numpy arrays. Every subsystem is a
qubit, so the register shape of an array is ``[2] * n`` with ``n`` inferred
from its size. Subsystem 0 is the leftmost tensor factor, i.e. the basis
label ``|i0 i1 ... >`` maps to the integer with ``i0`` most significant.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidStateError, NotHermitianError, ShapeError

HERM_TOL = 1e-10
MAX_QUBITS = 4


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


I2 = _frozen(np.eye(2))
X = _frozen([[0, 1], [1, 0]])
Y = _frozen([[0, -1j], [1j, 0]])
Z = _frozen([[1, 0], [0, -1]])
H = _frozen(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
S = _frozen([[1, 0], [0, 1j]])


def num_qubits(a: np.ndarray) -> int:
    """Number of qubits of a ket (1d) or square operator (2d)."""
    a = np.asarray(a)
    if a.ndim == 2 and a.shape[0] != a.shape[1]:
        raise ShapeError(f"operator must be square, got {a.shape}")
    if a.ndim not in (1, 2):
        raise ShapeError(f"expected a ket or an operator, got ndim={a.ndim}")
    side = a.shape[0]
    n = side.bit_length() - 1
    if side < 1 or 2**n != side:
        raise ShapeError(f"side {side} is not a power of two")
    if n > MAX_QUBITS:
        raise ShapeError(f"{n} qubits exceeds the register cap of {MAX_QUBITS}")
    return n


def ket(bits: str | Sequence[int]) -> np.ndarray:
    """Computational basis ket, e.g. ``ket("01")``."""
    bits = [int(b) for b in bits]
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)) or "0", 2)] = 1.0
    return v


def proj(v: np.ndarray) -> np.ndarray:
    """Outer product ``|v><v|``."""
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(a))


def kron(*ops: np.ndarray) -> np.ndarray:
    """Tensor product, leftmost argument is the most significant factor."""
    if not ops:
        raise ShapeError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def kron_power(a: np.ndarray, n: int) -> np.ndarray:
    """``a`` tensored with itself ``n`` times."""
    return kron(*([a] * n))


def permute_qubits(a: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors.

    The factor currently at position ``order[k]`` moves to position ``k``.
    Works for kets and operators.
    """
    a = np.asarray(a, dtype=complex)
    n = num_qubits(a)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ShapeError(f"{order} is not a permutation of {n} qubits")
    if a.ndim == 1:
        return a.reshape([2] * n).transpose(order).reshape(-1)
    t = a.reshape([2] * (2 * n))
    t = t.transpose(order + [n + k for k in order])
    return t.reshape(2**n, 2**n)


def partial_trace(a: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Trace out every qubit not listed in ``keep`` (0-based indices).

    Kept qubits stay in their original relative order.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        a = proj(a)
    n = num_qubits(a)
    keep = sorted(set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise ShapeError(f"keep={keep} out of range for {n} qubits")
    t = a.reshape([2] * (2 * n))
    m = n
    for q in reversed(range(n)):
        if q not in keep:
            t = np.trace(t, axis1=q, axis2=q + m)
            m -= 1
    return t.reshape(2**m, 2**m)


def hermiticity_error(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - dag(a)))) if a.size else 0.0


def check_hermitian(a: np.ndarray, tol: float = HERM_TOL) -> np.ndarray:
    """Return ``a`` as a complex array, raising if it is not Hermitian.

    Inputs are never symmetrized.
    """
    a = np.asarray(a, dtype=complex)
    num_qubits(a)
    if a.ndim != 2:
        raise ShapeError("expected an operator")
    err = hermiticity_error(a)
    if err > tol:
        raise NotHermitianError(f"max |A - A^dag| = {err:.3e} exceeds {tol:.1e}")
    return a


def fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate the global phase so the first largest-magnitude entry is real >= 0."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    top = mags.max()
    if top == 0:
        return v.copy()
    i = int(np.flatnonzero(mags >= top - tol)[0])
    return v * (np.conj(v[i]) / mags[i])


def herm_eig(a: np.ndarray, tol: float = HERM_TOL) -> tuple[np.ndarray, list[np.ndarray]]:
    """Eigen-decomposition of a Hermitian operator.

    Returns
    -------
    eigenvalues : ndarray
        Real, sorted descending.
    eigenvectors : list of ndarray
        Orthonormal, phase-fixed with :func:`fix_phase`. Within a degenerate
        eigenspace the solver's order is kept.
    """
    a = check_hermitian(a, tol)
    w, v = np.linalg.eigh(a)
    scale = max(1.0, float(np.max(np.abs(w))))
    key = -np.round(w / scale, 9)
    order = np.argsort(key, kind="stable")
    return w[order], [fix_phase(v[:, k]) for k in order]


def spectral_norm(a: np.ndarray, tol: float = HERM_TOL) -> float:
    """Largest absolute eigenvalue of a Hermitian operator."""
    a = check_hermitian(a, tol)
    return float(np.max(np.abs(np.linalg.eigvalsh(a))))


def min_eigenvalue(a: np.ndarray, tol: float = HERM_TOL) -> float:
    return float(np.linalg.eigvalsh(check_hermitian(a, tol))[0])


def check_state(psi: np.ndarray, n: int | None = None, tol: float = 1e-9) -> np.ndarray:
    """Validate a normalized ket, optionally on exactly ``n`` qubits."""
    try:
        psi = np.asarray(psi, dtype=complex)
        if psi.ndim != 1:
            raise ShapeError("state must be a vector")
        m = num_qubits(psi)
    except (ShapeError, TypeError, ValueError) as exc:
        raise InvalidStateError(str(exc)) from exc
    if n is not None and m != n:
        raise InvalidStateError(f"expected a {n}-qubit state, got {m} qubits")
    if abs(np.linalg.norm(psi) - 1) > tol:
        raise InvalidStateError(f"state norm {np.linalg.norm(psi):.6g} != 1")
    return psi


# -- random sampling --------------------------------------------------------


def haar_states(rng: np.random.Generator, size: int) -> np.ndarray:
    """Haar-random single-qubit kets, shape ``(size, 2)``.

    Two complex standard Gaussians per state, normalized.
    """
    g = rng.standard_normal((size, 2)) + 1j * rng.standard_normal((size, 2))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def haar_unitaries(rng: np.random.Generator, size: int, dim: int = 2) -> np.ndarray:
    """Haar-random unitaries, shape ``(size, dim, dim)``, via QR with phase fix."""
    g = rng.standard_normal((size, dim, dim)) + 1j * rng.standard_normal((size, dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


# -- JSON form ----------------------------------------------------------------


def to_dict(a: np.ndarray) -> dict:
    """``{"shape": [2, ...], "re": ..., "im": ...}`` for a ket or an operator."""
    a = np.asarray(a, dtype=complex)
    n = num_qubits(a)
    return {"shape": [2] * n, "re": a.real.tolist(), "im": a.imag.tolist()}


def from_dict(d: dict) -> np.ndarray:
    """Inverse of :func:`to_dict`; validates that the shape matches the data."""
    try:
        shape = [int(s) for s in d["shape"]]
        a = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"malformed operator record: {exc}") from exc
    if any(s != 2 for s in shape):
        raise ShapeError("only qubit subsystems are supported")
    side = int(np.prod(shape)) if shape else 1
    if a.shape not in ((side,), (side, side)):
        raise ShapeError(f"data shape {a.shape} does not match register {shape}")
    return a
