"""Named POVMs for three parallel qubit spins, adaptive protocols and state utilities.

Qubits 0, 1, 2 are Alice, Bob and Charlie.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _parallel
from .designs import g_bar, g_bar2
from .errors import InvalidPovmError, InvalidStateError
from .estimation import Povm, optimal_estimators
from .symmetry import (
    SYM2_BASIS,
    antisym_projector,
    permutation_operator,
    Permutation,
    sym2_coefficients,
    sym2_state,
    sym_projector,
)
from .tensor import (
    I2,
    X,
    Y,
    Z,
    S,
    check_state,
    dag,
    haar_states,
    fix_phase,
    herm_eig,
    ket,
    kron,
    kron_power,
    partial_trace,
    permute_qubits,
    proj,
)

SQRT2 = math.sqrt(2)
PLUS = np.array([1, 1], dtype=complex) / SQRT2
MINUS = np.array([1, -1], dtype=complex) / SQRT2
Y_PLUS = np.array([1, 1j], dtype=complex) / SQRT2
Y_MINUS = np.array([1, -1j], dtype=complex) / SQRT2
KET0, KET1 = ket("0"), ket("1")

PAULI_EIGENSTATES = (KET0, KET1, PLUS, MINUS, Y_PLUS, Y_MINUS)

# weight of the |00><00| element in the optimal 1->2 POVM
P_1TO2 = (47 - 3 * math.sqrt(41)) / 216

ANALYTIC = {
    "local-xyz": 0.5 + math.sqrt(3) / 6,
    "m-1to2": 0.5 + (11 + math.sqrt(41)) / 60,
    "m-2to1": 0.5 + math.sqrt(22) / 16,
    "collective-octahedron": 4 / 5,
}
ANALYTIC_EXPR = {
    "local-xyz": "1/2 + √3/6",
    "m-1to2": "1/2 + (11+√41)/60",
    "m-2to1": "1/2 + √22/16",
    "collective-octahedron": "4/5",
}


# -- states ---------------------------------------------------------------------


def phi_tilde() -> np.ndarray:
    """Symmetric two-qubit state with concurrence 1/8."""
    r7 = math.sqrt(7)
    return math.sqrt(8 + 3 * r7) / 4 * ket("00") + math.sqrt(8 - 3 * r7) / 4 * ket("11")


def psi_tilde() -> np.ndarray:
    return kron(phi_tilde(), PLUS)


def upsilon() -> np.ndarray:
    p = P_1TO2
    return sym2_state(math.sqrt((1 - 3 * p) / (3 - 3 * p)), 1 / math.sqrt(3 - 3 * p), 1 / math.sqrt(3 - 3 * p))


# -- POVMs ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def octahedron_collective() -> Povm:
    """Six ``(2/3)|psi_j><psi_j|^{(x)3}`` on Pauli eigenstates plus ``1 - P_3``."""
    elems = [2 / 3 * proj(kron_power(v, 3)) for v in PAULI_EIGENSTATES]
    elems.append(np.eye(8) - sym_projector(3))
    labels = [f"E{j}" for j in range(1, 8)]
    return Povm(tuple(elems), labels=tuple(labels))


@lru_cache(maxsize=None)
def local_xyz() -> Povm:
    """Alice measures X, Bob Y, Charlie Z."""
    elems, labels = [], []
    for sa, a in (("+", PLUS), ("-", MINUS)):
        for sb, b in (("+", Y_PLUS), ("-", Y_MINUS)):
            for sc, c in (("0", KET0), ("1", KET1)):
                elems.append(proj(kron(a, b, c)))
                labels.append(f"x{sa}y{sb}z{sc}")
    return Povm(tuple(elems), labels=tuple(labels))


@lru_cache(maxsize=None)
def m2_povm() -> Povm:
    """Two-qubit POVM: ``(1/2) U^{(x)2}|Phi~><Phi~|U^{dag(x)2}`` over G2-bar, plus the singlet."""
    phi = phi_tilde()
    elems = [0.5 * proj(kron(u, u) @ phi) for u in g_bar2()]
    elems.append(antisym_projector(2))
    labels = [f"G2[{j}]" for j in range(len(elems) - 1)] + ["anti"]
    return Povm(tuple(elems), labels=tuple(labels))


@lru_cache(maxsize=None)
def m_2to1() -> Povm:
    """13-element optimal 2+1 adaptive POVM."""
    psi = psi_tilde()
    elems = [0.5 * proj(kron_power(u, 3) @ psi) for u in g_bar()]
    elems.append(kron(antisym_projector(2), I2))
    labels = [f"G[{j}]" for j in range(len(elems) - 1)] + ["anti"]
    return Povm(tuple(elems), labels=tuple(labels))


def _k_elements() -> list[np.ndarray]:
    p = P_1TO2
    ups = upsilon()
    ss = kron(S, S)
    elems = []
    for j in range(4):
        w = np.linalg.matrix_power(ss, j)
        elems.append((3 - 3 * p) / 4 * proj(w @ ups))
    elems.append(3 * p * proj(ket("00")))
    elems.append(np.array(antisym_projector(2)))
    return elems


@lru_cache(maxsize=None)
def k0_povm() -> Povm:
    return Povm(tuple(_k_elements()), labels=tuple(f"K{j}" for j in range(6)))


@lru_cache(maxsize=None)
def k1_povm() -> Povm:
    xx = kron(X, X)
    return Povm(tuple(xx @ k @ xx for k in _k_elements()), labels=tuple(f"XK{j}X" for j in range(6)))


def z_basis() -> Povm:
    return Povm((proj(KET0), proj(KET1)), labels=("0", "1"))


@dataclass(frozen=True, eq=False)
class Protocol:
    """One-way adaptive measurement.

    ``first`` acts on ``first_qubits``; on outcome ``j`` the complementary
    qubits are measured with ``branches[j]``.
    """

    first: Povm
    branches: tuple[Povm, ...]
    first_qubits: tuple[int, ...]
    direction: str
    n_qubits: int = 3

    def __post_init__(self):
        if len(self.branches) != len(self.first):
            raise InvalidPovmError(f"{len(self.branches)} branches for {len(self.first)} first-stage outcomes")
        if self.first.n_qubits != len(self.first_qubits):
            raise InvalidPovmError("first stage does not match its qubit placement")
        for b in self.branches:
            if b.n_qubits != len(self.second_qubits):
                raise InvalidPovmError("branch does not match the complementary qubits")

    @property
    def second_qubits(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n_qubits) if q not in self.first_qubits)

    def outcomes(self) -> list[tuple[int, int]]:
        return [(j, k) for j, b in enumerate(self.branches) for k in range(len(b))]

    def flat(self) -> Povm:
        return adaptive_compose(self.first, self.branches, self.first_qubits, self.n_qubits)


def adaptive_compose(
    first: Povm,
    branches: Sequence[Povm],
    first_qubits: Sequence[int] = (0, 1),
    n_qubits: int = 3,
) -> Povm:
    """Flat POVM ``{A_j (x) B_jk}`` with factors reordered to qubit order 0..n-1.

    Elements are ordered by ``(j, k)`` and labelled ``"j.k"``.
    """
    if len(branches) != len(first):
        raise InvalidPovmError(f"{len(branches)} branches for {len(first)} first-stage outcomes")
    first_qubits = list(first_qubits)
    second = [q for q in range(n_qubits) if q not in first_qubits]
    placed = first_qubits + second
    order = [placed.index(q) for q in range(n_qubits)]
    elems, labels = [], []
    for j, (a, branch) in enumerate(zip(first, branches)):
        for k, b in enumerate(branch):
            elems.append(permute_qubits(kron(a, b), order))
            labels.append(f"{j}.{k}")
    space = permute_qubits(kron(first.space, branches[0].space), order)
    return Povm(tuple(elems), space=space, labels=tuple(labels))


@lru_cache(maxsize=None)
def protocol_2to1() -> Protocol:
    """Alice and Bob measure M2; Charlie measures the eigenbasis of U X U^dag."""
    branches = []
    for u in g_bar2():
        branches.append(Povm((proj(u @ PLUS), proj(u @ MINUS)), labels=("+", "-")))
    branches.append(Povm((np.array(I2),), labels=("1",)))
    return Protocol(m2_povm(), tuple(branches), (0, 1), "2->1")


@lru_cache(maxsize=None)
def protocol_1to2() -> Protocol:
    """Charlie measures Z; Alice and Bob then measure K0 or K1."""
    return Protocol(z_basis(), (k0_povm(), k1_povm()), (2,), "1->2")


def m_1to2() -> tuple[Povm, Protocol]:
    """12-element optimal 1+2 adaptive POVM and the protocol realizing it."""
    proto = protocol_1to2()
    return proto.flat(), proto


def _clean_probs(p: np.ndarray) -> np.ndarray:
    p = np.where(np.abs(p) < 1e-14, 0.0, p)
    if np.any(p < 0):
        raise InvalidPovmError("negative outcome probability")
    return p / p.sum()


def simulate_protocol(
    proto: Protocol, psi: np.ndarray, shots: int, seed: int, workers: int = 1
) -> dict[tuple[int, int], int]:
    """Sample the protocol on ``psi^{(x)3}`` shot by shot.

    The first outcome is drawn from its Born marginal, the second from the
    branch conditioned on it. Stages act on disjoint copies of a product
    state, so the conditional law is the branch's Born rule on the
    remaining copies.
    """
    psi = check_state(psi, 1)
    p1 = _clean_probs(proto.first.probabilities(kron_power(psi, len(proto.first_qubits))))
    rest = kron_power(psi, len(proto.second_qubits))
    p2 = [_clean_probs(b.probabilities(rest)) for b in proto.branches]

    def run(rng: np.random.Generator, count: int) -> np.ndarray:
        hist = np.zeros((len(p1), max(len(b) for b in p2)), dtype=np.int64)
        js = rng.choice(len(p1), size=count, p=p1)
        for j in range(len(p1)):
            m = int(np.count_nonzero(js == j))
            if m:
                ks = rng.choice(len(p2[j]), size=m, p=p2[j])
                hist[j, : len(p2[j])] += np.bincount(ks, minlength=len(p2[j]))
        return hist

    total = sum(_parallel.run_blocks(run, shots, seed, workers))
    return {(j, k): int(total[j, k]) for j, k in proto.outcomes()}


def _sample_rows(rng: np.random.Generator, probs: np.ndarray) -> np.ndarray:
    # one categorical draw per row by inverse CDF
    cdf = np.cumsum(probs, axis=1)
    u = rng.random(len(probs)) * cdf[:, -1]
    return np.minimum((cdf < u[:, None]).sum(axis=1), probs.shape[1] - 1)


def simulate_protocol_haar(
    proto: Protocol, shots: int, seed: int, workers: int = 1
) -> tuple[dict[tuple[int, int], int], float, float]:
    """Run the protocol on a fresh Haar-random ``psi^{(x)3}`` every shot.

    Each shot guesses the top eigenvector of ``Q`` for its flat outcome and
    scores ``|<psi|guess>|^2``. Returns ``(histogram, mean, stderr)``.
    """
    flat = proto.flat()
    if len(flat) != len(proto.outcomes()):
        raise InvalidPovmError("protocol has zero elements; outcomes cannot be matched to estimators")
    est = dict(zip(proto.outcomes(), (np.asarray(v) for v in optimal_estimators(flat))))
    n1, n2 = len(proto.first_qubits), len(proto.second_qubits)
    kmax = max(len(b) for b in proto.branches)
    first = np.array(proto.first.elements)
    second = np.zeros((len(proto.branches), kmax) + (2**n2,) * 2, dtype=complex)
    guesses = np.zeros((len(proto.branches), kmax, 2), dtype=complex)
    for j, b in enumerate(proto.branches):
        for k, e in enumerate(b):
            second[j, k] = e
            guesses[j, k] = est[(j, k)]

    def power(psi, n):
        out = psi
        for _ in range(n - 1):
            out = np.einsum("sa,sb->sab", out, psi).reshape(len(psi), -1)
        return out

    def run(rng: np.random.Generator, count: int):
        psi = haar_states(rng, count)
        v1, v2 = power(psi, n1), power(psi, n2)
        p1 = np.einsum("sa,jab,sb->sj", v1.conj(), first, v1).real.clip(min=0)
        js = _sample_rows(rng, p1)
        p2 = np.einsum("sa,skab,sb->sk", v2.conj(), second[js], v2).real.clip(min=0)
        ks = _sample_rows(rng, p2)
        fid = np.abs(np.einsum("sa,sa->s", guesses[js, ks].conj(), psi)) ** 2
        hist = np.zeros((len(proto.branches), kmax), dtype=np.int64)
        np.add.at(hist, (js, ks), 1)
        return hist, _parallel.moments(fid)

    parts = _parallel.run_blocks(run, shots, seed, workers)
    total = sum(h for h, _ in parts)
    n, mean, m2 = _parallel.merge_moments([m for _, m in parts])
    stderr = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
    return {(j, k): int(total[j, k]) for j, k in proto.outcomes()}, mean, stderr


def born_distribution(proto: Protocol, psi: np.ndarray) -> dict[tuple[int, int], float]:
    """Joint outcome probabilities of the flat POVM on ``psi^{(x)3}``."""
    psi = check_state(psi, 1)
    probs = proto.flat().probabilities(kron_power(psi, proto.n_qubits))
    return dict(zip(proto.outcomes(), probs))


# -- state utilities ---------------------------------------------------------------


def concurrence(psi: np.ndarray) -> float:
    """``|<psi|Y(x)Y|psi*>|`` for a two-qubit pure state."""
    psi = check_state(psi, 2)
    return float(abs(np.vdot(psi, kron(Y, Y) @ psi.conj())))


def _check_orthonormal(basis: Sequence[np.ndarray], tol: float) -> np.ndarray:
    b = np.array([np.asarray(v, dtype=complex) for v in basis])
    if b.shape != (2, 2) or np.max(np.abs(b.conj() @ b.T - np.eye(2))) > tol:
        raise InvalidStateError("expected an orthonormal qubit basis")
    return b


def mub_check(basis1: Sequence[np.ndarray], basis2: Sequence[np.ndarray], tol: float = 1e-9) -> bool:
    """True iff every cross overlap squared equals 1/2."""
    b1 = _check_orthonormal(basis1, tol)
    b2 = _check_orthonormal(basis2, tol)
    return bool(np.max(np.abs(np.abs(b1.conj() @ b2.T) ** 2 - 0.5)) < tol)


def schmidt_basis(phi: np.ndarray) -> list[np.ndarray]:
    """Schmidt basis of the first party of a two-qubit pure state."""
    return herm_eig(partial_trace(check_state(phi, 2), keep=[0]))[1]


def _u1(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [
            [math.cos(theta), math.sin(theta) * np.exp(1j * phi)],
            [-math.sin(theta) * np.exp(-1j * phi), math.cos(theta)],
        ]
    )


def _diag_to_real(a: complex, b: complex) -> np.ndarray:
    # diag(e^{ia}, e^{ib}) with U^{(x)2} making the |00> and |11> amplitudes real
    return np.diag([np.exp(-0.5j * np.angle(a)), np.exp(-0.5j * np.angle(b))])


def canonicalize_sym2(phi: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Find ``U`` and ``xi`` in ``[0, pi/2]`` with
    ``U^{(x)2}|phi> = cos(xi/2)|00> + sin(xi/2)|11>`` (up to global phase).

    Follows the constructive route: diagonal phases bring ``phi`` to
    ``a|00> + b|S> + c e^{i chi}|11>`` with ``a, b, c >= 0``; a rotation
    ``U1(theta0, phi0)`` then cancels the ``|S>`` amplitude and a final
    diagonal unitary makes the remaining two amplitudes real.
    """
    phi = check_state(phi, 2)
    if np.linalg.norm(antisym_projector(2) @ phi) > tol:
        raise InvalidStateError("state is not in the symmetric subspace")
    A, B, C = sym2_coefficients(phi)
    alpha = -np.angle(A) / 2 if abs(A) > 1e-14 else 0.0
    beta = (-np.angle(B) - alpha) if abs(B) > 1e-14 else 0.0
    w = np.diag([np.exp(1j * alpha), np.exp(1j * beta)])
    a, b = abs(A), abs(B)
    c_full = C * np.exp(2j * beta)
    c, chi = abs(c_full), float(np.angle(c_full))

    phi0 = math.atan2(-c * math.sin(chi), a + c * math.cos(chi))
    best = None
    for ph in (phi0, phi0 + math.pi):
        k = (c * math.cos(ph + chi) - a * math.cos(ph)) / SQRT2
        for th in (0.5 * math.atan2(b, -k), 0.5 * math.atan2(-b, k)):
            u1w = _u1(th, ph) @ w
            u_amp, v_amp, w_amp = sym2_coefficients(kron(u1w, u1w) @ phi)
            if abs(v_amp) > 1e-9:
                continue
            if best is None or abs(u_amp) - abs(w_amp) > best[0]:
                best = (abs(u_amp) - abs(w_amp), u1w, u_amp, w_amp)
    if best is None:
        raise RuntimeError("no rotation cancelled the |S> amplitude")
    _, u1w, u_amp, w_amp = best
    if abs(u_amp) < abs(w_amp):
        u1w = X @ u1w
        u_amp, w_amp = w_amp, u_amp
    u = _diag_to_real(u_amp, w_amp) @ u1w
    xi = 2 * math.atan2(abs(w_amp), abs(u_amp))
    target = math.cos(xi / 2) * ket("00") + math.sin(xi / 2) * ket("11")
    if abs(np.vdot(target, kron(u, u) @ phi)) ** 2 < 1 - 1e-12:
        raise RuntimeError("canonical form not reached")
    return u, xi


# -- decomposition of product elements on Sym2 (x) H ---------------------------------


@dataclass(frozen=True)
class ProductElement:
    """``M = weight |Phi><Phi| (x) |c><c|`` with ``Phi`` symmetric."""

    weight: float
    phi: np.ndarray
    c: np.ndarray


def factor_element(m: np.ndarray, tol: float = 1e-10) -> ProductElement:
    """Split a rank-1 three-qubit element across (AB)|C."""
    w = float(np.trace(m).real)
    vals, vecs = herm_eig(m / w)
    if abs(vals[0] - 1) > tol or np.max(np.abs(vals[1:])) > tol:
        raise InvalidPovmError("element is not rank one")
    u, s, vh = np.linalg.svd(vecs[0].reshape(4, 2))
    if s[1] > tol:
        raise InvalidPovmError("element does not factor across (AB)|C")
    return ProductElement(w, fix_phase(u[:, 0]), fix_phase(vh[0]))


def _c_frame(c: np.ndarray) -> np.ndarray:
    # unitary with first column c
    c = fix_phase(c)
    return np.array([[c[0], -np.conj(c[1])], [c[1], np.conj(c[0])]])


@dataclass(frozen=True)
class CanonicalElement:
    """Element rewritten as ``w U^{(x)3}[(a|00> + b|S> + c e^{i phi}|11>)(x)|0>]``.

    ``amplitudes`` are the complex ``|00>, |S>, |11>`` coefficients in the
    frame where Charlie's state is ``|0>``; ``(a, b, c, phi)`` are the
    invariant magnitudes and relative phase.
    """

    weight: float
    a: float
    b: float
    c: float
    phi: float
    amplitudes: np.ndarray


def canonical_decomposition(p: Povm) -> list[CanonicalElement]:
    """Decompose every element of a rank-1 product POVM on ``Sym_2 (x) H``.

    The rotation ``U`` depends only on Charlie's state, so elements that
    share that state share ``U``.
    """
    out = []
    for m in p:
        el = factor_element(m)
        if np.linalg.norm(antisym_projector(2) @ el.phi) > 1e-9:
            raise InvalidPovmError("two-qubit factor is not symmetric")
        u = _c_frame(el.c)
        amps = sym2_coefficients(kron(dag(u), dag(u)) @ el.phi)
        args = [np.angle(z) if abs(z) > 1e-12 else 0.0 for z in amps]
        rel = (args[2] + args[0] - 2 * args[1]) % (2 * math.pi)
        a, b, c = (float(abs(z)) for z in amps)
        out.append(CanonicalElement(el.weight, a, b, c, float(rel), amps))
    return out


@dataclass(frozen=True)
class Sym2Moments:
    total_weight: float
    aa: float
    bb: float
    cc: float
    ab: complex
    ac: complex
    bc: complex


def sym2_povm_moments(p: Povm) -> Sym2Moments:
    """Weighted second moments of the canonical amplitudes.

    Quadratic sums use magnitudes; cross sums use the complex amplitudes,
    e.g. ``ab = sum_j w_j A_j conj(B_j)``.
    """
    parts = canonical_decomposition(p)
    w = np.array([e.weight for e in parts])
    amps = np.array([e.amplitudes for e in parts])
    return Sym2Moments(
        total_weight=float(w.sum()),
        aa=float(np.sum(w * np.abs(amps[:, 0]) ** 2)),
        bb=float(np.sum(w * np.abs(amps[:, 1]) ** 2)),
        cc=float(np.sum(w * np.abs(amps[:, 2]) ** 2)),
        ab=complex(np.sum(w * amps[:, 0] * amps[:, 1].conj())),
        ac=complex(np.sum(w * amps[:, 0] * amps[:, 2].conj())),
        bc=complex(np.sum(w * amps[:, 1] * amps[:, 2].conj())),
    )


def cyclic_shift() -> np.ndarray:
    """Unitary of the cyclic permutation 0 -> 1 -> 2 -> 0."""
    return permutation_operator(Permutation.cycle(3, 0, 1, 2))


CATALOG = {
    "collective-octahedron": octahedron_collective,
    "local-xyz": local_xyz,
    "m2": m2_povm,
    "m-2to1": m_2to1,
    "m-1to2": lambda: m_1to2()[0],
    "k0": k0_povm,
    "k1": k1_povm,
}


def get_povm(name: str) -> Povm:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown POVM {name!r}; choose from {sorted(CATALOG)}") from None


__all__ = [
    "ANALYTIC",
    "CATALOG",
    "P_1TO2",
    "PLUS",
    "MINUS",
    "Protocol",
    "SYM2_BASIS",
    "adaptive_compose",
    "born_distribution",
    "simulate_protocol_haar",
    "canonical_decomposition",
    "canonicalize_sym2",
    "concurrence",
    "cyclic_shift",
    "factor_element",
    "get_povm",
    "k0_povm",
    "k1_povm",
    "local_xyz",
    "m2_povm",
    "m_1to2",
    "m_2to1",
    "mub_check",
    "octahedron_collective",
    "phi_tilde",
    "protocol_1to2",
    "protocol_2to1",
    "psi_tilde",
    "schmidt_basis",
    "simulate_protocol",
    "sym2_povm_moments",
    "upsilon",
    "z_basis",
]
