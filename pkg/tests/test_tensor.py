import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spin_triad.errors import InvalidStateError, NotHermitianError, ShapeError
from spin_triad.symmetry import sym_projector
from spin_triad.tensor import (
    I2,
    X,
    Z,
    check_hermitian,
    check_state,
    from_dict,
    haar_states,
    haar_unitaries,
    herm_eig,
    ket,
    kron,
    num_qubits,
    partial_trace,
    permute_qubits,
    proj,
    spectral_norm,
    to_dict,
)

seeds = st.integers(0, 2**32 - 1)


def random_operator(rng, n):
    d = 2**n
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


def loop_partial_trace(a, n, keep):
    """Index-by-index reference implementation."""
    keep = sorted(keep)
    m = len(keep)
    out = np.zeros((2**m, 2**m), dtype=complex)
    for i in range(2**n):
        for j in range(2**n):
            bi = [(i >> (n - 1 - q)) & 1 for q in range(n)]
            bj = [(j >> (n - 1 - q)) & 1 for q in range(n)]
            if any(bi[q] != bj[q] for q in range(n) if q not in keep):
                continue
            r = int("".join(str(bi[q]) for q in keep) or "0", 2)
            c = int("".join(str(bj[q]) for q in keep) or "0", 2)
            out[r, c] += a[i, j]
    return out


def test_kron_examples():
    assert np.array_equal(kron(I2, I2), np.eye(4))
    assert np.array_equal(kron(Z, Z), np.diag([1, -1, -1, 1]))
    assert np.array_equal(kron(X, I2) @ ket("00"), ket("10"))


def test_ket_index_order():
    # first qubit is the most significant bit
    assert np.flatnonzero(ket("100"))[0] == 4


@given(seeds)
def test_kron_associative(seed):
    # Gaussian-integer entries keep every product exact
    rng = np.random.default_rng(seed)
    a, b, c = (rng.integers(-9, 10, (2, 2)) + 1j * rng.integers(-9, 10, (2, 2)) for _ in range(3))
    assert np.array_equal(np.kron(np.kron(a, b), c), kron(a, kron(b, c)))
    assert np.array_equal(kron(a, b, c), kron(kron(a, b), c))


def test_partial_trace_examples():
    assert np.allclose(partial_trace(proj(ket("00")), keep=[1]), proj(ket("0")))
    bell = (ket("00") + ket("11")) / math.sqrt(2)
    assert np.allclose(partial_trace(proj(bell), keep=[0]), I2 / 2)


def test_partial_trace_of_p4_from_basis():
    # build P4 from the five Dicke states rather than from permutations
    p4 = np.zeros((16, 16), dtype=complex)
    for w in range(5):
        v = np.zeros(16, dtype=complex)
        for x in range(16):
            if bin(x).count("1") == w:
                v[x] = 1
        p4 += proj(v / np.linalg.norm(v))
    assert np.allclose(p4, sym_projector(4), atol=1e-12)
    assert np.allclose(partial_trace(p4, keep=[3]), 2.5 * I2, atol=1e-12)


@given(seeds, st.integers(1, 4))
def test_partial_trace_matches_loops(seed, n):
    rng = np.random.default_rng(seed)
    a = random_operator(rng, n)
    keep = [q for q in range(n) if rng.random() < 0.5]
    assert np.allclose(partial_trace(a, keep), loop_partial_trace(a, n, keep), atol=1e-12)


@given(seeds)
def test_partial_trace_of_product(seed):
    rng = np.random.default_rng(seed)
    a, b = random_operator(rng, 2), random_operator(rng, 1)
    assert np.allclose(partial_trace(kron(a, b), keep=[0, 1]), np.trace(b) * a, atol=1e-12)


def test_partial_trace_rejects_bad_index():
    with pytest.raises(ShapeError):
        partial_trace(np.eye(4), keep=[2])


@given(seeds)
def test_permute_qubits_moves_factors(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_operator(rng, 1) for _ in range(3))
    assert np.allclose(permute_qubits(kron(a, b, c), [2, 0, 1]), kron(c, a, b))
    v = [rng.standard_normal(2) for _ in range(3)]
    assert np.allclose(permute_qubits(kron(*v), [1, 2, 0]), kron(v[1], v[2], v[0]))


def test_herm_eig_examples():
    w, v = herm_eig(Z)
    assert np.allclose(w, [1, -1])
    assert np.allclose(v[0], ket("0")) and np.allclose(v[1], ket("1"))
    w, v = herm_eig(X)
    assert np.allclose(w, [1, -1])
    assert np.allclose(v[0], [1 / math.sqrt(2)] * 2)
    assert np.allclose(v[1], [1 / math.sqrt(2), -1 / math.sqrt(2)])
    w, _ = herm_eig(sym_projector(2))
    assert np.allclose(w, [1, 1, 1, 0], atol=1e-12)


def test_herm_eig_degenerate_tie_break():
    _, v = herm_eig(60 * I2)
    assert np.allclose(v[0], ket("0"))


@given(seeds, st.sampled_from([1, 2, 4, 8, 16]))
def test_herm_eig_reconstructs(seed, d):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, d)
    w, v = herm_eig(a)
    vm = np.column_stack(v)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.max(np.abs(vm @ np.diag(w) @ vm.conj().T - a)) < 1e-10
    assert np.allclose(vm.conj().T @ vm, np.eye(d), atol=1e-10)


@given(seeds)
def test_spectral_norm_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, 4)
    u = haar_unitaries(rng, 1, 4)[0]
    assert abs(spectral_norm(u @ a @ u.conj().T) - spectral_norm(a)) < 1e-10


def test_spectral_norm_of_z():
    assert spectral_norm(Z) == 1


def test_non_hermitian_rejected_not_symmetrized():
    a = np.array([[1, 1e-6], [0, 1]])
    with pytest.raises(NotHermitianError):
        check_hermitian(a)
    with pytest.raises(NotHermitianError):
        spectral_norm(a)


def test_shape_errors():
    with pytest.raises(ShapeError):
        num_qubits(np.eye(3))
    with pytest.raises(ShapeError):
        num_qubits(np.eye(32))
    with pytest.raises(ShapeError):
        num_qubits(np.zeros((2, 4)))


def test_check_state():
    with pytest.raises(InvalidStateError):
        check_state(np.array([1.0, 1.0]))
    with pytest.raises(InvalidStateError):
        check_state(ket("00"), 1)
    assert check_state(ket("0"), 1).shape == (2,)


def test_haar_states_are_normalized_and_uniform():
    rng = np.random.default_rng(1)
    psi = haar_states(rng, 200_000)
    assert np.allclose(np.linalg.norm(psi, axis=1), 1)
    # Bloch vector components average to zero, squares to 1/3
    z = np.abs(psi[:, 0]) ** 2 - np.abs(psi[:, 1]) ** 2
    assert abs(z.mean()) < 5 * math.sqrt(1 / 3 / len(z))
    assert abs((z**2).mean() - 1 / 3) < 0.005


def test_haar_unitaries_are_unitary():
    u = haar_unitaries(np.random.default_rng(2), 50, 4)
    eye = np.einsum("sab,scb->sac", u, u.conj())
    assert np.allclose(eye, np.eye(4), atol=1e-12)


@given(seeds, st.integers(1, 3))
def test_json_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    a = random_operator(rng, n)
    back = from_dict(json.loads(json.dumps(to_dict(a))))
    assert np.array_equal(back, a)


def test_json_rejects_mismatch():
    d = to_dict(np.eye(4))
    d["shape"] = [2]
    with pytest.raises(ShapeError):
        from_dict(d)
