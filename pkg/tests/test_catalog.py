import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spin_triad import catalog
from spin_triad.designs import g_bar
from spin_triad.errors import InvalidPovmError, InvalidStateError
from spin_triad.estimation import Povm, estimation_fidelity, q_map, restrict_sym
from spin_triad.symmetry import SINGLET, SYM_S, antisym_projector, sym2_coefficients, sym_projector
from spin_triad.tensor import H, I2, S, X, Z, haar_states, haar_unitaries, ket, kron, kron_power, proj, spectral_norm

seeds = st.integers(0, 2**32 - 1)
TABLE = {
    "collective-octahedron": 4 / 5,
    "m-2to1": 1 / 2 + math.sqrt(22) / 16,
    "m-1to2": 1 / 2 + (11 + math.sqrt(41)) / 60,
    "local-xyz": 1 / 2 + math.sqrt(3) / 6,
}


def random_sym2(rng):
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return v[0] * ket("00") + v[1] * SYM_S + v[2] * ket("11")


@pytest.mark.parametrize("name", sorted(catalog.CATALOG))
def test_catalog_povms_are_valid(name):
    p = catalog.get_povm(name)
    total = sum(p.elements)
    assert np.max(np.abs(total - p.space)) < 1e-10
    for m in p:
        assert np.linalg.eigvalsh(m)[0] >= -1e-10


@pytest.mark.parametrize("name,value", sorted(TABLE.items()))
def test_table_values(name, value):
    assert abs(estimation_fidelity(catalog.get_povm(name)) - value) < 1e-9


def test_analytic_table_matches_expressions():
    assert catalog.ANALYTIC == pytest.approx(TABLE, abs=1e-15)


def test_unknown_name():
    with pytest.raises(KeyError):
        catalog.get_povm("tetrahedron")


def test_octahedron_structure():
    p = catalog.octahedron_collective()
    assert np.allclose(sum(p.elements[:6]), sym_projector(3), atol=1e-12)
    pi = kron(antisym_projector(2), I2)
    w = catalog.cyclic_shift()
    e7 = 2 / 3 * (pi + w @ pi @ w.conj().T + w.conj().T @ pi @ w)
    assert np.allclose(p.elements[6], e7, atol=1e-12)


def test_local_bases_mutually_unbiased():
    zb = [ket("0"), ket("1")]
    xb = [catalog.PLUS, catalog.MINUS]
    yb = [catalog.Y_PLUS, catalog.Y_MINUS]
    assert catalog.mub_check(zb, xb) and catalog.mub_check(xb, yb) and catalog.mub_check(yb, zb)
    assert not catalog.mub_check(zb, zb)


def test_phi_tilde():
    phi = catalog.phi_tilde()
    assert catalog.concurrence(phi) == pytest.approx(1 / 8, abs=1e-12)
    amps = sym2_coefficients(kron(H, H) @ phi)
    assert np.allclose(amps, [3 * math.sqrt(2) / 8, math.sqrt(7) / 4, 3 * math.sqrt(2) / 8], atol=1e-12)
    norm = spectral_norm(q_map(proj(catalog.psi_tilde())))
    assert norm / 20 == pytest.approx(0.5 + math.sqrt(22) / 16, abs=1e-12)
    assert norm == pytest.approx(10 + 5 * math.sqrt(22) / 4, abs=1e-12)


def test_phi_tilde_schmidt_basis_unbiased_to_x():
    schmidt = catalog.schmidt_basis(catalog.phi_tilde())
    assert catalog.mub_check(schmidt, [catalog.PLUS, catalog.MINUS])


def test_m2_povm():
    p = catalog.m2_povm()
    assert len(p) == 7
    assert np.allclose(sum(p.elements), np.eye(4), atol=1e-12)
    psi = haar_states(np.random.default_rng(0), 20)
    for v in psi:
        assert p.probabilities(kron(v, v))[-1] == pytest.approx(0, abs=1e-15)


def test_m_2to1():
    p = catalog.m_2to1()
    assert len(p) == 13
    assert len(restrict_sym(p)) == 12


def test_m_1to2_and_k_povms():
    p, proto = catalog.m_1to2()
    assert len(p) == 12
    assert proto.direction == "1->2"
    assert catalog.P_1TO2 == pytest.approx(0.12866, abs=1e-5)
    for k in (catalog.k0_povm(), catalog.k1_povm()):
        assert np.allclose(sum(k.elements), np.eye(4), atol=1e-12)


def test_compose_reproduces_2to1():
    flat = catalog.protocol_2to1().flat()
    direct = catalog.m_2to1()
    assert estimation_fidelity(flat) == pytest.approx(estimation_fidelity(direct), abs=1e-12)
    # each rank-1 element of the direct POVM appears in the flat one
    for m in direct.elements[:12]:
        assert any(np.allclose(m, f, atol=1e-12) for f in flat)


def test_compose_1to2_places_charlie_last():
    flat = catalog.protocol_1to2().flat()
    k0 = catalog.k0_povm()
    assert np.allclose(flat[0], kron(k0[0], proj(ket("0"))))


def test_compose_with_trivial_branches():
    first = catalog.m2_povm()
    one = Povm((np.eye(2),))
    flat = catalog.adaptive_compose(first, [one] * len(first))
    for a, f in zip(first, flat):
        assert np.allclose(f, kron(a, I2))
    with pytest.raises(InvalidPovmError):
        catalog.adaptive_compose(first, [one])


def test_protocol_validation():
    with pytest.raises(InvalidPovmError):
        catalog.Protocol(catalog.z_basis(), (catalog.k0_povm(),), (2,), "1->2")
    with pytest.raises(InvalidPovmError):
        catalog.Protocol(catalog.z_basis(), (catalog.z_basis(), catalog.z_basis()), (2,), "1->2")


def _tv_ratio(proto, psi, shots, seed):
    hist = catalog.simulate_protocol(proto, psi, shots, seed)
    born = catalog.born_distribution(proto, psi)
    p = np.array([born[o] for o in proto.outcomes()])
    f = np.array([hist[o] for o in proto.outcomes()]) / shots
    return 0.5 * np.abs(f - p).sum() / (0.5 * np.sum(4 * np.sqrt(p * (1 - p) / shots)))


@pytest.mark.parametrize("which", ["2to1", "1to2"])
def test_sequential_sampling_matches_born(which):
    proto = catalog.protocol_2to1() if which == "2to1" else catalog.protocol_1to2()
    for i, psi in enumerate(haar_states(np.random.default_rng(5), 3)):
        assert _tv_ratio(proto, psi, 10**5, i) < 1


def test_singlet_outcome_never_occurs():
    proto = catalog.protocol_2to1()
    for i, psi in enumerate(haar_states(np.random.default_rng(6), 5)):
        hist = catalog.simulate_protocol(proto, psi, 10**4, i)
        assert hist[(6, 0)] == 0


def test_1to2_on_zero_state():
    hist = catalog.simulate_protocol(catalog.protocol_1to2(), ket("0"), 10**4, 0)
    assert sum(n for (j, _), n in hist.items() if j == 1) == 0


def test_simulation_reproducible_across_workers():
    proto = catalog.protocol_2to1()
    psi = catalog.PLUS
    a = catalog.simulate_protocol(proto, psi, 50_000, 3, workers=1)
    b = catalog.simulate_protocol(proto, psi, 50_000, 3, workers=4)
    assert a == b


def test_simulation_rejects_bad_state():
    with pytest.raises(InvalidStateError):
        catalog.simulate_protocol(catalog.protocol_2to1(), np.array([1.0, 1.0]), 10, 0)


def test_haar_protocol_fidelity():
    proto = catalog.protocol_2to1()
    hist, mean, se = catalog.simulate_protocol_haar(proto, 3 * 10**5, 8, workers=2)
    assert sum(hist.values()) == 3 * 10**5
    assert hist[(6, 0)] == 0
    assert abs(mean - TABLE["m-2to1"]) < 3 * se


def test_concurrence_examples():
    bell = (ket("00") + ket("11")) / math.sqrt(2)
    assert catalog.concurrence(bell) == pytest.approx(1)
    assert catalog.concurrence(ket("00")) == pytest.approx(0)
    assert catalog.concurrence(SINGLET) == pytest.approx(1)


def test_mub_check_validates_bases():
    with pytest.raises(ValueError):
        catalog.mub_check([ket("0"), ket("0")], [catalog.PLUS, catalog.MINUS])


@pytest.mark.parametrize(
    "state,xi",
    [
        (ket("00"), 0.0),
        (SYM_S, math.pi / 2),
        ((ket("00") + ket("11")) / math.sqrt(2), math.pi / 2),
        (catalog.phi_tilde(), math.asin(1 / 8)),
    ],
)
def test_canonicalize_examples(state, xi):
    _, got = catalog.canonicalize_sym2(state)
    assert got == pytest.approx(xi, abs=1e-9)


@settings(max_examples=80)
@given(seeds)
def test_canonicalize_random(seed):
    rng = np.random.default_rng(seed)
    phi = random_sym2(rng)
    u, xi = catalog.canonicalize_sym2(phi)
    assert 0 <= xi <= math.pi / 2 + 1e-12
    target = math.cos(xi / 2) * ket("00") + math.sin(xi / 2) * ket("11")
    assert abs(np.vdot(target, kron(u, u) @ phi)) ** 2 >= 1 - 1e-12
    assert np.allclose(u @ u.conj().T, I2, atol=1e-12)
    assert math.sin(xi) == pytest.approx(catalog.concurrence(phi), abs=1e-9)


def test_canonicalize_rejects_non_symmetric():
    with pytest.raises(ValueError):
        catalog.canonicalize_sym2(SINGLET)


@settings(max_examples=40)
@given(seeds)
def test_factor_element_roundtrip(seed):
    rng = np.random.default_rng(seed)
    phi, c = random_sym2(rng), haar_states(rng, 1)[0]
    w = rng.uniform(0.1, 2)
    el = catalog.factor_element(w * proj(kron(phi, c)))
    assert el.weight == pytest.approx(w)
    assert np.allclose(el.weight * proj(kron(el.phi, el.c)), w * proj(kron(phi, c)), atol=1e-10)


def test_factor_element_rejects_entangled_split():
    ghz = (ket("000") + ket("111")) / math.sqrt(2)
    with pytest.raises(InvalidPovmError):
        catalog.factor_element(proj(ghz))


def test_canonical_decomposition_reproduces_fidelity():
    from spin_triad.bounds import eta_phi

    for p in (restrict_sym(catalog.m_2to1()), restrict_sym(catalog.m_1to2()[0])):
        parts = catalog.canonical_decomposition(p)
        total = sum(e.weight * eta_phi(e.a, e.b, e.c, e.phi) for e in parts)
        assert total / 120 == pytest.approx(estimation_fidelity(p), abs=1e-12)


def test_2to1_aggregate_eta():
    from spin_triad.bounds import eta_phi

    parts = catalog.canonical_decomposition(restrict_sym(catalog.m_2to1()))
    total = sum(e.weight * eta_phi(e.a, e.b, e.c, e.phi) for e in parts)
    assert total == pytest.approx(60 + 7.5 * math.sqrt(22), abs=1e-8)
    for e in parts:
        assert (e.a, e.b, e.c) == pytest.approx((3 * math.sqrt(2) / 8, math.sqrt(7) / 4, 3 * math.sqrt(2) / 8), abs=1e-9)


def test_1to2_moments():
    mom = catalog.sym2_povm_moments(restrict_sym(catalog.m_1to2()[0]))
    assert mom.total_weight == pytest.approx(6, abs=1e-9)
    assert (mom.aa, mom.bb, mom.cc) == pytest.approx((2, 2, 2), abs=1e-9)
    assert max(abs(mom.ab), abs(mom.ac), abs(mom.bc)) < 1e-9


def test_2to1_moments_are_not_uniform():
    mom = catalog.sym2_povm_moments(restrict_sym(catalog.m_2to1()))
    assert mom.total_weight == pytest.approx(6, abs=1e-9)
    assert abs(mom.bb - 2) > 0.1


def test_structure_of_optima():
    for m in restrict_sym(catalog.m_2to1()):
        el = catalog.factor_element(m)
        assert catalog.concurrence(el.phi) == pytest.approx(1 / 8, abs=1e-9)
        c_perp = np.array([-np.conj(el.c[1]), np.conj(el.c[0])])
        assert catalog.mub_check([el.c, c_perp], catalog.schmidt_basis(el.phi))
    xis = {round(catalog.canonicalize_sym2(catalog.factor_element(m).phi)[1], 9) for m in restrict_sym(catalog.m_1to2()[0])}
    assert len(xis) >= 2


def test_cyclic_shift_cubes_to_identity():
    w = catalog.cyclic_shift()
    assert np.allclose(w @ w, w.conj().T)
    assert np.allclose(w @ w @ w, np.eye(8))
