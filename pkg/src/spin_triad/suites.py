"""Named verification suites: lists of pass/fail checks with details."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, catalog, designs
from .estimation import coarse_grain, estimation_fidelity, q_map, random_povm, restrict_antisym, restrict_sym
from .symmetry import sym2_state, sym_projector, t_psi_closed_form, twirl_over_set
from .tensor import I2, ket, kron, proj, spectral_norm


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def _close(name, got, want, tol):
    err = abs(got - want)
    return Check(name, bool(err <= tol), f"got {got:.12g}, want {want:.12g}, |diff| {err:.2e}")


def _random_abc(rng, n):
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v


def table1(tol=1e-9, **_):
    return [
        _close(f"{name} fidelity", estimation_fidelity(catalog.get_povm(name)), catalog.ANALYTIC[name], tol)
        for name in ("local-xyz", "m-1to2", "m-2to1", "collective-octahedron")
    ]


def appendix_a(tol=1e-9, grid=1000, seed=0, workers=1, **_):
    rng = np.random.default_rng(seed)
    out = [
        _close(
            "eta at the optimal amplitudes",
            bounds.eta(3 * math.sqrt(2) / 8, math.sqrt(7) / 4, 3 * math.sqrt(2) / 8),
            10 + 5 * math.sqrt(22) / 4,
            tol,
        )
    ]
    abc = _random_abc(rng, 1000)
    a, b, c = abc.T
    lhs = bounds.eta(a, b, c)
    rhs = 15 * a**2 + 10 * b**2 + 5 * c**2 + bounds.f_xy(a**2 + c**2, a**2 - c**2)
    err = float(np.max(np.abs(lhs - rhs)))
    out.append(Check("eta equals 15a^2+10b^2+5c^2+f", err <= 1e-10, f"max |diff| {err:.2e}"))

    worst = 0.0
    for (a, b, c), phi in zip(abc[:100], rng.uniform(0, 2 * math.pi, 100)):
        m = proj(kron(sym2_state(a, b, c, phi), ket("0")))
        qm, qc = q_map(m), bounds.q_closed_form(a, b, c, phi)
        worst = max(worst, float(np.max(np.abs(qm - qc))), abs(spectral_norm(qm) - bounds.eta_phi(a, b, c, phi)))
    out.append(Check("closed-form Q matches the Q-map", worst <= 1e-10, f"max |diff| {worst:.2e}"))

    rep = bounds.verify_bound("A2", grid=grid, randoms=10000, seed=seed, workers=workers)
    out.append(Check("A2 bound holds", rep.passed, f"max violation {rep.max_violation:.2e}"))
    pts = rep.saturation_points
    ok = len(pts) == 1 and math.dist(pts[0], (9 / 16, 0)) <= 2 * max(rep.grid_step)
    out.append(Check("A2 saturates only at (9/16, 0)", ok, f"points {pts}"))

    parts = catalog.canonical_decomposition(restrict_sym(catalog.m_2to1()))
    total = sum(e.weight * bounds.eta_phi(e.a, e.b, e.c, e.phi) for e in parts)
    out.append(_close("weighted eta sum for the 2+1 optimum", total, 60 + 7.5 * math.sqrt(22), 1e-8))
    out.append(
        _close("fidelity from weighted eta sum", total / 120, estimation_fidelity(catalog.m_2to1()), tol)
    )
    return out


def appendix_b(tol=1e-9, grid=1000, seed=0, workers=1, **_):
    thetas = np.linspace(0, math.pi, 7)
    out = [
        Check(
            "q(pi/2, theta) = 8",
            bool(np.allclose(bounds.q_xi_theta(math.pi / 2, thetas), 8, atol=1e-12, rtol=0)),
        ),
        _close("q at (arcsin(1/8), pi/2)", float(bounds.q_xi_theta(bounds.XI0, math.pi / 2)), bounds.B2_BOUND, tol),
    ]
    rep = bounds.verify_bound("B2", grid=grid, randoms=10000, seed=seed, workers=workers)
    out.append(Check("B2 bound holds", rep.passed, f"max violation {rep.max_violation:.2e}"))
    pts = rep.saturation_points
    ok = len(pts) == 1 and math.dist(pts[0], (bounds.XI0, math.pi / 2)) <= 2 * max(rep.grid_step)
    out.append(Check("B2 saturates only at (arcsin(1/8), pi/2)", ok, f"points {pts}"))
    ex = rep.extras
    out.append(
        Check(
            "phase never helps, and matches direct Q norms",
            ex["max_full_minus_reduced"] <= 1e-12 and ex["max_direct_error"] <= 1e-9,
            f"{ex}",
        )
    )
    return out


def appendix_c(tol=1e-9, grid=1000, seed=0, workers=1, **_):
    k = bounds.appendix_c_constants()
    out = [
        _close("zeta*", k.zeta_star, 0.12988, 1e-4),
        _close("cos zeta*", math.cos(k.zeta_star), 0.99158, 1e-4),
        _close("zeta0", k.zeta0, 1.81228, 1e-4),
        _close("zeta+", k.zeta_plus, 0.07235, 1e-4),
        _close("alpha + beta + gamma", k.alpha + k.beta + k.gamma, 9.0, 1e-12),
        _close("1+2 fidelity from alpha, gamma", 0.5 + k.alpha / 30 + k.gamma / 20, catalog.ANALYTIC["m-1to2"], 1e-12),
        _close("f at (x0, y0) on the plane", bounds.f_xy(k.x0, k.y0), k.alpha * k.x0 + k.beta * k.y0 + k.gamma, tol),
    ]
    zeros = [abs(bounds._ell(k.zeta_star)), abs(bounds._h(k.zeta0)), abs(bounds._h(k.zeta_plus))]
    out.append(Check("ell and h vanish at their zeros", max(zeros) <= 1e-9, f"residuals {zeros}"))

    rep = bounds.verify_bound("C1", grid=grid, randoms=10000, seed=seed, workers=workers)
    out.append(Check("C1 bound holds", rep.passed, f"max violation {rep.max_violation:.2e}"))
    pts = rep.saturation_points
    step = 2 * max(rep.grid_step)
    want = [(1.0, 1.0), (k.x0, k.y0)]
    ok = len(pts) == 2 and all(any(math.dist(p, w) <= step for p in pts) for w in want)
    out.append(Check("C1 saturates at (1, 1) and (x0, y0)", ok, f"points {pts}"))

    mom = catalog.sym2_povm_moments(restrict_sym(catalog.m_1to2()[0]))
    quad = max(abs(mom.aa - 2), abs(mom.bb - 2), abs(mom.cc - 2))
    cross = max(abs(mom.ab), abs(mom.ac), abs(mom.bc))
    out.append(Check("second moments equal 2", quad <= 1e-9, f"max |diff| {quad:.2e}"))
    out.append(Check("cross moments vanish", cross <= 1e-9, f"max |cross| {cross:.2e}"))
    return out


def design_suite(tol=1e-9, **_):
    cases = [("clifford", 3, True), ("gbar", 2, True), ("gbar2", 2, False), ("gbar", 3, False)]
    out = []
    for name, t, want in cases:
        us = designs.get_set(name)
        fp = designs.frame_potential(us, t)
        out.append(Check(f"{name} is {t}-design: {want}", designs.is_t_design(us, t, tol) == want, f"frame potential {fp:.12g}"))
    cl = designs.clifford_mod_phase()
    for t in (1, 2, 3):
        out.append(_close(f"Clifford frame potential t={t}", designs.frame_potential(cl, t), designs.haar_frame_potential(t), tol))
    m2 = catalog.m2_povm()
    err = float(np.max(np.abs(sum(m2.elements) - np.eye(4))))
    out.append(Check("two-qubit G2-bar POVM is complete", err <= 1e-10, f"max |diff| {err:.2e}"))
    return out


def invariants(tol=1e-9, seed=0, **_):
    rng = np.random.default_rng(seed)
    out = []
    sym_err = anti = 0.0
    for _ in range(50):
        rank = int(rng.integers(1, 3))
        p = random_povm(rng, 3, int(rng.integers(8 // rank, 13)), rank)
        sym_err = max(sym_err, abs(estimation_fidelity(restrict_sym(p)) - estimation_fidelity(p)))
        anti = max(anti, abs(estimation_fidelity(restrict_antisym(p))))
    out.append(Check("symmetric restriction keeps fidelity", sym_err <= 1e-9, f"max |diff| {sym_err:.2e}"))
    out.append(Check("antisymmetric restriction has zero fidelity", anti <= 1e-10, f"max {anti:.2e}"))

    cl = designs.clifford_mod_phase()
    worst = 0.0
    for (a, b, c), phi in zip(_random_abc(rng, 50), rng.uniform(0, 2 * math.pi, 50)):
        rho = proj(kron(sym2_state(a, b, c, phi), ket("0")))
        worst = max(worst, float(np.max(np.abs(twirl_over_set(rho, cl, 3) - t_psi_closed_form(a, b, c)))))
    out.append(Check("Clifford twirl matches closed form", worst <= 1e-10, f"max |diff| {worst:.2e}"))
    a = c = 0.5
    b = math.sqrt(0.5)
    tw = twirl_over_set(proj(kron(sym2_state(a, b, c), ket("0"))), cl, 3)
    err = float(np.max(np.abs(tw - kron(sym_projector(2), I2) / 6)))
    out.append(Check("twirl at a^2 = c^2 is P2 (x) 1 / 6", err <= 1e-10, f"max |diff| {err:.2e}"))

    p = catalog.m_2to1()
    lam = rng.random((4, len(p)))
    lam /= lam.sum(axis=0)
    out.append(
        Check("coarse graining never helps", estimation_fidelity(coarse_grain(p, lam)) <= estimation_fidelity(p) + tol)
    )
    out.extend(structure_of_optima())
    return out


def structure_of_optima(tol=1e-9):
    out = []
    conc, mub = 0.0, True
    for m in restrict_sym(catalog.m_2to1()):
        el = catalog.factor_element(m)
        conc = max(conc, abs(catalog.concurrence(el.phi) - 1 / 8))
        c_perp = np.array([-np.conj(el.c[1]), np.conj(el.c[0])])
        mub &= catalog.mub_check([el.c, c_perp], catalog.schmidt_basis(el.phi))
    out.append(Check("2+1 elements have concurrence 1/8", conc <= tol, f"max |diff| {conc:.2e}"))
    out.append(Check("2+1 Charlie basis is unbiased to the Schmidt basis", bool(mub)))
    xis = sorted({round(catalog.canonicalize_sym2(catalog.factor_element(m).phi)[1], 9) for m in restrict_sym(catalog.m_1to2()[0])})
    out.append(Check("1+2 elements are not uniformly entangled", len(xis) >= 2, f"distinct xi {xis}"))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "table1": table1,
    "appendixA": appendix_a,
    "appendixB": appendix_b,
    "appendixC": appendix_c,
    "designs": design_suite,
    "invariants": invariants,
}


def run_suite(name: str, **kwargs) -> list[Check]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn(**kwargs)]
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}") from None
    return fn(**kwargs)
