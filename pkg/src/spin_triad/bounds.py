"""Scalar bound functions, closed forms for product states, and bound scans.

Notation: a product state on Sym2 (x) H is written
``(a|00> + b|S> + c e^{i phi}|11>) (x) |0>`` with real ``a, b, c``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy import ndimage, optimize

from .tensor import I2, X, Y, Z

SQRT2 = math.sqrt(2)
SQRT41 = math.sqrt(41)
XI0 = math.asin(1 / 8)


def _check_normalized(a, b, c, tol=1e-9):
    if abs(a * a + b * b + c * c - 1) > tol:
        raise ValueError("expected a^2 + b^2 + c^2 = 1")


def eta_phi(a, b, c, phi):
    """Spectral norm of Q for the product state with relative phase ``phi``."""
    return (
        15 * a * a
        + 10 * b * b
        + 5 * c * c
        + np.sqrt(8 * b * b * np.abs(3 * a + 2 * c * np.exp(1j * phi)) ** 2 + (9 * a * a + 2 * b * b - c * c) ** 2)
    )


def eta(a, b, c):
    """Upper envelope of :func:`eta_phi` over the phase."""
    return (
        15 * a * a
        + 10 * b * b
        + 5 * c * c
        + np.sqrt(8 * b * b * (3 * np.abs(a) + 2 * np.abs(c)) ** 2 + (9 * a * a + 2 * b * b - c * c) ** 2)
    )


def f_xy(x, y, tol=1e-12):
    """Defined for ``0 <= x <= 1`` and ``|y| <= x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < -tol) or np.any(x > 1 + tol) or np.any(np.abs(y) > x + tol):
        raise ValueError("f(x, y) needs 0 <= x <= 1 and -x <= y <= x")
    sp = np.sqrt(np.clip(x + y, 0, None))
    sm = np.sqrt(np.clip(x - y, 0, None))
    out = np.sqrt(4 * (1 - x) * (3 * sp + 2 * sm) ** 2 + (2 * x + 5 * y + 2) ** 2)
    return out if out.ndim else float(out)


def q_closed_form(a: float, b: float, c: float, phi: float) -> np.ndarray:
    """Closed form of ``Q((a|00> + b|S> + c e^{i phi}|11>)(x)|0>)`` as a 2x2 matrix."""
    _check_normalized(a, b, c)
    return (
        (15 * a * a + 10 * b * b + 5 * c * c) * I2
        + 2 * SQRT2 * b * (3 * a + 2 * c * math.cos(phi)) * X
        + 4 * SQRT2 * b * c * math.sin(phi) * Y
        + (9 * a * a + 2 * b * b - c * c) * Z
    )


def trace_p3_product(a: float, b: float, c: float) -> float:
    """Overlap of the product state with the three-qubit symmetric subspace."""
    _check_normalized(a, b, c)
    return (6 * a * a + 4 * b * b + 2 * c * c) / 6


def _check_xi_theta(xi, theta, tol=1e-12):
    if np.any(np.asarray(xi) < -tol) or np.any(np.asarray(xi) > math.pi / 2 + tol):
        raise ValueError("xi must lie in [0, pi/2]")
    if np.any(np.asarray(theta) < -tol) or np.any(np.asarray(theta) > math.pi + tol):
        raise ValueError("theta must lie in [0, pi]")


def q_xi_theta_phi(xi, theta, phi):
    """Sum of the two Q-norms, minus 20, for the canonical symmetric state
    ``cos(xi/2)|00> + sin(xi/2)|11>`` and Charlie's basis
    ``cos(theta/2)|0> +- sin(theta/2) e^{i phi}|1>``."""
    _check_xi_theta(xi, theta)
    sx, cx = np.sin(xi), np.cos(xi)
    st, ct = np.sin(theta), np.cos(theta)
    common = st**2 * (9 + sx**2 + 6 * sx * np.cos(2 * phi))
    return np.sqrt(common + (5 * cx + 4 * ct) ** 2) + np.sqrt(common + (5 * cx - 4 * ct) ** 2)


def q_xi_theta(xi, theta):
    """:func:`q_xi_theta_phi` at its maximizing phase ``phi = 0``."""
    _check_xi_theta(xi, theta)
    sx, cx = np.sin(xi), np.cos(xi)
    st, ct = np.sin(theta), np.cos(theta)
    common = st**2 * (3 + sx) ** 2
    return np.sqrt(common + (5 * cx + 4 * ct) ** 2) + np.sqrt(common + (5 * cx - 4 * ct) ** 2)


# -- constants of the 1+2 analysis -------------------------------------------------


@dataclass(frozen=True)
class AppendixCConstants:
    p: float
    x0: float
    y0: float
    alpha: float
    beta: float
    gamma: float
    u0: float
    u_plus: float
    u_minus: float
    zeta_star: float
    zeta0: float
    zeta_plus: float


def _linear_coeffs():
    alpha = 5 / 2 - 43 / (2 * SQRT41)
    beta = 9 / 2 - 13 / (2 * SQRT41)
    gamma = 2 + 28 / SQRT41
    return alpha, beta, gamma


def _g2(zeta):
    alpha, beta, gamma = _linear_coeffs()
    return 48 + (alpha + beta * np.cos(zeta)) ** 2 - 25 * np.cos(zeta) ** 2 + 48 * np.sin(zeta)


def _g1(zeta):
    alpha, beta, gamma = _linear_coeffs()
    return 30 - alpha * gamma - (beta * gamma - 20) * np.cos(zeta) + 24 * np.sin(zeta)


def _ell(zeta):
    alpha, beta, gamma = _linear_coeffs()
    cz = np.cos(zeta)
    return (
        18
        + alpha**2
        + alpha * gamma
        - (20 - beta * gamma - 2 * alpha * beta) * cz
        - (25 - beta**2) * cz**2
        + 24 * np.sin(zeta)
    )


_C = (
    -4197 + 977 * SQRT41,
    24 * (-633 + 113 * SQRT41),
    4 * (-14667 + 2191 * SQRT41),
    48 * (-843 + 139 * SQRT41),
    -53775 + 8403 * SQRT41,
)


def _h(zeta):
    c0, c1, c2, c3, c4 = _C
    return c0 * np.cos(2 * zeta) + c1 * np.sin(2 * zeta) + c2 * np.cos(zeta) + c3 * np.sin(zeta) + c4


@lru_cache(maxsize=None)
def appendix_c_constants() -> AppendixCConstants:
    """Exact constants of the 1+2 bound, and the zeros of its helper functions.

    ``zeta_star`` is the zero of ``ell`` on ``[0, pi/2]`` (bisection).
    ``zeta0`` comes from the double root ``u0`` (``h`` only touches zero
    there, so it cannot be bracketed); ``zeta_plus`` is seeded by the
    closed-form ``u_plus`` and polished by bisection on ``h``.
    """
    p = (47 - 3 * SQRT41) / 216
    x0 = (2003 + 27 * SQRT41) / 3524
    y0 = (-1039 + 81 * SQRT41) / 3524
    alpha, beta, gamma = _linear_coeffs()
    u0 = (-308 + 27 * SQRT41) / 565
    disc = 576 * math.sqrt(-35743460158 + 5587351798 * SQRT41)
    num = 37529139 * SQRT41 - 239145719
    den = 294550033 - 45301173 * SQRT41
    u_plus, u_minus = (num + disc) / den, (num - disc) / den
    if u_minus > u_plus:
        u_plus, u_minus = u_minus, u_plus

    zeta_star = optimize.bisect(_ell, 0.0, math.pi / 2, xtol=1e-14)
    zeta0 = math.acos(u0)
    zeta_plus = math.acos(u_plus)
    lo, hi = zeta_plus - 1e-6, zeta_plus + 1e-6
    if _h(lo) * _h(hi) < 0:
        zeta_plus = optimize.bisect(_h, lo, hi, xtol=1e-15)
    return AppendixCConstants(p, x0, y0, alpha, beta, gamma, u0, u_plus, u_minus, zeta_star, zeta0, zeta_plus)


# -- bound scans ----------------------------------------------------------------------


def _a2_bound(x, y):
    return 2.5 * math.sqrt(11 / 2) + 8 * math.sqrt(2 / 11) * y


def _c1_bound(x, y):
    alpha, beta, gamma = _linear_coeffs()
    return alpha * x + beta * y + gamma


def _triangle_gap(bound):
    # coordinates (x, s) with y = s * x cover the triangle |y| <= x <= 1
    def gap(x, s):
        y = s * x
        return f_xy(x, y) - bound(x, y)

    def to_xy(x, s):
        return x, s * x

    return gap, ((0.0, 1.0), (-1.0, 1.0)), to_xy


B2_BOUND = 5 * math.sqrt(22) / 2


def _b2_gap(xi, theta):
    return q_xi_theta(xi, theta) - B2_BOUND


LEMMAS = {
    "A2": lambda: _triangle_gap(_a2_bound),
    "C1": lambda: _triangle_gap(_c1_bound),
    "B2": lambda: (_b2_gap, ((0.0, math.pi / 2), (0.0, math.pi)), lambda u, v: (u, v)),
}


@dataclass
class BoundReport:
    lemma: str
    max_violation: float
    saturation_points: list[list[float]]
    grid: int
    randoms: int
    seed: int
    grid_step: tuple[float, float] = (0.0, 0.0)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= 1e-9

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid_step"] = list(self.grid_step)
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _scan(gap, box, grid, workers):
    (u0, u1), (v0, v1) = box
    us = np.linspace(u0, u1, grid + 1)
    vs = np.linspace(v0, v1, grid + 1)
    chunks = np.array_split(np.arange(us.size), max(1, workers))

    def rows(idx):
        uu, vv = np.meshgrid(us[idx], vs, indexing="ij")
        return gap(uu, vv)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(rows, chunks))
    else:
        parts = [rows(c) for c in chunks]
    return us, vs, np.vstack(parts)


def _refine(gap, box, start):
    def neg(z):
        return -float(gap(z[0], z[1]))

    res = optimize.minimize(
        neg,
        start,
        method="Nelder-Mead",
        bounds=box,
        options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000},
    )
    return np.clip(res.x, [b[0] for b in box], [b[1] for b in box]), -res.fun


def verify_bound(lemma: str, grid: int = 1000, randoms: int = 10000, seed: int = 0, workers: int = 1) -> BoundReport:
    """Scan one of the bound lemmas ``"A2"``, ``"B2"``, ``"C1"``.

    The domain is covered by a ``(grid + 1)^2`` uniform grid plus
    ``randoms`` uniform random points. ``max_violation`` is the largest
    value of ``lhs - bound`` seen anywhere (negative means slack
    everywhere). Nearly tight local maxima of the grid seed a bounded
    Nelder-Mead search; refined points with ``|lhs - bound| < 1e-8`` are
    reported as saturation points, in the lemma's own coordinates.
    """
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma {lemma!r}; choose from {sorted(LEMMAS)}")
    if grid < 100:
        raise ValueError("grid resolution must be at least 100")
    gap, box, to_out = LEMMAS[lemma]()
    us, vs, g = _scan(gap, box, grid, workers)
    step = ((box[0][1] - box[0][0]) / grid, (box[1][1] - box[1][0]) / grid)

    rng = np.random.default_rng(seed)
    ru = rng.uniform(*box[0], size=randoms)
    rv = rng.uniform(*box[1], size=randoms)
    worst = max(float(g.max()), float(gap(ru, rv).max()) if randoms else -np.inf)

    # seeds: one grid point per plateau of local maxima that is nearly tight
    eps = 20 * max(step)
    peaks = (ndimage.maximum_filter(g, size=3, mode="nearest") == g) & (g >= -eps)
    labels, count = ndimage.label(peaks)
    found = []
    for k in range(1, count + 1):
        idx = np.argwhere(labels == k)
        best = idx[np.argmax(g[labels == k])]
        z, val = _refine(gap, box, [us[best[0]], vs[best[1]]])
        worst = max(worst, val)
        if abs(val) < 1e-8:
            pt = [float(t) for t in to_out(*z)]
            if all(math.dist(pt, q) > 1e-4 for q in found):
                found.append(pt)

    extras = {}
    if lemma == "B2":
        extras = _b2_phase_checks(rng, max(1, min(randoms, 200)))
        worst = max(worst, extras["max_full_minus_bound"])
    return BoundReport(lemma, worst, sorted(found), grid, randoms, seed, step, extras)


def _b2_phase_checks(rng, n):
    """Phase dependence: the phase-resolved expression never beats its
    ``phi = 0`` value, and it agrees with spectral norms of ``Q``."""
    from .estimation import q_map
    from .tensor import kron, ket, proj, spectral_norm

    xi = rng.uniform(0, math.pi / 2, n)
    th = rng.uniform(0, math.pi, n)
    ph = rng.uniform(0, 2 * math.pi, n)
    full = q_xi_theta_phi(xi, th, ph)
    reduced = q_xi_theta(xi, th)
    direct_err = 0.0
    for k in range(min(n, 50)):
        phi = math.cos(xi[k] / 2) * ket("00") + math.sin(xi[k] / 2) * ket("11")
        vp = np.array([math.cos(th[k] / 2), math.sin(th[k] / 2) * np.exp(1j * ph[k])])
        vm = np.array([math.sin(th[k] / 2), -math.cos(th[k] / 2) * np.exp(1j * ph[k])])
        total = sum(spectral_norm(q_map(proj(kron(phi, v)))) for v in (vp, vm))
        direct_err = max(direct_err, abs(total - 20 - full[k]))
    return {
        "phase_samples": int(n),
        "max_full_minus_reduced": float(np.max(full - reduced)),
        "max_full_minus_bound": float(np.max(full - B2_BOUND)),
        "max_direct_error": float(direct_err),
    }
