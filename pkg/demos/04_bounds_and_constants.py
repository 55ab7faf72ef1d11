# %% [markdown]
# # Checking the optimality inequalities numerically
#
# Each inequality is scanned over a dense grid plus random points. The
# largest excess over the bound and the points where it is tight are
# reported.

# %%
from spin_triad import appendix_c_constants, verify_bound

for lemma in ("A2", "B2", "C1"):
    rep = verify_bound(lemma, grid=400, randoms=5000, seed=0, workers=4)
    pts = [[round(v, 5) for v in p] for p in rep.saturation_points]
    print(f"{lemma}: max violation {rep.max_violation:.2e}  tight at {pts}")

# %% [markdown]
# The constants of the linear bound come from a quadratic in `sqrt(41)`.
# The angles below are zeros of helper functions; the middle one is a
# tangency, so it is computed in closed form rather than by bracketing.

# %%
k = appendix_c_constants()
print(f"alpha={k.alpha:.6f} beta={k.beta:.6f} gamma={k.gamma:.6f}")
print(f"zeta*={k.zeta_star:.5f} zeta0={k.zeta0:.5f} zeta+={k.zeta_plus:.5f}")

# %% [markdown]
# Plugging the constants into the fidelity formula gives the one-first
# protocol value `1/2 + (11 + sqrt 41)/60`.

# %%
print(0.5 + k.alpha / 30 + k.gamma / 20)
