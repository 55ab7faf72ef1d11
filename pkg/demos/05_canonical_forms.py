# %% [markdown]
# # Canonical form of product POVM elements
#
# Every rank-1 element of a POVM on `Sym_2 (x) H` factors as a symmetric
# two-qubit state times a qubit state. Here the one-first protocol is
# restricted to that subspace. Rotating Charlie's state to `|0>`
# leaves three magnitudes and one relative phase.

# %%
from spin_triad import catalog, restrict_sym

povm = restrict_sym(catalog.m_1to2()[0])

for el in catalog.canonical_decomposition(povm):
    print(f"w={el.weight:.4f} a={el.a:.4f} b={el.b:.4f} c={el.c:.4f} phi={el.phi:.4f}")

# %% [markdown]
# The weighted second moments summarise the POVM. Completeness on the
# symmetric subspace fixes the total weight and the diagonal sums.

# %%
m = catalog.sym2_povm_moments(povm)
print(m)
