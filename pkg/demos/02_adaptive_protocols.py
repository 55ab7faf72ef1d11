# %% [markdown]
# # One-way adaptive protocols
#
# `m-2to1` measures qubits A and B jointly, then C in a basis chosen by the
# first outcome. `m-1to2` runs the other way. Both are flattened into a
# six-outcome POVM on three qubits.

# %%
from spin_triad import catalog

proto = catalog.protocol_2to1()
print(len(proto.first), "first-stage outcomes;", [len(b) for b in proto.branches], "per branch")

# %% [markdown]
# Simulating on a fixed input. For `|0>` the Born distribution is exact, so
# the histogram is compared against it directly.

# %%
psi = catalog.KET0
hist = catalog.simulate_protocol(proto, psi, shots=50_000, seed=3)
born = catalog.born_distribution(proto, psi)
for key in proto.outcomes():
    print(key, f"{hist[key] / 50_000:.4f}", f"{born[key]:.4f}")

# %% [markdown]
# Drawing a fresh Haar state for every shot and scoring the optimal guess
# recovers the analytic fidelity of each protocol.

# %%
for name, proto in [("m-2to1", catalog.protocol_2to1()), ("m-1to2", catalog.protocol_1to2())]:
    _, mean, se = catalog.simulate_protocol_haar(proto, shots=200_000, seed=5)
    print(f"{name}: mc {mean:.5f} +- {se:.1e}   exact {catalog.ANALYTIC[name]:.5f}")

# %% [markdown]
# The first stage of `m-2to1` projects A and B onto rotated copies of one
# weakly entangled symmetric state. Every copy has concurrence 1/8.

# %%
import numpy as np

for m in catalog.m2_povm().elements[:-1]:
    w, v = np.linalg.eigh(m)
    print(round(catalog.concurrence(v[:, -1]), 6), end=" ")
print()
