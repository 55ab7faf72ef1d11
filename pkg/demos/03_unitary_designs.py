# %% [markdown]
# # Unitary designs among Clifford subsets
#
# A finite set is a t-design when its frame potential equals the Haar
# value: 1, 2 and 5 for t = 1, 2, 3 on a qubit.

# %%
from spin_triad import frame_potential, get_set, haar_frame_potential, is_t_design
from spin_triad.designs import SETS

for name in sorted(SETS):
    us = get_set(name)
    fps = [frame_potential(us, t) for t in (1, 2, 3)]
    flags = ["y" if is_t_design(us, t) else "-" for t in (1, 2, 3)]
    print(f"{name:10s} |G|={len(us):2d}  FP={[round(f, 4) for f in fps]}  design? {flags}")
print("haar", [haar_frame_potential(t) for t in (1, 2, 3)])

# %% [markdown]
# The 12-element set is a 2-design but not a 3-design; the full Clifford
# group is a 3-design. A 2-design orbit of a symmetric two-qubit state
# therefore gives a valid POVM on the symmetric subspace.

# %%
import numpy as np

from spin_triad import catalog
from spin_triad.symmetry import sym_projector
from spin_triad.tensor import kron, proj

phi = catalog.phi_tilde()
gb = get_set("gbar")
total = sum(3 / len(gb) * proj(kron(u, u) @ phi) for u in gb)
print("resolves P_sym:", np.allclose(total, sym_projector(2)))
