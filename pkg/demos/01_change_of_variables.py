"""Links to gauge-invariant variables and back, on a small open lattice.

Shows the vertex field, the strips, the variable count, and that a random
gauge transformation only moves the vertex field.
"""

import numpy as np

from givlattice import BoundaryCondition, LatticeGeometry, count_variables, extract_giv, random_links, reconstruct_links
from givlattice.lattice import apply_gauge_transformation

rng = np.random.default_rng(7)
g = LatticeGeometry(2, 4, BoundaryCondition.OPEN)
links = random_links(g, rng)
print(f"lattice: d+1={g.dim}, N={g.size}, {g.n_links} link variables")

rep = extract_giv(links)
print("vertex field phi (corner pinned to 0):")
print(np.round(rep.phi.values, 3))
for key, strip in rep.strips.items():
    print(f"strip F{key}:")
    print(np.round(strip.values, 3))
print("variable count:", count_variables(rep))

back = reconstruct_links(rep)
print(f"round trip max |dA| = {np.max(np.abs(back.values - links.values)):.1e}")

lam = rng.uniform(-np.pi, np.pi, g.shape)
moved = extract_giv(apply_gauge_transformation(links, lam))
dphi = moved.phi.values - rep.phi.values
print(f"after a gauge transformation: strips move by "
      f"{max(np.max(np.abs(moved.strips[k].values - rep.strips[k].values)) for k in rep.strips):.1e}, "
      f"phi moves by Lambda - Lambda(corner) up to {np.max(np.abs(dphi - (lam - lam[-1, -1]))):.1e}")
