"""
Where the self-energy eigenvalues meet
======================================

The 2 x 2 matrix ``M`` is real symmetric, so its eigenvalues only touch
where both ``m11`` and ``m12`` vanish. That happens at isolated crossings
of the line ``jt_par = -jt_perp`` (or ``jt_par = 0``) with the curve
``m12 = 0``.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rgflow import GridSpec, degeneracy_locus
from rgflow.spectra import analytic_crossings, gap_grid

scan = GridSpec.parse("jt_par=-1:1:201,jt_perp=-1:1:201", "j_par=4,nu_f=1")
gaps = gap_grid(scan)
locus = degeneracy_locus(scan, 1e-6)
print("locus:", [(p.axis1, p.axis2) for p in locus])
print("analytic crossings:", analytic_crossings(4.0, 1.0))

fig, ax = plt.subplots(figsize=(5, 4.5))
a, b = scan.axis_values(0), scan.axis_values(1)
im = ax.pcolormesh(a, b, np.log10(gaps.T + 1e-16), shading="auto")
fig.colorbar(im, label="log10 gap")
ax.plot(a, -a, "w", lw=0.8)
ax.plot([p.axis1 for p in locus], [p.axis2 for p in locus], "r*", ms=12)
ax.set(xlabel="jt_par", ylabel="jt_perp")
fig.savefig("degeneracy_locus.png", dpi=120)
