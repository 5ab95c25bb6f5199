"""
PT self-energy: zeros of the radicand
=====================================

The radicand ``R(g)`` of the PT self-energy is linear in the integration
constant ``c1``, so a zero can be placed at any ``g`` on purpose and then
recovered by bisection. Each zero is a circle in the ``(g_r, g_i)`` plane,
cut by the line ``g_i = inv * g_r``.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rgflow import PTSelfEnergyParams, pt_separatrix, sigma_pt
from rgflow.spectra import c1_for_root, pt_radicand_scaled

inv = 0.5
c1 = c1_for_root(1.0, inv)
root = pt_separatrix(inv, c1, (0.5, 1.7))
print("placed at g = 1, recovered g =", root.g)
print("plane points:", root.points)

# %%
# The phase tag changes across the zero.
for g in (0.9, 1.1):
    print(g, sigma_pt(PTSelfEnergyParams(g, inv, c1)).phase.value)

g = np.linspace(0.3, 4, 400)
fig, ax = plt.subplots(figsize=(6, 3.5))
ax.plot(g, [pt_radicand_scaled(v, inv, c1) for v in g])
ax.axhline(0, c="k", lw=0.8)
ax.axvline(root.g, c="r", ls="--")
ax.set(xlabel="g", ylabel="R exp(-10 inv^2 / g)")
fig.tight_layout()
fig.savefig("pt_radicand.png", dpi=120)
