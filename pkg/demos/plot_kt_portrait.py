"""
Kosterlitz-Thouless wedge on the Hermitian slice
================================================

Launch the PT flow from a grid of ``(K, g_r)`` with ``g_i = 0`` and colour
each start by how its run ended. Starts that run away to strong coupling
fill the left of the plane; the weak-coupling cells sit to the right of a
boundary that meets ``K = 2`` as ``g_r`` goes to zero.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rgflow import GridSpec, StepControl, System, Termination, flow_portrait

grid = GridSpec.parse("k=0:4:21,g_r=0:0.5:21", "g_i=0")
portrait = flow_portrait(System.PT, grid, StepControl())

# %%
# Termination codes as a 21 x 21 table (rows are K, columns g_r).
codes = portrait.terminations()
weak = codes == Termination.REACHED_L_MAX
print("weak-coupling cells:", int(weak.sum()), "of", weak.size)

ks, grs = grid.axis_values(0), grid.axis_values(1)
for j in (1, 2, 4, 10):
    k_b = ks[np.argmax(weak[:, j])]
    print(f"g_r = {grs[j]:.3f}: weak side starts at K = {k_b:.1f}")

# %%
# Trajectories, clipped to the window, over the termination map.
fig, ax = plt.subplots(figsize=(6, 5))
K, G = np.meshgrid(ks, grs, indexing="ij")
ax.scatter(K[weak], G[weak], s=12, c="tab:blue", label="ReachedLMax")
ax.scatter(K[~weak], G[~weak], s=12, c="tab:red", label="Blowup")
for t in portrait.trajectories[::7]:
    ax.plot(t.states[:, 0], t.states[:, 1], lw=0.5, c="0.4")
g = np.linspace(0, 0.5, 2)
ax.plot(2 + 2 * g, g, "k", lw=2, label="linearized separatrix")
ax.set(xlim=(0, 4), ylim=(0, 0.5), xlabel="K", ylabel="g_r")
ax.legend(loc="upper right")
fig.savefig("kt_portrait.png", dpi=120)
