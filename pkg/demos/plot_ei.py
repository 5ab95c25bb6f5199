"""
Exponential integral on both sides of zero
==========================================

``ei`` switches between a power series, a continued fraction for
negative arguments and an asymptotic series for large positive ones.
Here it is compared against adaptive quadrature of the defining integral.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rgflow import ei
from rgflow.verification import ei_quadrature

x = np.geomspace(1e-3, 50, 400)
err_pos = [abs(ei(v) / ei_quadrature(v) - 1) for v in x]
err_neg = [abs(ei(-v) / ei_quadrature(-v) - 1) for v in x]
print("worst relative error:", max(err_pos + err_neg))

fig, ax = plt.subplots(figsize=(6, 3.5))
ax.loglog(x, np.maximum(err_pos, 1e-17), label="x > 0")
ax.loglog(x, np.maximum(err_neg, 1e-17), label="x < 0")
ax.axhline(1e-10, c="k", lw=0.8)
ax.set(xlabel="|x|", ylabel="relative error vs quadrature")
ax.legend()
fig.tight_layout()
fig.savefig("ei_error.png", dpi=120)
