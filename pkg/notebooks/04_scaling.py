"""
Scaling with N
==============

Mean score fraction against x/N for several problem sizes. The curves
nearly coincide.
"""

# %%
import numpy as np

from gsatlab.analysis import aggregate_curves
from gsatlab.campaign import CampaignConfig, simulate

sizes = (50, 100, 200)
grid = np.arange(0, 126)  # x/N = m/50
fracs = {}
for n in sizes:
    c = aggregate_curves(simulate(CampaignConfig(num_vars=n, problems=40, tries=10, master_seed=5)))
    fracs[n] = c.score_frac[(grid * n) // 50]

# %%
for m in range(0, 126, 10):
    print("x/N=%.2f  " % (m / 50) + "  ".join("%.4f" % fracs[n][m] for n in sizes))

# %%
worst = max(np.abs(fracs[a] - fracs[b]).max() for a in sizes for b in sizes)
print("largest gap between sizes: %.4f" % worst)
