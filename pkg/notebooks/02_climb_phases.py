"""
Hill-climbing phases
====================

Split each try into regions H_j, where the typical flip gains exactly j, and
collect their lengths, ratios and the mean climbing gradient.
"""

# %%
from gsatlab.analysis import flip_size_histogram, phase_stats, segment_phases
from gsatlab.campaign import CampaignConfig, simulate

traces = simulate(CampaignConfig(num_vars=500, problems=20, tries=10, master_seed=11))
print(len(traces), "tries")

# %%
seg = segment_phases(traces[0])
print("climb ends after", seg.climb_end, "flips")
for r in seg.regions:
    print("H_%d  flips %d..%d  (%d)" % (r.j, r.start, r.end, len(r)))

# %%
stats = phase_stats(traces)
print("mean climb %.1f  sd %.2f" % (stats.mean_climb, stats.sd_climb))
print("gradient %.3f +/- %.3f" % (stats.mean_gradient, stats.sd_gradient))
for j in sorted(stats.regions, reverse=True)[:6]:
    r = stats[j]
    print("H_%d  ratio %.3f  length %.2f  tries %d" % (j, r.mean_ratio, r.mean_length, r.tries))

# %%
# a region mostly holds flips of its own size, plus some j+1
for j in (1, 2):
    print(j, {d: round(p, 4) for d, p in flip_size_histogram(traces, j).items()})
