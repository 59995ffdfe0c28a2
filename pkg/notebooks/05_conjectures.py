"""
Plateau conjectures
===================

Two evidence tables. First, the share of +1 flips on the plateau next to
(L - S(x)) / (A N). Second, mean flips to a solution against N ln N.
Neither is given a pass/fail threshold.
"""

# %%
from gsatlab.analysis import (
    aggregate_curves,
    fit_score_model,
    plateau_flip_probability_check,
    success_cost_summary,
)
from gsatlab.campaign import CampaignConfig, simulate

N = 200
traces = simulate(CampaignConfig(num_vars=N, problems=50, tries=10, master_seed=8))
fit = fit_score_model(aggregate_curves(traces))
check = plateau_flip_probability_check(traces, fit).binned(N // 10)
print("x      active  observed  predicted  ratio")
for x, a, o, p, r in check.rows():
    print("%-6d %-7d %.4f    %.4f     %.3f" % (x, a, o, p, r))

# %%
# ratio 3 so that enough tries succeed at every size
groups = {
    n: simulate(CampaignConfig(num_vars=n, ratio=3.0, problems=40, tries=10, max_flips=5 * n, master_seed=1))
    for n in (50, 100, 200)
}
for row in success_cost_summary(groups):
    print(row)
