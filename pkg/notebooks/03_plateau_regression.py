"""
Exponential decay on the plateau
================================

Average many tries, then fit S(x)/N = B - C exp(-x/(A N)) to the score and
P(x)/N = E + F exp(-x/(D N)) to poss-flips, starting at 0.4 N flips.
"""

# %%
from gsatlab.analysis import aggregate_curves, fit_poss_model, fit_region_decay, fit_score_model
from gsatlab.campaign import CampaignConfig, simulate

N = 250
traces = simulate(CampaignConfig(num_vars=N, problems=50, tries=10, master_seed=3))
curves = aggregate_curves(traces)

# %%
s = fit_score_model(curves)
print("score  A=%.3f B=%.3f C=%.4f R2=%.4f" % (s.decay_constant, s.asymptote, s.amplitude, s.r_squared))
print("asymptotic score fraction %.4f" % (s.asymptote * N / curves.num_clauses))

p = fit_poss_model(curves)
print("poss   D=%.3f E=%.4f F=%.4f R2=%.4f" % (p.decay_constant, p.asymptote, p.amplitude, p.r_squared))

# %%
# residuals at a few points
for x in (100, 200, 400, 600):
    print(x, round(curves.mean_score[x], 2), round(float(s.predict(x)), 2))

# %%
# inside H_1 the mean flip size decays toward 1
r = fit_region_decay(traces, 1)
print("H_1  D_1=%.4f E_1=%.3f R2=%.3f" % (r.decay_constant, r.amplitude, r.r_squared))
