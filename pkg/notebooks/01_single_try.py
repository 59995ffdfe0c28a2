"""
One GSAT try, flip by flip
==========================

Generate a random 3-SAT problem at the hard ratio and watch a single try:
score climbs fast, then wanders on a plateau where most flips are sideways.
"""

# %%
import numpy as np

from gsatlab import GeneratorSpec, generate_random_ksat, run_try, score

N = 200
f = generate_random_ksat(GeneratorSpec(N, ratio=4.3, seed=1))
print(f.num_vars, "variables,", f.num_clauses, "clauses")

# %%
t = run_try(f, max_flips=int(2.5 * N), rng_stream=7)
print("initial score %d/%d = %.3f" % (t.initial_score, f.num_clauses, t.initial_score / f.num_clauses))
print("solved at", t.solved_at)

# %%
# score and branching every 25 flips
for x in range(0, len(t), 25):
    print("%4d  score %.4f  poss %3d  delta %+d" % (x + 1, t.scores[x] / f.num_clauses, t.poss_sizes[x], t.deltas[x]))

# %%
# sizes of the flips made: mostly +1 and 0
sizes, counts = np.unique(t.deltas, return_counts=True)
print(dict(zip(sizes.tolist(), counts.tolist())))
