"""How many sampled groups guarantee a contamination-free group?

With an epsilon fraction of corrupted observations, a group of m
independently sampled points is entirely clean with probability roughly
(1-eps)^m, so the number of groups needed for one clean group follows a
closed form.  This script evaluates the calculator, verifies its coverage by
Monte-Carlo, and does the same for the jump-process (change-point) bound.
"""

import numpy as np

from maximin import (
    SupportSet,
    consecutive_blocks,
    gen_jump_process,
    groups_needed_contamination,
    groups_needed_jump,
    pareto_holds,
    rng_from_seed,
    sample_groups,
)

eps, m, gamma = 0.1, 10, 0.05
G = groups_needed_contamination(eps, m, gamma)
print(f"contamination eps={eps}, group size m={m}, failure budget gamma={gamma}")
print(f"  calculator says G = {G} groups")

rng = rng_from_seed(7)
n, trials = 400, 4000
hits = 0
for _ in range(trials):
    contaminated = (rng.random(n) < eps).astype(int)
    spec = sample_groups(n, G, m, replacement=True,
                         seed=int(rng.integers(0, 2**63 - 1)))
    hits += pareto_holds(contaminated, spec, {0})
print(f"  Monte-Carlo: a clean group existed in {hits / trials:.3f} "
      f"of {trials} trials (target >= {1 - gamma})")
print()

print("group size matters: the clean-group probability decays exponentially")
for m_try in (5, 10, 20, 40):
    try:
        g_try = groups_needed_contamination(eps, m_try, gamma)
        print(f"  m={m_try:3d} -> G = {g_try}")
    except Exception as exc:
        print(f"  m={m_try:3d} -> {type(exc).__name__}: {exc}")
print()

n, delta, J = 4000, 0.005, 2
G_jump, feasible = groups_needed_jump(n, delta, J, gamma=0.2)
print(f"jump process: n={n}, jump rate delta={delta}, {J} regimes")
print(f"  calculator says G = {G_jump} consecutive blocks "
      f"(feasible: {feasible})")
G_jump = min(G_jump, n)
support = SupportSet(points=[[1.0, 0.5], [1.0, -0.5]], sigma=np.eye(2))
blocks = consecutive_blocks(n, G_jump)
hits = 0
trials = 300
for t in range(trials):
    out = gen_jump_process(n, 2, support, delta=delta, seed=9000 + t)
    hits += pareto_holds(out.assignments, blocks, {0, 1})
print(f"  Monte-Carlo: every regime owned a pure block in {hits / trials:.3f} "
      f"of {trials} chains (target >= 0.8)")
print()
print("both bounds are conservative by design: the observed coverage sits")
print("well above the requested level.")
