# %% [markdown]
# # Regret on a four-vertex graph
#
# Arc costs are only known up to an interval. For a fixed path, the scenario
# that hurts it most puts its own arcs at their upper bound and everything
# else at the lower bound. We check that claim by brute force.

# %%
import itertools

import numpy as np

from regret_kit import IntervalDigraph, RRSPProblem, brute_force_robust, induced_scenario, robustness_cost
from regret_kit.rrsp import Path, classical_rsp, enumerate_paths

# arcs:      0->1  1->2  2->3  0->2  0->3
g = IntervalDigraph(
    4,
    tail=[0, 1, 2, 0, 0],
    head=[1, 2, 3, 2, 3],
    l=[1, 1, 3, 3, 1],
    u=[2, 2, 5, 6, 1],
    d=[1, 1, 1, 1, 5],
    origin=0,
    dest=3,
    beta=3,
)
problem = RRSPProblem(g)

# %% The direct arc 0->3 is cheap but uses 5 units of resource, more than beta allows.
y = Path((0, 1, 2)).vector(g.n_arcs)
s = induced_scenario(y, g.intervals())
best_path, best_cost = classical_rsp(g, s)
print("path cost in its own worst case:", s.cost(y))
print("best beta-feasible path there:", best_path.arcs, "cost", best_cost)
print("regret:", robustness_cost(y, problem))

# %% Every extreme scenario, every path: the induced scenario is the maximizer.
paths = [p.vector(g.n_arcs) for p in enumerate_paths(g)]
iv = g.intervals()
worst = max(
    c @ y - min(c @ x for x in paths)
    for c in (np.where(bits, iv.u, iv.l) for bits in itertools.product((0, 1), repeat=g.n_arcs))
)
print("max over 32 extreme scenarios:", worst)

# %% The robust path minimizes that worst regret.
rep = brute_force_robust(problem)
print("robust path arcs:", rep.y.nonzero()[0].tolist(), "robustness cost", rep.robustness_cost)
