# %% [markdown]
# # Benders against the two heuristics
#
# On 10x10 grid graphs the exact method proves optimality quickly. The
# mid-point heuristic (AMU) and the LP-dual heuristic (LPH) give upper bounds
# whose quality we read off as gaps to the proven optimum.

# %%
from regret_kit import amu, benders, generate_coco, lph
from regret_kit.bench import gap_pct
from regret_kit.rrsp import RRSPProblem

for seed in range(1, 4):
    p = RRSPProblem(generate_coco(10, 10, 20, 0.9, seed))
    exact = benders(p, time_limit=60)
    a, h = amu(p), lph(p, time_limit=60)
    print(
        f"seed {seed}: Benders {exact.status} opt={exact.robustness_cost} cuts={exact.cuts}  "
        f"AMU {a.robustness_cost} ({gap_pct(a.robustness_cost, exact.lower_bound):.1f}%)  "
        f"LPH {h.robustness_cost} ({gap_pct(h.robustness_cost, exact.lower_bound):.1f}%)"
    )

# %% How the Benders bounds close in on each other
p = RRSPProblem(generate_coco(10, 10, 20, 0.9, 2))
rep = benders(p)
for k, (lo, hi) in enumerate(zip(rep.lb_history, rep.ub_history), start=1):
    print(f"iteration {k:2d}: {lo + 0.0:8.1f} <= opt <= {hi:6.1f}")
