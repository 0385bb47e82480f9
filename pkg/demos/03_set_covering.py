# %% [markdown]
# # Robust set covering from an OR-Library style file
#
# A covering structure is read from the usual scp text layout, then turned
# into interval costs by one of three generators.

# %%
from regret_kit import amu, benders, brute_force_robust, lph
from regret_kit.rsc import RSCProblem, generate_beasley, generate_kz, generate_montemanni, parse_orlib

scp = """6 8
4 7 3 5 6 2 8 4
3 1 2 3
3 3 4 5
2 5 6
3 6 7 8
2 1 8
3 2 4 7
"""
structure = parse_orlib(scp, name="toy")
print(structure.n_rows, "rows,", structure.n_cols, "columns; base costs", structure.base.tolist())

# %% Same structure, three interval models
for problem in (generate_beasley(structure, 0.5, 1), generate_montemanni(structure, 1), generate_kz(structure, 1)):
    p = RSCProblem(problem)
    opt = brute_force_robust(p).robustness_cost
    print(
        f"{problem.name:14s} opt {opt:4d}  benders {benders(p).robustness_cost:4d}  "
        f"amu {amu(p).robustness_cost:4d}  lph {lph(p).robustness_cost:4d}"
    )
