# %% [markdown]
# # Revenue guarantees and smoothness on random instances
#
# Sample random monotone and XOS instances, keep bid profiles that satisfy a
# no-underbidding condition, and check the revenue and welfare bounds exactly.

# %%
import random

from s2pa import alpha_star, check_nob, check_snub, optimal_allocations, run_auction
from s2pa.bounds import check_revenue_guarantee, check_smoothness_at, xos_deviation
from s2pa.generators import generate_instances, random_bids

rng = random.Random(7)

# %% [markdown]
# Monotone tables with sNUB bids: revenue covers the welfare gap.

# %%
kept = worst = 0
for seed in range(1, 200):
    inst = generate_instances("mon_table", 2, 3, seed, 1)[0]
    b = random_bids(rng, 2, 3, 8, 2)
    if not check_snub(inst, b):
        continue
    kept += 1
    assert check_revenue_guarantee(inst, [b], 1, 1)
    out = run_auction(inst, b)
    gap = optimal_allocations(inst).opt_value - out.welfare
    worst = max(worst, gap - out.revenue)
print(f"{kept} sNUB profiles, largest (gap - revenue) = {worst}")

# %% [markdown]
# XOS instances with no-overbidding bids satisfy the (1,1) smoothness inequality.

# %%
checked = 0
for seed in range(1, 200):
    inst = generate_instances("xos_clauses", 2, 3, seed, 1)[0]
    b = random_bids(rng, 2, 3, 3, 2)
    if check_nob(inst, b):
        checked += 1
        assert check_smoothness_at(inst, b, xos_deviation(inst), 1, 1)
print(f"smoothness held on {checked} NOB profiles")

# %% [markdown]
# The submodularity ratio of a few random tables.

# %%
for family in ("sm_table", "sa_table", "mon_table"):
    v = generate_instances(family, 1, 3, 11, 1)[0].valuations[0]
    print(family, alpha_star(v).alpha_star)
