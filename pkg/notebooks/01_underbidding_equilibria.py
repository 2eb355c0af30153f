# %% [markdown]
# # Underbidding and bad equilibria
#
# Two unit-demand bidders, two items. We look at how much welfare an equilibrium
# can lose when bidders overbid or underbid, using exact rationals throughout.

# %%
from fractions import Fraction as F

from s2pa import check_inub, check_nob, check_snub, enumerate_pne, optimal_allocations, run_auction, verify_pne
from s2pa.catalog import catalog_scenario
from s2pa.equilibria import default_grid

# %% [markdown]
# A crossed equilibrium: each bidder wins the item it likes less.

# %%
sc = catalog_scenario("ex-1.2")
inst, b = sc.instance, sc.bids
out = run_auction(inst, b)
opt = optimal_allocations(inst)
print("welfare", out.welfare, "optimum", opt.opt_value, "ratio", out.welfare / opt.opt_value)
print("PNE", verify_pne(inst, b).holds, "NOB", bool(check_nob(inst, b)),
      "iNUB", bool(check_inub(inst, b)), "sNUB", bool(check_snub(inst, b)))

# %% [markdown]
# Search the whole bid grid. With no-overbidding and no-underbidding filters the
# worst ratio stays at 2/3; without filters it can drop further.

# %%
grid = default_grid(inst, divisor=2)
for filters in [(), ("nob",), ("nob", "snub")]:
    res = enumerate_pne(inst, grid, set(filters))
    print(f"filters={filters or 'none'}: {len(res.profiles)} equilibria kept, worst ratio {res.worst_ratio}")

# %% [markdown]
# Single-minded bidders: the ratio shrinks like 1/R even though every
# equilibrium bid is below its marginal value.

# %%
for R in (F(2), F(10), F(1000)):
    sc = catalog_scenario(f"ex-single-minded(R={R})")
    out = run_auction(sc.instance, sc.bids)
    print(f"R={R}: ratio {out.welfare / optimal_allocations(sc.instance).opt_value}")
