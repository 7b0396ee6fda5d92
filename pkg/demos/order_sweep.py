"""Sweep the reduced order k from 1 to r and show the effect of projecting
each interpolant onto the stable models."""
from loewner_c2d import fourth_order_plant, order_sweep

# interpolants with a near-marginal pole at z = -1 carry a large Hankel
# singular value, so their L-infinity optimal projection is far away
rows, fit = order_sweep(fourth_order_plant(), 0.4)
print(f"rank r = {fit.r}")
print(f"{'k':>3} {'unproj %':>10} {'proj %':>10} {'stable':>7} {'order':>6}")
for row in rows:
    print(f"{row.k:>3} {row.e_rel_unproj:>10.3f} {row.e_rel_proj:>10.3f} "
          f"{str(row.stable_unproj):>7} {row.order_proj:>6}")
