"""Frequency-domain discretisation error of the classic schemes on the
fourth-order test plant at h = 0.4, next to a fourth-order Loewner model."""
from loewner_c2d import (discretize_baseline, fourth_order_plant, freq_error,
                         loewner_discretize)

G, h = fourth_order_plant(), 0.4

print(f"{'method':<10} {'order':>5} {'e_rel [%]':>10}")
for method in ("tustin", "zoh", "impulse"):
    Gd = discretize_baseline(G, h, method)
    print(f"{method:<10} {Gd.order:>5} {freq_error(G, Gd).e_inf_rel:>10.2f}")

res = loewner_discretize(G, h, kbar=4, select="best")
print(f"{'loewner':<10} {res.order:>5} {freq_error(G, res.model).e_inf_rel:>10.2f}")
