"""Impulse responses of the fourth-order plant against held discrete
responses, measured by the relative L2 error."""
from loewner_c2d import fourth_order_plant, impulse_invariant, loewner_discretize, zoh
from loewner_c2d.metrics import time_error_l2, time_response

G, h = fourth_order_plant(), 0.4
models = {
    "zoh": zoh(G, h),
    "impulse": impulse_invariant(G, h),
    "loewner": loewner_discretize(G, h, kbar=4, select="best").model,
}
for name, Gd in models.items():
    t, y, y_held = time_response(G, Gd, "impulse", t_end=100.0)
    print(f"{name:<8} e2 = {time_error_l2(y, y_held):6.2f}%")
