"""Discretise the two-delay network plant at h = 0.2 from frequency data
alone and compare its held step response with a DDE simulation."""
import numpy as np

from loewner_c2d import freq_error, loewner_discretize, network_tds
from loewner_c2d.metrics import time_error_l2, time_response
from loewner_c2d.pipeline import LoewnerFit

G, h = network_tds(), 0.2
fit = LoewnerFit.from_model(G, h, m=50)
print(f"rank r = {fit.r}")
for kbar in (2, 6, 10, 12):
    res = loewner_discretize(G, h, kbar=kbar, select="best", fit=fit)
    print(f"kbar {kbar:>2}: k = {res.k:>2}, order {res.order:>2}, "
          f"e_rel = {freq_error(G, res.model).e_inf_rel:.4f}%")

t, y, y_held = time_response(G, res.model, "step", t_end=60.0)
print(f"step response e2 = {time_error_l2(y, y_held):.2f}%, "
      f"y(60) = {y[-1]:.3f}, held = {y_held[-1]:.3f}, G(0) = 4")
