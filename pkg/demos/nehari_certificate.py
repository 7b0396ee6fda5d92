"""The L-infinity distance between a model and its stable projection equals
the largest Hankel singular value of the reflected antistable part."""
import numpy as np

from loewner_c2d import DiscreteStateSpace, l2_truncate, nehari_project, split_stable_antistable
from loewner_c2d.stabilize import hankel_spectrum_antistable, linf_distance

rng = np.random.default_rng(0)
A = np.diag([0.3, -0.6, 0.8, 1.5, -2.2])
T = rng.standard_normal((5, 5)) + 3 * np.eye(5)
A = T @ A @ np.linalg.inv(T)
G = DiscreteStateSpace(A, rng.standard_normal((5, 1)), rng.standard_normal((1, 5)),
                       [[0.4]], 1.0)

sp = split_stable_antistable(G)
hs = hankel_spectrum_antistable(sp.antistable)
P = nehari_project(G)
print(f"stable / antistable orders: {sp.stable.order} / {sp.antistable.order}")
print(f"Hankel singular values: {np.array2string(hs.values, precision=6)}")
print(f"||G - P_inf(G)||   = {linf_distance(G, P):.8f}")
print(f"||G - truncated(G)|| = {linf_distance(G, l2_truncate(G)):.8f}")
print(f"projected order {P.order}")
