"""Classic discretisation schemes: zero-order hold, Tustin, impulse invariance."""
import numpy as np

from .exceptions import NotStrictlyProperError, PoleHitError, UnsupportedCombinationError
from .linalg import expm
from .models import ContinuousStateSpace, DiscreteStateSpace, TimeDelayModel

__all__ = ["zoh", "tustin", "impulse_invariant", "discretize_baseline"]


def _check(G, h):
    if isinstance(G, TimeDelayModel):
        raise UnsupportedCombinationError("state-space baselines need a delay-free model")
    if not isinstance(G, ContinuousStateSpace):
        raise TypeError(f"expected ContinuousStateSpace, got {type(G).__name__}")
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")


def zoh(G, h):
    """Zero-order-hold equivalent.

    Uses expm([[A, B], [0, 0]] h) so that no inverse of A is needed.
    """
    _check(G, h)
    n, nu = G.B.shape
    big = np.zeros((n + nu, n + nu))
    big[:n, :n] = G.A
    big[:n, n:] = G.B
    E = expm(big * h)
    return DiscreteStateSpace(E[:n, :n], E[:n, n:], G.C, G.D, h)


def tustin(G, h):
    """Bilinear transform s = (2/h)(z - 1)/(z + 1), no prewarping."""
    _check(G, h)
    n = G.order
    I = np.eye(n)
    M_inv = I - G.A * (h / 2)
    try:
        M = np.linalg.inv(M_inv)
    except np.linalg.LinAlgError:
        raise PoleHitError(f"continuous model has a pole at 2/h = {2 / h}", 2 / h) from None
    if np.linalg.cond(M_inv) > 1e14:
        raise PoleHitError(f"continuous model has a pole at 2/h = {2 / h}", 2 / h)
    Ad = M @ (I + G.A * (h / 2))
    Bd = M @ G.B * np.sqrt(h)
    Cd = G.C @ M * np.sqrt(h)
    Dd = G.D + G.C @ M @ G.B * (h / 2)
    return DiscreteStateSpace(Ad, Bd, Cd, Dd, h)


def impulse_invariant(G, h):
    """Discrete model whose pulse response is y_d[k] = h g(kh), k >= 0.

    g(t) = C expm(A t) B, and y_d[0] = h C B is the right limit g(0+).
    """
    _check(G, h)
    if np.any(G.D != 0):
        raise NotStrictlyProperError("impulse-invariant discretisation needs D = 0")
    Ad = expm(G.A * h)
    return DiscreteStateSpace(Ad, G.B, h * G.C @ Ad, h * G.C @ G.B, h)


_METHODS = {"zoh": zoh, "tustin": tustin, "impulse": impulse_invariant}


def discretize_baseline(G, h, method):
    try:
        fn = _METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None
    return fn(G, h)
