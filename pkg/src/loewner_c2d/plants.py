"""Reference plants used throughout the demos and acceptance tests."""
import numpy as np
from scipy import signal

from .models import ContinuousStateSpace, TimeDelayModel

__all__ = ["fourth_order_plant", "network_tds", "NAMED_PLANTS", "named_plant"]


def fourth_order_numden():
    """Numerator/denominator coefficients (descending powers) of the lightly
    damped fourth-order test plant with unit DC gain."""
    num = np.array([0.5, 0.05 / np.sqrt(2.0), 1.0])
    den = np.polymul([1.0, 0.1, 1.0], [0.2, 0.05 / np.sqrt(5.0), 1.0])
    return num, den


def fourth_order_plant():
    """Two resonances (1 rad/s and sqrt(5) rad/s) and an anti-resonance at sqrt(2)."""
    num, den = fourth_order_numden()
    A, B, C, D = signal.tf2ss(num, den)
    return ContinuousStateSpace(A, B, C, D)


def network_tds(tau=1.2, gamma=0.3, a1=-2.0, a2=1.75):
    """Second-order network model with two state delays tau and tau + gamma.

    The transfer is 1 / (s^2 - a1 exp(-tau s) - a2 exp(-(tau + gamma) s)).
    With the defaults the characteristic roots lie in the open left half
    plane (rightmost pair near -0.039 +- 0.685j) and G(0) = 4.  Flipping the
    sign of `a2` gives a model with roots near 0.713 +- 0.963j.
    """
    A0 = np.array([[0.0, 0.0], [1.0, 0.0]])
    return TimeDelayModel(A0=A0, A1=a1 * A0.T, A2=a2 * A0.T,
                          B=np.array([[1.0], [0.0]]), C=np.array([[0.0, 1.0]]),
                          tau=tau, gamma=gamma)


NAMED_PLANTS = {"paper-ex1": fourth_order_plant, "paper-tds": network_tds}


def named_plant(name):
    try:
        return NAMED_PLANTS[name]()
    except KeyError:
        raise KeyError(f"unknown plant {name!r}; choose from {sorted(NAMED_PLANTS)}") from None
