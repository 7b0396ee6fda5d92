"""Discretisation error measures.

The frequency error compares G(jw) with R(jw) G_d(exp(jwh)) below the
Nyquist frequency, R being the zero-order-hold response; the time-domain
error compares the continuous response with the held discrete one.
"""
import json
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import NumericFailure, UnsupportedCombinationError
from .loewner import frequency_grid, holder_transfer
from .models import (ContinuousStateSpace, TimeDelayModel, eval_continuous,
                     eval_discrete, impulse_response_continuous, is_stable,
                     sample_and_hold_output, step_response_continuous,
                     step_response_tds)
from .stabilize import linf_distance

__all__ = [
    "ErrorReport",
    "SweepRow",
    "paper_grid",
    "hinf_norm",
    "freq_error",
    "time_error_l2",
    "time_response",
    "order_sweep",
    "SWEEP_HEADER",
]

NORM_GRID = np.logspace(-4, 3, 4096)


def paper_grid(h, n_points=5000):
    """`n_points` linearly spaced frequencies in [1e-3, pi/h - 1e-3]."""
    return frequency_grid(h, n_points, "linear")


def _gain(values):
    """|.| for SISO values, spectral norm for stacked matrices."""
    values = np.asarray(values)
    if values.ndim == 1:
        return np.abs(values)
    return np.linalg.norm(values, ord=2, axis=(1, 2))


def hinf_norm(G, extra_grid=()):
    """max |G(jw)| over a log grid on [1e-4, 1e3] rad/s joined with `extra_grid`."""
    w = np.union1d(NORM_GRID, np.asarray(extra_grid, dtype=float))
    return float(np.max(_gain(eval_continuous(G, 1j * w))))


@dataclass
class ErrorReport:
    e_inf: float
    e_inf_rel: float
    argmax_omega: float
    h_inf_norm_G: float
    grid_points: int
    grid_min: float
    grid_max: float

    def to_dict(self):
        return asdict(self)

    def to_json(self, **extra):
        data = self.to_dict()
        data.update(extra)
        return json.dumps(data, indent=1, sort_keys=True)


def freq_error(G, G_d, grid=None, normalizer=None):
    """max over `grid` of |G(jw) - R(jw) G_d(exp(jwh))| and its relative form.

    Parameters
    ----------
    grid : array_like, optional
        Frequencies in (0, pi/h); defaults to :func:`paper_grid`.
    normalizer : float, optional
        ||G||_Hinf; computed by :func:`hinf_norm` when omitted.
    """
    h = G_d.h
    w = paper_grid(h) if grid is None else np.asarray(grid, dtype=float)
    if w.size == 0 or np.any(w <= 0) or np.any(w >= np.pi / h):
        raise ValueError("grid must be non-empty and inside (0, pi/h)")
    g = eval_continuous(G, 1j * w)
    gd = eval_discrete(G_d, np.exp(1j * w * h))
    r = holder_transfer(w, h)
    if np.ndim(g) > 1:
        r = r[:, None, None]
    err = _gain(g - r * gd)
    i = int(np.argmax(err))
    if normalizer is None:
        normalizer = hinf_norm(G, w)
    e = float(err[i])
    return ErrorReport(e, 100.0 * e / normalizer, float(w[i]), float(normalizer),
                       int(w.size), float(w.min()), float(w.max()))


def time_error_l2(y_ref, y_test):
    """100 * ||y_ref - y_test||_2 / ||y_ref||_2."""
    y_ref = np.asarray(y_ref, dtype=float)
    y_test = np.asarray(y_test, dtype=float)
    if y_ref.shape != y_test.shape:
        raise ValueError(f"length mismatch {y_ref.shape} vs {y_test.shape}")
    ref = np.linalg.norm(y_ref)
    if ref == 0:
        raise ValueError("reference signal has zero norm")
    return float(100.0 * np.linalg.norm(y_ref - y_test) / ref)


def time_response(G, G_d, signal="impulse", t_end=100.0, subdivisions=100):
    """Continuous reference and held discrete output on a grid of step h/subdivisions.

    For ``signal='impulse'`` the discrete model is driven by the unit-area
    pulse u_d[0] = 1/h and the reference is g(t) = C exp(At) B.  Step
    responses use a unit step on both sides; time-delay references are
    integrated with :func:`step_response_tds`.

    Returns
    -------
    t, y, y_held : ndarray
    """
    h = G_d.h
    dt = h / subdivisions
    n = int(round(t_end / dt))
    t = np.arange(n + 1) * dt
    n_k = n // subdivisions + 1
    if signal == "impulse":
        if isinstance(G, TimeDelayModel):
            raise UnsupportedCombinationError("impulse reference not available for "
                                              "time-delay models; use a step")
        if np.any(G.D != 0):
            raise UnsupportedCombinationError("impulse reference needs D = 0")
        y = impulse_response_continuous(G, t)
        u_d = np.zeros(n_k)
        u_d[0] = 1.0 / h
        y_held = sample_and_hold_output(G_d, t, None, u_d=u_d)
    elif signal == "step":
        if isinstance(G, TimeDelayModel):
            t_tds, y = step_response_tds(G, t[-1], dt)
            if t_tds.size != t.size:
                raise NumericFailure("time grids disagree")
        elif isinstance(G, ContinuousStateSpace):
            y = step_response_continuous(G, t)
        else:
            raise UnsupportedCombinationError(f"no time response for {type(G).__name__}")
        y_held = sample_and_hold_output(G_d, t, np.ones_like(t))
    else:
        raise ValueError(f"unknown signal {signal!r}")
    return t, y, y_held


SWEEP_HEADER = ("k", "e_rel_unproj", "e_rel_proj", "stable_unproj", "order_proj",
                "gap_to_exact")


@dataclass
class SweepRow:
    k: int
    e_rel_unproj: float = float("nan")
    e_rel_proj: float = float("nan")
    stable_unproj: bool = False
    order_proj: int = -1
    gap_to_exact: float = float("nan")
    error: str = ""

    @property
    def failed(self):
        return bool(self.error)


def order_sweep(G, h, m=50, k_range=None, rank_tol=1e-10, grid_points=5000,
                stabilization="nehari", fit=None):
    """Relative errors of G_d^k and of its stabilised version for each k.

    A failing k is recorded in ``SweepRow.error`` and the sweep goes on.
    `gap_to_exact` is ||G_d^r - G_d^k||_Linf on a 4096-point circle grid.

    Returns
    -------
    rows : list of SweepRow, fit : LoewnerFit
    """
    from .pipeline import LoewnerFit, stabilize_model

    fit = fit or LoewnerFit.from_model(G, h, m, rank_tol)
    r = fit.r
    ks = range(1, r + 1) if k_range is None else sorted(set(int(k) for k in k_range))
    w = paper_grid(h, grid_points)
    norm = hinf_norm(G, w)
    G_r = fit.interpolant(r)
    rows = []
    for k in ks:
        row = SweepRow(k)
        try:
            if not 1 <= k <= r:
                raise ValueError(f"k={k} outside [1, r={r}]")
            Gk = fit.interpolant(k)
            row.stable_unproj = is_stable(Gk)
            row.e_rel_unproj = freq_error(G, Gk, w, norm).e_inf_rel
            row.gap_to_exact = linf_distance(G_r, Gk)
            Gs = stabilize_model(Gk, stabilization)
            row.order_proj = Gs.order
            row.e_rel_proj = freq_error(G, Gs, w, norm).e_inf_rel
        except (NumericFailure, ValueError, np.linalg.LinAlgError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows, fit
