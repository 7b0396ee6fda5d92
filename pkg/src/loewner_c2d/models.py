"""Continuous, discrete and descriptor LTI models.

Evaluation is vectorised over arrays of complex frequencies: the
resolvent is obtained by a batched dense solve at each point.
"""
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .exceptions import IrregularPencilError, PoleHitError
from .linalg import as_matrix, expm

__all__ = [
    "ContinuousStateSpace",
    "TimeDelayModel",
    "DiscreteStateSpace",
    "DescriptorModel",
    "eval_continuous",
    "eval_discrete",
    "poles",
    "is_stable",
    "impulse_response_continuous",
    "impulse_response_discrete",
    "step_response_continuous",
    "step_response_tds",
    "sample_and_hold_output",
    "load_model",
    "dump_model",
    "model_to_dict",
    "model_from_dict",
]


def _ss_matrices(A, B, C, D, dtype=float):
    A = as_matrix(A, "A", dtype)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"A must be square, got {A.shape}")
    B = np.asarray(B, dtype=dtype)
    C = np.asarray(C, dtype=dtype)
    if B.ndim < 2:
        B = B.reshape(n, -1)
    if C.ndim < 2:
        C = C.reshape(-1, n)
    B = as_matrix(B, "B")
    C = as_matrix(C, "C")
    if D is None:
        D = np.zeros((C.shape[0], B.shape[1]), dtype=dtype)
    D = as_matrix(D, "D", dtype)
    if B.shape[0] != n or C.shape[1] != n:
        raise ValueError(f"inconsistent shapes A{A.shape} B{B.shape} C{C.shape}")
    if D.shape != (C.shape[0], B.shape[1]):
        raise ValueError(f"D must be {(C.shape[0], B.shape[1])}, got {D.shape}")
    return A, B, C, D


def _freeze(*arrays):
    for a in arrays:
        a.flags.writeable = False


@dataclass(frozen=True)
class ContinuousStateSpace:
    """x' = A x + B u,  y = C x + D u."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray = None

    def __post_init__(self):
        A, B, C, D = _ss_matrices(self.A, self.B, self.C, self.D)
        for name, val in zip("ABCD", (A, B, C, D)):
            object.__setattr__(self, name, val)
        _freeze(A, B, C, D)

    @property
    def order(self):
        return self.A.shape[0]

    @property
    def shape(self):
        return self.D.shape

    def __call__(self, s):
        return eval_continuous(self, s)


@dataclass(frozen=True)
class TimeDelayModel:
    """x'(t) = A0 x(t) + A1 x(t - tau) + A2 x(t - tau - gamma) + B u(t), y = C x."""

    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    B: np.ndarray
    C: np.ndarray
    tau: float
    gamma: float

    def __post_init__(self):
        A0, B, C, _ = _ss_matrices(self.A0, self.B, self.C, None)
        n = A0.shape[0]
        A1 = as_matrix(self.A1, "A1", float)
        A2 = as_matrix(self.A2, "A2", float)
        if A1.shape != (n, n) or A2.shape != (n, n):
            raise ValueError("A1 and A2 must match A0")
        if self.tau < 0 or self.gamma < 0:
            raise ValueError("delays must be non-negative")
        for name, val in (("A0", A0), ("A1", A1), ("A2", A2), ("B", B), ("C", C)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "gamma", float(self.gamma))
        _freeze(A0, A1, A2, B, C)

    @property
    def order(self):
        return self.A0.shape[0]

    @property
    def shape(self):
        return (self.C.shape[0], self.B.shape[1])

    @property
    def D(self):
        return np.zeros(self.shape)

    def __call__(self, s):
        return eval_continuous(self, s)


@dataclass(frozen=True)
class DiscreteStateSpace:
    """x[k+1] = A x[k] + B u[k],  y[k] = C x[k] + D u[k], sampled every h."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray = None
    h: float = 1.0

    def __post_init__(self):
        A, B, C, D = _ss_matrices(self.A, self.B, self.C, self.D)
        if not self.h > 0:
            raise ValueError(f"sampling period must be positive, got {self.h}")
        for name, val in zip("ABCD", (A, B, C, D)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "h", float(self.h))
        _freeze(A, B, C, D)

    @property
    def order(self):
        return self.A.shape[0]

    @property
    def shape(self):
        return self.D.shape

    def __call__(self, z):
        return eval_discrete(self, z)


@dataclass(frozen=True)
class DescriptorModel:
    """E x[k+1] = A x[k] + B u[k],  y[k] = C x[k] (complex allowed, SISO)."""

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    h: float = None

    def __post_init__(self):
        A, B, C, _ = _ss_matrices(self.A, self.B, self.C, None, dtype=complex)
        E = as_matrix(self.E, "E", complex)
        if E.shape != A.shape:
            raise ValueError(f"E{E.shape} must match A{A.shape}")
        for name, val in zip("EABC", (E, A, B, C)):
            object.__setattr__(self, name, val)
        _freeze(E, A, B, C)

    @property
    def order(self):
        return self.A.shape[0]

    @property
    def shape(self):
        return (self.C.shape[0], self.B.shape[1])

    def __call__(self, z):
        return eval_discrete(self, z)


def _resolvent_eval(points, E, A, B, C, D, label):
    """C (p E - A)^{-1} B + D for every p, shape (npts, ny, nu)."""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    n = A.shape[0]
    ny, nu = C.shape[0], B.shape[1]
    out = np.empty((points.size, ny, nu), dtype=complex)
    out[:] = D
    if n == 0:
        return out
    M = points[:, None, None] * E[None] - A[None]
    try:
        X = np.linalg.solve(M, np.broadcast_to(B, (points.size, n, nu)))
    except np.linalg.LinAlgError:
        # find the offending point for the error message
        for p, Mp in zip(points, M):
            try:
                np.linalg.solve(Mp, B)
            except np.linalg.LinAlgError:
                raise PoleHitError(f"{label} evaluated at a pole p={p}", p) from None
        raise
    if not np.all(np.isfinite(X)):
        bad = points[~np.all(np.isfinite(X), axis=(1, 2))][0]
        raise PoleHitError(f"{label} evaluated at a pole p={bad}", bad)
    out += C[None] @ X
    return out


def _squeeze_siso(values, points, shape):
    if shape == (1, 1):
        values = values[:, 0, 0]
    if np.ndim(points) == 0:
        return values[0]
    return values


def eval_continuous(G, s):
    """Evaluate G(s) for a state-space or time-delay model.

    SISO models return a scalar (or 1-D array for array `s`); MIMO models
    return matrices stacked along the first axis.
    """
    pts = np.atleast_1d(np.asarray(s, dtype=complex))
    if isinstance(G, ContinuousStateSpace):
        vals = _resolvent_eval(pts, np.eye(G.order), G.A, G.B, G.C, G.D,
                               "continuous model")
    elif isinstance(G, TimeDelayModel):
        n = G.order
        e1 = np.exp(-G.tau * pts)[:, None, None]
        e2 = np.exp(-(G.tau + G.gamma) * pts)[:, None, None]
        M = pts[:, None, None] * np.eye(n) - G.A0 - G.A1 * e1 - G.A2 * e2
        X = np.empty((pts.size, n, G.B.shape[1]), dtype=complex)
        for i, Mi in enumerate(M):
            try:
                X[i] = np.linalg.solve(Mi, G.B)
            except np.linalg.LinAlgError:
                raise PoleHitError(f"time-delay model evaluated at a pole s={pts[i]}",
                                   pts[i]) from None
        vals = G.C[None] @ X
    elif callable(G):
        vals = np.asarray(G(pts), dtype=complex).reshape(pts.size, 1, 1)
        return _squeeze_siso(vals, s, (1, 1))
    else:
        raise TypeError(f"cannot evaluate {type(G).__name__} in continuous time")
    return _squeeze_siso(vals, s, G.shape)


def eval_discrete(G, z):
    """Evaluate G_d(z) for a discrete state-space or descriptor model."""
    pts = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(G, DiscreteStateSpace):
        vals = _resolvent_eval(pts, np.eye(G.order), G.A, G.B, G.C, G.D,
                               "discrete model")
    elif isinstance(G, DescriptorModel):
        D = np.zeros(G.shape)
        vals = _resolvent_eval(pts, G.E, G.A, G.B, G.C, D, "descriptor model")
    else:
        raise TypeError(f"cannot evaluate {type(G).__name__} in discrete time")
    return _squeeze_siso(vals, z, G.shape)


def poles(model, return_infinite=False):
    """Finite poles of a state-space or descriptor model.

    For descriptor models the generalised eigenvalues of (A, E) are
    returned; infinite ones (singular E directions) are dropped, or
    returned separately as a count when `return_infinite` is true.
    """
    if isinstance(model, (ContinuousStateSpace, DiscreteStateSpace)):
        p = np.linalg.eigvals(model.A) if model.order else np.zeros(0, complex)
        return (p, 0) if return_infinite else p
    if isinstance(model, DescriptorModel):
        if model.order == 0:
            return (np.zeros(0, complex), 0) if return_infinite else np.zeros(0, complex)
        alpha, beta = sla.eigvals(model.A, model.E, homogeneous_eigvals=True)
        scale = max(np.linalg.norm(model.A), np.linalg.norm(model.E))
        tiny = 1e3 * np.finfo(float).eps * scale
        if np.any((np.abs(alpha) < tiny) & (np.abs(beta) < tiny)):
            raise IrregularPencilError("pencil zE - A is singular (0/0 eigenvalue)")
        finite = np.abs(beta) > tiny
        p = alpha[finite] / beta[finite]
        n_inf = int(np.count_nonzero(~finite))
        return (p, n_inf) if return_infinite else p
    if isinstance(model, TimeDelayModel):
        raise TypeError("time-delay models have infinitely many poles")
    raise TypeError(f"unsupported model type {type(model).__name__}")


def is_stable(model, margin=0.0):
    """Strict stability: Re(p) < 0 in continuous time, |p| < 1 - margin in discrete time.

    Poles on the boundary count as unstable.
    """
    p = poles(model)
    if isinstance(model, ContinuousStateSpace):
        return bool(np.all(p.real < -margin))
    return bool(np.all(np.abs(p) < 1.0 - margin))


def _uniform_step(t_grid):
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-D array")
    if t.size == 1:
        return t, 0.0
    dt = t[1] - t[0]
    if dt <= 0 or not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise ValueError("time grid must be uniform and increasing")
    return t, dt


def impulse_response_continuous(G, t_grid):
    """Samples of C expm(A t) B on a uniform grid.

    A direct feedthrough D contributes a Dirac term at t = 0 which is not
    part of the samples.
    """
    t, dt = _uniform_step(t_grid)
    x = expm(G.A * t[0]) @ G.B
    step = expm(G.A * dt)
    y = np.empty((t.size,) + G.shape)
    for i in range(t.size):
        y[i] = G.C @ x
        x = step @ x
    return y[:, 0, 0] if G.shape == (1, 1) else y


def step_response_continuous(G, t_grid):
    """Exact unit-step response of a state-space model on a uniform grid."""
    t, dt = _uniform_step(t_grid)
    if t[0] != 0.0:
        raise ValueError("step response grid must start at t = 0")
    n, nu = G.B.shape
    big = np.zeros((n + nu, n + nu))
    big[:n, :n] = G.A
    big[:n, n:] = G.B
    E = expm(big * dt)
    Ad, Bd = E[:n, :n], E[:n, n:]
    x = np.zeros((n, nu))
    y = np.empty((t.size,) + G.shape)
    for i in range(t.size):
        y[i] = G.C @ x + G.D
        x = Ad @ x + Bd
    return y[:, 0, 0] if G.shape == (1, 1) else y


def impulse_response_discrete(G, n_samples):
    """y[0] = D, y[k] = C A^(k-1) B."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    y = np.empty((n_samples,) + G.shape)
    y[0] = G.D
    x = G.B.copy()
    for k in range(1, n_samples):
        y[k] = G.C @ x
        x = G.A @ x
    return y[:, 0, 0] if G.shape == (1, 1) else y


def step_response_tds(G, t_end, dt):
    """Unit-step response of a two-delay system by fixed-step RK4.

    The history is zero for t < 0. Delayed states are read from the stored
    trajectory with linear interpolation between grid nodes, so `tau` and
    `gamma` must be multiples of `dt` and at least `10 dt` (zero delays and
    delays longer than the horizon are exempt).

    Returns
    -------
    t, y : ndarray
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    n_steps = int(round(t_end / dt))
    delays = [G.tau, G.tau + G.gamma]
    for name, d in (("tau", G.tau), ("gamma", G.gamma)):
        if d == 0 or d > t_end:
            continue
        if abs(d / dt - round(d / dt)) > 1e-9 * max(1.0, d / dt):
            raise ValueError(f"{name}={d} is not a multiple of dt={dt}")
        if d < 10 * dt * (1 - 1e-9):
            raise ValueError(f"{name}={d} too short for dt={dt}; need dt <= {name}/10")

    n = G.order
    x = np.zeros((n_steps + 1, n))
    B = G.B[:, 0]

    def delayed(t_query):
        # linear interpolation in the stored trajectory; zero history
        pos = t_query / dt
        if pos <= 0.0:
            return np.zeros(n) if pos < 0.0 else x[0]
        i = int(np.floor(pos))
        frac = pos - i
        if frac < 1e-9:
            return x[i]
        return (1.0 - frac) * x[i] + frac * x[i + 1]

    def f(t_, x_):
        return (G.A0 @ x_ + G.A1 @ delayed(t_ - delays[0])
                + G.A2 @ delayed(t_ - delays[1]) + B)

    for k in range(n_steps):
        tk = k * dt
        xk = x[k]
        k1 = f(tk, xk)
        k2 = f(tk + dt / 2, xk + dt / 2 * k1)
        k3 = f(tk + dt / 2, xk + dt / 2 * k2)
        k4 = f(tk + dt, xk + dt * k3)
        x[k + 1] = xk + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    t = np.arange(n_steps + 1) * dt
    y = x @ G.C[0]
    return t, y


def _hold_ratio(t_grid, h):
    t, dt = _uniform_step(t_grid)
    if t[0] != 0.0:
        raise ValueError("input grid must start at t = 0")
    ratio = h / dt
    if abs(ratio - round(ratio)) > 1e-9 * ratio or round(ratio) < 1:
        raise ValueError(f"grid step {dt} does not subdivide h={h}")
    return t, int(round(ratio))


def sample_and_hold_output(G_d, t_grid, u, u_d=None):
    """Continuous output of the chain sampler -> G_d -> zero-order hold.

    Parameters
    ----------
    G_d : DiscreteStateSpace (SISO)
    t_grid : array_like
        Uniform grid starting at 0 whose step divides ``G_d.h``.
    u : array_like
        Input samples on `t_grid`; sampled at multiples of h.
    u_d : array_like, optional
        Discrete input sequence used instead of sampling `u` (e.g. a unit-area
        pulse for impulse comparisons).
    """
    t, ratio = _hold_ratio(t_grid, G_d.h)
    n_k = (t.size - 1) // ratio + 1
    if u_d is None:
        u = np.asarray(u, dtype=float)
        if u.shape != t.shape:
            raise ValueError("u must be sampled on t_grid")
        u_d = u[::ratio][:n_k]
    u_d = np.asarray(u_d, dtype=float)
    if u_d.size < n_k:
        u_d = np.concatenate([u_d, np.zeros(n_k - u_d.size)])
    y_d = discrete_lsim(G_d, u_d[:n_k])
    idx = np.minimum(np.arange(t.size) // ratio, n_k - 1)
    return y_d[idx]


def discrete_lsim(G_d, u_d):
    """Output sequence of a SISO discrete model driven by `u_d` from rest."""
    u_d = np.asarray(u_d, dtype=float)
    A, b, c, d = G_d.A, G_d.B[:, 0], G_d.C[0], G_d.D[0, 0]
    x = np.zeros(G_d.order)
    y = np.empty(u_d.size)
    for k, uk in enumerate(u_d):
        y[k] = c @ x + d * uk
        x = A @ x + b * uk
    return y


# --- JSON model files -------------------------------------------------------

def model_to_dict(model):
    if isinstance(model, ContinuousStateSpace):
        return {"type": "css", "A": model.A.tolist(), "B": model.B.tolist(),
                "C": model.C.tolist(), "D": model.D.tolist()}
    if isinstance(model, DiscreteStateSpace):
        return {"type": "dss", "A": model.A.tolist(), "B": model.B.tolist(),
                "C": model.C.tolist(), "D": model.D.tolist(), "h": model.h}
    if isinstance(model, TimeDelayModel):
        return {"type": "tds", "A0": model.A0.tolist(), "A1": model.A1.tolist(),
                "A2": model.A2.tolist(), "B": model.B.tolist(),
                "C": model.C.tolist(), "tau": model.tau, "gamma": model.gamma}
    raise TypeError(f"cannot serialise {type(model).__name__}")


def _mat(obj, key, n_rows=None):
    val = np.array(obj[key], dtype=float)
    if val.ndim == 0:
        val = val.reshape(1, 1)
    elif val.ndim == 1:
        val = val.reshape(n_rows, -1) if n_rows else val.reshape(1, -1)
    return val


def model_from_dict(obj):
    kind = obj.get("type")
    if kind in ("css", "dss"):
        A = _mat(obj, "A")
        n = A.shape[0]
        B = _mat(obj, "B", n)
        C = _mat(obj, "C")
        D = _mat(obj, "D") if "D" in obj else None
        if kind == "css":
            return ContinuousStateSpace(A, B, C, D)
        return DiscreteStateSpace(A, B, C, D, h=float(obj["h"]))
    if kind == "tds":
        A0 = _mat(obj, "A0")
        n = A0.shape[0]
        return TimeDelayModel(A0, _mat(obj, "A1"), _mat(obj, "A2"), _mat(obj, "B", n),
                              _mat(obj, "C"), float(obj["tau"]), float(obj["gamma"]))
    raise ValueError(f"unknown model type {kind!r}")


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def dump_model(model, path, **extra):
    data = model_to_dict(model)
    data.update(extra)
    Path(path).write_text(json.dumps(data, indent=1) + "\n")
