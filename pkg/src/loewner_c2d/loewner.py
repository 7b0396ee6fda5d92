"""Loewner interpolation of holder-weighted frequency data.

A continuous model G is sampled at frequencies 0 < w_i < pi/h.  The data
points are the unit-circle nodes exp(j w_i h) carrying the values
G(j w_i) / R(j w_i), where R is the zero-order-hold transfer function.
A discrete model interpolating these data reproduces G through the
sampler/holder chain at the sampled frequencies.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .exceptions import (CoincidentPointsError, ConjugateInconsistencyError,
                         PartitionError, PolynomialPartError, PoleHitError)
from .linalg import svd
from .models import DescriptorModel, DiscreteStateSpace, eval_continuous

__all__ = [
    "FrequencyDataSet",
    "LoewnerPencil",
    "RankReport",
    "holder_transfer",
    "frequency_grid",
    "build_dataset",
    "dataset_from_samples",
    "partition",
    "build_pencil",
    "pencil_from_dataset",
    "real_pencil",
    "numerical_rank",
    "project",
    "realify",
    "descriptor_to_state_space",
    "save_dataset_csv",
    "load_dataset_csv",
]


def holder_transfer(omega, h):
    """R(j w) = (1 - exp(-j w h)) / (j w h), equal to 1 at w = 0."""
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    w = np.asarray(omega, dtype=float)
    theta = w * h
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (1.0 - np.exp(-1j * theta)) / (1j * theta)
    r = np.where(theta == 0.0, 1.0 + 0j, r)
    return r[()] if r.ndim == 0 else r


@dataclass(frozen=True)
class FrequencyDataSet:
    """Conjugate-closed interpolation data on the unit circle.

    Entries are stored pairwise: index 2i holds (exp(j w_i h), value_i) and
    index 2i + 1 its complex conjugate.
    """

    nodes: np.ndarray
    values: np.ndarray
    h: float
    omegas: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=complex)
        values = np.asarray(self.values, dtype=complex)
        omegas = np.asarray(self.omegas, dtype=float)
        if nodes.shape != values.shape or nodes.size != 2 * omegas.size:
            raise ValueError("nodes/values must hold two entries per frequency")
        if not np.allclose(np.abs(nodes), 1.0, atol=1e-12):
            raise ValueError("all nodes must lie on the unit circle")
        if (np.any(nodes[1::2] != nodes[::2].conj())
                or np.any(values[1::2] != values[::2].conj())):
            raise ValueError("data set is not conjugate-closed")
        if np.unique(np.round(nodes, 14)).size != nodes.size:
            raise ValueError("nodes must be distinct")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "omegas", omegas)

    @property
    def n_frequencies(self):
        return self.omegas.size

    @property
    def positive_nodes(self):
        return self.nodes[::2]

    @property
    def positive_values(self):
        return self.values[::2]


@dataclass(frozen=True)
class LoewnerPencil:
    """Loewner matrix L, shifted Loewner matrix Ls and the data that built them."""

    L: np.ndarray
    Ls: np.ndarray
    mu: np.ndarray
    lam: np.ndarray
    w_mu: np.ndarray
    w_lam: np.ndarray
    paired: bool = False
    real: bool = False

    @property
    def size(self):
        return self.L.shape[0]

    def descriptor(self, h=None):
        """The full-order interpolant E = -L, A = -Ls, B = w_mu, C = w_lam^T."""
        return DescriptorModel(-self.L, -self.Ls, self.w_mu.reshape(-1, 1),
                               self.w_lam.reshape(1, -1), h)


@dataclass(frozen=True)
class RankReport:
    r: int
    singular_values_row: np.ndarray
    singular_values_col: np.ndarray
    tolerance: float
    r_col: int

    @property
    def consistent(self):
        return self.r == self.r_col


def frequency_grid(h, n_points, kind="linear", w_min=1e-3, w_margin=1e-3):
    """`n_points` frequencies in [w_min, pi/h - w_margin]."""
    w_nyq = np.pi / h
    hi = w_nyq - w_margin
    if not 0 < w_min < hi:
        raise ValueError(f"empty frequency interval [{w_min}, {hi}]")
    if kind == "linear":
        return np.linspace(w_min, hi, n_points)
    if kind == "log":
        return np.logspace(np.log10(w_min), np.log10(hi), n_points)
    raise ValueError(f"unknown grid kind {kind!r}")


def dataset_from_samples(omegas, g_values, h, holder_weighted=True):
    """Conjugate-closed data set from samples G(j w_i).

    With ``holder_weighted=False`` the samples are used as they are, which
    is how data measured directly on a discrete system are fed in.
    """
    omegas = np.asarray(omegas, dtype=float)
    g_values = np.asarray(g_values, dtype=complex)
    w_nyq = np.pi / h
    if np.any(omegas <= 0) or np.any(omegas >= w_nyq):
        raise ValueError("frequencies must lie strictly inside (0, pi/h)")
    order = np.argsort(omegas)
    omegas, g_values = omegas[order], g_values[order]
    z = np.exp(1j * omegas * h)
    v = g_values / holder_transfer(omegas, h) if holder_weighted else g_values
    nodes = np.empty(2 * z.size, dtype=complex)
    values = np.empty_like(nodes)
    nodes[::2], nodes[1::2] = z, z.conj()
    values[::2], values[1::2] = v, v.conj()
    return FrequencyDataSet(nodes, values, h, omegas)


def build_dataset(G, h, m, grid="linear", w_min=1e-3, w_margin=1e-3):
    """Sample G at 2m frequencies of (0, pi/h) and weight by 1/R.

    Parameters
    ----------
    G : ContinuousStateSpace, TimeDelayModel or callable
        SISO model evaluable on the imaginary axis.
    h : float
        Sampling period.
    m : int
        Half the number of sampled frequencies.
    grid : {'linear', 'log'} or array_like
        Sampling strategy, or the frequencies themselves.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if isinstance(grid, str):
        omegas = frequency_grid(h, 2 * m, grid, w_min, w_margin)
    else:
        omegas = np.asarray(grid, dtype=float)
    shape = getattr(G, "shape", (1, 1))
    if shape != (1, 1):
        raise ValueError(f"Loewner discretisation is SISO only, model shape is {shape}")
    try:
        g = eval_continuous(G, 1j * omegas)
    except PoleHitError as exc:
        raise PoleHitError(f"model has a pole on the grid at omega={exc.point.imag}",
                           exc.point) from None
    return dataset_from_samples(omegas, g, h)


def partition(dataset):
    """Alternate frequencies between the two halves, keeping conjugates together.

    Returns
    -------
    mu, lam, w_mu, w_lam : ndarray
        Pair-ordered points and values (point, conjugate, point, ...).
    """
    nf = dataset.n_frequencies
    if nf % 2:
        raise PartitionError(f"need an even number of frequencies, got {nf}")
    idx = np.arange(nf)
    mu_f, lam_f = idx[0::2], idx[1::2]

    def expand(f):
        rows = np.empty(2 * f.size, dtype=int)
        rows[0::2], rows[1::2] = 2 * f, 2 * f + 1
        return rows

    rm, rl = expand(mu_f), expand(lam_f)
    return dataset.nodes[rm], dataset.nodes[rl], dataset.values[rm], dataset.values[rl]


def build_pencil(mu, lam, w_mu, w_lam, paired=False):
    """Loewner and shifted Loewner matrices from two disjoint point sets."""
    mu, lam = np.asarray(mu, complex), np.asarray(lam, complex)
    w_mu, w_lam = np.asarray(w_mu, complex), np.asarray(w_lam, complex)
    if mu.shape != w_mu.shape or lam.shape != w_lam.shape:
        raise ValueError("points and values must have the same length")
    diff = mu[:, None] - lam[None, :]
    hit = np.argwhere(diff == 0)
    if hit.size:
        i, j = hit[0]
        raise CoincidentPointsError(f"mu[{i}] == lambda[{j}] == {mu[i]}")
    L = (w_mu[:, None] - w_lam[None, :]) / diff
    Ls = ((mu * w_mu)[:, None] - (lam * w_lam)[None, :]) / diff
    return LoewnerPencil(L, Ls, mu, lam, w_mu, w_lam, paired=paired)


def pencil_from_dataset(dataset):
    return build_pencil(*partition(dataset), paired=True)


def _pair_transform(n):
    """Block-diagonal unitary with blocks [[1, 1], [j, -j]] / sqrt(2)."""
    if n % 2:
        raise ConjugateInconsistencyError("pair transform needs an even dimension")
    P = np.zeros((n, n), dtype=complex)
    s = 1 / np.sqrt(2)
    for i in range(0, n, 2):
        P[i, i] = P[i, i + 1] = s
        P[i + 1, i], P[i + 1, i + 1] = 1j * s, -1j * s
    return P


def _real_or_raise(arrays, tol, what):
    out = []
    for a in arrays:
        scale = max(np.max(np.abs(a), initial=0.0), np.finfo(float).tiny)
        resid = np.max(np.abs(a.imag), initial=0.0) / scale
        if resid > tol:
            raise ConjugateInconsistencyError(
                f"{what}: imaginary residue {resid:.3e} exceeds {tol:.1e}")
        out.append(np.ascontiguousarray(a.real))
    return out


def real_pencil(pencil, tol=1e-6):
    """Unitarily transform a pair-ordered pencil so every matrix is real.

    Rows are combined per conjugate pair of mu and columns per pair of
    lambda; the interpolant's transfer function and the singular values of
    [L Ls] are unchanged.
    """
    if pencil.real:
        return pencil
    if not pencil.paired:
        raise ConjugateInconsistencyError("pencil is not in conjugate-pair order")
    P = _pair_transform(pencil.L.shape[0])
    Q = _pair_transform(pencil.L.shape[1]).conj().T
    L, Ls, w_mu, w_lam = _real_or_raise(
        [P @ pencil.L @ Q, P @ pencil.Ls @ Q, P @ pencil.w_mu, pencil.w_lam @ Q],
        tol, "real pencil")
    return LoewnerPencil(L, Ls, pencil.mu, pencil.lam, w_mu, w_lam,
                         paired=True, real=True)


def numerical_rank(pencil, tol=1e-10):
    """Count singular values of [L Ls] above tol * sigma_1.

    The column concatenation [L; Ls] is checked as well; disagreement is
    reported through `RankReport.consistent`, not raised.
    """
    row = svd(np.hstack([pencil.L, pencil.Ls])).singular_values
    col = svd(np.vstack([pencil.L, pencil.Ls])).singular_values

    def count(s):
        if s.size == 0 or s[0] == 0:
            return 0
        return int(np.count_nonzero(s >= tol * s[0]))

    return RankReport(count(row), row, col, tol, count(col))


def project(pencil, k):
    """Order-k descriptor model obtained by projecting the Loewner pencil.

    Y (X) holds the k dominant left (right) singular vectors of [L Ls]
    ([L; Ls]).
    """
    m = min(pencil.L.shape)
    if not 1 <= k <= m:
        raise ValueError(f"projection order must lie in [1, {m}], got {k}")
    Y = svd(np.hstack([pencil.L, pencil.Ls])).U[:, :k]
    X = svd(np.vstack([pencil.L, pencil.Ls])).V[:, :k]
    Yh = Y.conj().T
    return DescriptorModel(-(Yh @ pencil.L @ X), -(Yh @ pencil.Ls @ X),
                           (Yh @ pencil.w_mu).reshape(-1, 1),
                           (pencil.w_lam @ X).reshape(1, -1))


def descriptor_to_state_space(model, h, cond_max=1e12):
    """Standard form A = E^-1 A, B = E^-1 B, C, D = 0 of a real descriptor model."""
    E, A, B, C = _real_or_raise([model.E, model.A, model.B, model.C], 1e-6,
                                "descriptor model")
    if E.size and np.linalg.cond(E) >= cond_max:
        raise PolynomialPartError(
            f"E is numerically singular (cond = {np.linalg.cond(E):.3e}); "
            "the interpolant has a polynomial part")
    if E.size == 0:
        return DiscreteStateSpace(A, B, C, np.zeros((1, 1)), h)
    return DiscreteStateSpace(np.linalg.solve(E, A), np.linalg.solve(E, B), C,
                              np.zeros((C.shape[0], B.shape[1])), h)


def realify(model, dataset=None, h=None, tol=1e-6):
    """Real discrete state-space model equivalent to a descriptor model.

    If `dataset` is given, `model` must be the unprojected interpolant in
    the data set's conjugate-pair order (as returned by
    ``pencil_from_dataset(ds).descriptor()``) and the pair transform is
    applied first.  Projected models built from a real pencil are already
    real and only need the conversion to standard form.
    """
    if h is None:
        h = dataset.h if dataset is not None else model.h
    if dataset is not None:
        P = _pair_transform(model.order)
        Q = P.conj().T
        model = DescriptorModel(P @ model.E @ Q, P @ model.A @ Q, P @ model.B,
                                model.C @ Q, h)
    E, A, B, C = _real_or_raise([model.E, model.A, model.B, model.C], tol, "realify")
    return descriptor_to_state_space(DescriptorModel(E, A, B, C, h), h)


def save_dataset_csv(dataset, path):
    """Write positive-frequency rows: omega, re_node, im_node, re_value, im_value."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega", "re_node", "im_node", "re_value", "im_value"])
        for om, z, v in zip(dataset.omegas, dataset.positive_nodes,
                            dataset.positive_values):
            w.writerow([repr(float(x)) for x in (om, z.real, z.imag, v.real, v.imag)])


def load_dataset_csv(path, h):
    """Read a data set written by `save_dataset_csv` (or measured data)."""
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    omegas = rows[:, 0]
    z = rows[:, 1] + 1j * rows[:, 2]
    v = rows[:, 3] + 1j * rows[:, 4]
    if not np.allclose(z, np.exp(1j * omegas * h), atol=1e-9):
        raise ValueError("nodes do not match exp(j omega h) for the given h")
    nodes = np.empty(2 * z.size, dtype=complex)
    values = np.empty_like(nodes)
    nodes[::2], nodes[1::2] = np.exp(1j * omegas * h), np.exp(-1j * omegas * h)
    values[::2], values[1::2] = v, v.conj()
    return FrequencyDataSet(nodes, values, h, omegas)
