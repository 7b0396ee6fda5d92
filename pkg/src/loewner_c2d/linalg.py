"""Dense matrix kernels: SVD, ordered Schur, expm and Schur-based
Lyapunov/Sylvester solvers.

Everything works on complex matrices; real input is accepted and, for
the equation solvers, a real solution is returned when all data are real.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import NumericFailure, SingularEquationError

__all__ = [
    "SvdResult",
    "SchurResult",
    "as_matrix",
    "svd",
    "ordered_schur",
    "expm",
    "solve_lyapunov",
    "solve_sylvester",
]


def as_matrix(a, name="matrix", dtype=None):
    """Return `a` as a finite 2-D array (scalars become 1x1)."""
    m = np.atleast_2d(np.asarray(a, dtype=dtype))
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


@dataclass(frozen=True)
class SvdResult:
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self):
        k = self.singular_values.size
        return (self.U[:, :k] * self.singular_values) @ self.V[:, :k].conj().T


@dataclass(frozen=True)
class SchurResult:
    """A = Q T Q^H with the `sdim` selected eigenvalues leading diag(T)."""

    Q: np.ndarray
    T: np.ndarray
    sdim: int

    @property
    def eigenvalues(self):
        return np.diag(self.T).copy()


def svd(a, full_matrices=False):
    """Singular value decomposition with descending singular values.

    Falls back from the divide-and-conquer driver to the QR-iteration one
    before giving up.
    """
    a = as_matrix(a, "A")
    diagnostics = {}
    for driver in ("gesdd", "gesvd"):
        try:
            U, s, Vh = sla.svd(a, full_matrices=full_matrices,
                               lapack_driver=driver)
        except (np.linalg.LinAlgError, ValueError) as exc:
            diagnostics[driver] = str(exc)
            continue
        return SvdResult(U, s, Vh.conj().T)
    raise NumericFailure("SVD did not converge", diagnostics)


def ordered_schur(a, select):
    """Complex Schur form with eigenvalues satisfying `select` first.

    Parameters
    ----------
    a : (n, n) array_like
    select : callable
        Vectorised predicate on complex eigenvalues, e.g.
        ``lambda z: np.abs(z) < 1``.
    """
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"A must be square, got {a.shape}")
    if a.size == 0:
        return SchurResult(np.zeros((0, 0), complex), np.zeros((0, 0), complex), 0)
    try:
        T, Q, sdim = sla.schur(a.astype(complex), output="complex",
                               sort=lambda z: bool(select(z)))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericFailure("Schur decomposition failed",
                             {"error": str(exc)}) from exc
    return SchurResult(Q, T, int(sdim))


def expm(a):
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"A must be square, got {a.shape}")
    return sla.expm(a)


def _tri(a, b):
    return sla.solve_triangular(a, b, lower=False, check_finite=False)


def _schur_c(a):
    T, Q = sla.schur(a.astype(complex), output="complex")
    return T, Q


def _check_pivots(diag, what):
    if np.any(np.abs(diag) <= 1e3 * np.finfo(float).eps * max(1.0, np.max(np.abs(diag)))):
        raise SingularEquationError(f"{what}: spectral condition violated")


def solve_lyapunov(a, q, kind="continuous"):
    """Solve A X + X A^H + Q = 0 (continuous) or A X A^H - X + Q = 0 (discrete).

    Bartels-Stewart on the complex Schur form of A, column recursion from
    the last column backwards.
    """
    a = as_matrix(a, "A")
    q = as_matrix(q, "Q")
    n = a.shape[0]
    if a.shape != (n, n) or q.shape != (n, n):
        raise ValueError(f"incompatible shapes {a.shape}, {q.shape}")
    if kind not in ("continuous", "discrete"):
        raise ValueError("kind must be 'continuous' or 'discrete'")
    real = np.isrealobj(a) and np.isrealobj(q)

    T, U = _schur_c(a)
    F = U.conj().T @ q @ U
    Y = np.zeros((n, n), dtype=complex)
    t = np.diag(T)
    eye = np.eye(n)
    for j in range(n - 1, -1, -1):
        tail = Y[:, j + 1:] @ T[j, j + 1:].conj()
        if kind == "continuous":
            M = T + np.conj(t[j]) * eye
            _check_pivots(t + np.conj(t[j]), "continuous Lyapunov")
            Y[:, j] = _tri(M, -F[:, j] - tail)
        else:
            M = np.conj(t[j]) * T - eye
            _check_pivots(np.conj(t[j]) * t - 1.0, "discrete Lyapunov")
            Y[:, j] = _tri(M, -F[:, j] - T @ tail)
    X = U @ Y @ U.conj().T
    return X.real if real else X


def solve_sylvester(a, b, c):
    """Solve A X + X B = C by Bartels-Stewart on complex Schur forms."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    c = as_matrix(c, "C")
    n, m = a.shape[0], b.shape[0]
    if a.shape != (n, n) or b.shape != (m, m) or c.shape != (n, m):
        raise ValueError(f"incompatible shapes {a.shape}, {b.shape}, {c.shape}")
    real = np.isrealobj(a) and np.isrealobj(b) and np.isrealobj(c)
    if n == 0 or m == 0:
        return np.zeros((n, m), dtype=float if real else complex)

    S, U = _schur_c(a)
    T, V = _schur_c(b)
    F = U.conj().T @ c @ V
    Y = np.zeros((n, m), dtype=complex)
    s = np.diag(S)
    eye = np.eye(n)
    for j in range(m):
        _check_pivots(s + T[j, j], "Sylvester")
        rhs = F[:, j] - Y[:, :j] @ T[:j, j]
        Y[:, j] = _tri(S + T[j, j] * eye, rhs)
    X = U @ Y @ V.conj().T
    return X.real if real else X
