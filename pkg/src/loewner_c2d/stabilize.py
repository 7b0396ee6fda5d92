"""Projection of discrete models onto the stable subspace.

Two projections are available:

* :func:`l2_truncate` drops the antistable part of the additive
  decomposition (optimal in the L2 sense);
* :func:`nehari_project` replaces the antistable part by its optimal
  stable L-infinity approximation.  The antistable part is transported
  to continuous time with the Moebius map z = (a + s)/(a - s), where
  Glover's optimal Hankel-norm construction solves the Nehari problem,
  and the result is mapped back.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import NonSplittableError, NumericFailure
from .linalg import ordered_schur, solve_lyapunov, solve_sylvester, svd
from .models import DiscreteStateSpace, eval_discrete

__all__ = [
    "AdditiveSplit",
    "HankelSpectrum",
    "split_stable_antistable",
    "l2_truncate",
    "hankel_spectrum_antistable",
    "nehari_project",
    "linf_distance",
    "discrete_to_continuous",
    "continuous_to_discrete",
    "glover_nehari",
]

BOUNDARY_EPS = 1e-8
MULTIPLICITY_TOL = 1e-8
ALPHAS = (1.0, 2.0, 0.5, 4.0, 0.25)


@dataclass(frozen=True)
class AdditiveSplit:
    stable: DiscreteStateSpace
    antistable: DiscreteStateSpace


@dataclass(frozen=True)
class HankelSpectrum:
    values: np.ndarray
    q: int

    @property
    def sigma_max(self):
        return float(self.values[0]) if self.values.size else 0.0


def _block_real_schur(A, inside):
    """Real orthogonal basis change putting the `inside` eigenvalues first.

    The complex ordered Schur vectors span an invariant subspace that is
    closed under conjugation (eigenvalues come in conjugate pairs), so a
    real orthonormal basis is recovered from their real/imaginary parts.
    """
    n = A.shape[0]
    res = ordered_schur(A, inside)
    k = res.sdim
    if k in (0, n):
        return np.eye(n), k
    V = res.Q[:, :k]
    basis = svd(np.hstack([V.real, V.imag])).U[:, :k]
    W = svd(np.eye(n) - basis @ basis.T).U[:, :n - k]
    Q = np.hstack([basis, W])
    return Q, k


def split_stable_antistable(G_d, eps=BOUNDARY_EPS):
    """G_d = stable + antistable, feedthrough kept in the stable part."""
    p = np.linalg.eigvals(G_d.A) if G_d.order else np.zeros(0)
    near = np.abs(np.abs(p) - 1.0) <= eps
    if np.any(near):
        pole = p[near][0]
        raise NonSplittableError(f"pole {pole} lies on the unit circle", pole)
    h = G_d.h
    n = G_d.order
    ny, nu = G_d.shape
    if n == 0 or np.all(np.abs(p) < 1):
        empty = DiscreteStateSpace(np.zeros((0, 0)), np.zeros((0, nu)),
                                   np.zeros((ny, 0)), np.zeros((ny, nu)), h)
        return AdditiveSplit(G_d, empty)

    Q, k = _block_real_schur(G_d.A, lambda z: np.abs(z) < 1.0)
    T = Q.T @ G_d.A @ Q
    B = Q.T @ G_d.B
    C = G_d.C @ Q
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    # T11 X - X T22 = -T12 decouples the blocks
    X = solve_sylvester(T11, -T22, -T12)
    B1 = B[:k] - X @ B[k:]
    B2 = B[k:]
    C1 = C[:, :k]
    C2 = C[:, :k] @ X + C[:, k:]
    stable = DiscreteStateSpace(T11, B1, C1, G_d.D, h)
    anti = DiscreteStateSpace(T22, B2, C2, np.zeros((ny, nu)), h)
    return AdditiveSplit(stable, anti)


def l2_truncate(G_d):
    """Discard the antistable part (feedthrough retained)."""
    return split_stable_antistable(G_d).stable


def _reflect(anti):
    """Realisation of the stable system anti(1/z)."""
    Ai = np.linalg.inv(anti.A)
    return Ai, Ai @ anti.B, -anti.C @ Ai, anti.D - anti.C @ Ai @ anti.B


def _multiplicity(values, tol=MULTIPLICITY_TOL):
    if values.size == 0:
        return 0
    return int(np.count_nonzero(values >= values[0] * (1.0 - tol)))


def hankel_spectrum_antistable(anti):
    """Hankel singular values of the reflected (stable) antistable part."""
    if anti.order == 0:
        return HankelSpectrum(np.zeros(0), 0)
    if np.any(np.abs(np.linalg.eigvals(anti.A)) <= 1.0):
        raise ValueError("system is not antistable")
    A, B, C, _ = _reflect(anti)
    P = solve_lyapunov(A, B @ B.T, "discrete")
    Qo = solve_lyapunov(A.T, C.T @ C, "discrete")
    ev = np.linalg.eigvals(P @ Qo)
    values = np.sort(np.sqrt(np.clip(ev.real, 0.0, None)))[::-1]
    return HankelSpectrum(values, _multiplicity(values))


def discrete_to_continuous(A, B, C, D, alpha):
    """Continuous realisation of G((alpha + s)/(alpha - s))."""
    n = A.shape[0]
    M = np.linalg.inv(np.eye(n) + A)
    r = np.sqrt(2.0 * alpha)
    return (alpha * M @ (A - np.eye(n)), r * M @ B, r * C @ M, D - C @ M @ B)


def continuous_to_discrete(A, B, C, D, alpha):
    """Discrete realisation of G(alpha (z - 1)/(z + 1)); inverse of the above."""
    n = A.shape[0]
    N = np.linalg.inv(alpha * np.eye(n) - A)
    r = np.sqrt(2.0 * alpha)
    return ((alpha * np.eye(n) + A) @ N, r * N @ B, r * C @ N, D + C @ N @ B)


def _sqrt_factor(X):
    w, V = np.linalg.eigh((X + X.T) / 2)
    return V * np.sqrt(np.clip(w, 0.0, None))


def _balance(A, B, C, rel_tol=1e-13):
    """Square-root balancing of a stable continuous system.

    States with Hankel singular value below rel_tol * sigma_1 (uncontrollable
    or unobservable directions) are removed.
    """
    P = solve_lyapunov(A, B @ B.T, "continuous")
    Q = solve_lyapunov(A.T, C.T @ C, "continuous")
    Lc = _sqrt_factor(P)
    Lo = _sqrt_factor(Q)
    res = svd(Lo.T @ Lc)
    s = res.singular_values
    keep = s > rel_tol * s[0]
    s = s[keep]
    U, V = res.U[:, keep], res.V[:, keep]
    T = (U / np.sqrt(s)).T @ Lo.T
    Ti = Lc @ (V / np.sqrt(s))
    return T @ A @ Ti, T @ B, C @ Ti, s


def glover_nehari(A, B, C, D, tol=MULTIPLICITY_TOL):
    """Best antistable approximation of a stable SISO continuous system.

    Returns (Ah, Bh, Ch, Dh, sigma, q): an antistable system (plus constant)
    such that G - Gh is all-pass with gain sigma = largest Hankel singular
    value, of order n - q where q is its multiplicity.
    """
    Ab, Bb, Cb, s = _balance(A, B, C)
    sigma = s[0]
    q = _multiplicity(s, tol)
    perm = np.r_[np.arange(q, s.size), np.arange(q)]
    Ab, Bb, Cb, s = Ab[np.ix_(perm, perm)], Bb[perm], Cb[:, perm], s[perm]
    r = s.size - q
    A11 = Ab[:r, :r]
    B1, B2 = Bb[:r], Bb[r:]
    C1, C2 = Cb[:, :r], Cb[:, r:]
    # B2 = -C2^T U with U a scalar of unit modulus (SISO)
    U = -np.linalg.lstsq(C2.T, B2, rcond=None)[0]
    S1 = np.diag(s[:r])
    Gam = S1 @ S1 - sigma ** 2 * np.eye(r)
    Ah = np.linalg.solve(Gam, sigma ** 2 * A11.T + S1 @ A11 @ S1 - sigma * C1.T @ U @ B1.T)
    Bh = np.linalg.solve(Gam, S1 @ B1 + sigma * C1.T @ U)
    Ch = C1 @ S1 + sigma * U @ B1.T
    Dh = D - sigma * U
    return Ah, Bh, Ch, Dh, sigma, q


def linf_distance(G1, G2, n_points=4096):
    """max |G1 - G2| on a uniform grid of the unit circle."""
    z = np.exp(2j * np.pi * np.arange(n_points) / n_points)
    return float(np.max(np.abs(eval_discrete(G1, z) - eval_discrete(G2, z))))


def _nehari_antistable(anti, alpha):
    """Optimal stable L-infinity approximation of an antistable system."""
    Ac, Bc, Cc, Dc = discrete_to_continuous(anti.A, anti.B, anti.C, anti.D, alpha)
    # F(s) is antistable; F(-s) is stable
    Ah, Bh, Ch, Dh, sigma, q = glover_nehari(-Ac, -Bc, Cc, Dc)
    # Gh(-s) is stable
    Aq, Bq, Cq, Dq = continuous_to_discrete(-Ah, -Bh, Ch, Dh, alpha)
    return DiscreteStateSpace(Aq, Bq, Cq, Dq, anti.h), sigma, q


def _append(G1, G2):
    """Parallel connection G1 + G2."""
    n1, n2 = G1.order, G2.order
    A = np.zeros((n1 + n2, n1 + n2))
    A[:n1, :n1] = G1.A
    A[n1:, n1:] = G2.A
    return DiscreteStateSpace(A, np.vstack([G1.B, G2.B]), np.hstack([G1.C, G2.C]),
                              G1.D + G2.D, G1.h)


def nehari_project(G_d, alphas=ALPHAS, check_points=512, rtol=1e-6):
    """Stable model minimising the L-infinity distance to G_d.

    The antistable part (order k_u) is replaced by its optimal stable
    approximation of order k_u - q; the achieved distance equals the
    largest Hankel singular value of the antistable part.  The Moebius
    parameter is retried over `alphas` until the all-pass certificate
    holds on `check_points` circle points.
    """
    if G_d.shape != (1, 1):
        raise ValueError("nehari_project supports SISO models only")
    split = split_stable_antistable(G_d)
    anti = split.antistable
    if anti.order == 0:
        return G_d
    spectrum = hankel_spectrum_antistable(anti)
    z = np.exp(2j * np.pi * (np.arange(check_points) + 0.5) / check_points)
    g_anti = eval_discrete(anti, z)
    failures = {}
    for alpha in alphas:
        try:
            Qd, sigma, q = _nehari_antistable(anti, alpha)
        except (np.linalg.LinAlgError, NumericFailure, ValueError) as exc:
            failures[alpha] = str(exc)
            continue
        if Qd.order and np.any(np.abs(np.linalg.eigvals(Qd.A)) >= 1.0):
            failures[alpha] = "approximant not stable"
            continue
        err = np.abs(g_anti - eval_discrete(Qd, z))
        ref = spectrum.sigma_max
        if np.max(np.abs(err - ref)) <= rtol * ref:
            return _append(split.stable, Qd)
        failures[alpha] = f"all-pass deviation {np.max(np.abs(err - ref)) / ref:.2e}"
    raise NumericFailure("Nehari projection failed for every Moebius parameter", failures)
