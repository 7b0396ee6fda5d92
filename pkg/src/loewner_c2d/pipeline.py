"""Loewner-driven discretisation, end to end.

    fit = LoewnerFit.from_model(G, h, m=50)
    result = loewner_discretize(G, h, kbar=4)
"""
import logging
from dataclasses import dataclass, field

from .loewner import (build_dataset, descriptor_to_state_space, numerical_rank,
                      pencil_from_dataset, project, real_pencil)
from .models import is_stable
from .stabilize import l2_truncate, linf_distance, nehari_project

__all__ = ["LoewnerFit", "DiscretizationResult", "stabilize_model", "loewner_discretize"]

log = logging.getLogger(__name__)

STABILIZATIONS = ("nehari", "l2", "none")


def stabilize_model(G_d, method="nehari"):
    if method == "nehari":
        return nehari_project(G_d)
    if method == "l2":
        return l2_truncate(G_d)
    if method == "none":
        return G_d
    raise ValueError(f"unknown stabilisation {method!r}; choose from {STABILIZATIONS}")


class LoewnerFit:
    """Data set, real Loewner pencil and numerical rank for one plant."""

    def __init__(self, dataset, rank_tol=1e-10):
        self.dataset = dataset
        self.h = dataset.h
        self.pencil = real_pencil(pencil_from_dataset(dataset))
        self.rank = numerical_rank(self.pencil, rank_tol)
        self._cache = {}

    @classmethod
    def from_model(cls, G, h, m=50, rank_tol=1e-10, grid="linear"):
        return cls(build_dataset(G, h, m, grid), rank_tol)

    @property
    def r(self):
        return self.rank.r

    def interpolant(self, k):
        """G_d^k: projection of the pencil on its k dominant singular directions."""
        if k not in self._cache:
            self._cache[k] = descriptor_to_state_space(project(self.pencil, k), self.h)
        return self._cache[k]


@dataclass
class DiscretizationResult:
    model: object
    k: int
    r: int
    interpolant: object
    interpolant_stable: bool
    estimate: float
    log: list = field(default_factory=list)

    @property
    def order(self):
        return self.model.order


def loewner_discretize(G, h, kbar, m=50, rank_tol=1e-10, stabilization="nehari",
                       compensate=True, select="first", fit=None, score=None):
    """Discretise G at period h with a stable model of order at most `kbar`.

    Parameters
    ----------
    compensate : bool
        If the stabilised model lost order, retry with k + 1, k + 2, ...
        until its order reaches `kbar` or k reaches the rank r.
    select : {'first', 'best'}
        'first' returns the first admissible model; 'best' scans k upwards
        from min(r, kbar) while the stabilised order stays <= kbar and keeps
        the model of lowest `score` (by default the relative frequency error
        against G).
    fit : LoewnerFit, optional
        Reuse a precomputed pencil.
    """
    if kbar < 1:
        raise ValueError("kbar must be >= 1")
    if select not in ("first", "best"):
        raise ValueError("select must be 'first' or 'best'")
    fit = fit or LoewnerFit.from_model(G, h, m, rank_tol)
    r = fit.r
    if r == 0:
        raise ValueError("Loewner pencil has numerical rank 0")
    messages = [f"numerical rank r = {r} (tol {rank_tol:g})"]
    G_r = fit.interpolant(r)

    if score is None and select == "best":
        from .metrics import freq_error
        norm = None

        def score(Gd):
            nonlocal norm
            rep = freq_error(G, Gd, normalizer=norm)
            norm = rep.h_inf_norm_G
            return rep.e_inf_rel

    k = min(r, kbar)
    best = None
    while True:
        Gk = fit.interpolant(k)
        stable_k = is_stable(Gk)
        Gs = stabilize_model(Gk, stabilization)
        messages.append(f"k = {k}: interpolant {'stable' if stable_k else 'unstable'}, "
                        f"stabilised order {Gs.order}")
        admissible = Gs.order <= kbar
        if admissible:
            cand = (k, Gk, stable_k, Gs)
            if select == "first":
                if best is None or Gs.order > best[3].order:
                    best = cand
                if Gs.order == kbar or not compensate:
                    break
            else:
                s = score(Gs)
                messages[-1] += f", score {s:.6g}"
                if best is None or s < best[4]:
                    best = cand + (s,)
        else:
            # stabilised orders only grow with k from here on
            break
        if k >= r:
            break
        k += 1
    if best is None:
        raise ValueError(f"no stabilised model of order <= {kbar} found")
    k, Gk, stable_k, Gs = best[:4]
    estimate = linf_distance(G_r, Gs)
    messages.append(f"selected k = {k}, order {Gs.order}, "
                    f"||G_d^r - G_d||_Linf = {estimate:.6g}")
    for msg in messages:
        log.info(msg)
    return DiscretizationResult(Gs, k, r, Gk, stable_k, estimate, messages)
