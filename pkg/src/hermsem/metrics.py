"""Monte-Carlo estimators for the UCP and Emery (semimartingale) metrics.

r_ucp is estimated by replacing the expectation in

    r_ucp(z) = sum_{n>=1} 2^(-n) E[ 1 ^ sup_{0<=t<=n} |z_t| ]

with an ensemble mean and truncating the series at ``n_max``; the omitted
tail is bounded by 2^(-n_max) and reported alongside.  The Emery seminorm
sup over all |h| <= 1 elementary integrands is not computable; the
dictionary estimator below maximizes over a finite dictionary and is an
explicit LOWER bound, monotone in the dictionary.  Distances always use
common random numbers so that equal inputs give exact zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scalar_integral import ElementaryScalarIntegrand, constant_one, h_dot_z
from .trajectory import ScalarTrajectory

__all__ = [
    "ProcessEnsemble",
    "IntegrandDictionary",
    "r_ucp_estimate",
    "d_ucp_estimate",
    "r_em_estimate",
    "ucp_dual_estimate",
    "ucp_dual_metric",
    "ucp_tail_bound",
]


@dataclass(frozen=True)
class ProcessEnsemble:
    """Scalar trajectories of Monte-Carlo replicas on one shared grid."""

    grid: np.ndarray
    paths: np.ndarray  # shape (count, len(grid))

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        p = np.atleast_2d(np.asarray(self.paths, dtype=float))
        if p.shape[0] < 1 or p.shape[1] != len(g):
            raise ValueError("ensemble needs count >= 1 trajectories on the grid")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "paths", p)

    @property
    def count(self) -> int:
        return self.paths.shape[0]

    @classmethod
    def from_trajectories(cls, trajectories: Sequence[ScalarTrajectory], grid=None):
        grid = np.asarray(grid if grid is not None else trajectories[0].times, float)
        rows = [tr.values_at(grid) for tr in trajectories]
        return cls(grid, np.vstack(rows))

    @classmethod
    def from_paths(cls, paths, grid=None):
        grid = np.asarray(grid if grid is not None else paths[0].base_grid, float)
        return cls(grid, np.vstack([p.values_at(grid) for p in paths]))


def ucp_tail_bound(n_max: int) -> float:
    """Rigorous bound on the truncated tail of the r_ucp series."""
    return 2.0**-n_max


def r_ucp_replicas(ens: ProcessEnsemble, n_max: int) -> np.ndarray:
    """Per-replica contributions sum_n 2^(-n) (1 ^ sup_{t<=n} |z_t|).

    The r_ucp estimate is the mean of these; their spread gives the
    Monte-Carlo standard error.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if ens.grid[-1] < n_max:
        raise ValueError(
            f"grid horizon {ens.grid[-1]} shorter than n_max={n_max}"
        )
    out = np.zeros(ens.count)
    for n in range(1, n_max + 1):
        sup = np.max(np.abs(ens.paths[:, ens.grid <= n]), axis=1)
        out += 2.0**-n * np.minimum(1.0, sup)
    return out


def r_ucp_estimate(ens: ProcessEnsemble, n_max: int) -> float:
    """Truncated-series ensemble estimate of r_ucp.

    The grid horizon must reach n_max; the omitted tail is at most
    :func:`ucp_tail_bound`.
    """
    return float(np.mean(r_ucp_replicas(ens, n_max)))


def d_ucp_estimate(A: ProcessEnsemble, B: ProcessEnsemble, n_max: int) -> float:
    """d_ucp(A, B) = r_ucp(A - B) with paired replicas (common random numbers)."""
    if A.count != B.count:
        raise ValueError(f"replica count mismatch: {A.count} vs {B.count}")
    if not np.array_equal(A.grid, B.grid):
        raise ValueError("ensembles live on different grids")
    return r_ucp_estimate(ProcessEnsemble(A.grid, A.paths - B.paths), n_max)


def _is_constant_one(h: ElementaryScalarIntegrand) -> bool:
    if callable(h.a0) or h.a0 != 1.0 or len(h.blocks) != 1:
        return False
    start, coef = h.blocks[0]
    return start == 0.0 and not callable(coef) and coef == 1.0


@dataclass(frozen=True)
class IntegrandDictionary:
    """A finite family of |h| <= 1 elementary integrands, always containing h = 1."""

    elements: tuple

    def __post_init__(self):
        if not self.elements:
            raise ValueError("dictionary must be nonempty")
        for h in self.elements:
            if not np.isfinite(h.bound) or h.bound > 1.0 + 1e-12:
                raise ValueError("dictionary elements must satisfy |h| <= 1")
        if not any(_is_constant_one(h) for h in self.elements):
            raise ValueError("the constant process h = 1 must be a member")

    @classmethod
    def default(
        cls,
        horizon: float,
        n_blocks: int = 8,
        n_random: int = 3,
        seed: int = 0,
        include_greedy: bool = True,
    ) -> "IntegrandDictionary":
        """Constants, random sign blocks, and greedy sign-of-increment blocks."""
        edges = np.arange(n_blocks + 1) * (horizon / n_blocks)
        elems = [constant_one(horizon)]
        elems.append(
            ElementaryScalarIntegrand(
                a0=-1.0, blocks=[(0.0, -1.0)], end=horizon, bound=1.0
            )
        )
        rng = np.random.default_rng(seed)
        for _ in range(n_random):
            signs = rng.choice([-1.0, 1.0], size=n_blocks)
            blocks = [(float(e), float(s)) for e, s in zip(edges[:-1], signs)]
            elems.append(
                ElementaryScalarIntegrand(blocks=blocks, end=horizon, bound=1.0)
            )
        if include_greedy:
            def sign_of_increment(prev_edge):
                def coef(view):
                    return float(
                        np.sign(view.value(view.t) - view.value(prev_edge))
                    ) or 1.0
                return coef

            blocks = [(float(edges[0]), 1.0)] + [
                (float(e), sign_of_increment(float(p)))
                for p, e in zip(edges[1:-1] - (horizon / n_blocks), edges[1:-1])
            ]
            elems.append(
                ElementaryScalarIntegrand(blocks=blocks, end=horizon, bound=1.0)
            )
        return cls(tuple(elems))


def r_em_estimate(
    path_sampler,
    dictionary: IntegrandDictionary,
    replicas: int,
    n_max: int,
    grid=None,
) -> float:
    """Dictionary lower bound for the Emery seminorm.

    ``path_sampler(i)`` must return the i-th replica driver.  For each
    dictionary element the ensemble of elementary integrals (h . z) is
    formed and r_ucp-estimated; the maximum over the dictionary is a lower
    bound of r_em that never decreases when the dictionary grows.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    paths = [path_sampler(i) for i in range(replicas)]
    if grid is None:
        grid = getattr(paths[0], "base_grid", paths[0].times)
    best = 0.0
    for h in dictionary.elements:
        rows = [h_dot_z(h, p, grid).values for p in paths]
        est = r_ucp_estimate(ProcessEnsemble(grid, np.vstack(rows)), n_max)
        best = max(best, est)
    return best


def _dual_sup(X, Y, r: int, T: float) -> np.ndarray:
    """Per-replica sup_{t<=T} of the level-r dual seminorm of X - Y."""
    sups = []
    for x, y in zip(X, Y):
        if x.basis.truncation != y.basis.truncation:
            raise ValueError("truncation mismatch between paired replicas")
        if not np.array_equal(x.times, y.times):
            raise ValueError("paired replicas live on different grids")
        w = x.basis.seminorm_weights(-r)
        mask = x.times <= T
        diff = x.coeffs[mask] - y.coeffs[mask]
        sups.append(float(np.sqrt(np.max((diff**2 @ w)))))
    return np.array(sups)


def ucp_dual_estimate(Xs, Ys, r: int, T: float, eps: float) -> float:
    """Empirical frequency of { sup_{t<=T} p'_r(X_t - Y_t) >= eps }."""
    if len(Xs) != len(Ys):
        raise ValueError(f"replica count mismatch: {len(Xs)} vs {len(Ys)}")
    return float(np.mean(_dual_sup(Xs, Ys, r, T) >= eps))


def ucp_dual_metric(Xs, Ys, r: int, T: float) -> float:
    """Ensemble mean of 1 ^ sup_{t<=T} p'_r(X_t - Y_t).

    The exceedance frequency of :func:`ucp_dual_estimate` saturates at 0
    once differences fall below eps, so convergence-rate fits use this
    bounded mean instead.
    """
    if len(Xs) != len(Ys):
        raise ValueError(f"replica count mismatch: {len(Xs)} vs {len(Ys)}")
    return float(np.mean(np.minimum(1.0, _dual_sup(Xs, Ys, r, T))))
