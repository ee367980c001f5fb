"""Real-valued stochastic integrals of test-function-valued integrands.

Three layers, matching how the integrals are actually computed:

* ``h_dot_z`` -- the elementary integral of a real predictable step process
  against a scalar driver, by exact telescoping:
  (h . z)_t = a_0 z_0 + sum_i a_i (z_{t_{i+1} ^ t} - z_{t_i ^ t}).
* ``integrate_elementary`` -- for H(t) = sum_k h_k(t) phi_k against a
  cylindrical semimartingale X, equal to sum_k h_k . <X, phi_k>.
* ``riemann_scalar`` -- the left-point Riemann sum of a sampled integrand
  over a random partition,
  <X_0, H(0)> + sum_k <X_{tau_{k+1} ^ t} - X_{tau_k ^ t}, H(tau_k)>,
  which telescopes exactly for constant H and for elementary H whose
  blocks align with the partition.

Coefficients are resolved through :class:`~hermsem.paths.HistoryView`, so
an integrand can only read the driver's past.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .basis import TestFunction
from .paths import CadlagPath, ContractError, HistoryView, RandomPartition
from .trajectory import ScalarTrajectory

__all__ = [
    "ElementaryScalarIntegrand",
    "ElementaryTestFnIntegrand",
    "CylindricalSemimartingale",
    "h_dot_z",
    "integrate_elementary",
    "riemann_scalar",
    "constant_one",
]


Coefficient = float | Callable[[HistoryView], float]


class _TrajectoryView:
    """History access for trajectory drivers (same contract as HistoryView)."""

    __slots__ = ("_traj", "t")

    def __init__(self, traj, t: float):
        self._traj = traj
        self.t = float(t)

    def _check(self, s: float) -> None:
        if s > self.t * (1 + 1e-12) + 1e-15:
            raise ContractError(f"history query at {s} exceeds view time {self.t}")

    def value(self, s: float) -> float:
        self._check(s)
        return self._traj.value(s)

    def left_value(self, s: float) -> float:
        self._check(s)
        return self._traj.left_value(s)


def _view(driver, t: float):
    if isinstance(driver, CadlagPath):
        return HistoryView(driver, t)
    return _TrajectoryView(driver, t)


@dataclass(frozen=True)
class ElementaryScalarIntegrand:
    """A real elementary predictable process.

    ``a0`` is the coefficient of the atom at t = 0, and ``blocks`` is a
    list of (start, coefficient) pairs: the i-th coefficient acts on the
    interval (start_i, start_{i+1}], the last one up to ``end`` (or the
    horizon when ``end`` is None).  A coefficient may be a plain float or
    a functional of the driver's history up to the block start, which is
    exactly the predictable class the elementary integral is defined on.
    """

    a0: Coefficient = 0.0
    blocks: Sequence[tuple[float, Coefficient]] = ()
    end: float | None = None
    bound: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        starts = [b[0] for b in self.blocks]
        if any(t < 0 for t in starts):
            raise ValueError("block times must be nonnegative")
        if any(u >= v for u, v in zip(starts, starts[1:])):
            raise ValueError("block times must be strictly increasing")
        if self.end is not None and starts and self.end <= starts[-1]:
            raise ValueError("end must exceed the last block start")
        if self.bound <= 0:
            raise ValueError("bound must be positive")

    def resolve(self, driver) -> "_ResolvedElementary":
        """Evaluate all coefficient functionals against one driver."""

        def ev(c: Coefficient, t: float) -> float:
            v = float(c(_view(driver, t))) if callable(c) else float(c)
            if abs(v) > self.bound * (1 + 1e-12):
                raise ContractError(
                    f"coefficient {v} at t={t} violates |a| <= {self.bound}"
                )
            return v

        starts = np.array([b[0] for b in self.blocks], dtype=float)
        coefs = np.array([ev(c, t) for t, c in self.blocks], dtype=float)
        ends = np.append(starts[1:], math.inf if self.end is None else self.end)
        return _ResolvedElementary(ev(self.a0, 0.0), starts, coefs, ends)


@dataclass(frozen=True)
class _ResolvedElementary:
    a0: float
    starts: np.ndarray
    coefs: np.ndarray
    ends: np.ndarray

    def sample_at(self, t) -> np.ndarray:
        """Cadlag sample: the coefficient acting just after time t."""
        t = np.asarray(t, dtype=float)
        if not len(self.coefs):
            return np.zeros_like(t)
        idx = np.searchsorted(self.starts, t, side="right") - 1
        vals = np.where(idx >= 0, self.coefs[np.maximum(idx, 0)], 0.0)
        return np.where(t >= self.ends[-1], 0.0, vals)

    def value_at(self, t) -> np.ndarray:
        """Caglad process value: the coefficient of the block (t_i, t_{i+1}] containing t."""
        t = np.asarray(t, dtype=float)
        if not len(self.coefs):
            return np.where(t == 0.0, self.a0, 0.0)
        idx = np.searchsorted(self.starts, t, side="left") - 1
        ok = idx >= 0
        idx = np.maximum(idx, 0)
        inside = ok & (t <= self.ends[idx])
        vals = np.where(inside, self.coefs[idx], 0.0)
        return np.where(t == 0.0, self.a0, vals)


def constant_one(horizon: float | None = None) -> ElementaryScalarIntegrand:
    """h = 1 everywhere: a_0 = 1 and a single unit block on (0, horizon]."""
    return ElementaryScalarIntegrand(a0=1.0, blocks=[(0.0, 1.0)], end=horizon, bound=1.0)


def h_dot_z(
    h: ElementaryScalarIntegrand, driver, times=None, view_driver=None
) -> ScalarTrajectory:
    """The elementary integral (h . z) evaluated by exact telescoping.

    ``driver`` is a :class:`~hermsem.paths.CadlagPath` or any object with
    ``values_at``; output values are exact at every requested time.
    Coefficient functionals read the history of ``view_driver`` (the
    driver itself when omitted).
    """
    if times is None:
        times = driver.times
    t = np.asarray(times, dtype=float)
    res = h.resolve(driver if view_driver is None else view_driver)
    z0 = driver.values_at(np.array([0.0]))[0]
    out = np.full(t.shape, res.a0 * z0)
    for start, coef, end in zip(res.starts, res.coefs, res.ends):
        hi = driver.values_at(np.minimum(t, end if math.isfinite(end) else t))
        lo = driver.values_at(np.minimum(t, start))
        out += coef * (hi - lo)
    return ScalarTrajectory(t, out)


class CylindricalSemimartingale:
    """A linear map phi -> (scalar semimartingale <X, phi> along a path).

    Subclasses implement :meth:`pair_pointwise`; linearity in phi is exact
    because every implementation evaluates a linear expression in the
    coefficients.  Addition and scalar multiples stay in the class, which
    the bilinearity probes rely on.
    """

    def pair_pointwise(self, path, ts, coeff_rows, left=False) -> np.ndarray:
        """<X_{ts[i]}, phi_i> with phi_i the i-th row of ``coeff_rows``."""
        raise NotImplementedError

    def pair_many(self, path, ts, phi: TestFunction, left=False) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        rows = np.broadcast_to(phi.coeffs, (len(ts), len(phi.coeffs)))
        return self.pair_pointwise(path, ts, rows, left)

    def pair(self, path, t: float, phi: TestFunction, left=False) -> float:
        return float(self.pair_many(path, np.array([t]), phi, left)[0])

    def __add__(self, other: "CylindricalSemimartingale"):
        return _SumCylindrical(self, other)

    def __mul__(self, a: float):
        return _ScaledCylindrical(self, float(a))

    __rmul__ = __mul__


class _SumCylindrical(CylindricalSemimartingale):
    def __init__(self, x, y):
        self.x, self.y = x, y

    def pair_pointwise(self, path, ts, coeff_rows, left=False):
        return self.x.pair_pointwise(path, ts, coeff_rows, left) + self.y.pair_pointwise(
            path, ts, coeff_rows, left
        )


class _ScaledCylindrical(CylindricalSemimartingale):
    def __init__(self, x, a):
        self.x, self.a = x, a

    def pair_pointwise(self, path, ts, coeff_rows, left=False):
        return self.a * self.x.pair_pointwise(path, ts, coeff_rows, left)


class _PairingDriver:
    """Adapter exposing t -> <X_t, phi> with the driver interface."""

    def __init__(self, X: CylindricalSemimartingale, path, phi: TestFunction):
        self.X, self.path, self.phi = X, path, phi

    def values_at(self, ts, left=False):
        return self.X.pair_many(self.path, ts, self.phi, left)


@dataclass(frozen=True)
class ElementaryTestFnIntegrand:
    """H(t) = sum_k h_k(t) phi_k with elementary scalar h_k."""

    terms: Sequence[tuple[ElementaryScalarIntegrand, TestFunction]]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        ns = {phi.basis.truncation for _, phi in self.terms}
        if len(ns) > 1:
            raise ValueError("all test functions must share one truncation")


def integrate_elementary(
    H: ElementaryTestFnIntegrand,
    X: CylindricalSemimartingale,
    path: CadlagPath,
    times=None,
) -> ScalarTrajectory:
    """int H dX = sum_k h_k . <X, phi_k>, evaluated exactly."""
    if times is None:
        times = path.times
    t = np.asarray(times, dtype=float)
    out = np.zeros(t.shape)
    for h, phi in H.terms:
        out = out + h_dot_z(h, _PairingDriver(X, path, phi), t, view_driver=path).values
    return ScalarTrajectory(t, out)


class _ElementarySampler:
    """Riemann sampling view of an elementary test-function integrand."""

    def __init__(self, H: ElementaryTestFnIntegrand, path):
        self.resolved = [(h.resolve(path), phi) for h, phi in H.terms]

    def sample_many(self, taus, path) -> np.ndarray:
        n = self.resolved[0][1].basis.truncation if self.resolved else 0
        out = np.zeros((len(taus), n))
        for res, phi in self.resolved:
            out += np.outer(res.sample_at(taus), phi.coeffs)
        return out

    def sample_atom(self, path) -> np.ndarray:
        n = self.resolved[0][1].basis.truncation if self.resolved else 0
        out = np.zeros(n)
        for res, phi in self.resolved:
            out += res.a0 * phi.coeffs
        return out


class _CallableSampler:
    def __init__(self, fn, path):
        self.fn = fn

    def sample_many(self, taus, path) -> np.ndarray:
        return np.array(
            [self.fn(float(t), HistoryView(path, float(t))).coeffs for t in taus]
        )

    def sample_atom(self, path) -> np.ndarray:
        return self.fn(0.0, HistoryView(path, 0.0)).coeffs


def _as_sampler(H, path):
    if isinstance(H, ElementaryTestFnIntegrand):
        return _ElementarySampler(H, path)
    if hasattr(H, "sample_many"):
        return H
    if callable(H):
        return _CallableSampler(H, path)
    raise TypeError(f"cannot sample integrand of type {type(H)!r}")


def riemann_scalar(
    H,
    X: CylindricalSemimartingale,
    path: CadlagPath,
    partition: RandomPartition,
    times=None,
) -> ScalarTrajectory:
    """Left-point Riemann approximation of int H dX over a random partition.

    ``H`` may be an :class:`ElementaryTestFnIntegrand`, a callable
    ``(t, view) -> TestFunction``, or any object with ``sample_many`` /
    ``sample_atom``.  The k = 0 atom term <X_0, H(0)> follows the
    initial-value convention under which a constant integrand phi
    reproduces <X_t, phi> exactly.
    """
    taus = partition.times
    if times is None:
        times = np.unique(np.concatenate([path.times, taus]))
    t = np.asarray(times, dtype=float)
    if isinstance(H, ElementaryTestFnIntegrand) and not H.terms:
        return ScalarTrajectory(t, np.zeros(t.shape))
    sampler = _as_sampler(H, path)

    C = sampler.sample_many(taus[:-1], path)  # coefficient rows per cell
    atom = float(X.pair_pointwise(path, np.array([0.0]), sampler.sample_atom(path)[None, :])[0])

    p_left = X.pair_pointwise(path, taus[:-1], C)
    p_right = X.pair_pointwise(path, taus[1:], C)
    prefix = np.concatenate([[0.0], np.cumsum(p_right - p_left)])

    # cell index of each query time: taus[i] <= t < taus[i+1]
    i = np.clip(np.searchsorted(taus, t, side="right") - 1, 0, len(taus) - 1)
    full = np.minimum(i, len(taus) - 1)
    out = atom + prefix[np.minimum(full, len(prefix) - 1)]
    partial = i < len(taus) - 1
    if partial.any():
        rows = C[i[partial]]
        out = np.array(out, dtype=float)
        out[partial] += (
            X.pair_pointwise(path, t[partial], rows) - p_left[i[partial]]
        )
    return ScalarTrajectory(t, out)
