"""Classification errors of thresholded functions and their W1 bounds.

All distribution functions here are exact step functions of atomic
pushforwards, so every integral is a finite sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InputError,
    InvalidRho,
    NegativeEps,
    NotLipschitz,
    RangeViolation,
    SingleClass,
    SupportMismatch,
    WExceedsMass,
    ZeroDiameter,
)
from .kr_exact import TransportSolution, w1_exact
from .measures import AtomicMeasure, align, check_pair, empirical_from_sample
from .metrics import MetricDescriptor, cost_matrix, diameter

RANGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ClassificationFunction:
    values: np.ndarray
    lipschitz_certified: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise InputError("classification function values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def certified(cls, values, cost, tol: float = 1e-9) -> "ClassificationFunction":
        """Attach a 1-Lipschitz certificate, checked against the cost matrix."""
        v = np.asarray(values, dtype=float)
        cost = np.asarray(cost, dtype=float)
        if np.any(np.abs(v[:, None] - v[None, :]) > cost + tol):
            raise NotLipschitz("function is not 1-Lipschitz for this metric")
        return cls(v, True)

    def __len__(self) -> int:
        return len(self.values)

    def shifted(self, c: float) -> "ClassificationFunction":
        return ClassificationFunction(self.values + c, self.lipschitz_certified)


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, ClassificationFunction) else np.asarray(f, dtype=float)


def _pair(f, m1: AtomicMeasure, m2: AtomicMeasure) -> np.ndarray:
    v = _values(f)
    if m1.support != m2.support:
        raise SupportMismatch("measures must share a support")
    if len(v) != len(m1):
        raise InputError("function must have one value per support point")
    return v


def sublevel_mass(f, m: AtomicMeasure, t: float) -> float:
    """F(t) = m({f <= t})."""
    return float(m.weights[_values(f) <= t].sum())


def epsilon_quantity(f, gamma: float, m1: AtomicMeasure, m2: AtomicMeasure) -> float:
    """m1({f <= gamma}) + m2({f > gamma})."""
    v = _pair(f, m1, m2)
    return float(m1.weights[v <= gamma].sum() + m2.weights[v > gamma].sum())


def subset_error(B: Sequence[int], m1: AtomicMeasure, m2: AtomicMeasure) -> float:
    """Error of the classifier predicting class 1 on B: m1(B^c) + m2(B)."""
    inside = np.zeros(len(m1), dtype=bool)
    inside[list(B)] = True
    return float(m1.weights[~inside].sum() + m2.weights[inside].sum())


@dataclass(frozen=True)
class ErrorReport:
    eps12: float
    eps21: float
    err: float
    threshold: float
    side: str


def err(f, eps: float, m1: AtomicMeasure, m2: AtomicMeasure) -> ErrorReport:
    """Margin error: min over orientations of m_i(f <= eps/2) + m_j(f > -eps/2)."""
    if eps < 0:
        raise NegativeEps("eps must be nonnegative")
    v = _pair(f, m1, m2)
    lo, hi = v > -eps / 2, v <= eps / 2
    e12 = float(m1.weights[hi].sum() + m2.weights[lo].sum())
    e21 = float(m2.weights[hi].sum() + m1.weights[lo].sum())
    side = "12" if e12 <= e21 else "21"
    return ErrorReport(e12, e21, min(e12, e21), eps / 2, side)


def margin_risk(values: Sequence[float], labels: Sequence[int], alpha: float) -> float:
    """Empirical alpha-translated zero-one risk (1/n) sum 1{y f(x) <= alpha}."""
    v = np.asarray(values, dtype=float)
    y = np.asarray(labels, dtype=float)
    return float(np.mean(y * v <= alpha))


def _check_range(v: np.ndarray, Delta: float) -> None:
    if np.any(v < -RANGE_TOL) or np.any(v > Delta + RANGE_TOL):
        raise RangeViolation(f"function values must lie in [0, {Delta}]")


def weighted_error(h, B: np.ndarray, ma: AtomicMeasure, mb: AtomicMeasure) -> float:
    """int_{B^c} h dma + int_B h dmb for a fixed set B."""
    h = _values(h)
    return float(h[~B] @ ma.weights[~B] + h[B] @ mb.weights[B])


def layered_error(f, t: float, ma: AtomicMeasure, mb: AtomicMeasure, Delta: float) -> float:
    """E(f, t; ma, mb) + E(Delta - f, t; ma, mb) with B = {f <= t} held fixed."""
    v = _pair(f, ma, mb)
    _check_range(v, Delta)
    B = v <= t
    return weighted_error(v, B, ma, mb) + weighted_error(Delta - v, B, ma, mb)


def general_err(f, t: float, m1: AtomicMeasure, m2: AtomicMeasure, Delta: float) -> float:
    """Value-weighted error: the smaller of the two orderings of ``layered_error``."""
    if not 0 <= t <= Delta:
        raise RangeViolation("threshold must lie in [0, Delta]")
    return min(layered_error(f, t, m1, m2, Delta), layered_error(f, t, m2, m1, Delta))


def bayes_classifier(m1: AtomicMeasure, m2: AtomicMeasure) -> tuple[list[int], float]:
    """Set where m1 dominates m2 and the error of predicting class 1 there."""
    check_pair(m1, m2)
    B = [int(i) for i in np.flatnonzero(m1.weights >= m2.weights)]
    return B, subset_error(B, m1, m2)


def best_subset_error(m1: AtomicMeasure, m2: AtomicMeasure) -> float:
    """Minimum subset error by enumerating all 2^n subsets (n <= 16)."""
    check_pair(m1, m2)
    n = len(m1)
    if n > 16:
        raise InputError("enumeration limited to 16 points")
    return min(
        subset_error(B, m1, m2)
        for r in range(n + 1)
        for B in itertools.combinations(range(n), r)
    )


def delta_bound(W: float, Delta: float, rho: float, gamma: float = 1.0) -> float:
    """(2 / (1 - rho)) (gamma - W / Delta), clamped at 0."""
    if not 0 <= rho < 1:
        raise InvalidRho("rho must lie in [0, 1)")
    if Delta <= 0:
        raise ZeroDiameter("diameter must be positive")
    if W > gamma * Delta + 1e-9:
        raise WExceedsMass("W exceeds gamma * Delta")
    return max(0.0, 2.0 / (1.0 - rho) * (gamma - W / Delta))


@dataclass(frozen=True)
class LowerBoundReport:
    w1: float
    delta: float
    bound: float
    holds: bool


def w1_lower_bound_check(
    f: ClassificationFunction,
    eps: float,
    m1: AtomicMeasure,
    m2: AtomicMeasure,
    metric: MetricDescriptor,
) -> LowerBoundReport:
    """Compare W1 with eps * (1 - err(f, eps)) for a certified 1-Lipschitz f."""
    if not f.lipschitz_certified:
        raise NotLipschitz("f must carry a Lipschitz certificate")
    if not 0 <= eps <= 1:
        raise InputError("eps must lie in [0, 1]")
    delta = err(f, eps, m1, m2).err
    W = w1_exact(m1, m2, metric).cost
    bound = eps * (1.0 - delta)
    return LowerBoundReport(W, delta, bound, W >= bound - 1e-9)


def threshold_from_potential(
    sol: TransportSolution, m1: AtomicMeasure, m2: AtomicMeasure
) -> tuple[ClassificationFunction, float, float]:
    """Best threshold of the optimal potential: argmax_t |F1(t) - F2(t)|.

    Ties go to the smallest threshold. Returns (f, t_star, err0) where err0
    is the smaller orientation error of the classifier at t_star.
    """
    check_pair(m1, m2)
    f = ClassificationFunction(sol.potential, True)
    best_t, best_gap = None, -1.0
    for t in np.unique(f.values):
        gap = abs(sublevel_mass(f, m1, t) - sublevel_mass(f, m2, t))
        if gap > best_gap:
            best_t, best_gap = float(t), gap
    e = min(epsilon_quantity(f, best_t, m1, m2), epsilon_quantity(f, best_t, m2, m1))
    return f, best_t, e


def centered_potential(sol: TransportSolution, Delta: float) -> ClassificationFunction:
    """Optimal potential shifted by -Delta/2, the margin classifier of the rho-bound."""
    return ClassificationFunction(sol.potential - Delta / 2.0, True)


def step_integral(f, m: AtomicMeasure, a: float, b: float) -> float:
    """int_a^b m({f <= y}) dy, exact."""
    if b <= a:
        return 0.0
    v = _values(f)
    return float(m.weights @ np.maximum(0.0, b - np.maximum(a, v)))


def cdf_gap_integral(f, m1: AtomicMeasure, m2: AtomicMeasure) -> float:
    """int |F1 - F2| over the real line for the pushforwards f(m1), f(m2)."""
    v = _pair(f, m1, m2)
    xs = np.unique(v)
    if len(xs) < 2:
        return 0.0
    F1 = np.array([m1.weights[v <= x].sum() for x in xs[:-1]])
    F2 = np.array([m2.weights[v <= x].sum() for x in xs[:-1]])
    return float(np.abs(F1 - F2) @ np.diff(xs))


def area_decomposition(
    f, gamma: float, m1: AtomicMeasure, m2: AtomicMeasure, Delta: float
) -> tuple[float, float, float]:
    """Three evaluations of int f d(m1 - m2) for f with values in [0, Delta].

    form1 splits each int f dm_i at level gamma into a rectangle plus two
    areas above the distribution function; form2 writes the same quantity
    from the areas below it; direct is the plain weighted sum.
    """
    v = _pair(f, m1, m2)
    _check_range(v, Delta)
    if not 0 <= gamma <= Delta:
        raise RangeViolation("gamma must lie in [0, Delta]")

    def above(m: AtomicMeasure) -> float:
        M = m.total_mass
        Fg = sublevel_mass(v, m, gamma)
        rect = gamma * (M - Fg)
        upper = (Delta - gamma) * M - step_integral(v, m, gamma, Delta)
        lower = gamma * Fg - step_integral(v, m, 0.0, gamma)
        return rect + upper + lower

    def below(m: AtomicMeasure) -> float:
        Fg = sublevel_mass(v, m, gamma)
        return (
            step_integral(v, m, gamma, Delta) - (Delta - gamma) * Fg
            + step_integral(v, m, 0.0, gamma)
            + (Delta - gamma) * Fg
        )

    form1 = above(m1) - above(m2)
    form2 = below(m2) - below(m1)
    direct = float(v @ (m1.weights - m2.weights))
    return form1, form2, direct


@dataclass(frozen=True)
class ComplexityReport:
    W: float
    Delta: float
    ratio: float
    risk_bound: float
    n_pos: int
    n_neg: int


def class_measures(points, labels, mass: float = 0.5) -> tuple[AtomicMeasure, AtomicMeasure]:
    """Empirical class-conditional measures (positive, negative), each of ``mass``."""
    pts = [tuple(np.atleast_1d(np.asarray(p, dtype=float))) for p in points]
    y = np.asarray(labels)
    pos = [p for p, l in zip(pts, y) if l == 1]
    neg = [p for p, l in zip(pts, y) if l == -1]
    if not pos or not neg:
        raise SingleClass("both labels must be present")
    _, mp = empirical_from_sample(pos, mass)
    _, mn = empirical_from_sample(neg, mass)
    return align(mp, mn)


def complexity_descriptor(points, labels, metric: MetricDescriptor, rho: float = 0.0) -> ComplexityReport:
    """W1 between the half-mass class measures, scaled by the sample diameter."""
    if not 0 <= rho < 1:
        raise InvalidRho("rho must lie in [0, 1)")
    mp, mn = class_measures(points, labels, 0.5)
    D = diameter(metric, mp.support)
    if D <= 0:
        raise ZeroDiameter("all sample points coincide")
    W = w1_exact(mp, mn, metric).cost
    y = np.asarray(labels)
    return ComplexityReport(
        W, D, W / D, delta_bound(W, D, rho, 0.5), int((y == 1).sum()), int((y == -1).sum())
    )

