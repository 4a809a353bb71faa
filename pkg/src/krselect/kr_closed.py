"""Closed-form W1 for the discrete metric, the line, the circle and l1 products."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, MethodMismatch
from .kr_exact import w1_exact
from .measures import AtomicMeasure, align, check_pair, project_coords, tv_distance
from .metrics import Circle, Discrete, Explicit, Line, MetricDescriptor, Product, single_coordinate


def w1_discrete(m1: AtomicMeasure, m2: AtomicMeasure, k: float = 1.0) -> float:
    """W1 under k * 1{x != y}: k times the total variation distance."""
    return k * tv_distance(m1, m2)


def _scalar_support(m: AtomicMeasure) -> np.ndarray:
    if m.support.dimension != 1:
        raise DimensionMismatch("closed form needs one-dimensional support")
    return m.support.coords[:, 0]


def w1_line(m1: AtomicMeasure, m2: AtomicMeasure) -> float:
    """Area between the two cumulative distribution functions."""
    check_pair(m1, m2)
    x = _scalar_support(m1)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    F = np.cumsum(m1.weights[order] - m2.weights[order])
    return float(np.sum(np.abs(F[:-1]) * np.diff(xs)))


@dataclass(frozen=True)
class CutProfile:
    positions: np.ndarray  # sorted, canonical in [0, C)
    alpha: np.ndarray  # cumulative mass difference up to and including each position
    lengths: np.ndarray  # forward arc from each position to the next (wrapping)
    circumference: float


def cut_profile(m1: AtomicMeasure, m2: AtomicMeasure, circumference: float) -> CutProfile:
    check_pair(m1, m2)
    C = float(circumference)
    s = np.mod(_scalar_support(m1), C)
    diff = m1.weights - m2.weights
    # distinct raw coordinates may coincide on the circle
    pos, inv = np.unique(s, return_inverse=True)
    d = np.zeros(len(pos))
    np.add.at(d, inv, diff)
    alpha = np.cumsum(d)
    lengths = np.empty(len(pos))
    lengths[:-1] = np.diff(pos)
    lengths[-1] = C - (pos[-1] - pos[0])
    return CutProfile(pos, alpha, lengths, C)


def circle_cut_constant(profile: CutProfile) -> float:
    """Largest attained alpha value t with arc-length{alpha >= t} > C/2."""
    half = profile.circumference / 2.0
    best = float(np.min(profile.alpha))
    for t in np.unique(profile.alpha):
        if profile.lengths[profile.alpha >= t].sum() > half:
            best = max(best, float(t))
    return best


def w1_circle(m1: AtomicMeasure, m2: AtomicMeasure, circumference: float = 1.0) -> float:
    """Minimum over cut constants a of sum_j len_j * |alpha_j - a|."""
    prof = cut_profile(m1, m2, circumference)
    a = prof.alpha
    vals = np.abs(a[:, None] - a[None, :]) @ prof.lengths
    return float(vals.min())


def circle_value_at(profile: CutProfile, a: float) -> float:
    return float(np.abs(profile.alpha - a) @ profile.lengths)


def w1_product_additive(pairs: Sequence[tuple[AtomicMeasure, AtomicMeasure, MetricDescriptor]]) -> float:
    """Sum of per-coordinate W1 values; valid for product measures under l1."""
    return float(sum(w1_auto(a, b, d) for a, b, d in pairs))


def marginal_pairs(m1: AtomicMeasure, m2: AtomicMeasure, d: Product):
    return [(project_coords(m1, [i]), project_coords(m2, [i]), a) for i, a in enumerate(d.coords)]


def w1_auto(
    m1: AtomicMeasure,
    m2: AtomicMeasure,
    d: MetricDescriptor,
    product_measures: bool = False,
) -> float:
    """Dispatch to the cheapest exact method for the metric.

    ``product_measures=True`` asserts that both measures are products of
    their coordinate marginals; only then is the additive formula used.
    """
    m1, m2 = align(m1, m2)
    atom = single_coordinate(d)
    if isinstance(atom, Discrete):
        return w1_discrete(m1, m2, atom.k)
    if isinstance(atom, Line):
        return w1_line(m1, m2)
    if isinstance(atom, Circle):
        return w1_circle(m1, m2, atom.circumference)
    if product_measures and isinstance(d, Product) and d.combine == "l1":
        return w1_product_additive(marginal_pairs(m1, m2, d))
    return w1_exact(m1, m2, d).cost


METHODS = ("auto", "tv", "line", "circle", "lp", "product")


def w1(m1: AtomicMeasure, m2: AtomicMeasure, d: MetricDescriptor, method: str = "auto") -> float:
    """W1 with an explicit method choice; refuses methods the metric cannot support."""
    if method not in METHODS:
        raise MethodMismatch(f"unknown method {method!r}")
    m1, m2 = align(m1, m2)
    atom = single_coordinate(d)
    if method == "auto":
        return w1_auto(m1, m2, d)
    if method == "lp":
        return w1_exact(m1, m2, d).cost
    if method == "tv":
        if not isinstance(atom, Discrete):
            raise MethodMismatch("method 'tv' requires a discrete metric")
        return w1_discrete(m1, m2, atom.k)
    if method == "line":
        if not isinstance(atom, Line):
            raise MethodMismatch("method 'line' requires a single line coordinate")
        return w1_line(m1, m2)
    if method == "circle":
        if not isinstance(atom, Circle):
            raise MethodMismatch("method 'circle' requires a single circle coordinate")
        return w1_circle(m1, m2, atom.circumference)
    if not isinstance(d, Product) or d.combine != "l1" or any(isinstance(a, Explicit) for a in d.coords):
        raise MethodMismatch("method 'product' requires an l1 product metric")
    return w1_product_additive(marginal_pairs(m1, m2, d))


__all__ = [
    "CutProfile",
    "circle_cut_constant",
    "circle_value_at",
    "cut_profile",
    "marginal_pairs",
    "w1",
    "w1_auto",
    "w1_circle",
    "w1_discrete",
    "w1_line",
    "w1_product_additive",
]
