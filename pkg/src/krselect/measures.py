"""Finitely supported measures on an indexed point set."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicatePoint,
    EmptySample,
    InputError,
    InvalidTargetIndex,
    MalformedHeader,
    MalformedLine,
    MassMismatch,
    SupportMismatch,
    ZeroMass,
)

MASS_TOL = 1e-9

Point = tuple[float, ...]


def _as_point(p) -> Point:
    if np.isscalar(p):
        return (float(p),)
    return tuple(float(x) for x in p)


@dataclass(frozen=True)
class PointSet:
    """Ordered, duplicate-free list of coordinate vectors of a common dimension."""

    points: tuple[Point, ...]

    def __post_init__(self):
        pts = tuple(_as_point(p) for p in self.points)
        if not pts:
            raise EmptySample("a point set needs at least one point")
        r = len(pts[0])
        if r == 0:
            raise DimensionMismatch("points must have at least one coordinate")
        if any(len(p) != r for p in pts):
            raise DimensionMismatch("all points must have the same number of coordinates")
        if len(set(pts)) != len(pts):
            raise DuplicatePoint("point set contains duplicate coordinate vectors")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_values(cls, values: Iterable) -> "PointSet":
        return cls(tuple(_as_point(v) for v in values))

    @property
    def dimension(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]

    @cached_property
    def coords(self) -> np.ndarray:
        a = np.array(self.points, dtype=float)
        a.setflags(write=False)
        return a

    @cached_property
    def index(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.points)}


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Nonnegative weights on the points of a :class:`PointSet`."""

    support: PointSet
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != len(self.support):
            raise DimensionMismatch(
                f"{w.shape[0]} weights for a support of {len(self.support)} points"
            )
        if not np.all(np.isfinite(w)):
            raise InputError("weights must be finite")
        if np.any(w < 0):
            raise InputError("weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def on_values(cls, values: Iterable, weights: Sequence[float]) -> "AtomicMeasure":
        return cls(PointSet.from_values(values), np.asarray(weights, dtype=float))

    @cached_property
    def total_mass(self) -> float:
        return float(sum(self.weights.tolist()))

    def __len__(self) -> int:
        return len(self.support)

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        a, b = align(self, other)
        return AtomicMeasure(a.support, a.weights + b.weights)

    def scaled(self, factor: float) -> "AtomicMeasure":
        return AtomicMeasure(self.support, self.weights * factor)

    def mass(self, mask) -> float:
        return float(self.weights[np.asarray(mask)].sum())

    def restrict(self, mask) -> "AtomicMeasure":
        """Zero the weights outside ``mask`` (support unchanged)."""
        w = np.where(np.asarray(mask, dtype=bool), self.weights, 0.0)
        return AtomicMeasure(self.support, w)

    def __repr__(self) -> str:
        return f"AtomicMeasure(n={len(self)}, mass={self.total_mass:.6g})"


def normalize(m: AtomicMeasure) -> AtomicMeasure:
    if m.total_mass <= 0:
        raise ZeroMass("cannot normalize a measure of zero mass")
    return AtomicMeasure(m.support, m.weights / m.total_mass)


def align(m1: AtomicMeasure, m2: AtomicMeasure) -> tuple[AtomicMeasure, AtomicMeasure]:
    """Re-express both measures on the union of their supports.

    Points of ``m1`` come first, followed by the points of ``m2`` not already
    present; missing weights are zero.
    """
    if m1.support == m2.support:
        return m1, m2
    if m1.support.dimension != m2.support.dimension:
        raise DimensionMismatch("measures live in spaces of different dimension")
    idx = dict(m1.support.index)
    pts = list(m1.support.points)
    for p in m2.support.points:
        if p not in idx:
            idx[p] = len(pts)
            pts.append(p)
    union = PointSet(tuple(pts))
    w1 = np.zeros(len(pts))
    w1[: len(m1)] = m1.weights
    w2 = np.zeros(len(pts))
    for p, w in zip(m2.support.points, m2.weights):
        w2[idx[p]] += w
    return AtomicMeasure(union, w1), AtomicMeasure(union, w2)


def check_pair(m1: AtomicMeasure, m2: AtomicMeasure, tol: float = MASS_TOL) -> None:
    """Raise unless the measures share a support and have equal mass."""
    if m1.support != m2.support:
        raise SupportMismatch("measures must share the same point set")
    if abs(m1.total_mass - m2.total_mass) > tol * max(1.0, m1.total_mass):
        raise MassMismatch(
            f"total masses differ: {m1.total_mass!r} vs {m2.total_mass!r}"
        )


def tv_distance(m1: AtomicMeasure, m2: AtomicMeasure) -> float:
    """Total variation distance, half the l1 distance between weight vectors."""
    check_pair(m1, m2)
    return 0.5 * float(np.abs(m1.weights - m2.weights).sum())


def tv_by_enumeration(m1: AtomicMeasure, m2: AtomicMeasure) -> float:
    """sup_A |m1(A) - m2(A)| over all subsets A of the support (n <= 20)."""
    check_pair(m1, m2)
    n = len(m1)
    if n > 20:
        raise InputError("enumeration limited to 20 support points")
    diff = m1.weights - m2.weights
    best = 0.0
    for r in range(n + 1):
        for subset in itertools.combinations(range(n), r):
            best = max(best, abs(float(diff[list(subset)].sum())))
    return best


def pushforward(m: AtomicMeasure, mapping: Sequence[int], target: PointSet) -> AtomicMeasure:
    """Image measure of ``m`` under an index map into ``target``."""
    if len(mapping) != len(m):
        raise InvalidTargetIndex("map must be defined on every support index")
    w = [0.0] * len(target)
    for i, j in enumerate(mapping):
        j = int(j)
        if not 0 <= j < len(target):
            raise InvalidTargetIndex(f"index {i} maps to {j}, outside target of size {len(target)}")
        w[j] += float(m.weights[i])
    return AtomicMeasure(target, np.array(w))


def project_coords(m: AtomicMeasure, coords: Sequence[int]) -> AtomicMeasure:
    """Pushforward onto a subset of coordinates, merging coinciding images."""
    coords = list(coords)
    images = [tuple(p[c] for c in coords) for p in m.support.points]
    order: dict[Point, int] = {}
    mapping = []
    for q in images:
        mapping.append(order.setdefault(q, len(order)))
    return pushforward(m, mapping, PointSet(tuple(order)))


def empirical_from_sample(points: Sequence, mass: float = 1.0) -> tuple[PointSet, AtomicMeasure]:
    """Empirical measure of a sample, each observation carrying mass/len(sample).

    Coinciding observations are merged (exact coordinate equality), first
    occurrence order preserved.
    """
    pts = [_as_point(p) for p in points]
    if not pts:
        raise EmptySample("sample is empty")
    if mass <= 0:
        raise ZeroMass("mass must be positive")
    each = mass / len(pts)
    counts: dict[Point, int] = {}
    for p in pts:
        counts[p] = counts.get(p, 0) + 1
    ps = PointSet(tuple(counts))
    return ps, AtomicMeasure(ps, np.array([c * each for c in counts.values()]))


def read_measure_csv(path) -> AtomicMeasure:
    """Read ``weight,c1,...,cr`` rows; ``#`` lines are comments."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        rows = [
            (no, row)
            for no, row in enumerate(csv.reader(fh), start=1)
            if row and not row[0].lstrip().startswith("#")
        ]
    if not rows:
        raise MalformedHeader(f"{path}: missing header")
    _, header = rows[0]
    header = [h.strip() for h in header]
    if len(header) < 2 or header[0] != "weight":
        raise MalformedHeader(f"{path}: header must be weight,c1,...,cr")
    weights, pts = [], []
    for no, row in rows[1:]:
        if len(row) != len(header):
            raise MalformedLine(no, f"expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(x) for x in row]
        except ValueError as exc:
            raise MalformedLine(no, str(exc)) from None
        weights.append(vals[0])
        pts.append(tuple(vals[1:]))
    if not pts:
        raise EmptySample(f"{path}: no support points")
    return AtomicMeasure(PointSet(tuple(pts)), np.array(weights))


def write_measure_csv(m: AtomicMeasure, path) -> None:
    r = m.support.dimension
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["weight"] + [f"c{i + 1}" for i in range(r)])
        for weight, p in zip(m.weights, m.support.points):
            w.writerow([repr(float(weight))] + [repr(x) for x in p])
