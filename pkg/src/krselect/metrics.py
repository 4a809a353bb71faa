"""Ground-metric descriptors and cost-matrix materialization.

Atomic descriptors act on a single coordinate (``Discrete`` also accepts
whole vectors and compares them for equality). ``Product`` combines one
atomic descriptor per coordinate with an l1 sum or an l-infinity max.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, EmptySubset, IndexOutOfRange, InvalidMetric
from .measures import PointSet

METRIC_TOL = 1e-9
MAX_EXPLICIT = 512


@dataclass(frozen=True)
class Discrete:
    k: float = 1.0

    def __post_init__(self):
        if not self.k > 0:
            raise InvalidMetric("discrete metric needs k > 0")


@dataclass(frozen=True)
class Line:
    pass


@dataclass(frozen=True)
class Circle:
    circumference: float = 1.0

    def __post_init__(self):
        if not self.circumference > 0:
            raise InvalidMetric("circle circumference must be positive")

    def canonical(self, s):
        return np.mod(s, self.circumference)


@dataclass(frozen=True)
class Explicit:
    """Metric given by a full distance matrix; coordinates are row indices."""

    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidMetric("explicit metric must be a non-empty square matrix")
        n = m.shape[0]
        if n > MAX_EXPLICIT:
            raise InvalidMetric(f"explicit metric limited to {MAX_EXPLICIT} points")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise InvalidMetric("explicit metric entries must be finite and nonnegative")
        if np.any(np.abs(np.diag(m)) > METRIC_TOL):
            raise InvalidMetric("explicit metric must have a zero diagonal")
        if np.any(np.abs(m - m.T) > METRIC_TOL):
            raise InvalidMetric("explicit metric must be symmetric")
        for k in range(n):
            if np.any(m > m[:, k, None] + m[None, k, :] + METRIC_TOL):
                raise InvalidMetric("explicit metric violates the triangle inequality")
        object.__setattr__(self, "matrix", tuple(tuple(float(x) for x in row) for row in m))

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.matrix, dtype=float)
        a.setflags(write=False)
        return a

    def indices(self, values) -> np.ndarray:
        v = np.asarray(values, dtype=float)
        idx = v.astype(int)
        if np.any(idx != v) or np.any(idx < 0) or np.any(idx >= len(self.matrix)):
            raise DimensionMismatch("explicit-metric coordinates must be valid row indices")
        return idx


Atom = Union[Discrete, Line, Circle, Explicit]


@dataclass(frozen=True)
class Product:
    coords: tuple[Atom, ...]
    combine: str = "l1"

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise InvalidMetric("product metric needs at least one coordinate")
        if any(not isinstance(c, (Discrete, Line, Circle, Explicit)) for c in coords):
            raise InvalidMetric("product coordinates must be atomic descriptors")
        if self.combine not in ("l1", "linf"):
            raise InvalidMetric(f"unknown combine rule {self.combine!r}")
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.coords)


MetricDescriptor = Union[Discrete, Line, Circle, Explicit, Product]


def dimension(d: MetricDescriptor) -> int | None:
    """Number of coordinates the descriptor expects (None: any)."""
    if isinstance(d, Product):
        return len(d.coords)
    if isinstance(d, Discrete):
        return None
    return 1


def _check_dim(d: MetricDescriptor, r: int) -> None:
    want = dimension(d)
    if want is not None and want != r:
        raise DimensionMismatch(f"metric expects {want} coordinates, points have {r}")


def _atom_cost(a: Atom, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pairwise cost between 1-d coordinate arrays x (n,) and y (m,)."""
    if isinstance(a, Discrete):
        return a.k * (x[:, None] != y[None, :])
    if isinstance(a, Line):
        return np.abs(x[:, None] - y[None, :])
    if isinstance(a, Circle):
        c = a.circumference
        diff = np.abs(a.canonical(x)[:, None] - a.canonical(y)[None, :])
        return np.minimum(diff, c - diff)
    if isinstance(a, Explicit):
        return a.array[np.ix_(a.indices(x), a.indices(y))]
    raise InvalidMetric(f"not an atomic descriptor: {a!r}")


def _cost(d: MetricDescriptor, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch("point sets have different dimensions")
    _check_dim(d, X.shape[1])
    if isinstance(d, Product):
        per = [_atom_cost(a, X[:, i], Y[:, i]) for i, a in enumerate(d.coords)]
        out = per[0].astype(float)
        for c in per[1:]:
            out = out + c if d.combine == "l1" else np.maximum(out, c)
        return out
    if isinstance(d, Discrete):
        neq = np.any(X[:, None, :] != Y[None, :, :], axis=2)
        return d.k * neq.astype(float)
    return _atom_cost(d, X[:, 0], Y[:, 0]).astype(float)


def distance(d: MetricDescriptor, p, q) -> float:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if p.shape != q.shape:
        raise DimensionMismatch("points have different dimensions")
    return float(_cost(d, p[None, :], q[None, :])[0, 0])


def cost_matrix(d: MetricDescriptor, ps1: PointSet, ps2: PointSet | None = None) -> np.ndarray:
    ps2 = ps1 if ps2 is None else ps2
    return _cost(d, ps1.coords, ps2.coords)


def diameter(d: MetricDescriptor, ps: PointSet) -> float:
    return float(cost_matrix(d, ps).max())


def project(d: Product, subset: Sequence[int]) -> Product:
    """Restrict a product metric to the coordinates in ``subset`` (kept in order)."""
    if not isinstance(d, Product):
        raise InvalidMetric("only product metrics can be projected")
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        raise EmptySubset("projection needs at least one coordinate")
    if subset[0] < 0 or subset[-1] >= len(d.coords):
        raise IndexOutOfRange(f"coordinate index out of range 0..{len(d.coords) - 1}")
    return Product(tuple(d.coords[i] for i in subset), d.combine)


def single_coordinate(d: MetricDescriptor) -> Atom | None:
    """The atom of a one-coordinate space, or None for genuine products."""
    if isinstance(d, Product):
        return d.coords[0] if len(d.coords) == 1 else None
    return d


# --- JSON configuration --------------------------------------------------------------


def atom_from_dict(spec: dict) -> Atom:
    kind = spec.get("type")
    if kind == "discrete":
        return Discrete(float(spec.get("k", 1.0)))
    if kind == "line":
        return Line()
    if kind == "circle":
        return Circle(float(spec.get("circumference", 1.0)))
    if kind == "explicit":
        return Explicit(tuple(tuple(row) for row in spec["matrix"]))
    raise InvalidMetric(f"unknown coordinate type {kind!r}")


def metric_from_dict(spec: dict) -> Product:
    try:
        coords = [atom_from_dict(c) for c in spec["coords"]]
    except (KeyError, TypeError) as exc:
        raise InvalidMetric(f"malformed metric config: {exc}") from None
    if any(isinstance(c, Explicit) for c in coords) and len(coords) > 1:
        raise InvalidMetric("an explicit matrix is only allowed as the sole coordinate")
    return Product(tuple(coords), spec.get("combine", "l1"))


def load_metric(path) -> Product:
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidMetric(f"{path}: {exc}") from None
    return metric_from_dict(spec)


def atom_to_dict(a: Atom) -> dict:
    if isinstance(a, Discrete):
        return {"type": "discrete", "k": a.k}
    if isinstance(a, Line):
        return {"type": "line"}
    if isinstance(a, Circle):
        return {"type": "circle", "circumference": a.circumference}
    return {"type": "explicit", "matrix": [list(r) for r in a.matrix]}


def metric_to_dict(d: MetricDescriptor) -> dict:
    if isinstance(d, Product):
        return {"coords": [atom_to_dict(a) for a in d.coords], "combine": d.combine}
    return {"coords": [atom_to_dict(d)], "combine": "l1"}
