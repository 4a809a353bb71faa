"""Feature-subset search maximizing the W1 separation criterion J.

J(A) is W1 between the half-mass class measures projected onto the
coordinates in A, under the l1 product of the per-coordinate metrics.
It is monotone under inclusion, which makes Branch & Bound exact.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySubset, IndexOutOfRange, InputError, SingleClass, TooLarge
from .kr_closed import w1_auto
from .measures import align, empirical_from_sample
from .metrics import Atom, Product

MAX_EXHAUSTIVE = 10**6
MODES = ("empirical", "product")
STRATEGIES = ("bb", "forward", "backward", "exhaustive")


def default_threads() -> int:
    try:
        return max(0, int(os.environ.get("KRSELECT_THREADS", "0") or 0))
    except ValueError:
        return 0


@dataclass(frozen=True, eq=False)
class SelectionProblem:
    """Labeled sample in an r-coordinate product space.

    Missing coordinates are NaN; rows missing any coordinate of the subset
    under evaluation are dropped for that evaluation only.
    """

    points: np.ndarray
    labels: np.ndarray
    coords: tuple[Atom, ...]
    k_target: int
    mode: str = "empirical"

    def __post_init__(self):
        X = np.asarray(self.points, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.labels).astype(int)
        if X.shape[0] != y.shape[0]:
            raise InputError("one label per sample point is required")
        if not set(np.unique(y)) <= {-1, 1}:
            raise InputError("labels must be -1 or +1")
        if not ((y == 1).any() and (y == -1).any()):
            raise SingleClass("both labels must be present")
        r = X.shape[1]
        if len(self.coords) != r:
            raise InputError(f"{len(self.coords)} coordinate metrics for {r} coordinates")
        if r > 64:
            raise InputError("at most 64 coordinates are supported")
        if not 1 <= int(self.k_target) <= r:
            raise InputError(f"k_target must lie in 1..{r}")
        if self.mode not in MODES:
            raise InputError(f"unknown criterion mode {self.mode!r}")
        object.__setattr__(self, "points", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "k_target", int(self.k_target))

    @property
    def r(self) -> int:
        return self.points.shape[1]

    def with_k(self, k: int) -> "SelectionProblem":
        return SelectionProblem(self.points, self.labels, self.coords, k, self.mode)


def _mask(subset: Iterable[int]) -> int:
    m = 0
    for i in subset:
        m |= 1 << i
    return m


def criterion_j(problem: SelectionProblem, subset: Sequence[int]) -> float:
    """W1 of the projected half-mass class measures (uncached)."""
    A = sorted(set(int(i) for i in subset))
    if not A:
        raise EmptySubset("criterion needs at least one coordinate")
    if A[0] < 0 or A[-1] >= problem.r:
        raise IndexOutOfRange("coordinate index out of range")
    X = problem.points[:, A]
    ok = ~np.isnan(X).any(axis=1)
    y = problem.labels[ok]
    X = X[ok]
    pos, neg = X[y == 1], X[y == -1]
    if len(pos) == 0 or len(neg) == 0:
        raise SingleClass(f"a class has no complete rows on coordinates {A}")
    _, mp = empirical_from_sample(pos, 0.5)
    _, mn = empirical_from_sample(neg, 0.5)
    mp, mn = align(mp, mn)
    metric = Product(tuple(problem.coords[i] for i in A), "l1")
    return w1_auto(mp, mn, metric, product_measures=problem.mode == "product")


class Criterion:
    """Memoized J keyed by subset bitmask; repeated queries are bit-identical."""

    def __init__(self, problem: SelectionProblem):
        self.problem = problem
        self._cache: dict[int, float] = {}
        self.computed = 0

    def __call__(self, subset: Iterable[int]) -> float:
        subset = tuple(subset)
        key = _mask(subset)
        val = self._cache.get(key)
        if val is None:
            val = criterion_j(self.problem, subset)
            self._cache[key] = val
            self.computed += 1
        return val

    def many(self, subsets: Sequence[Sequence[int]], threads: int = 0) -> list[float]:
        if threads and len(subsets) > 1:
            todo = [s for s in subsets if _mask(s) not in self._cache]
            with ThreadPoolExecutor(max_workers=threads) as ex:
                vals = list(ex.map(lambda s: criterion_j(self.problem, s), todo))
            for s, v in zip(todo, vals):
                if _mask(s) not in self._cache:
                    self._cache[_mask(s)] = v
                    self.computed += 1
        return [self(s) for s in subsets]


@dataclass(frozen=True)
class SelectionResult:
    subset: tuple[int, ...]
    j_value: float
    nodes_evaluated: int
    nodes_pruned: int
    strategy: str


def branch_and_bound(
    problem: SelectionProblem, criterion: Criterion | None = None, threads: int | None = None
) -> SelectionResult:
    """Exact maximization of J over subsets of size k_target.

    The tree starts from the full set; each level removes one coordinate,
    always with an index larger than the previously removed one, so every
    subset appears once. A child whose J does not beat the incumbent is
    discarded together with its subtree (J can only decrease below it).
    Chains with a single continuation are jumped straight to their leaf.
    """
    J = criterion or Criterion(problem)
    threads = default_threads() if threads is None else threads
    r, k = problem.r, problem.k_target
    removals = r - k
    full = tuple(range(r))
    evaluated = 0
    pruned = 0
    best_val = -math.inf
    best_subset: tuple[int, ...] | None = None

    def kept(removed: tuple[int, ...]) -> tuple[int, ...]:
        rs = set(removed)
        return tuple(i for i in full if i not in rs)

    def offer_leaf(subset: tuple[int, ...], val: float) -> None:
        nonlocal best_val, best_subset
        if val > best_val or (val == best_val and subset < best_subset):
            best_val, best_subset = val, subset

    if removals == 0:
        val = J(full)
        return SelectionResult(full, val, 1, 0, "bb")

    def expand(removed: tuple[int, ...], last: int) -> None:
        nonlocal evaluated, pruned
        d = len(removed)
        need = removals - d
        children = []
        for j in range(last + 1, k + d + 1):
            child = removed + (j,)
            if need - 1 > 0 and r - 1 - j == need - 1:
                # single continuation: remove every remaining higher index
                child = removed + tuple(range(j, r))
            children.append((j, child))
        subsets = [kept(c) for _, c in children]
        vals = J.many(subsets, threads)
        evaluated += len(children)
        order = sorted(range(len(children)), key=lambda i: (-vals[i], children[i][0]))
        for i in order:
            j, child = children[i]
            val = vals[i]
            is_leaf = len(child) == removals
            if is_leaf:
                if val >= best_val:
                    offer_leaf(subsets[i], val)
                else:
                    pruned += 1
                continue
            if val <= best_val:
                pruned += 1
                continue
            expand(child, j)

    expand((), -1)
    assert best_subset is not None
    return SelectionResult(best_subset, best_val, evaluated, pruned, "bb")


def sequential_search(
    problem: SelectionProblem, direction: str = "forward", criterion: Criterion | None = None
) -> SelectionResult:
    """Greedy forward addition or backward elimination."""
    J = criterion or Criterion(problem)
    r, k = problem.r, problem.k_target
    evaluated = 0
    if direction == "forward":
        S: list[int] = []
        while len(S) < k:
            best = None
            for j in range(r):
                if j in S:
                    continue
                val = J(sorted(S + [j]))
                evaluated += 1
                if best is None or val > best[0]:
                    best = (val, j)
            S.append(best[1])
        subset = tuple(sorted(S))
    elif direction == "backward":
        S = list(range(r))
        while len(S) > k:
            best = None
            for j in S:
                val = J([i for i in S if i != j])
                evaluated += 1
                if best is None or val > best[0]:
                    best = (val, j)
            S.remove(best[1])
        subset = tuple(S)
    else:
        raise InputError(f"unknown direction {direction!r}")
    return SelectionResult(subset, J(subset), evaluated, 0, direction)


def exhaustive_search(problem: SelectionProblem, criterion: Criterion | None = None) -> SelectionResult:
    """Evaluate every size-k subset; ties resolved to the lexicographically first."""
    r, k = problem.r, problem.k_target
    if math.comb(r, k) > MAX_EXHAUSTIVE:
        raise TooLarge(f"C({r}, {k}) = {math.comb(r, k)} subsets exceeds {MAX_EXHAUSTIVE}")
    J = criterion or Criterion(problem)
    best_val, best_subset, count = -math.inf, None, 0
    for subset in combinations(range(r), k):
        val = J(subset)
        count += 1
        if val > best_val:
            best_val, best_subset = val, subset
    return SelectionResult(best_subset, best_val, count, 0, "exhaustive")


def run_strategy(problem: SelectionProblem, strategy: str, criterion: Criterion | None = None) -> SelectionResult:
    if strategy == "bb":
        return branch_and_bound(problem, criterion)
    if strategy in ("forward", "backward"):
        return sequential_search(problem, strategy, criterion)
    if strategy == "exhaustive":
        return exhaustive_search(problem, criterion)
    raise InputError(f"unknown strategy {strategy!r}")
