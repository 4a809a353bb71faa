"""Case-control trend statistics on 2 x m contingency tables.

Pearson chi-square, the Cochran-Armitage trend statistic and its lack-of-fit
complement, the T functional on a weighted profile, and the generalized
statistics built from a pair of class measures.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ConstantScores,
    DegenerateAlpha,
    DegenerateMargin,
    EmptyCategory,
    InputError,
    MalformedLine,
    ZeroVariance,
)
from .kr_closed import w1_auto
from .measures import AtomicMeasure, PointSet, align, normalize
from .metrics import Discrete

VAR_TOL = 1e-14
MAX_COUNT = 2**53

SCORE_PRESETS = {
    "additive": (0.0, 0.5, 1.0),
    "dominant": (0.0, 1.0, 1.0),
    "recessive": (0.0, 0.0, 1.0),
}


def parse_scores(text: str) -> tuple[float, ...]:
    if text in SCORE_PRESETS:
        return SCORE_PRESETS[text]
    body = text.split(":", 1)[1] if text.startswith("custom") else text
    try:
        return tuple(float(x) for x in body.replace(",", " ").split())
    except ValueError:
        raise InputError(f"cannot parse scores {text!r}") from None


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Case counts r_i and control counts s_i per category.

    Categories with n_i = 0 are dropped at construction; their original
    indices are kept in ``dropped``.
    """

    cases: np.ndarray
    controls: np.ndarray
    dropped: tuple[int, ...] = field(default=())
    kept: tuple[int, ...] = field(default=())

    def __post_init__(self):
        r = np.asarray(self.cases)
        s = np.asarray(self.controls)
        if r.shape != s.shape or r.ndim != 1:
            raise InputError("case and control counts must be vectors of equal length")
        if np.any(r < 0) or np.any(s < 0):
            raise InputError("counts must be nonnegative")
        if np.any(r != np.round(r)) or np.any(s != np.round(s)):
            raise InputError("counts must be integers")
        if np.any(r > MAX_COUNT) or np.any(s > MAX_COUNT):
            raise InputError("counts exceed 2**53")
        n = r + s
        keep = np.flatnonzero(n > 0)
        if len(keep) < 2:
            raise EmptyCategory("at least two categories need observations")
        object.__setattr__(self, "dropped", tuple(int(i) for i in np.flatnonzero(n == 0)))
        object.__setattr__(self, "kept", tuple(int(i) for i in keep))
        object.__setattr__(self, "cases", r[keep].astype(float))
        object.__setattr__(self, "controls", s[keep].astype(float))

    @classmethod
    def from_line(cls, line: str, line_no: int = 0) -> "ContingencyTable":
        fields = line.split()
        if len(fields) != 6:
            raise MalformedLine(line_no, "expected r0 r1 r2 s0 s1 s2")
        try:
            vals = [int(x) for x in fields]
        except ValueError:
            raise MalformedLine(line_no, "counts must be integers") from None
        return cls(np.array(vals[:3]), np.array(vals[3:]))

    @property
    def totals(self) -> np.ndarray:
        return self.cases + self.controls

    @property
    def n(self) -> float:
        return float(self.totals.sum())

    @property
    def p(self) -> float:
        return float(self.cases.sum()) / self.n

    @property
    def q(self) -> float:
        return 1.0 - self.p

    def scores(self, c: Sequence[float]) -> np.ndarray:
        """Scores restricted to the categories kept at construction."""
        c = np.asarray(c, dtype=float)
        if c.shape[0] != len(self.kept) + len(self.dropped):
            raise InputError("one score per category is required")
        return c[list(self.kept)]

    def _check_margin(self):
        if self.cases.sum() == 0 or self.controls.sum() == 0:
            raise DegenerateMargin("need both cases and controls")


def pearson_chi2(t: ContingencyTable) -> float:
    """Brandt-Snedecor form: sum n_i (p_i - p)^2 / (p q)."""
    t._check_margin()
    p_i = t.cases / t.totals
    return float((t.totals * (p_i - t.p) ** 2).sum() / (t.p * t.q))


def pearson_chi2_cells(t: ContingencyTable) -> float:
    """Observed-vs-expected form summed over the case and control rows."""
    t._check_margin()
    ec = t.totals * t.p
    es = t.totals * t.q
    return float(((t.cases - ec) ** 2 / ec).sum() + ((t.controls - es) ** 2 / es).sum())


def _scores_ok(t: ContingencyTable, c) -> np.ndarray:
    c = t.scores(c)
    w = t.totals / t.n
    if (c**2 @ w) - (c @ w) ** 2 <= VAR_TOL * max(1.0, float(np.max(c**2))):
        raise ConstantScores("scores are constant on the observed categories")
    return c


def catt(t: ContingencyTable, c: Sequence[float]) -> float:
    """Cochran-Armitage trend statistic for scores c."""
    t._check_margin()
    c = _scores_ok(t, c)
    p, q, n = t.p, t.q, t.n
    num = float(c @ (q * t.cases - p * t.controls)) ** 2
    w = t.totals / n
    den = n * p * q * (float(c**2 @ w) - float(c @ w) ** 2)
    return num / den


def _slope(t: ContingencyTable, c: np.ndarray) -> tuple[float, float]:
    cbar = float(t.totals @ c) / t.n
    p_i = t.cases / t.totals
    b = float(t.totals @ ((p_i - t.p) * (c - cbar))) / float(t.totals @ (c - cbar) ** 2)
    return b, cbar


def catt_regression(t: ContingencyTable, c: Sequence[float]) -> float:
    """Same statistic through the weighted least-squares slope b."""
    t._check_margin()
    c = _scores_ok(t, c)
    b, cbar = _slope(t, c)
    return b**2 / (t.p * t.q) * float(t.totals @ (c - cbar) ** 2)


def cochran_decompose(t: ContingencyTable, c: Sequence[float]) -> tuple[float, float]:
    """(trend, lack-of-fit) with trend + lack-of-fit = Pearson chi-square."""
    t_ca = catt(t, c)
    cs = t.scores(c)
    b, cbar = _slope(t, cs)
    fitted = t.p + b * (cs - cbar)
    p_i = t.cases / t.totals
    t_fit = float(t.totals @ (p_i - fitted) ** 2) / (t.p * t.q)
    return t_ca, t_fit


# --- T functional ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightedProfile:
    """Probability weights mu_i with a density alpha_i per point."""

    weights: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        a = np.asarray(self.alpha, dtype=float)
        if w.shape != a.shape or w.ndim != 1:
            raise InputError("weights and alpha must be vectors of equal length")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InputError("weights must be a probability vector")
        if np.any(a < 0):
            raise InputError("alpha must be nonnegative")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "alpha", a)

    @property
    def mean(self) -> float:
        return float(self.alpha @ self.weights)

    def variance(self, c) -> float:
        c = np.asarray(c, dtype=float)
        return float(c**2 @ self.weights) - float(c @ self.weights) ** 2

    def permuted(self, perm) -> "WeightedProfile":
        perm = list(perm)
        return WeightedProfile(self.weights[perm], self.alpha[perm])


def t_functional(c: Sequence[float], prof: WeightedProfile) -> float:
    """(int c (alpha - m) dmu)^2 / Var_mu(c)."""
    c = np.asarray(c, dtype=float)
    var = prof.variance(c)
    if var <= VAR_TOL:
        raise ZeroVariance("scores are constant mu-almost everywhere")
    num = float(c @ ((prof.alpha - prof.mean) * prof.weights))
    return num**2 / var


def t_sup(prof: WeightedProfile) -> float:
    """Supremum of T over all scores, attained at c = alpha; 0 for constant alpha."""
    return float(((prof.alpha - prof.mean) ** 2) @ prof.weights)


def t_residual(c: Sequence[float], prof: WeightedProfile) -> float:
    """Weighted residual of regressing alpha - m on c; t_sup = T(c) + residual."""
    c = np.asarray(c, dtype=float)
    cm = float(c @ prof.weights)
    b = float(((prof.alpha - prof.mean) * (c - cm)) @ prof.weights) / prof.variance(c)
    return float(((prof.alpha - prof.mean - b * (c - cm)) ** 2) @ prof.weights)


def optimal_score_3pt(prof: WeightedProfile) -> float:
    """Middle score x* of the maximizing scores (0, x*, 1) on three points.

    Points are taken in increasing alpha order.
    """
    if len(prof.alpha) != 3:
        raise InputError("three-point profile required")
    if np.any(prof.weights <= 0):
        raise InputError("all three points need positive weight")
    a0, a1, a2 = np.sort(prof.alpha)
    if a2 == a0:
        raise DegenerateAlpha("alpha is constant")
    return float((a1 - a0) / (a2 - a0))


def two_point_t(prof: WeightedProfile) -> float:
    """(alpha_1 - alpha_0)^2 mu_0 mu_1 for a two-point profile."""
    if len(prof.alpha) != 2:
        raise InputError("two-point profile required")
    return float((prof.alpha[1] - prof.alpha[0]) ** 2 * prof.weights[0] * prof.weights[1])


def middle_score_limit(prof: WeightedProfile) -> float:
    """Three-point profile: limit of T((0, x, 1)) as |x| grows: (alpha_1 - p)^2 mu_1 / (1 - mu_1)."""
    m1 = prof.weights[1]
    return float((prof.alpha[1] - prof.mean) ** 2 * m1 / (1.0 - m1))


# --- generalized statistics ------------------------------------------------------------


@dataclass(frozen=True)
class ClassProfile:
    n: float
    p_r: float
    p_s: float
    profile: WeightedProfile
    keep: np.ndarray


def class_profile(mu_r: AtomicMeasure, mu_s: AtomicMeasure) -> ClassProfile:
    """Normalize raw class measures by the total mass n and form alpha_r = dmu_r/dmu."""
    mu_r, mu_s = align(mu_r, mu_s)
    n = mu_r.total_mass + mu_s.total_mass
    if n <= 0:
        raise DegenerateMargin("both class measures are zero")
    r = mu_r.weights / n
    s = mu_s.weights / n
    mu = r + s
    keep = mu > 0
    alpha = r[keep] / mu[keep]
    p_r, p_s = float(r.sum()), float(s.sum())
    if not (0 < p_r < 1):
        raise DegenerateMargin("need both classes present")
    w = mu[keep] / mu[keep].sum()
    return ClassProfile(n, p_r, p_s, WeightedProfile(w, alpha), keep)


def generalized_stats(
    mu_r: AtomicMeasure, mu_s: AtomicMeasure, c: Sequence[float]
) -> tuple[float, float]:
    """(generalized Cochran-Armitage, generalized Pearson) statistics."""
    cp = class_profile(mu_r, mu_s)
    c_all = np.asarray(c, dtype=float)
    a, _ = align(mu_r, mu_s)
    if c_all.shape[0] != len(a):
        raise InputError("one score per support point is required")
    scale = cp.n / (cp.p_r * cp.p_s)
    return scale * t_functional(c_all[cp.keep], cp.profile), scale * t_sup(cp.profile)


def table_measures(t: ContingencyTable) -> tuple[AtomicMeasure, AtomicMeasure]:
    """Raw case and control count measures on the kept category labels."""
    ps = PointSet.from_values([float(i) for i in t.kept])
    return AtomicMeasure(ps, t.cases), AtomicMeasure(ps, t.controls)


@dataclass(frozen=True)
class ChiBounds:
    lower: float
    stat: float
    upper: float
    w1_reference: float


def kr_chi2_bounds(mu_r: AtomicMeasure, mu_s: AtomicMeasure, k: float = 1.0) -> ChiBounds:
    """Sandwich of the generalized Pearson statistic by l1/l-inf norms of alpha_r - p_r.

    ``w1_reference`` is the exact W1 between the normalized class measures
    under the k-discrete metric (for reporting only).
    """
    cp = class_profile(mu_r, mu_s)
    g = cp.profile.alpha - cp.p_r
    w = cp.profile.weights
    scale = cp.n / (cp.p_r * cp.p_s)
    l1 = float(np.abs(g) @ w)
    l2sq = float(g**2 @ w)
    linf = float(np.abs(g).max())
    ref = w1_auto(normalize(mu_r), normalize(mu_s), Discrete(k))
    return ChiBounds(scale * l1**2, scale * l2sq, scale * linf * l1, ref)


def read_tables(path) -> list[ContingencyTable]:
    tables = []
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            tables.append(ContingencyTable.from_line(line, no))
    return tables


def warn_dropped(t: ContingencyTable) -> None:
    if t.dropped:
        warnings.warn(f"dropped empty categories {t.dropped}", stacklevel=2)
