"""Exact W1 by min-cost flow on the bipartite transportation network.

Successive shortest paths: Dijkstra on reduced costs kept nonnegative by
node potentials. The final potentials give a feasible dual pair; its
c-transform is a 1-Lipschitz Kantorovich potential on the whole support.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import Degenerate, InputError, MassMismatch, NonFiniteCost, SolverFailure, SupportMismatch
from .measures import AtomicMeasure, align
from .metrics import MetricDescriptor, cost_matrix

MAX_SUPPORT = 4096
MASS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TransportSolution:
    cost: float
    plan: list[tuple[int, int, float]]
    potential: np.ndarray
    iterations: int

    def plan_matrix(self, n: int) -> np.ndarray:
        out = np.zeros((n, n))
        for i, j, w in self.plan:
            out[i, j] += w
        return out


@dataclass
class Certificate:
    ok: bool
    max_violation: float
    marginal_violation: float
    lipschitz_violation: float
    slackness_violation: float
    duality_gap: float
    details: dict = field(default_factory=dict)


@njit(cache=True)
def _ssp(C, supply, demand, tol):
    ns, nt = C.shape
    flow = np.zeros((ns, nt))
    ps = np.zeros(ns)
    pt = np.zeros(nt)
    sup = supply.copy()
    dem = demand.copy()
    dist_s = np.empty(ns)
    dist_t = np.empty(nt)
    done_s = np.zeros(ns, np.bool_)
    done_t = np.zeros(nt, np.bool_)
    pred_s = np.empty(ns, np.int64)
    pred_t = np.empty(nt, np.int64)
    iterations = 0
    max_iter = 50 * (ns + nt) * (ns + nt) + 100
    while True:
        remaining = 0.0
        for i in range(ns):
            remaining += sup[i]
        if remaining <= tol:
            return flow, ps, pt, iterations, True
        if iterations >= max_iter:
            return flow, ps, pt, iterations, False
        iterations += 1
        for i in range(ns):
            dist_s[i] = 0.0 if sup[i] > tol else np.inf
            done_s[i] = False
            pred_s[i] = -1
        for j in range(nt):
            dist_t[j] = np.inf
            done_t[j] = False
            pred_t[j] = -1
        target = -1
        while True:
            best = np.inf
            node = -1
            is_sink = False
            for i in range(ns):
                if not done_s[i] and dist_s[i] < best:
                    best = dist_s[i]
                    node = i
                    is_sink = False
            for j in range(nt):
                if not done_t[j] and dist_t[j] < best:
                    best = dist_t[j]
                    node = j
                    is_sink = True
            if node < 0:
                break
            if is_sink:
                j = node
                done_t[j] = True
                if dem[j] > tol:
                    target = j
                    break
                for i in range(ns):
                    if flow[i, j] > tol and not done_s[i]:
                        r = pt[j] - C[i, j] - ps[i]
                        if r < 0.0:
                            r = 0.0
                        nd = dist_t[j] + r
                        if nd < dist_s[i]:
                            dist_s[i] = nd
                            pred_s[i] = j
            else:
                i = node
                done_s[i] = True
                for j in range(nt):
                    if not done_t[j]:
                        r = C[i, j] + ps[i] - pt[j]
                        if r < 0.0:
                            r = 0.0
                        nd = dist_s[i] + r
                        if nd < dist_t[j]:
                            dist_t[j] = nd
                            pred_t[j] = i
        if target < 0:
            return flow, ps, pt, iterations, False
        D = dist_t[target]
        for i in range(ns):
            ps[i] += dist_s[i] if dist_s[i] < D else D
        for j in range(nt):
            pt[j] += dist_t[j] if dist_t[j] < D else D
        # bottleneck along the augmenting path
        amount = dem[target]
        j = target
        while True:
            i = pred_t[j]
            jb = pred_s[i]
            if jb < 0:
                if sup[i] < amount:
                    amount = sup[i]
                break
            if flow[i, jb] < amount:
                amount = flow[i, jb]
            j = jb
        j = target
        while True:
            i = pred_t[j]
            flow[i, j] += amount
            jb = pred_s[i]
            if jb < 0:
                sup[i] -= amount
                if sup[i] <= tol:
                    sup[i] = 0.0
                break
            flow[i, jb] -= amount
            if flow[i, jb] <= tol:
                flow[i, jb] = 0.0
            j = jb
        dem[target] -= amount
        if dem[target] <= tol:
            dem[target] = 0.0


def _validate_cost(cost: np.ndarray, n: int) -> np.ndarray:
    cost = np.asarray(cost, dtype=float)
    if cost.shape != (n, n):
        raise InputError(f"cost matrix must be {n}x{n}, got {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise NonFiniteCost("cost matrix has non-finite entries")
    return cost


def solve_transport(m1: AtomicMeasure, m2: AtomicMeasure, cost) -> TransportSolution:
    """Optimal coupling, cost and Kantorovich potential for equal-mass measures.

    ``cost`` must be the metric cost matrix on the common support. Mass
    present in both measures at the same point stays in place; only the
    net excess/deficit enters the flow network.
    """
    if m1.support != m2.support:
        raise SupportMismatch("solve_transport needs a shared support; use w1_exact or align()")
    n = len(m1)
    if n > MAX_SUPPORT:
        raise InputError(f"support size {n} exceeds {MAX_SUPPORT}")
    cost = _validate_cost(cost, n)
    a, b = m1.weights, m2.weights
    total = max(m1.total_mass, m2.total_mass)
    if total <= 0:
        raise Degenerate("both measures are zero")
    if abs(m1.total_mass - m2.total_mass) > MASS_TOL * max(1.0, total):
        raise MassMismatch(f"total masses differ: {m1.total_mass!r} vs {m2.total_mass!r}")

    tol = 1e-12 * total
    common = np.minimum(a, b)
    excess = a - common
    deficit = b - common
    src = np.flatnonzero(excess > tol)
    snk = np.flatnonzero(deficit > tol)
    plan: list[tuple[int, int, float]] = [(int(i), int(i), float(common[i])) for i in np.flatnonzero(common > 0)]

    if len(src) == 0 or len(snk) == 0:
        return TransportSolution(0.0, plan, np.zeros(n), 0)

    C = np.ascontiguousarray(cost[np.ix_(src, snk)])
    supply = excess[src].copy()
    demand = deficit[snk].copy()
    # rebalance the few-ulp mismatch so the network is exactly balanced
    gap = supply.sum() - demand.sum()
    if gap > 0:
        demand[np.argmax(demand)] += gap
    else:
        supply[np.argmax(supply)] -= gap
    flow, ps, pt, iterations, ok = _ssp(C, supply, demand, tol)
    if not ok:
        raise SolverFailure("successive shortest paths did not converge")

    for (ii, jj) in zip(*np.nonzero(flow > 0)):
        plan.append((int(src[ii]), int(snk[jj]), float(flow[ii, jj])))
    plan.sort()
    merged: list[tuple[int, int, float]] = []
    for i, j, w in plan:
        if merged and merged[-1][0] == i and merged[-1][1] == j:
            merged[-1] = (i, j, merged[-1][2] + w)
        else:
            merged.append((i, j, w))

    # c-transform of the sink duals: f(x) = min_j c(x, y_j) - pt_j
    f = np.min(cost[:, snk] - pt[None, :], axis=1)
    f = f - f.min()
    primal = float(sum(cost[i, j] * w for i, j, w in merged))
    return TransportSolution(primal, merged, f, int(iterations))


def w1_exact(m1: AtomicMeasure, m2: AtomicMeasure, metric: MetricDescriptor) -> TransportSolution:
    """Solve on the union support with the metric's cost matrix."""
    a, b = align(m1, m2)
    return solve_transport(a, b, cost_matrix(metric, a.support))


def verify_optimality(
    sol: TransportSolution,
    cost,
    m1: AtomicMeasure,
    m2: AtomicMeasure,
    tol_marginal: float = 1e-9,
    tol_lipschitz: float = 1e-9,
    tol_slack: float = 1e-7,
) -> Certificate:
    """Check primal feasibility, 1-Lipschitz potential and complementary slackness."""
    cost = np.asarray(cost, dtype=float)
    n = len(m1)
    f = np.asarray(sol.potential, dtype=float)
    P = np.zeros((n, n))
    bad_index = False
    for i, j, w in sol.plan:
        if not (0 <= i < n and 0 <= j < n) or w < 0:
            bad_index = True
            continue
        P[i, j] += w
    marg = max(
        float(np.abs(P.sum(axis=1) - m1.weights).max()),
        float(np.abs(P.sum(axis=0) - m2.weights).max()),
    )
    lip = float(np.max(np.abs(f[:, None] - f[None, :]) - cost)) if n else 0.0
    lip = max(lip, 0.0)
    slack = 0.0
    for i, j, w in sol.plan:
        if w > 1e-12 and 0 <= i < n and 0 <= j < n:
            slack = max(slack, abs((f[i] - f[j]) - cost[i, j]))
    primal = float((P * cost).sum())
    dual = float(f @ (m1.weights - m2.weights))
    gap = abs(primal - dual)
    ok = (
        not bad_index
        and marg <= tol_marginal
        and lip <= tol_lipschitz
        and slack <= tol_slack
        and abs(primal - sol.cost) <= 1e-7 * max(1.0, primal)
    )
    return Certificate(
        ok=bool(ok),
        max_violation=max(marg, lip, slack),
        marginal_violation=marg,
        lipschitz_violation=lip,
        slackness_violation=slack,
        duality_gap=gap,
        details={"primal": primal, "dual": dual, "bad_index": bad_index},
    )
