"""Randomized cross-checks of the closed forms against the exact solver.

Used by ``krselect verify`` and the experiment scripts.
"""

from __future__ import annotations

import numpy as np

from .kr_closed import w1_circle, w1_discrete, w1_line, w1_product_additive
from .kr_exact import solve_transport, verify_optimality, w1_exact
from .measures import align
from .metrics import Circle, Discrete, Line, Product, cost_matrix
from .synth import random_pair, random_product_pair


def _lp(m1, m2, d) -> float:
    return w1_exact(m1, m2, d).cost


def run_selfcheck(instances: int = 50, seed: int = 0, tol: float = 1e-9) -> dict:
    rng = np.random.default_rng(seed)
    errs = {"line": 0.0, "discrete": 0.0, "circle": 0.0, "product": 0.0, "certificate": 0.0}
    for _ in range(instances):
        n = int(rng.integers(2, 25))
        m1, m2 = random_pair(rng, n)
        W = _lp(m1, m2, Line())
        errs["line"] = max(errs["line"], abs(w1_line(m1, m2) - W) / max(1.0, W))
        k = float(rng.choice([1.0, 2.5]))
        W = _lp(m1, m2, Discrete(k))
        errs["discrete"] = max(errs["discrete"], abs(w1_discrete(m1, m2, k) - W) / max(1.0, W))
        C = float(rng.choice([1.0, 2 * np.pi]))
        c1, c2 = random_pair(rng, n, values=np.unique(np.round(rng.uniform(0, C, n), 6)))
        W = _lp(c1, c2, Circle(C))
        errs["circle"] = max(errs["circle"], abs(w1_circle(c1, c2, C) - W) / max(1.0, W))
        a, b = align(m1, m2)
        cost = cost_matrix(Line(), a.support)
        cert = verify_optimality(solve_transport(a, b, cost), cost, a, b)
        errs["certificate"] = max(errs["certificate"], cert.max_violation, cert.duality_gap)
        r = int(rng.integers(2, 4))
        atoms = [Line(), Discrete(1.0), Circle(1.0)][:r]
        p1, p2, pairs = random_product_pair(rng, r, atoms)
        W = _lp(p1, p2, Product(tuple(atoms), "l1"))
        errs["product"] = max(errs["product"], abs(w1_product_additive(pairs) - W) / max(1.0, W))
    bound = max(tol, 1e-8)
    checks = {
        k: {"max_error": v, "ok": bool(v <= (1e-7 if k == "certificate" else bound))} for k, v in errs.items()
    }
    return {"instances": instances, "seed": seed, "checks": checks, "ok": all(c["ok"] for c in checks.values())}
