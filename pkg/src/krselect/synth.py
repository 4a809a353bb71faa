"""Random instance generators for tests, self-checks and experiment scripts."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .measures import AtomicMeasure, PointSet
from .metrics import Circle


def random_pair(rng: np.random.Generator, n: int, values=None, mass: float = 1.0):
    """Two random measures of equal mass on a shared scalar support of size n."""
    if values is None:
        values = np.unique(np.round(rng.uniform(-5, 5, n), 6))
    ps = PointSet.from_values(values)
    w1 = rng.random(len(ps)) * (rng.random(len(ps)) < 0.8)
    w2 = rng.random(len(ps)) * (rng.random(len(ps)) < 0.8)
    w1[0] += 1e-3
    w2[-1] += 1e-3
    return AtomicMeasure(ps, mass * w1 / w1.sum()), AtomicMeasure(ps, mass * w2 / w2.sum())


def random_product_pair(rng: np.random.Generator, r: int, atoms):
    """Product measures whose marginals are random pairs on small grids."""
    margs1, margs2, grids = [], [], []
    for a in atoms:
        g = np.arange(int(rng.integers(2, 4))) * (1.0 if not isinstance(a, Circle) else a.circumference / 4)
        m1, m2 = random_pair(rng, len(g), values=g)
        margs1.append(m1.weights)
        margs2.append(m2.weights)
        grids.append(g)
    mesh = np.array(np.meshgrid(*grids, indexing="ij")).reshape(r, -1).T
    w1 = np.ones(len(mesh))
    w2 = np.ones(len(mesh))
    idx = np.array(np.meshgrid(*[np.arange(len(g)) for g in grids], indexing="ij")).reshape(r, -1).T
    for c in range(r):
        w1 *= margs1[c][idx[:, c]]
        w2 *= margs2[c][idx[:, c]]
    ps = PointSet(tuple(tuple(p) for p in mesh))
    marg_pairs = [
        (AtomicMeasure(PointSet.from_values(g), a), AtomicMeasure(PointSet.from_values(g), b), atom)
        for g, a, b, atom in zip(grids, margs1, margs2, atoms)
    ]
    return AtomicMeasure(ps, w1), AtomicMeasure(ps, w2), marg_pairs


def selection_instance(rng: np.random.Generator, r: int, n: int, relevant: float = 0.6):
    """Labeled sample whose coordinates differ in relevance.

    Coordinate j shifts the classes apart by an exponential amount (zero with
    probability 1 - ``relevant``) on top of small Gaussian noise. Values are
    rounded to 3 decimals.
    """
    y = np.where(np.arange(n) % 2 == 0, 1, -1)
    shift = rng.exponential(1.0, r) * (rng.random(r) < relevant)
    sigma = rng.uniform(0.02, 0.2, r)
    X = rng.normal(0.0, 1.0, (n, r)) * sigma + y[:, None] * shift / 2
    return np.round(X, 3), y


def single_signal_sample(rng: np.random.Generator, n: int, r: int, signal: int, noise: float = 0.05):
    """Cases at 1 and controls at 0 on coordinate ``signal``; uniform [0, noise) jitter elsewhere."""
    y = np.where(np.arange(n) % 2 == 0, 1, -1)
    X = np.round(rng.uniform(0.0, noise, (n, r)), 4)
    X[:, signal] = np.where(y == 1, 1.0, 0.0) + np.round(rng.uniform(0.0, noise / 5, n), 4)
    return X, y


def genotype_probs(rng: np.random.Generator, n: int, m: int, signal: int, flip: float = 0.1):
    """(n, m, 3) genotype probability triples and +-1 phenotypes.

    Cases carry BB and controls AA at SNP ``signal`` (each flipped to AB with
    probability ``flip``); other SNPs draw genotypes independently of class.
    """
    y = np.where(np.arange(n) % 2 == 0, 1, -1)
    g = rng.integers(0, 3, (n, m))
    g[:, signal] = np.where(y == 1, 2, 0)
    g[rng.random(n) < flip, signal] = 1
    probs = np.full((n, m, 3), 0.01)
    np.put_along_axis(probs, g[:, :, None], 0.98, axis=2)
    return probs, y


def write_gen(path, probs: np.ndarray) -> None:
    """Write (n, m, 3) triples as a one-line-per-SNP file."""
    n, m, _ = probs.shape
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in range(m):
            vals = " ".join(f"{p:.4g}" for p in probs[:, s, :].ravel())
            fh.write(f"snp{s + 1} rs{1000 + s} {10000 + 137 * s} A G {vals}\n")


def write_labeled_csv(path, X: np.ndarray, y: np.ndarray) -> None:
    r = X.shape[1]
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(",".join(["label"] + [f"c{i + 1}" for i in range(r)]) + "\n")
        for label, row in zip(y, X):
            cells = ["" if np.isnan(v) else repr(float(v)) for v in row]
            fh.write(",".join([str(int(label))] + cells) + "\n")
