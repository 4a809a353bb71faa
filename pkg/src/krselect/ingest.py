"""Readers for genotype probability files, phenotypes and labeled CSV samples."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    AllMissing,
    BadLabel,
    EmptySample,
    InconsistentWidth,
    InputError,
    MalformedHeader,
    MalformedLine,
    NegativeProbability,
    SingleClass,
)
from .metrics import Discrete, Line
from .select import SelectionProblem

MISSING = -1
GENOTYPES = ("AA", "AB", "BB")
# absorbs decimal round-off, e.g. 0.3 + 0.3 + 0.3 < 0.9 in binary floating point
SUM_SLACK = 1e-9


@dataclass(frozen=True)
class SnpMeta:
    snp_id: str
    rs_id: str
    position: int
    allele_a: str
    allele_b: str


@dataclass(frozen=True, eq=False)
class GenotypeDataset:
    """Called genotypes, individuals x SNPs; 0/1/2 = AA/AB/BB, -1 = missing."""

    snp_meta: tuple[SnpMeta, ...]
    calls: np.ndarray
    call_rate: float

    @property
    def n_individuals(self) -> int:
        return self.calls.shape[0]

    @property
    def n_snps(self) -> int:
        return self.calls.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenotypeDataset):
            return NotImplemented
        return (
            self.snp_meta == other.snp_meta
            and self.calls.shape == other.calls.shape
            and bool(np.array_equal(self.calls, other.calls))
            and self.call_rate == other.call_rate
        )


def is_called(a: float, b: float, c: float, threshold: float) -> bool:
    return a + b + c >= threshold - SUM_SLACK


def call_triple(a: float, b: float, c: float, threshold: float) -> int:
    """Argmax genotype if the triple sums to at least ``threshold``; ties are missing."""
    trip = (a, b, c)
    if not is_called(a, b, c, threshold):
        return MISSING
    top = max(trip)
    if trip.count(top) > 1:
        return MISSING
    return trip.index(top)


def parse_gen(path, threshold: float = 0.9) -> GenotypeDataset:
    """Parse a one-line-per-SNP genotype probability file.

    Each line: snp_id rs_id position allele_a allele_b, then one
    (AA, AB, BB) probability triple per individual.
    """
    metas: list[SnpMeta] = []
    rows: list[list[int]] = []
    n_called = n_total = 0
    width = None
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields or fields[0].startswith("#"):
                continue
            if len(fields) < 8 or (len(fields) - 5) % 3:
                raise MalformedLine(no, f"expected 5 metadata fields plus triples, got {len(fields)} fields")
            try:
                pos = int(fields[2])
                probs = [float(x) for x in fields[5:]]
            except ValueError as exc:
                raise MalformedLine(no, str(exc)) from None
            if not all(np.isfinite(probs)):
                raise MalformedLine(no, "non-finite probability")
            if any(p < 0 for p in probs):
                raise NegativeProbability(f"line {no}: negative probability")
            m = len(probs) // 3
            if width is None:
                width = m
            elif m != width:
                raise InconsistentWidth(f"line {no}: {m} individuals, expected {width}")
            row = []
            for i in range(m):
                a, b, c = probs[3 * i : 3 * i + 3]
                row.append(call_triple(a, b, c, threshold))
                n_called += is_called(a, b, c, threshold)
                n_total += 1
            metas.append(SnpMeta(fields[0], fields[1], pos, fields[3], fields[4]))
            rows.append(row)
    if not rows:
        raise EmptySample(f"{path}: no SNP lines")
    calls = np.array(rows, dtype=np.int64).T.copy()
    return GenotypeDataset(tuple(metas), calls, n_called / n_total)


_CALLS_HEADER = ("snp_id", "rs_id", "position", "allele_a", "allele_b")


def write_calls_csv(ds: GenotypeDataset, path) -> None:
    """One row per SNP; individual calls as 0/1/2 with empty cells for missing."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["# call_rate", repr(ds.call_rate)])
        w.writerow(list(_CALLS_HEADER) + [f"i{j + 1}" for j in range(ds.n_individuals)])
        for s, meta in enumerate(ds.snp_meta):
            calls = ["" if v == MISSING else str(int(v)) for v in ds.calls[:, s]]
            w.writerow([meta.snp_id, meta.rs_id, meta.position, meta.allele_a, meta.allele_b] + calls)


def read_calls_csv(path) -> GenotypeDataset:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or rows[0][:1] != ["# call_rate"] or tuple(rows[1][:5]) != _CALLS_HEADER:
        raise MalformedHeader(f"{path}: not a calls CSV")
    rate = float(rows[0][1])
    metas, cols = [], []
    for no, row in enumerate(rows[2:], start=3):
        if len(row) != len(rows[1]):
            raise MalformedLine(no, "wrong field count")
        metas.append(SnpMeta(row[0], row[1], int(row[2]), row[3], row[4]))
        cols.append([MISSING if x == "" else int(x) for x in row[5:]])
    calls = np.array(cols, dtype=np.int64).reshape(len(cols), len(rows[1]) - 5).T.copy()
    return GenotypeDataset(tuple(metas), calls, rate)


def _parse_label(text: str, line_no: int) -> int:
    try:
        v = float(text)
    except ValueError:
        raise BadLabel(line_no, text) from None
    if v not in (1.0, -1.0):
        raise BadLabel(line_no, text)
    return int(v)


def read_phenotype(path) -> np.ndarray:
    """One label (+1 case, -1 control) per non-blank line."""
    labels = []
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, start=1):
            s = line.strip()
            if s and not s.startswith("#"):
                labels.append(_parse_label(s, no))
    if not labels:
        raise EmptySample(f"{path}: no labels")
    return np.array(labels, dtype=int)


def encode_calls(ds: GenotypeDataset, snp_subset: Sequence[int] | None = None) -> np.ndarray:
    """Calls as floats (0, 1, 2) with NaN for missing."""
    idx = list(range(ds.n_snps)) if snp_subset is None else list(snp_subset)
    X = ds.calls[:, idx].astype(float)
    X[X == MISSING] = np.nan
    return X


def to_selection_problem(
    ds: GenotypeDataset,
    phenotype: Sequence[int],
    snp_subset: Sequence[int] | None = None,
    encoding: str = "discrete",
    k: float = 1.0,
    k_target: int = 1,
    mode: str = "empirical",
) -> SelectionProblem:
    """Genotype matrix as a selection problem on 0/1/2 coordinates.

    ``encoding="discrete"`` puts a k-discrete metric on each SNP (the three
    genotypes mutually equidistant); ``"line"`` places them at 0, 1, 2.
    Missing calls become NaN and are dropped per evaluated subset.
    """
    y = np.asarray(phenotype, dtype=int)
    if y.shape[0] != ds.n_individuals:
        raise InputError(f"{y.shape[0]} phenotypes for {ds.n_individuals} individuals")
    X = encode_calls(ds, snp_subset)
    complete = ~np.isnan(X).any(axis=1)
    if not complete.any():
        raise AllMissing("no individual is called on every selected SNP")
    yc = y[complete]
    if not ((yc == 1).any() and (yc == -1).any()):
        raise SingleClass("both classes need at least one fully called individual")
    if encoding == "discrete":
        atom = Discrete(k)
    elif encoding == "line":
        atom = Line()
    else:
        raise InputError(f"unknown encoding {encoding!r}")
    return SelectionProblem(X, y, tuple(atom for _ in range(X.shape[1])), k_target, mode)


@dataclass(frozen=True, eq=False)
class LabeledSample:
    points: np.ndarray
    labels: np.ndarray


def parse_labeled_csv(path) -> LabeledSample:
    """Header ``label,c1,...,cr``; labels -1/+1; empty cells are missing (NaN)."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = [
            (no, row)
            for no, row in enumerate(csv.reader(fh), start=1)
            if row and not row[0].lstrip().startswith("#")
        ]
    if not rows:
        raise MalformedHeader(f"{path}: missing header")
    header = [h.strip() for h in rows[0][1]]
    if len(header) < 2 or header[0] != "label":
        raise MalformedHeader(f"{path}: header must be label,c1,...,cr")
    labels, pts = [], []
    for no, row in rows[1:]:
        if len(row) != len(header):
            raise MalformedLine(no, f"expected {len(header)} fields, got {len(row)}")
        labels.append(_parse_label(row[0].strip(), no))
        try:
            pts.append([float(x) if x.strip() else np.nan for x in row[1:]])
        except ValueError as exc:
            raise MalformedLine(no, str(exc)) from None
    if not pts:
        raise EmptySample(f"{path}: no samples")
    return LabeledSample(np.array(pts, dtype=float), np.array(labels, dtype=int))
