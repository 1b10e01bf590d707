"""Partitions in restricted-growth form and the comparison metrics GOP and AMI."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

ENUMERATION_LIMIT = 12


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """Membership tuple in canonical restricted-growth form."""

    membership: tuple

    def __post_init__(self):
        if tuple(canonical_membership(self.membership)) != tuple(self.membership):
            raise PartitionError("membership is not in restricted-growth form")

    @property
    def k(self):
        return max(self.membership) + 1 if self.membership else 0

    @property
    def n(self):
        return len(self.membership)

    def __len__(self):
        return len(self.membership)

    def __iter__(self):
        return iter(self.membership)

    def __getitem__(self, i):
        return self.membership[i]

    def communities(self):
        blocks = [[] for _ in range(self.k)]
        for node, c in enumerate(self.membership):
            blocks[c].append(node)
        return blocks

    def same(self, i, j):
        return self.membership[i] == self.membership[j]


def canonical_membership(labels):
    mapping = {}
    out = []
    for lab in labels:
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out.append(mapping[lab])
    return out


def canonicalize(labels):
    """Relabel communities in first-use order: ``[7, 7, 2, 7, 2] -> (0, 0, 1, 0, 1)``."""
    if isinstance(labels, Partition):
        return labels
    labels = list(labels)
    if not labels:
        raise PartitionError("membership array is empty")
    return Partition(tuple(canonical_membership(labels)))


def from_communities(blocks, n):
    membership = [None] * n
    for c, block in enumerate(blocks):
        for v in block:
            membership[v] = c
    if any(c is None for c in membership):
        raise PartitionError("communities do not cover every node")
    return canonicalize(membership)


def singletons(n):
    return Partition(tuple(range(n)))


def single_community(n):
    return Partition((0,) * n)


def enumerate_partitions(n, limit=ENUMERATION_LIMIT):
    """Yield all ``Bell(n)`` set partitions of ``n`` elements in RG-lexicographic order."""
    if n > limit:
        raise PartitionError(f"n={n} exceeds the enumeration limit of {limit}")
    if n <= 0:
        return
    a = [0] * n
    # b[i] = 1 + max(a[:i]), the largest label position i may take
    b = [1] * n
    while True:
        yield Partition(tuple(a))
        i = n - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        top = max(b[i], a[i] + 1)
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = top


def bell_number(n):
    """Bell number from the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


# ---------------------------------------------------------------------------
# contingency tables and AMI


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    total: int


def contingency(u, v):
    u = canonicalize(u).membership
    v = canonicalize(v).membership
    if len(u) != len(v):
        raise PartitionError(f"partitions cover {len(u)} and {len(v)} nodes")
    r, c = max(u) + 1, max(v) + 1
    table = np.zeros((r, c), dtype=np.int64)
    np.add.at(table, (np.asarray(u), np.asarray(v)), 1)
    return ContingencyTable(table, table.sum(axis=1), table.sum(axis=0), len(u))


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def mutual_information(table):
    nz = table.counts > 0
    nij = table.counts[nz].astype(float)
    n = table.total
    outer = np.outer(table.row_sums, table.col_sums)[nz].astype(float)
    return float((nij / n * (np.log(n * nij) - np.log(outer))).sum())


@lru_cache(maxsize=32)
def _log_factorials(n):
    return np.array([math.lgamma(k + 1) for k in range(n + 1)])


def expected_mutual_information(table):
    """Exact EMI under the permutation model, summed over the full hypergeometric support."""
    n = table.total
    lf = _log_factorials(n)
    a = table.row_sums
    b = table.col_sums
    emi = 0.0
    for ai in a:
        ai = int(ai)
        for bj in b:
            bj = int(bj)
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            if lo > hi:
                continue
            nij = np.arange(lo, hi + 1)
            term = nij / n * (np.log(n * nij) - math.log(ai * bj))
            logw = (
                lf[ai] + lf[bj] + lf[n - ai] + lf[n - bj] - lf[n]
                - lf[nij] - lf[ai - nij] - lf[bj - nij] - lf[n - ai - bj + nij]
            )
            emi += float((term * np.exp(logw)).sum())
    return emi


def ami(u, v):
    """Adjusted mutual information with arithmetic-mean normalisation.

    Identical partitions (up to relabelling) score exactly 1.0; when both
    partitions are trivial so the normaliser vanishes, distinct partitions
    score 0.0.  Negative values are returned unchanged.
    """
    pu, pv = canonicalize(u), canonicalize(v)
    if len(pu) != len(pv):
        raise PartitionError(f"partitions cover {len(pu)} and {len(pv)} nodes")
    if pu == pv:
        return 1.0
    table = contingency(pu, pv)
    n = table.total
    hu = _entropy(table.row_sums, n)
    hv = _entropy(table.col_sums, n)
    mi = mutual_information(table)
    emi = expected_mutual_information(table)
    denom = 0.5 * (hu + hv) - emi
    if denom == 0.0:
        return 0.0
    return (mi - emi) / denom


# ---------------------------------------------------------------------------
# GOP


class CertificateError(ValueError):
    """A heuristic beat a claimed optimum, so the optimum is not one."""


def gop(q_heuristic, q_star):
    """Heuristic modularity as a fraction of the optimum.

    Exact ties give 1.0, negative heuristic values give 0.0, a zero optimum
    gives 1.0 only for an exact zero.  Inputs are ModularityValues, Fractions
    or ints; the ratio is formed exactly before conversion to float.
    """
    qh = _as_fraction(q_heuristic)
    qs = _as_fraction(q_star)
    if qh > qs:
        raise CertificateError(f"heuristic modularity {float(qh)} exceeds the optimum {float(qs)}")
    if qh == qs:
        return 1.0
    if qh < 0:
        return 0.0
    if qs == 0:
        return 1.0 if qh == 0 else 0.0
    # keep GOP = 1 reserved for exact ties even when the ratio rounds up
    return min(float(qh / qs), math.nextafter(1.0, 0.0))


def _as_fraction(x):
    if hasattr(x, "as_fraction"):
        return x.as_fraction()
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def max_ami_vs_optima(x, optima):
    """Largest AMI between ``x`` and any member of an optima collection."""
    partitions = getattr(optima, "partitions", optima)
    if not partitions:
        raise PartitionError("optima set is empty")
    return max(ami(x, opt) for opt in partitions)


def pairwise_ami(partitions):
    return {(i, j): ami(partitions[i], partitions[j])
            for i in range(len(partitions)) for j in range(i + 1, len(partitions))}


def is_refinement(fine, coarse):
    """True when every block of ``fine`` lies inside one block of ``coarse``."""
    owner = {}
    for f, c in zip(canonicalize(fine), canonicalize(coarse)):
        if owner.setdefault(f, c) != c:
            return False
    return True


def merged_blocks(fine, coarse):
    """Map each coarse block to the fine blocks it absorbs (requires refinement)."""
    if not is_refinement(fine, coarse):
        raise PartitionError("first partition does not refine the second")
    groups = {}
    for f, c in zip(canonicalize(fine), canonicalize(coarse)):
        groups.setdefault(c, set()).add(f)
    return {c: sorted(fs) for c, fs in groups.items()}


def block_sizes(p):
    return sorted(Counter(canonicalize(p).membership).values(), reverse=True)
