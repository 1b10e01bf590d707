"""Simple undirected graphs, edge-list IO, random generators and exact modularity.

Modularity is kept as an integer numerator over the scale ``4 m^2 q`` where the
resolution is ``gamma = p/q``.  With that scale the pair term
``b_ij = a_ij - gamma d_i d_j / 2m`` becomes the integer ``2mq a_ij - p d_i d_j``
and every comparison between partitions of one graph is exact.
"""

from __future__ import annotations

import io
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction


class GraphError(ValueError):
    pass


class ParseError(GraphError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on contiguous ids ``0..n-1``.

    ``edges`` holds ``(i, j)`` pairs with ``i < j`` sorted lexicographically,
    ``adj[i]`` the sorted neighbour ids of ``i`` and ``labels[i]`` the original
    string label of node ``i``.
    """

    n: int
    edges: tuple
    adj: tuple
    degrees: tuple
    labels: tuple
    loops_dropped: int = 0
    duplicates_collapsed: int = 0
    _index: dict = field(default=None, repr=False, compare=False)

    @property
    def m(self):
        return len(self.edges)

    def id_of(self, label):
        return self._index[label]

    def has_edge(self, i, j):
        nbrs = self.adj[i]
        k = _bisect(nbrs, j)
        return k < len(nbrs) and nbrs[k] == j

    def neighbors(self, i):
        return self.adj[i]

    def fingerprint(self):
        """Stable content hash of the labelled edge set."""
        import hashlib

        h = hashlib.sha256()
        h.update(f"n={self.n}\n".encode())
        for lab in self.labels:
            h.update(lab.encode() + b"\n")
        for i, j in self.edges:
            h.update(f"{i} {j}\n".encode())
        return h.hexdigest()

    @classmethod
    def from_edges(cls, n, edges, labels=None, loops_dropped=0, duplicates_collapsed=0):
        """Build a graph from id pairs, dropping loops and repeated edges."""
        if n < 0:
            raise GraphError("node count must be non-negative")
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = tuple(str(x) for x in labels)
        if len(labels) != n:
            raise GraphError("label table size does not match node count")
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != n:
            raise GraphError("node labels must be unique")
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if u == v:
                loops_dropped += 1
                continue
            e = (u, v) if u < v else (v, u)
            if e in seen:
                duplicates_collapsed += 1
                continue
            seen.add(e)
        edge_list = tuple(sorted(seen))
        nbrs = [[] for _ in range(n)]
        for u, v in edge_list:
            nbrs[u].append(v)
            nbrs[v].append(u)
        adj = tuple(tuple(sorted(x)) for x in nbrs)
        degrees = tuple(len(x) for x in adj)
        return cls(n, edge_list, adj, degrees, labels, loops_dropped, duplicates_collapsed, index)


def _bisect(seq, x):
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# edge-list text format

_SPLIT = re.compile(r"[,\s]+")


@dataclass(frozen=True)
class ParseOptions:
    comment_prefixes: tuple = ("#", "%")
    # extra columns (weights, timestamps) are rejected unless this is set
    ignore_extra_columns: bool = False


def parse_edge_list(text, options=None):
    """Parse whitespace- or comma-separated label pairs into a simple graph.

    ``text`` may be a string or a readable text stream.  Blank lines and lines
    starting with a comment prefix are skipped.  Labels get ids in first-seen
    order; self-loops and repeated edges are dropped and counted on the graph.
    """
    options = options or ParseOptions()
    if not isinstance(text, str):
        text = text.read()
    index = {}
    labels = []
    pairs = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith(options.comment_prefixes):
            continue
        tokens = [t for t in _SPLIT.split(line) if t]
        if len(tokens) != 2 and not (options.ignore_extra_columns and len(tokens) > 2):
            raise ParseError(f"expected 2 node labels, found {len(tokens)}", lineno)
        ids = []
        for tok in tokens[:2]:
            if tok not in index:
                index[tok] = len(labels)
                labels.append(tok)
            ids.append(index[tok])
        pairs.append((ids[0], ids[1]))
    if not pairs:
        raise ParseError("empty input: no edges found")
    return Graph.from_edges(len(labels), pairs, labels)


def read_edge_list(path, options=None):
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, options)


def format_edge_list(g):
    return "".join(f"{g.labels[i]} {g.labels[j]}\n" for i, j in g.edges)


def write_edge_list(g, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))


# ---------------------------------------------------------------------------
# random graphs


def erdos_renyi(n, m, seed):
    """Uniform G(n, m): ``m`` distinct edges sampled without replacement."""
    total = n * (n - 1) // 2
    if n < 0 or m < 0:
        raise GraphError("n and m must be non-negative")
    if m > total:
        raise GraphError(f"m={m} exceeds the {total} possible edges on {n} nodes")
    rng = random.Random(seed)
    picks = rng.sample(range(total), m)
    edges = [_unrank_pair(r, n) for r in sorted(picks)]
    return Graph.from_edges(n, edges)


def _unrank_pair(r, n):
    # row-major rank over i < j
    i = 0
    row = n - 1
    while r >= row:
        r -= row
        i += 1
        row -= 1
    return i, i + 1 + r


def barabasi_albert(n, attach, seed):
    """Preferential attachment grown from a clique on ``attach + 1`` nodes."""
    if not 1 <= attach < n:
        raise GraphError(f"attach must satisfy 1 <= attach < n (got attach={attach}, n={n})")
    rng = random.Random(seed)
    edges = [(i, j) for i in range(attach + 1) for j in range(i + 1, attach + 1)]
    # one entry per edge endpoint, so uniform picks are degree-proportional
    ends = [v for e in edges for v in e]
    for new in range(attach + 1, n):
        targets = set()
        while len(targets) < attach:
            targets.add(ends[rng.randrange(len(ends))])
        for t in sorted(targets):
            edges.append((t, new))
            ends.extend((t, new))
    return Graph.from_edges(n, edges)


def barabasi_albert_edge_count(n, attach):
    return attach * (n - attach - 1) + (attach + 1) * attach // 2


# ---------------------------------------------------------------------------
# exact modularity


@dataclass(frozen=True)
class ModularityParams:
    """Resolution ``gamma = p/q`` held as a reduced positive fraction."""

    p: int = 1
    q: int = 1

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise GraphError("gamma must be a positive rational")
        g = math.gcd(self.p, self.q)
        if g != 1:
            object.__setattr__(self, "p", self.p // g)
            object.__setattr__(self, "q", self.q // g)

    @classmethod
    def parse(cls, text):
        """Accept ``"p/q"``, an integer or a finite decimal such as ``"0.75"``."""
        if isinstance(text, Fraction):
            frac = text
        elif isinstance(text, int):
            frac = Fraction(text)
        else:
            try:
                frac = Fraction(str(text).strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise GraphError(f"cannot parse gamma from {text!r}") from exc
        if frac <= 0:
            raise GraphError("gamma must be positive")
        return cls(frac.numerator, frac.denominator)

    @property
    def gamma(self):
        return Fraction(self.p, self.q)

    def __str__(self):
        return f"{self.p}/{self.q}" if self.q != 1 else str(self.p)


GAMMA_ONE = ModularityParams()


@dataclass(frozen=True)
class ModularityValue:
    """Modularity as ``numerator / scale`` with ``scale = 4 m^2 q``.

    Values from the same graph and resolution share a scale and compare by
    integer numerators.  The degenerate ``m = 0`` case uses scale 1.
    """

    numerator: int
    scale: int

    def as_fraction(self):
        return Fraction(self.numerator, self.scale)

    def __float__(self):
        return self.numerator / self.scale

    def _key(self, other):
        if not isinstance(other, ModularityValue):
            return NotImplemented
        if other.scale == self.scale:
            return self.numerator, other.numerator
        return self.numerator * other.scale, other.numerator * self.scale

    def __eq__(self, other):
        k = self._key(other)
        if k is NotImplemented:
            return NotImplemented
        return k[0] == k[1]

    def __hash__(self):
        return hash(self.as_fraction())

    def __lt__(self, other):
        a, b = self._key(other)
        return a < b

    def __le__(self, other):
        a, b = self._key(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._key(other)
        return a > b

    def __ge__(self, other):
        a, b = self._key(other)
        return a >= b

    def __add__(self, other):
        if other.scale != self.scale:
            f = self.as_fraction() + other.as_fraction()
            return ModularityValue(f.numerator, f.denominator)
        return ModularityValue(self.numerator + other.numerator, self.scale)

    def __str__(self):
        return f"{float(self):.7f}"


def modularity_scale(g, params=GAMMA_ONE):
    m = g.m
    return 4 * m * m * params.q if m else 1


def modularity_entry(g, i, j, params=GAMMA_ONE):
    """Integer ``b_ij`` at scale ``4 m^2 q``: ``2 m q a_ij - p d_i d_j``."""
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise GraphError(f"node id out of range: ({i}, {j})")
    a = 1 if i != j and g.has_edge(i, j) else 0
    return 2 * g.m * params.q * a - params.p * g.degrees[i] * g.degrees[j]


def modularity_numerator(g, membership, params=GAMMA_ONE):
    """Scaled modularity numerator, summed community by community."""
    if len(membership) != g.n:
        raise GraphError(f"partition covers {len(membership)} nodes, graph has {g.n}")
    m = g.m
    if m == 0:
        return 0
    internal2 = {}
    volume = {}
    for c, d in zip(membership, g.degrees):
        volume[c] = volume.get(c, 0) + d
    for i, j in g.edges:
        if membership[i] == membership[j]:
            c = membership[i]
            internal2[c] = internal2.get(c, 0) + 2
    twomq = 2 * m * params.q
    return sum(twomq * internal2.get(c, 0) - params.p * vol * vol for c, vol in volume.items())


def modularity(g, membership, params=GAMMA_ONE):
    """Exact modularity of a membership sequence (or :class:`Partition`)."""
    membership = getattr(membership, "membership", membership)
    num = modularity_numerator(g, membership, params)
    return ModularityValue(num, modularity_scale(g, params))


# ---------------------------------------------------------------------------
# partition files: "label<TAB>community_id", one line per node


def format_partition(g, membership):
    membership = getattr(membership, "membership", membership)
    if len(membership) != g.n:
        raise GraphError("partition size does not match graph")
    return "".join(f"{lab}\t{c}\n" for lab, c in zip(g.labels, membership))


def write_partition(g, membership, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_partition(g, membership))


def parse_partition(g, text):
    """Read a partition file against ``g``'s label table.

    Returns the raw community ids (ints where possible) in node-id order.
    """
    if not isinstance(text, str):
        text = text.read()
    found = {}
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ParseError("expected 'label<TAB>community'", lineno)
        lab, comm = parts[0].strip(), parts[1].strip()
        if lab not in g._index:
            raise ParseError(f"unknown node label {lab!r}", lineno)
        if lab in found:
            raise ParseError(f"node {lab!r} listed twice", lineno)
        found[lab] = int(comm) if comm.lstrip("-").isdigit() else comm
    missing = [lab for lab in g.labels if lab not in found]
    if missing:
        raise ParseError(f"partition is missing {len(missing)} node(s), e.g. {missing[0]!r}")
    return [found[lab] for lab in g.labels]


def read_partition(g, path):
    with open(path, encoding="utf-8") as fh:
        return parse_partition(g, fh)
