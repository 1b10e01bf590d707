"""Branch-and-cut for the clique-partitioning model, with optimum enumeration.

Pruning compares integer numerators only.  LP relaxations (HiGHS through
scipy) supply dual multipliers; the bound used for pruning is the Lagrangian
value of those multipliers, which is a valid upper bound for any non-negative
multipliers, so solver tolerances can loosen the bound but never invalidate it.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..graph import ModularityValue, modularity_numerator
from ..partition import canonicalize
from .model import Mode, components_of, pair_index

log = logging.getLogger(__name__)

_INT_TOL = 1e-6
_VIOLATION_TOL = 1e-6


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    TIME_LIMIT = "TIME_LIMIT"
    NODE_LIMIT = "NODE_LIMIT"


@dataclass(frozen=True)
class Budget:
    time_limit: float | None = None  # seconds
    node_limit: int | None = None


@dataclass(frozen=True)
class Certificate:
    best: int
    bound: int
    scale: int
    nodes: int
    mode: str
    wall_time: float
    status: Status
    exhaustive: bool = True
    bound_method: str = "lp"

    @property
    def q_best(self):
        return ModularityValue(self.best, self.scale)

    @property
    def q_bound(self):
        return ModularityValue(self.bound, self.scale)

    def to_dict(self):
        return {
            "status": self.status.value,
            "best_numerator": str(self.best),
            "bound_numerator": str(self.bound),
            "denominator": str(self.scale),
            "best": self.best / self.scale,
            "bound": self.bound / self.scale,
            "nodes": self.nodes,
            "mode": self.mode,
            "bound_method": self.bound_method,
            "exhaustive": self.exhaustive,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["best_numerator"]), int(d["bound_numerator"]), int(d["denominator"]),
                   int(d["nodes"]), d["mode"], float(d["wall_time"]), Status(d["status"]),
                   bool(d.get("exhaustive", True)), d.get("bound_method", "lp"))


@dataclass(frozen=True)
class OptimaSet:
    q_star: ModularityValue
    partitions: tuple
    certificate: Certificate

    @property
    def multiplicity(self):
        return len(self.partitions)

    @property
    def optimal(self):
        return self.certificate.status is Status.OPTIMAL

    @property
    def best(self):
        return self.partitions[0]


# ---------------------------------------------------------------------------


def expand_isolated(base, isolated):
    """All placements of zero-degree nodes into existing or fresh communities.

    Zero-degree nodes have ``b_ij = 0`` with everything, so every placement
    scores the same.  ``base`` must keep them as singletons.
    """
    if not isolated:
        return [base]
    iso = set(isolated)
    core = [None if v in iso else c for v, c in enumerate(base.membership)]
    labels = sorted({c for c in core if c is not None})
    results = []

    def rec(idx, memb, used):
        if idx == len(isolated):
            results.append(canonicalize(memb))
            return
        v = isolated[idx]
        for c in used:
            memb[v] = c
            rec(idx + 1, memb, used)
        fresh = ("iso", idx)
        memb[v] = fresh
        rec(idx + 1, memb, used + [fresh])
        memb[v] = None

    rec(0, list(core), list(labels))
    return sorted(set(results), key=lambda p: p.membership)


def _isolate(part, isolated):
    if not isolated:
        return part
    memb = list(part.membership)
    for idx, v in enumerate(isolated):
        memb[v] = ("iso", idx)
    return canonicalize(memb)


class _Incumbent:
    def __init__(self, model, enumerate_all):
        self.model = model
        self.enumerate_all = enumerate_all
        self.best = None
        self.pool = {}

    @property
    def threshold(self):
        if self.best is None:
            return -math.inf
        return self.best if self.enumerate_all else self.best + 1

    def offer(self, part):
        part = _isolate(part, self.model.isolated)
        num = modularity_numerator(self.model.graph, part.membership, self.model.params)
        if self.best is None or num > self.best:
            self.best = num
            self.pool = {part.membership: part}
        elif num == self.best and self.enumerate_all:
            self.pool.setdefault(part.membership, part)
        return num


def _warm_start(model, inc):
    from ..heuristics import run_heuristic

    g = model.graph
    for name, seed in (("louvain", 0), ("louvain", 1), ("combo", 0)):
        try:
            part = run_heuristic(name, g, model.params, seed=seed).partition
        except Exception:  # pragma: no cover - warm start is best effort
            log.exception("warm start with %s failed", name)
            continue
        inc.offer(part)


def _positive_mass_bound(model, lo, hi):
    total = model.constant
    for j, wj in enumerate(model.weights):
        total += max(wj * int(lo[j]), wj * int(hi[j]))
    return total


# ---------------------------------------------------------------------------
# LP relaxation with lazily separated triangle rows


class _Relaxation:
    def __init__(self, model, max_cuts=None):
        self.model = model
        self.n = model.graph.n
        self.nv = model.num_vars
        self.w = np.asarray(model.weights, dtype=float)
        self.norm = max(1.0, float(np.abs(self.w).max()))
        self.rows_t = []
        self.rows_a = []
        self.rows_b = []
        self.keys = set()
        self.max_cuts = max_cuts or max(60, 3 * self.n)
        if model.mode is Mode.REDUCED:
            self.cand = model.row_arrays()
        else:
            self.cand = None
            iu = np.triu_indices(self.n, 1)
            self._iu = iu
        self.lp_solves = 0

    def add_rows(self, rows):
        added = 0
        for t, a, b in rows:
            key = (t, a, b) if a < b else (t, b, a)
            if key in self.keys:
                continue
            self.keys.add(key)
            self.rows_t.append(key[0])
            self.rows_a.append(key[1])
            self.rows_b.append(key[2])
            added += 1
        return added

    def _matrix(self):
        r = len(self.rows_t)
        if r == 0:
            return None
        data = np.tile(np.array([1.0, 1.0, -1.0]), r)
        cols = np.column_stack([self.rows_a, self.rows_b, self.rows_t]).ravel()
        rowi = np.repeat(np.arange(r), 3)
        return sparse.csr_matrix((data, (rowi, cols)), shape=(r, self.nv))

    def solve(self, lo, hi):
        """Return ``(y, lam, L)`` or ``None`` if infeasible.

        ``L`` is the Lagrangian bound on ``w . y`` over the box ``[lo, hi]``.
        """
        A = self._matrix()
        c = -self.w / self.norm
        bounds = np.column_stack([lo, hi]).astype(float)
        kwargs = {}
        if A is not None:
            kwargs = {"A_ub": A, "b_ub": np.ones(A.shape[0])}
        self.lp_solves += 1
        res = linprog(c, bounds=bounds, method="highs", **kwargs)
        if res.status == 2:
            return None
        if res.status != 0 or res.x is None:
            return "failed"
        y = np.clip(res.x, 0.0, 1.0)
        if A is not None:
            lam = np.maximum(-np.asarray(res.ineqlin.marginals, dtype=float), 0.0) * self.norm
        else:
            lam = np.zeros(0)
        L, r = self.lagrangian(lam, lo, hi)
        return y, lam, L, r

    def lagrangian(self, lam, lo, hi):
        r = self.w.copy()
        if lam.size:
            np.add.at(r, np.asarray(self.rows_a), -lam)
            np.add.at(r, np.asarray(self.rows_b), -lam)
            np.add.at(r, np.asarray(self.rows_t), lam)
        L = float(lam.sum()) + float(np.maximum(r * lo, r * hi).sum())
        return L, r

    def separate(self, y):
        if self.cand is not None:
            t, a, b = self.cand
            if t.size == 0:
                return []
            viol = y[a] + y[b] - y[t] - 1.0
            idx = np.nonzero(viol > _VIOLATION_TOL)[0]
            if idx.size == 0:
                return []
            idx = idx[np.argsort(-viol[idx], kind="stable")][: self.max_cuts]
            return [(int(t[i]), int(a[i]), int(b[i])) for i in idx]
        n = self.n
        Y = np.zeros((n, n))
        Y[self._iu] = y
        Y = Y + Y.T
        found = []
        for i in range(n - 1):
            js = np.arange(i + 1, n)
            # viol[j, k] = y_ik + y_jk - y_ij - 1
            V = Y[i][None, :] + Y[js] - Y[i, js][:, None] - 1.0
            V[:, i] = -1.0
            V[np.arange(js.size), js] = -1.0
            jj, kk = np.nonzero(V > _VIOLATION_TOL)
            for a_, k in zip(jj, kk):
                found.append((V[a_, k], i, int(js[a_]), int(k)))
        if not found:
            return []
        found.sort(key=lambda r: (-r[0], r[1], r[2], r[3]))
        out = []
        for _, i, j, k in found[: self.max_cuts]:
            out.append((pair_index(i, j, n), pair_index(i, k, n), pair_index(j, k, n)))
        return out

    def violated_integral(self, yr):
        """Rows violated by a 0/1 vector, from the full candidate set."""
        if self.cand is not None:
            t, a, b = self.cand
            if t.size == 0:
                return []
            idx = np.nonzero(yr[a] + yr[b] - yr[t] > 1)[0]
            return [(int(t[i]), int(a[i]), int(b[i])) for i in idx[: self.max_cuts]]
        return self.separate(yr.astype(float))


@dataclass
class _Node:
    lo: np.ndarray
    hi: np.ndarray
    bound: int
    depth: int = 0


class _Clock:
    def __init__(self, budget):
        self.budget = budget or Budget()
        self.start = time.perf_counter()

    def elapsed(self):
        return time.perf_counter() - self.start

    def exceeded(self, nodes):
        b = self.budget
        if b.time_limit is not None and self.elapsed() >= b.time_limit:
            return Status.TIME_LIMIT
        if b.node_limit is not None and nodes >= b.node_limit:
            return Status.NODE_LIMIT
        return None


def _root_box(model):
    lo = np.zeros(model.num_vars, dtype=np.int8)
    hi = np.ones(model.num_vars, dtype=np.int8)
    n = model.graph.n
    for v in model.isolated:
        for u in range(n):
            if u != v:
                hi[pair_index(u, v, n)] = 0
    return lo, hi


class _LPSearch:
    def __init__(self, model, enumerate_all, budget, trace, max_rounds=40):
        self.model = model
        self.inc = _Incumbent(model, enumerate_all)
        self.enumerate_all = enumerate_all
        self.clock = _Clock(budget)
        self.trace = trace
        self.max_rounds = max_rounds
        self.relax = _Relaxation(model)
        self.nodes = 0
        self.const = model.constant

    def _int_bound(self, L, lam, r):
        tol = 1e-9 * (1.0 + float(np.abs(lam).sum()) + float(np.abs(r).sum()))
        return self.const + math.floor(L + tol)

    def _fixings(self, node, L, lam, r, y=None):
        """Per-variable allowed values under the current threshold.

        Returns ``(lo, hi, pruned)`` with forbidden values removed.
        """
        thr = self.inc.threshold
        lo = node.lo.copy()
        hi = node.hi.copy()
        free = np.nonzero(lo != hi)[0]
        if not free.size or thr == -math.inf:
            return lo, hi, False
        rf = r[free]
        tol = 1e-9 * (1.0 + float(np.abs(lam).sum()) + float(np.abs(r).sum()))
        base = np.maximum(rf, 0.0)
        # bound with y_j forced to 0 loses max(r_j, 0); forced to 1 loses max(-r_j, 0)
        b0 = self.const + np.floor(L - base + tol)
        b1 = self.const + np.floor(L - np.maximum(-rf, 0.0) + tol)
        no0 = b0 < thr
        no1 = b1 < thr
        if np.any(no0 & no1):
            return lo, hi, True
        lo[free[no0]] = 1
        hi[free[no1]] = 0
        return lo, hi, False

    def _child_bound(self, L, lam, r, j, v):
        tol = 1e-9 * (1.0 + float(np.abs(lam).sum()) + float(np.abs(r).sum()))
        loss = max(r[j], 0.0) if v == 0 else max(-r[j], 0.0)
        return self.const + math.floor(L - loss + tol)

    def _global_bound(self, stack, extra=None):
        b = self.inc.best if self.inc.best is not None else -math.inf
        for nd in stack:
            b = max(b, nd.bound)
        if extra is not None:
            b = max(b, extra)
        return b

    def run(self, warm=True):
        model = self.model
        lo, hi = _root_box(model)
        root_bound = _positive_mass_bound(model, lo, hi)
        if warm:
            _warm_start(model, self.inc)
        stack = [_Node(lo, hi, root_bound)]
        status = Status.OPTIMAL
        interrupted_bound = None
        while stack:
            st = self.clock.exceeded(self.nodes)
            if st is not None:
                status = st
                break
            node = stack.pop()
            if node.bound < self.inc.threshold:
                continue
            self.nodes += 1
            self._process(node, stack)
            if self.trace is not None:
                self.trace.append((self.inc.best, self._global_bound(stack)))
        bound = self._global_bound(stack, interrupted_bound)
        return status, bound

    def _process(self, node, stack):
        rounds = 0
        history = []
        while True:
            out = self.relax.solve(node.lo.astype(float), node.hi.astype(float))
            if out is None:
                return
            if out == "failed":
                self._branch_blind(node, stack)
                return
            y, lam, L, r = out
            bound = min(node.bound, self._int_bound(L, lam, r))
            if bound < self.inc.threshold:
                return
            history.append(bound)
            frac = np.minimum(y, 1.0 - y)
            is_int = bool(np.all(frac <= _INT_TOL))
            if is_int:
                # cheap primal: the rounded point is a candidate when feasible
                yr = np.rint(y).astype(np.int8)
                bad = self.relax.violated_integral(yr)
                if not bad:
                    break
                if self.relax.add_rows(bad) and rounds < 4 * self.max_rounds:
                    rounds += 1
                    continue
                j = bad[0][0]
                self._split(node, stack, L, lam, r, j, prefer=1)
                return
            if rounds >= self.max_rounds:
                break
            if len(history) >= 4 and history[-4] - bound < 1:
                break
            cuts = self.relax.separate(y)
            if not cuts or not self.relax.add_rows(cuts):
                break
            rounds += 1
        if is_int:
            self._integral(node, stack, yr, L, lam, r, bound)
            return
        self._primal_from_fractional(y)
        free = node.lo != node.hi
        score = np.where(free, frac, -1.0)
        best = score.max()
        cand = np.nonzero(score >= best - 1e-12)[0]
        w = self.relax.w
        j = int(cand[np.argmax(np.abs(w[cand]))])
        self._split(node, stack, L, lam, r, j, prefer=1 if w[j] > 0 else 0)

    def _primal_from_fractional(self, y):
        part = components_of(self.model, (y < 0.5).astype(np.int8))
        self.inc.offer(part)

    def _split(self, node, stack, L, lam, r, j, prefer):
        lo, hi, pruned = self._fixings(node, L, lam, r)
        if pruned:
            return
        children = []
        for v in (1 - prefer, prefer):  # preferred child is pushed last, popped first
            if not (lo[j] <= v <= hi[j]):
                continue
            clo, chi = lo.copy(), hi.copy()
            clo[j] = chi[j] = v
            b = min(node.bound, self._child_bound(L, lam, r, j, v))
            children.append(_Node(clo, chi, b, node.depth + 1))
        stack.extend(children)

    def _branch_blind(self, node, stack):
        free = np.nonzero(node.lo != node.hi)[0]
        if not free.size:
            x = 1 - node.lo
            self._offer_point(x)
            return
        w = self.relax.w
        j = int(free[np.argmax(np.abs(w[free]))])
        for v in ((0, 1) if w[j] > 0 else (1, 0)):
            clo, chi = node.lo.copy(), node.hi.copy()
            clo[j] = chi[j] = v
            stack.append(_Node(clo, chi, node.bound, node.depth + 1))

    def _offer_point(self, x):
        if self.model.is_feasible(list(x)):
            self.inc.offer(components_of(self.model, list(x)))

    def _integral(self, node, stack, yr, L, lam, r, bound):
        x = 1 - yr
        self.inc.offer(components_of(self.model, list(x)))
        if bound < self.inc.threshold:
            return
        lo, hi, pruned = self._fixings(node, L, lam, r)
        if pruned:
            return
        two = np.nonzero(lo != hi)[0]
        if two.size:
            order = sorted(two.tolist(), key=lambda j: (abs(r[j]), j))
            for j in order:
                v = 1 - int(yr[j])
                clo, chi = lo.copy(), hi.copy()
                clo[j] = chi[j] = v
                b = min(bound, self._child_bound(L, lam, r, j, v))
                stack.append(_Node(clo, chi, b, node.depth + 1))
                lo[j] = hi[j] = yr[j]
        z = lo
        if not np.array_equal(z, yr):
            self._offer_point(1 - z)


class _PairSearch:
    """Branch and bound on same/different decisions with the positive-mass bound."""

    def __init__(self, model, enumerate_all, budget, trace):
        self.model = model
        self.inc = _Incumbent(model, enumerate_all)
        self.enumerate_all = enumerate_all
        self.clock = _Clock(budget)
        self.trace = trace
        self.nodes = 0
        n = model.graph.n
        iso = set(model.isolated)
        self.active = [v for v in range(n) if v not in iso]
        self.W = {}
        for (i, j), w in zip(model.pairs, model.weights):
            self.W[(i, j)] = w

    def _evaluate(self, comp, diff):
        fixed = self.model.constant
        positive = 0
        pick = None
        pick_key = None
        act = self.active
        W = self.W
        for x in range(len(act)):
            i = act[x]
            ci = comp[i]
            for y in range(x + 1, len(act)):
                j = act[y]
                w = W[(i, j)]
                cj = comp[j]
                if ci == cj:
                    fixed += w
                    continue
                key = (ci, cj) if ci < cj else (cj, ci)
                if key in diff:
                    continue
                if w > 0:
                    positive += w
                if w > 0 or (w == 0 and self.enumerate_all):
                    k = (-abs(w), i, j)
                    if pick_key is None or k < pick_key:
                        pick_key, pick = k, (i, j)
        return fixed, fixed + positive, pick

    def run(self, warm=True):
        n = self.model.graph.n
        if warm:
            _warm_start(self.model, self.inc)
        stack = [(tuple(range(n)), frozenset(), None)]
        status = Status.OPTIMAL
        while stack:
            st = self.clock.exceeded(self.nodes)
            if st is not None:
                status = st
                break
            comp, diff, pbound = stack.pop()
            if pbound is not None and pbound < self.inc.threshold:
                continue
            self.nodes += 1
            fixed, bound, pick = self._evaluate(comp, diff)
            if bound < self.inc.threshold:
                pass
            elif pick is None:
                self.inc.offer(canonicalize(comp))
            else:
                i, j = pick
                ci, cj = comp[i], comp[j]
                lo_c, hi_c = min(ci, cj), max(ci, cj)
                merged = tuple(lo_c if c == hi_c else c for c in comp)
                mdiff = frozenset(
                    tuple(sorted((lo_c if a == hi_c else a, lo_c if b == hi_c else b)))
                    for a, b in diff)
                apart = diff | {(lo_c, hi_c)}
                # same-community child explored first
                stack.append((comp, apart, bound))
                stack.append((merged, mdiff, bound))
            if self.trace is not None:
                self.trace.append((self.inc.best, self._global_bound(stack)))
        return status, self._global_bound(stack)

    def _global_bound(self, stack):
        b = self.inc.best if self.inc.best is not None else -math.inf
        for item in stack:
            if item[2] is not None:
                b = max(b, item[2])
        return b


def _search(model, enumerate_all, budget, bound, trace, warm):
    if bound == "lp":
        s = _LPSearch(model, enumerate_all, budget, trace)
    elif bound == "combinatorial":
        s = _PairSearch(model, enumerate_all, budget, trace)
    else:
        raise ValueError(f"unknown bound method {bound!r}")
    status, gbound = s.run(warm=warm)
    inc = s.inc
    if inc.best is None:
        # nothing evaluated yet: singletons are always feasible
        inc.offer(canonicalize(range(model.graph.n)))
    if status is Status.OPTIMAL:
        gbound = inc.best
    gbound = max(gbound, inc.best)
    parts = sorted(inc.pool.values(), key=lambda p: p.membership)
    if enumerate_all:
        expanded = set()
        for p in parts:
            expanded.update(expand_isolated(p, model.isolated))
        parts = sorted(expanded, key=lambda p: p.membership)
    else:
        parts = parts[:1]
    cert = Certificate(
        best=inc.best, bound=int(gbound), scale=model.scale, nodes=s.nodes,
        mode=model.mode.value, wall_time=s.clock.elapsed(), status=status,
        exhaustive=status is Status.OPTIMAL, bound_method=bound)
    log.info("search finished: status=%s best=%s bound=%s nodes=%d",
             status.value, inc.best, gbound, s.nodes)
    return OptimaSet(ModularityValue(inc.best, model.scale), tuple(parts), cert)


def solve_exact(model, budget=None, bound="lp", trace=None, warm_start=True):
    """Certified maximum-modularity partition of the model's graph.

    Returns an :class:`OptimaSet` holding one optimal partition.  When the
    budget runs out the status says so and ``certificate.bound`` is the best
    proven upper bound on the numerator.
    """
    return _search(model, False, budget, bound, trace, warm_start)


def enumerate_all_optima(model, budget=None, bound="lp", trace=None, warm_start=True):
    """Every distinct partition attaining the maximum modularity.

    Subtrees are pruned only when strictly worse than the incumbent, so ties
    survive; zero-degree nodes are expanded over all equivalent placements.
    """
    return _search(model, True, budget, bound, trace, warm_start)
