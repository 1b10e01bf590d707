"""Combo: repeatedly apply the best shift of a node subset between communities.

For every source community and every destination (another community or a new
one) the best subset to move is searched with Kernighan-Lin style flip
sweeps; moving the whole source (a merger) and nothing are always candidates.
The single best strictly positive move is applied until none remains.
"""

from __future__ import annotations

import numpy as np

from ..graph import GAMMA_ONE
from ._core import HeuristicConfig, check_graph, make_result
from .leicht_newman import modularity_matrix

_NEG = np.iinfo(np.int64).min // 4


def _move_value(Bss, a, y):
    """Gain of moving the subset flagged by ``y`` from S into T.

    ``a[v]`` is the link sum from ``v`` to T.
    """
    moved = y.astype(bool)
    if not moved.any():
        return 0
    stay = ~moved
    return int(2 * a[moved].sum() - 2 * Bss[np.ix_(moved, stay)].sum())


def _kl(Bss, a, r, y):
    """Flip sweeps from ``y``; returns the best subset found and its gain."""
    y = y.copy()
    value = _move_value(Bss, a, y)
    while True:
        c = Bss @ y - np.diag(Bss) * y
        locked = np.zeros(y.size, dtype=bool)
        cur = value
        best = value
        best_len = 0
        flips = []
        for step in range(y.size):
            sign = np.where(y == 0, 1, -1)
            delta = sign * (2 * a - 2 * r + 4 * c)
            delta = np.where(locked, _NEG, delta)
            i = int(np.argmax(delta))
            cur += int(delta[i])
            locked[i] = True
            c += Bss[:, i] * (1 if y[i] == 0 else -1)
            c[i] -= Bss[i, i] * (1 if y[i] == 0 else -1)
            y[i] = 1 - y[i]
            flips.append(i)
            if cur > best:
                best, best_len = cur, step + 1
        for i in flips[best_len:]:
            y[i] = 1 - y[i]
        if best <= value:
            return y, value
        value = best


def best_shift(B, source, target):
    """Best subset of ``source`` to move into ``target`` (empty target = split)."""
    S = np.asarray(source)
    Bss = B[np.ix_(S, S)]
    if len(target):
        a = B[np.ix_(S, np.asarray(target))].sum(axis=1)
    else:
        a = np.zeros(S.size, dtype=np.int64)
    r = Bss.sum(axis=1) - np.diag(Bss)
    candidates = []
    if len(target):
        whole = np.ones(S.size, dtype=np.int64)
        candidates.append((_move_value(Bss, a, whole), whole))
    if S.size > 1 or len(target):
        zero = np.zeros(S.size, dtype=np.int64)
        candidates.append(_kl(Bss, a, r, zero)[::-1])
        single = ((2 * a - 2 * r) > 0).astype(np.int64)
        if single.any():
            candidates.append(_kl(Bss, a, r, single)[::-1])
    best_gain, best_y = 0, None
    for gain, y in candidates:
        if not len(target) and (y.all() or not y.any()):
            continue
        if gain > best_gain:
            best_gain, best_y = gain, y
    if best_y is None:
        return 0, []
    return best_gain, [int(v) for v in S[best_y.astype(bool)]]


def combo(g, params=GAMMA_ONE, cfg=None):
    cfg = cfg or HeuristicConfig()
    check_graph(g)
    B = modularity_matrix(g, params)
    trace = [] if cfg.trace else None
    comms = {0: list(range(g.n))}
    version = {0: 0}
    next_id = 1
    cache = {}
    for _ in range(cfg.max_passes * g.n):
        best = None
        ids = sorted(comms)
        for s in ids:
            for t in ids + [None]:
                if t == s:
                    continue
                key = (s, t, version[s], version.get(t, 0) if t is not None else -1)
                if key not in cache:
                    cache[key] = best_shift(B, comms[s], comms[t] if t is not None else [])
                gain, subset = cache[key]
                if gain > 0 and (best is None or gain > best[0]):
                    best = (gain, s, t, subset)
        if best is None:
            break
        gain, s, t, subset = best
        if t is None:
            t = next_id
            next_id += 1
            comms[t] = []
            version[t] = 0
        moving = set(subset)
        comms[s] = [v for v in comms[s] if v not in moving]
        comms[t] = sorted(comms[t] + subset)
        version[s] += 1
        version[t] += 1
        if not comms[s]:
            del comms[s]
        if trace is not None:
            trace.append(f"shift {len(subset)} node(s) from {s} to {t} gain={gain}")
        cache = {k: v for k, v in cache.items() if k[0] in comms and (k[1] is None or k[1] in comms)}
    membership = [0] * g.n
    for c, nodes in comms.items():
        for v in nodes:
            membership[v] = c
    return make_result("combo", g, params, membership, trace=trace)
