"""Run heuristics against certified optima and collect one record per run.

Exact results are cached on disk, one JSON file per
``(graph fingerprint, gamma, mode)``::

    <cache_dir>/<fingerprint>-g<p>_<q>-<mode>.json

Each file holds the certificate, the budget it was solved under and every
optimal membership.  A cached OPTIMAL result is always reused; a cached
budget-limited result is reused only when the requested budget is no larger.
Files are written to a temporary name and renamed, so readers never see a
partial file.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from ..exact import Budget, Certificate, Mode, OptimaSet, Status, build_model, enumerate_all_optima
from ..graph import GAMMA_ONE, ModularityValue, modularity
from ..heuristics import EXTERNAL, resolve, run_heuristic
from ..partition import Partition, gop, max_ami_vs_optima

log = logging.getLogger(__name__)

OK = "OK"
NO_CERTIFICATE = "NO_CERTIFICATE"
FAILED = "FAILED"


@dataclass
class RunRecord:
    """One heuristic run on one network.

    ``q_numerator`` and ``q_star_numerator`` share ``q_denominator``
    (``4 m^2 q``), so a run is optimal exactly when the numerators match.
    ``gop`` and ``max_ami`` are None when no certified optimum exists; then
    ``gop_upper`` bounds GOP from above using the best known partition and
    ``q_bound_numerator`` carries the certified upper bound.
    """

    network: str
    algorithm: str
    group: str = ""
    seed: int = 0
    status: str = OK
    q_numerator: str = ""
    q_denominator: str = ""
    q: float | None = None
    k: int | None = None
    gop: float | None = None
    gop_upper: float | None = None
    max_ami: float | None = None
    multiplicity: int | None = None
    q_star_numerator: str = ""
    q_bound_numerator: str = ""
    exact_status: str = ""
    wall_ms: float | None = None
    error: str = ""

    @property
    def key(self):
        return self.network, self.algorithm

    @property
    def evaluated(self):
        return self.status == OK and self.gop is not None and self.max_ami is not None

    def q_value(self):
        if not self.q_numerator:
            return None
        return ModularityValue(int(self.q_numerator), int(self.q_denominator))


RECORD_FIELDS = [f.name for f in fields(RunRecord)]
_FLOAT_FIELDS = {"q", "gop", "gop_upper", "max_ami", "wall_ms"}
_INT_FIELDS = {"seed", "k", "multiplicity"}


def record_from_dict(d):
    """Inverse of ``asdict`` that also accepts CSV strings."""
    out = {}
    for name in RECORD_FIELDS:
        v = d.get(name)
        if name in _FLOAT_FIELDS:
            v = None if v in (None, "") else float(v)
        elif name in _INT_FIELDS:
            v = None if v in (None, "") else int(v)
        else:
            v = "" if v is None else str(v)
        out[name] = v
    if out["seed"] is None:
        out["seed"] = 0
    return RunRecord(**out)


# ---------------------------------------------------------------------------
# exact cache


def _covers(cached, wanted):
    # None means unlimited
    if wanted is None:
        return cached is None
    return cached is None or cached >= wanted


class ExactCache:
    def __init__(self, directory=None):
        self.directory = Path(directory) if directory else None

    def path(self, g, params, mode):
        return self.directory / f"{g.fingerprint()}-g{params.p}_{params.q}-{Mode(mode).value}.json"

    def load(self, g, params, mode, budget):
        if self.directory is None:
            return None
        path = self.path(g, params, mode)
        try:
            d = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            return None
        cert = Certificate.from_dict(d["certificate"])
        b = d.get("budget") or {}
        if cert.status is not Status.OPTIMAL:
            if not (_covers(b.get("time_limit"), budget.time_limit)
                    and _covers(b.get("node_limit"), budget.node_limit)):
                return None
        parts = tuple(Partition(tuple(m)) for m in d["optima"])
        return OptimaSet(ModularityValue(cert.best, cert.scale), parts, cert)

    def store(self, g, params, mode, budget, optima):
        if self.directory is None:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        d = {
            "fingerprint": g.fingerprint(),
            "gamma": str(params),
            "mode": Mode(mode).value,
            "budget": {"time_limit": budget.time_limit, "node_limit": budget.node_limit},
            "certificate": optima.certificate.to_dict(),
            "optima": [list(p.membership) for p in optima.partitions],
        }
        path = self.path(g, params, mode)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(d, fh)
        os.replace(tmp, path)


def exact_optima(g, params, mode, budget, cache):
    """Certified optima for ``g``, from the cache when possible.

    Returns ``(optima, cache_hit)``.
    """
    hit = cache.load(g, params, mode, budget)
    if hit is not None:
        return hit, True
    optima = enumerate_all_optima(build_model(g, params, mode), budget)
    cache.store(g, params, mode, budget, optima)
    return optima, False


# ---------------------------------------------------------------------------
# runs


def _fill(rec, g, params, part, optima):
    q = modularity(g, part, params)
    rec.q_numerator, rec.q_denominator = str(q.numerator), str(q.scale)
    rec.q, rec.k = float(q), part.k
    cert = optima.certificate
    rec.exact_status = cert.status.value
    rec.q_bound_numerator = str(cert.bound)
    if cert.status is Status.OPTIMAL:
        rec.multiplicity = optima.multiplicity
        rec.q_star_numerator = str(cert.best)
        rec.gop = gop(q, optima.q_star)
        rec.gop_upper = rec.gop
        rec.max_ami = max_ami_vs_optima(part, optima)
    else:
        rec.status = NO_CERTIFICATE
        # the true optimum is at least the better of the two known values
        rec.gop_upper = gop(q, max(q, optima.q_star))


def run_instance(inst, algorithms, params=GAMMA_ONE, mode=Mode.REDUCED, budget=None,
                 seed=0, cache_dir=None, config=None):
    """All records for one named graph; returns ``(records, cache_hit)``."""
    budget = budget or Budget()
    cache = ExactCache(cache_dir)
    g = inst.graph
    try:
        optima, hit = exact_optima(g, params, mode, budget, cache)
    except Exception as exc:  # noqa: BLE001 - a failed instance must not stop the run
        log.warning("exact solve failed on %s: %s", inst.name, exc)
        return [RunRecord(inst.name, a, inst.group, seed, FAILED, error=f"exact: {exc}")
                for a in algorithms], False
    records = []
    for name in algorithms:
        try:
            name = resolve(name)
        except KeyError:
            pass  # reported below as a failed run
        rec = RunRecord(inst.name, name, inst.group, seed)
        t0 = time.perf_counter()
        try:
            key = resolve(name)
            pfile = inst.partitions.get(key) if key in EXTERNAL else None
            res = run_heuristic(key, g, params, seed=seed, config=config, partition_file=pfile)
            _fill(rec, g, params, res.partition, optima)
        except Exception as exc:  # noqa: BLE001
            log.warning("%s failed on %s: %s", name, inst.name, exc)
            rec = RunRecord(inst.name, name, inst.group, seed, FAILED, error=_message(exc))
        rec.wall_ms = round((time.perf_counter() - t0) * 1000.0, 3)
        records.append(rec)
    return records, hit


def _message(exc):
    # KeyError wraps its message in quotes
    return str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)


def _worker(args):
    return run_instance(*args)


def run_benchmark(corpus, algorithms, params=GAMMA_ONE, mode=Mode.REDUCED, budget=None,
                  seed=0, cache_dir=None, jobs=1, config=None, failures=(), stats=None):
    """Records for every ``(network, algorithm)``, sorted by that key.

    ``corpus`` is a list of :class:`NamedGraph`; ``failures`` (from
    :func:`load_corpus`) become FAILED records.  When ``stats`` is a dict it
    receives ``exact_solved`` and ``exact_cached`` counts.
    """
    jobs_args = [(inst, tuple(algorithms), params, mode, budget, seed, cache_dir, config)
                 for inst in corpus]
    if jobs > 1 and len(jobs_args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker, jobs_args))
    else:
        results = [_worker(a) for a in jobs_args]
    records = [r for recs, _ in results for r in recs]
    for f in failures:
        records.extend(RunRecord(f.name, a, f.name, seed, FAILED, error=f"load: {f.reason}")
                       for a in algorithms)
    if stats is not None:
        stats["exact_cached"] = sum(1 for _, hit in results if hit)
        stats["exact_solved"] = len(results) - stats["exact_cached"]
    return sorted(records, key=lambda r: r.key)


def records_equal(a, b, ignore=("wall_ms",)):
    """Compare record lists on every field except timing."""
    strip = [{k: v for k, v in asdict(r).items() if k not in ignore} for r in a]
    other = [{k: v for k, v in asdict(r).items() if k not in ignore} for r in b]
    return strip == other
