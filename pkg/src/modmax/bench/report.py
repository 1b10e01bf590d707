"""Summary statistics and report files for benchmark records.

Output directory layout::

    records.csv, records.jsonl   one row per run (timings live in timings.json)
    summary.json                 per-algorithm table, published reference rates
    timings.json                 wall-clock data and creation time
    scatter_<algorithm>.svg      GOP against max-AMI, one point per network
    scatter_<algorithm>_averaged.svg   same, ER and BA instances averaged

Everything except ``timings.json`` is byte-identical across reruns.
"""

from __future__ import annotations

import csv
import datetime
import json
import statistics
from dataclasses import asdict, dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .runner import RECORD_FIELDS, record_from_dict  # noqa: E402

# Share of an 80-network corpus on which each heuristic returned an optimal
# partition, as published.  Shipped for comparison only; not produced here.
REFERENCE_SUCCESS_RATES = {
    "combo": 0.55,
    "leicht_newman": 0.362,
    "leiden": 0.362,
    "louvain": 0.187,
    "cnm": 0.05,
    "edmot": 0.025,
    "paris": 0.012,
    "belief": 0.0,
}
REFERENCE_LABEL = "published reference success rates (80-network corpus); not computed by this run"

AVERAGED_GROUPS = ("ER", "BA")
_TIMING_FIELDS = ("wall_ms",)


@dataclass
class AlgorithmSummary:
    algorithm: str
    runs: int
    evaluated: int
    failed: int
    success_rate: float | None
    mean_gop: float | None
    median_gop: float | None
    mean_ami: float | None
    median_ami: float | None
    above_diagonal: float | None
    suboptimal: int
    suboptimal_above_diagonal: float | None


def _mean(xs):
    return statistics.fmean(xs) if xs else None


def _median(xs):
    return statistics.median(xs) if xs else None


def _share(flags):
    return sum(flags) / len(flags) if flags else None


def summarize(records):
    """Per-algorithm table keyed by algorithm name, in sorted order.

    Rates and averages use only records with a certified optimum.  A record is
    above the diagonal when GOP > max-AMI.
    """
    by_alg = {}
    for r in records:
        by_alg.setdefault(r.algorithm, []).append(r)
    table = {}
    for alg in sorted(by_alg):
        recs = by_alg[alg]
        ev = [r for r in recs if r.evaluated]
        sub = [r for r in ev if r.gop < 1.0]
        table[alg] = AlgorithmSummary(
            algorithm=alg,
            runs=len(recs),
            evaluated=len(ev),
            failed=sum(r.status == "FAILED" for r in recs),
            success_rate=_share([r.gop == 1.0 for r in ev]),
            mean_gop=_mean([r.gop for r in ev]),
            median_gop=_median([r.gop for r in ev]),
            mean_ami=_mean([r.max_ami for r in ev]),
            median_ami=_median([r.max_ami for r in ev]),
            above_diagonal=_share([r.gop > r.max_ami for r in ev]),
            suboptimal=len(sub),
            suboptimal_above_diagonal=_share([r.gop > r.max_ami for r in sub]),
        )
    return table


def summary_dict(summary, extra=None):
    d = {
        "algorithms": {a: asdict(s) for a, s in summary.items()},
        "reference": {"label": REFERENCE_LABEL, "success_rates": REFERENCE_SUCCESS_RATES},
    }
    if extra:
        d.update(extra)
    return d


# ---------------------------------------------------------------------------
# record files


def write_records(records, out_dir):
    out_dir = Path(out_dir)
    cols = [c for c in RECORD_FIELDS if c not in _TIMING_FIELDS]
    with open(out_dir / "records.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in records:
            d = asdict(r)
            w.writerow({c: "" if d[c] is None else (repr(d[c]) if isinstance(d[c], float) else d[c])
                        for c in cols})
    with open(out_dir / "records.jsonl", "w") as fh:
        for r in records:
            d = {c: v for c, v in asdict(r).items() if c not in _TIMING_FIELDS}
            fh.write(json.dumps(d, sort_keys=True) + "\n")


def read_records(path):
    """Records from a ``.jsonl``/``.csv`` file or a report directory.

    Timings from a sibling ``timings.json`` are merged back when present.
    """
    path = Path(path)
    if path.is_dir():
        path = path / "records.jsonl" if (path / "records.jsonl").exists() else path / "records.csv"
    if path.suffix == ".csv":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    else:
        rows = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
    records = [record_from_dict(row) for row in rows]
    timings = path.parent / "timings.json"
    if timings.exists():
        wall = {(t["network"], t["algorithm"]): t["wall_ms"]
                for t in json.loads(timings.read_text()).get("runs", [])}
        for r in records:
            r.wall_ms = wall.get(r.key, r.wall_ms)
    return records


# ---------------------------------------------------------------------------
# scatter plots


def averaged_points(records):
    """ER and BA records collapsed to one mean point per group."""
    points, pooled = [], {}
    for r in records:
        if not r.evaluated:
            continue
        if r.group in AVERAGED_GROUPS:
            pooled.setdefault(r.group, []).append(r)
        else:
            points.append((r.network, r.max_ami, r.gop))
    for grp in sorted(pooled):
        rs = pooled[grp]
        points.append((grp, _mean([r.max_ami for r in rs]), _mean([r.gop for r in rs])))
    return points


def _scatter(points, title, path):
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    lo = min([0.0] + [x for _, x, _ in points])
    ax.plot([lo, 1.0], [lo, 1.0], color="0.5", lw=0.8, ls="--", gid="diagonal")
    if points:
        xs = [x for _, x, _ in points]
        ys = [y for _, _, y in points]
        ax.scatter(xs, ys, s=14, color="C0", gid="points")
        for name, x, y in points:
            ax.annotate(name[:3], (x, y), xytext=(2, 2), textcoords="offset points", fontsize=6)
    ax.set_xlim(lo - 0.02, 1.02)
    ax.set_ylim(min(lo, 0.0) - 0.02, 1.02)
    ax.set_xlabel("max AMI vs optimal partitions")
    ax.set_ylabel("GOP")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def scatter_points(records, algorithm, averaged=False):
    """``(label, max_ami, gop)`` triples plotted for one algorithm."""
    recs = [r for r in records if r.algorithm == algorithm]
    if averaged:
        return averaged_points(recs)
    return [(r.network, r.max_ami, r.gop) for r in recs if r.evaluated]


def plot_scatter(records, algorithm, out_dir, averaged=False):
    points = scatter_points(records, algorithm, averaged)
    suffix = "_averaged" if averaged else ""
    path = Path(out_dir) / f"scatter_{algorithm}{suffix}.svg"
    with plt.rc_context({"svg.hashsalt": "modmax", "svg.fonttype": "none"}):
        _scatter(points, algorithm, path)
    return path


def emit_report(records, summary, out_dir, extra=None):
    """Write record files, summary JSON, timings sidecar and SVG scatters.

    Returns the list of written paths.  An empty record set still yields
    well-formed files (a header-only CSV, an empty JSONL, an empty summary).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda r: r.key)
    write_records(records, out_dir)
    written = [out_dir / "records.csv", out_dir / "records.jsonl"]
    (out_dir / "summary.json").write_text(
        json.dumps(summary_dict(summary, extra), indent=2, sort_keys=True) + "\n")
    timings = {
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "runs": [{"network": r.network, "algorithm": r.algorithm, "wall_ms": r.wall_ms}
                 for r in records],
    }
    (out_dir / "timings.json").write_text(json.dumps(timings, indent=2) + "\n")
    written += [out_dir / "summary.json", out_dir / "timings.json"]
    for alg in sorted({r.algorithm for r in records}):
        written.append(plot_scatter(records, alg, out_dir))
        written.append(plot_scatter(records, alg, out_dir, averaged=True))
    return written
