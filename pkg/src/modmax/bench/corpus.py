"""Benchmark corpus manifests.

A manifest is a JSON document::

    {
      "gamma": "1",                      # rational text, default "1"
      "mode": "reduced",                 # exact formulation, "reduced" or "full"
      "budget": {"time_limit": 600, "node_limit": null},
      "seed": 0,                         # heuristic seed
      "algorithms": ["louvain", "combo"],  # optional default algorithm list
      "instances": [
        {"name": "karate", "builtin": "karate"},
        {"name": "dolphins", "path": "dolphins.txt", "n": 62, "m": 159},
        {"name": "er_01", "generator": "er", "n": 30, "m": 60, "seed": 1},
        {"name": "ba_01", "generator": "ba", "n": 30, "attach": 2, "seed": 1},
        {"name": "pdz", "path": "pdz.txt", "partitions": {"belief": "pdz.belief.tsv"}}
      ]
    }

Relative paths resolve against ``$MODMAX_CORPUS`` when set, else against the
manifest's directory.  ``builtin`` names the edge lists shipped with the
package.  Generated instances belong to group ``ER`` or ``BA`` (used by the
averaged report view); file instances form a group of their own unless a
``group`` key says otherwise.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..exact import Budget, Mode
from ..graph import (
    GAMMA_ONE,
    GraphError,
    ModularityParams,
    barabasi_albert,
    erdos_renyi,
    parse_edge_list,
    read_edge_list,
)

log = logging.getLogger(__name__)

CORPUS_ENV = "MODMAX_CORPUS"
BUILTIN = ("contiguous_usa", "florentine_families", "karate", "lesmis")


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    name: str
    path: str | None = None
    builtin: str | None = None
    generator: str | None = None
    n: int | None = None
    m: int | None = None
    attach: int | None = None
    seed: int | None = None
    group: str | None = None
    partitions: dict = field(default_factory=dict)

    @property
    def source(self):
        if self.builtin:
            return f"builtin:{self.builtin}"
        if self.generator:
            extra = f"m={self.m}" if self.generator == "er" else f"attach={self.attach}"
            return f"{self.generator}:n={self.n},{extra},seed={self.seed}"
        return self.path


@dataclass(frozen=True)
class CorpusManifest:
    instances: tuple
    params: ModularityParams = GAMMA_ONE
    mode: Mode = Mode.REDUCED
    budget: Budget = Budget()
    seed: int = 0
    algorithms: tuple = ()
    base_dir: Path | None = None

    def __post_init__(self):
        seen = set()
        for spec in self.instances:
            if spec.name in seen:
                raise ManifestError(f"duplicate instance name {spec.name!r}")
            seen.add(spec.name)


@dataclass
class NamedGraph:
    name: str
    graph: object
    source: str
    group: str
    seed: int | None = None
    partitions: dict = field(default_factory=dict)


@dataclass
class LoadFailure:
    name: str
    reason: str


def _instance(d):
    if not isinstance(d, dict) or "name" not in d:
        raise ManifestError(f"instance entry needs a name: {d!r}")
    kinds = [k for k in ("path", "builtin", "generator") if d.get(k) is not None]
    if len(kinds) != 1:
        raise ManifestError(f"instance {d['name']!r} needs exactly one of path, builtin, generator")
    known = {f for f in InstanceSpec.__dataclass_fields__}
    unknown = set(d) - known
    if unknown:
        raise ManifestError(f"instance {d['name']!r} has unknown keys {sorted(unknown)}")
    return InstanceSpec(**{**d, "partitions": dict(d.get("partitions") or {})})


def manifest_from_dict(d, base_dir=None):
    try:
        params = ModularityParams.parse(d.get("gamma", "1"))
        mode = Mode(d.get("mode", "reduced"))
    except (GraphError, ValueError) as exc:
        raise ManifestError(str(exc)) from exc
    b = d.get("budget") or {}
    budget = Budget(b.get("time_limit"), b.get("node_limit"))
    instances = tuple(_instance(x) for x in d.get("instances", []))
    return CorpusManifest(instances, params, mode, budget, int(d.get("seed", 0)),
                          tuple(d.get("algorithms", ())), Path(base_dir) if base_dir else None)


def read_manifest(path):
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return manifest_from_dict(d, base_dir=path.parent)


def corpus_root(manifest):
    env = os.environ.get(CORPUS_ENV)
    if env:
        return Path(env)
    return manifest.base_dir or Path.cwd()


def resolve_path(manifest, path):
    p = Path(path)
    return p if p.is_absolute() else corpus_root(manifest) / p


def builtin_graph(name):
    if name not in BUILTIN:
        raise GraphError(f"no builtin graph {name!r}; known: {', '.join(BUILTIN)}")
    text = resources.files("modmax").joinpath("data", f"{name}.txt").read_text()
    return parse_edge_list(text)


def _materialize(manifest, spec):
    if spec.builtin:
        return builtin_graph(spec.builtin), spec.group or spec.name
    if spec.generator:
        if spec.seed is None:
            raise GraphError(f"generator instance {spec.name!r} needs a seed")
        if spec.generator == "er":
            return erdos_renyi(spec.n, spec.m, spec.seed), spec.group or "ER"
        if spec.generator == "ba":
            return barabasi_albert(spec.n, spec.attach, spec.seed), spec.group or "BA"
        raise GraphError(f"unknown generator {spec.generator!r}")
    return read_edge_list(resolve_path(manifest, spec.path)), spec.group or spec.name


def load_corpus(manifest):
    """Materialize every instance; failures are returned, not raised.

    Returns ``(graphs, failures)``.  An unreadable file or a bad generator
    parameter skips that instance with a logged reason.
    """
    graphs, failures = [], []
    for spec in manifest.instances:
        try:
            g, group = _materialize(manifest, spec)
            for attr, want in (("n", spec.n), ("m", spec.m)):
                if want is not None and spec.generator is None and getattr(g, attr) != want:
                    raise GraphError(f"expected {attr}={want}, found {getattr(g, attr)}")
        except (OSError, GraphError, TypeError, ValueError) as exc:
            log.warning("skipping %s: %s", spec.name, exc)
            failures.append(LoadFailure(spec.name, str(exc)))
            continue
        parts = {k: str(resolve_path(manifest, v)) for k, v in spec.partitions.items()}
        graphs.append(NamedGraph(spec.name, g, spec.source, group, spec.seed, parts))
    return graphs, failures
