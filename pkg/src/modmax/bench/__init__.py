"""Benchmark harness: corpus manifests, cached exact optima, records and reports."""

from .corpus import (
    CORPUS_ENV,
    CorpusManifest,
    InstanceSpec,
    LoadFailure,
    ManifestError,
    NamedGraph,
    builtin_graph,
    load_corpus,
    manifest_from_dict,
    read_manifest,
)
from .report import (
    REFERENCE_SUCCESS_RATES,
    AlgorithmSummary,
    averaged_points,
    emit_report,
    plot_scatter,
    read_records,
    scatter_points,
    summarize,
    write_records,
)
from .runner import ExactCache, RunRecord, exact_optima, records_equal, run_benchmark, run_instance

__all__ = [
    "CORPUS_ENV", "AlgorithmSummary", "CorpusManifest", "ExactCache", "InstanceSpec",
    "LoadFailure", "ManifestError", "NamedGraph", "REFERENCE_SUCCESS_RATES", "RunRecord",
    "averaged_points", "builtin_graph", "emit_report", "exact_optima", "load_corpus",
    "manifest_from_dict", "plot_scatter", "read_manifest", "read_records", "records_equal",
    "run_benchmark", "run_instance", "scatter_points", "summarize", "write_records",
]
