from .model import (
    FormulationError,
    InfeasibleError,
    IPModel,
    Mode,
    build_model,
    components_of,
    extract_partition,
    pair_index,
    separator,
)
from .oracle import VerificationReport, brute_force_optimum, verify_certificate
from .search import (
    Budget,
    Certificate,
    OptimaSet,
    Status,
    enumerate_all_optima,
    expand_isolated,
    solve_exact,
)

__all__ = [
    "Budget", "Certificate", "FormulationError", "IPModel", "InfeasibleError", "Mode",
    "OptimaSet", "Status", "VerificationReport", "brute_force_optimum", "build_model",
    "components_of", "enumerate_all_optima", "expand_isolated", "extract_partition",
    "pair_index", "separator", "solve_exact", "verify_certificate",
]
