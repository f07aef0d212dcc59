"""Robust SINR balancing for multicell downlink beamforming.

Worst-case weighted SINR balancing under per-BS power budgets, with three
designs sharing one bisection engine: the perfect-CSI conic formulation,
an S-procedure SDP relaxation for ellipsoidal channel errors, and a
conservative SOCP counterpart built from dual norms that trades a design
radius against outage. Zero-forcing is included as a baseline, plus the
Monte-Carlo and sweep machinery used to compare them.
"""

from .balancing import (
    BisectionConfig,
    BisectionResult,
    MethodResult,
    bisect,
    c_factor,
    feasibility_nonrobust,
    solve_nonrobust,
)
from .baselines import ZfInfeasibleError, null_space_basis, zf_balance
from .config import ConfigError, RunConfig, load_config
from .conic import Aff, CAff, ConicProgram, SolveResult
from .experiments import (
    CSV_COLUMNS,
    LayoutConfig,
    SweepSpec,
    benchmark_runtime,
    estimate_pe,
    generate_channels,
    run_sweep,
    write_csv,
)
from .model import (
    BeamformerSet,
    ChannelSet,
    NetworkConfig,
    balanced_objective,
    db2lin,
    lin2db,
    per_bs_power,
    sinr,
)
from .robust_sdp import extract_beamformer, feasibility_sdp, solve_sdp
from .robust_socp import feasibility_socp, solve_socp, worst_case_margin_bruteforce
from .uncertainty import (
    NORM_KINDS,
    UncertaintySet,
    UnsupportedNormError,
    UnsupportedUncertaintyError,
    apply_error,
    dual_norm,
    sample_uniform,
)

__version__ = "0.1.0"

__all__ = [
    "Aff",
    "BeamformerSet",
    "BisectionConfig",
    "BisectionResult",
    "CAff",
    "CSV_COLUMNS",
    "ChannelSet",
    "ConfigError",
    "ConicProgram",
    "LayoutConfig",
    "MethodResult",
    "NORM_KINDS",
    "NetworkConfig",
    "RunConfig",
    "SolveResult",
    "SweepSpec",
    "UncertaintySet",
    "UnsupportedNormError",
    "UnsupportedUncertaintyError",
    "ZfInfeasibleError",
    "apply_error",
    "balanced_objective",
    "benchmark_runtime",
    "bisect",
    "c_factor",
    "db2lin",
    "dual_norm",
    "estimate_pe",
    "extract_beamformer",
    "feasibility_nonrobust",
    "feasibility_sdp",
    "feasibility_socp",
    "generate_channels",
    "lin2db",
    "load_config",
    "null_space_basis",
    "per_bs_power",
    "run_sweep",
    "sample_uniform",
    "sinr",
    "solve_nonrobust",
    "solve_sdp",
    "solve_socp",
    "worst_case_margin_bruteforce",
    "write_csv",
    "zf_balance",
    "__version__",
]
