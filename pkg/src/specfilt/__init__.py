"""Online prediction of linear dynamical systems with spectral filters.

The package is organised by capability:

* ``filters``: Hankel matrices, eigendecomposition, filter banks.
* ``lds``: eigenvalue regions, random diagonal systems, simulation, inputs.
* ``learner``: online gradient-descent predictors over filter features.
* ``regret``: fixed-comparator least squares and asymmetric regret.
* ``sweep``: multi-cell experiments with aggregation and manifests.
* ``cli``: command-line entry point wired over the above.
"""

from .filters import (
    BANK_H,
    BANK_N,
    BANK_TENSOR,
    FilterBank,
    build_filter_bank,
    build_hankel,
    build_tensor_bank,
    eig_sym_topk,
    impulse_vector,
    load_bank,
    save_bank,
    tensor_product,
)

__version__ = "0.1.0"

# sweep imports __version__ from here, so these must come after it is set
from .lds import (  # noqa: E402
    LdsSystem,
    gen_inputs,
    load_system,
    make_random_system,
    region_a,
    region_b,
    region_bounds,
    sample_region,
    save_system,
    simulate,
)
from .learner import (  # noqa: E402
    PredictorSpec,
    RunRecord,
    build_predictor_spec,
    compute_features,
    fixed_loss_curve,
    run_online,
)
from .records import load_run_dir, save_run_dir  # noqa: E402
from .regret import (  # noqa: E402
    ComparatorResult,
    RegretReport,
    asymmetric_regret,
    ogd_regret_bound,
    solve_comparator,
)
from .sweep import (  # noqa: E402
    ExperimentConfig,
    PRESETS,
    SweepResult,
    final_window_mean,
    run_sweep,
    smooth_curve,
)

__all__ = [
    "BANK_H",
    "BANK_N",
    "BANK_TENSOR",
    "ComparatorResult",
    "ExperimentConfig",
    "FilterBank",
    "LdsSystem",
    "PRESETS",
    "PredictorSpec",
    "RegretReport",
    "RunRecord",
    "SweepResult",
    "asymmetric_regret",
    "build_filter_bank",
    "build_hankel",
    "build_predictor_spec",
    "build_tensor_bank",
    "compute_features",
    "eig_sym_topk",
    "final_window_mean",
    "fixed_loss_curve",
    "gen_inputs",
    "impulse_vector",
    "load_bank",
    "load_run_dir",
    "load_system",
    "make_random_system",
    "ogd_regret_bound",
    "region_a",
    "region_b",
    "region_bounds",
    "run_online",
    "run_sweep",
    "sample_region",
    "save_bank",
    "save_run_dir",
    "save_system",
    "simulate",
    "smooth_curve",
    "solve_comparator",
    "tensor_product",
    "__version__",
]
