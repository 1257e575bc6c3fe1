"""Frequency-domain mollification for the backward time-fractional diffusion problem."""

from .config import PipelineConfig, parse_config
from .errors import (
    BracketError,
    ConfigError,
    ConsistencyError,
    DomainError,
    IterationLimitError,
    NoiseConditionError,
)
from .experiments import (
    MCSummary,
    RatesReport,
    RunReport,
    add_noise,
    convergence_study,
    initial_condition,
    monte_carlo,
    run_example,
)
from .grid import (
    GridSpec,
    RealField,
    SpectralField,
    forward_ft,
    inverse_ft,
    l2_norm,
    make_grid,
    sobolev_norm,
)
from .mittag_leffler import (
    MLParams,
    PsiApprox,
    build_psi_approx,
    ml_e_gamma_1,
    ml_ratio,
    ml_reference,
    sup_fbd,
)
from .operators import (
    DiffusionModel,
    MollifierParams,
    forward_solve,
    mollify,
    regularized_backward,
    source_representer,
    spectral_cutoff_backward,
)
from .parameter_choice import (
    MorozovConfig,
    apriori_alpha,
    check_noise_condition,
    discrepancy,
    morozov_bisect,
    morozov_geometric,
)

__version__ = "0.1.0"
