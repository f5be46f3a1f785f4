"""Simulate how a phononic bandgap lengthens TLS lifetimes and protects superconducting qubits."""

__version__ = "0.1.0"

from .dynamics import (  # noqa: E402
    ArrowheadGenerator,
    ExcitationState,
    QubitTrace,
    build_generator,
    fit_qubit_t1,
    lindblad_oracle,
    propagate,
    quality_factor,
)
from .ensemble import (  # noqa: E402
    EnsembleConfig,
    TlsEnsemble,
    TlsParams,
    bulk_validation_config,
    expected_tls_count,
    read_ensemble_csv,
    sample_ensemble,
    write_ensemble_csv,
)
from .errors import *  # noqa: E402,F401,F403
from .fitting import DecayFit, fit_decay  # noqa: E402
from .gap import (  # noqa: E402
    ANGULAR_WEIGHTS,
    AngularAverage,
    DecayTrace,
    GapSpec,
    SpectralDensity,
    SuppressionCurve,
    angular_average,
    angular_depth,
    effective_tls_t1,
    gapped_decay,
    isotropic_weight,
    load_suppression_curve,
    sine_weight,
    t1_enhancement,
    volterra_oracle,
)
from .steady_state import (  # noqa: E402
    LossModel,
    default_field_ratios,
    loss_tangent,
    power_sweep,
    quality_factor_from_loss,
    rescale_for_gap,
    write_power_sweep_csv,
)
