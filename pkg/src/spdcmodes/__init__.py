"""Laguerre-Gauss mode correlations of downconverted photon pairs.

Overlap amplitudes (closed form and quadrature), radial and OAM correlation
matrices, phase-mask synthesis, fiber-coupled detection and radial-index
two-photon tomography.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConvergenceFailure,
    DomainError,
    GridMismatchError,
    IncompleteData,
    NonConvergence,
    ResolutionError,
    SpdcModesError,
)
from .modes import ModeIndex, ModeSpec, PolarPoint, hygg_field, lg_field, lg_field_xy  # noqa: E402
from .overlap import (  # noqa: E402
    BiphotonAmplitude,
    PumpSpec,
    amplitude,
    overlap_closed_form,
    overlap_quadrature,
    paired_modes,
)
from .correlations import (  # noqa: E402
    CorrelationMatrix,
    oam_correlation_matrix_hygg,
    oam_correlation_matrix_lg,
    p_correlation_matrix,
)
from .holograms import PhaseMask, TargetField, simulate_first_order, synthesize_mask  # noqa: E402
from .detection import (  # noqa: E402
    CrosstalkMatrix,
    FiberSpec,
    Grid,
    NoiseModel,
    Projector,
    SampledField,
    build_crosstalk_matrix,
    coincidence_rate,
    efficiency_correct,
    single_rate,
)
from .tomography import (  # noqa: E402
    DensityMatrix,
    MeasurementRecord,
    PhotonState,
    ProjectorPair,
    build_measurement_set,
    fidelity,
    reconstruct,
    theory_state,
)
