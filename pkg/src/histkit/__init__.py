"""Finite-dimensional event histories, consistency repair and Bell-type correlations."""
__version__ = "0.1.0"

from .errors import ConvergenceError, DimensionError, HistkitError, PreconditionError, ValidationError
from .operators import (
    State,
    SpectralDecomposition,
    eig_hermitian,
    hermitian,
    partial_trace,
    projection,
    spectral_projection,
    tensor,
    uncertainty_check,
)
from .histories import (
    History,
    HistoryFamily,
    OutcomeFamily,
    conditional_ambiguity,
    conditional_probability_binary,
    evidence,
    frequency,
    frequency_distribution,
    interference,
    is_delta_consistent,
)
from .repair import RepairReport, cn_constants, repair_history, round_to_projection
from .bell import (
    CorrelationMatrix,
    facet_report,
    is_classical_2x2,
    is_classical_general,
    optimize_chsh_axes,
    tsirelson_rescale_check,
)
from .models import (
    DoubleSlitModel,
    LocalChannel,
    SingletSystem,
    double_slit_frequencies,
    evidence_curve,
    marginal_isospectrality,
    no_signaling_check,
    singlet_frequencies,
)
