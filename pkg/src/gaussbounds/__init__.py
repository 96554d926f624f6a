"""
Entropy bounds for one-mode bosonic Gaussian channels.

Closed-form output-entropy bounds, a truncated Fock-space simulator for the
attenuator, amplifier, phase-contravariant and additive-noise channels, rate
regions derived from the bounds, and a Monte Carlo harness that checks the
bounds against simulated outputs.
"""

from .bounds import (
    BoundKind,
    BoundValue,
    DegenerateParameterError,
    best_known_bound,
    bound_set,
    epi_bound,
    epi_f_lambda,
    epi_f_lambda_inverse,
    f_lambda,
    f_lambda_inverse,
    gaussian_conjecture_value,
    new_bound,
    new_bound_domain,
)
from .channels import (
    ChannelKind,
    ChannelSpec,
    DilationPlan,
    ResourceError,
    TruncationError,
    apply_channel,
    apply_tensor_power,
    default_plan,
    is_entanglement_breaking,
)
from .fock import (
    DimensionError,
    FockState,
    NotAStateError,
    g,
    g_inverse,
    partial_trace,
    tensor,
    thermal_state,
    von_neumann_entropy,
)
from .regions import (
    CurveKind,
    RegionCurve,
    broadcast_achievable,
    broadcast_outer,
    broadcast_time_sharing,
    project_cq_plane,
)

__version__ = "0.1.0"
