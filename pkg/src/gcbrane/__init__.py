"""gcbrane: exact-arithmetic tools for generalized complex branes."""

from .scalars import QI
from .jets import (
    JetContext,
    JetFunction,
    MixedTensor,
    Deformation,
    MCResidual,
    dbar,
    schouten_bracket,
    wedge,
    mc_residual,
    majorant_norm,
    vanishing_order,
    brane_compat_check,
)
from .homotopy import (
    pi_j,
    antiderivative_T,
    hol_projection_H,
    q_operator,
    stretch_s,
    p_operator,
)
from .errors import PreconditionError
from .realcalc import (
    RealVector,
    RealForm,
    JetMap,
    lie_bracket,
    form_wedge,
    exterior_d,
    contract,
    lie_derivative,
    pullback,
    pushforward_vector,
)
from .flows import (
    GeneralizedField,
    GeneralizedFlow,
    pairing,
    courant_bracket,
    flow,
    compose_flows,
    invert_flow,
    act_on_deformation,
    infinitesimal_action,
    field_from_parts,
    transverse_parts,
    graph_bracket_residuals,
)
from .normalizer import (
    mixed_order,
    homotopy_field,
    normalize_step,
    NormalizationParams,
    run_normalization,
    zoom,
    cotangent_scale,
    ScalingSchedule,
    BraneConnection,
    anchor_fields,
    structure_constants,
    split_brane_connection,
    gauge_flat_connection,
)

__version__ = "0.1.0"
