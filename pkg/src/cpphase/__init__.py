"""Interference patterns, relative phases, and geometric phases for CP maps."""

from .channels import (
    Dilation,
    KrausChannel,
    amplitude_damping,
    apply,
    depolarizing,
    dilate,
    identity_channel,
    kraus_from_dilation,
)
from .geometry import (
    BlochLoop,
    PolarFactors,
    Su2Params,
    UnitaryPath,
    axis_rotation_path,
    depol_bitflip_patterns,
    depol_cyclic_patterns,
    equal_colatitude_triangle,
    gauge_shift,
    geodesic_polygon_path,
    geometric_phase_cyclic,
    kraus_path_decompose,
    polar_decompose,
    pt_correct,
    pt_residual,
    qubit_pattern_closed_form,
    slerp_loop_samples,
    solid_angle,
    su2_exp,
)
from .interferometry import (
    InterferencePattern,
    flip_operator,
    fringe,
    pattern,
    pattern_set,
    pattern_via_dilation,
    pattern_via_purification,
)
from .states import (
    PAULIS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    bloch_from_density,
    density_from_bloch,
    purify,
    spectral_gap,
    validate_density,
)

__all__ = [
    "BlochLoop",
    "Dilation",
    "InterferencePattern",
    "KrausChannel",
    "PAULIS",
    "PolarFactors",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "Su2Params",
    "UnitaryPath",
    "amplitude_damping",
    "apply",
    "axis_rotation_path",
    "bloch_from_density",
    "density_from_bloch",
    "depol_bitflip_patterns",
    "depol_cyclic_patterns",
    "depolarizing",
    "dilate",
    "equal_colatitude_triangle",
    "flip_operator",
    "fringe",
    "gauge_shift",
    "geodesic_polygon_path",
    "geometric_phase_cyclic",
    "identity_channel",
    "kraus_from_dilation",
    "kraus_path_decompose",
    "pattern",
    "pattern_set",
    "pattern_via_dilation",
    "pattern_via_purification",
    "polar_decompose",
    "pt_correct",
    "pt_residual",
    "purify",
    "qubit_pattern_closed_form",
    "slerp_loop_samples",
    "solid_angle",
    "spectral_gap",
    "su2_exp",
    "validate_density",
]
