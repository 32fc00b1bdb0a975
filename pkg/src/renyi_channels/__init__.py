"""Renyi information measures of finite-dimensional quantum channels.

Everything is in bits.  Density operators are plain complex ndarrays
validated on entry; channels are immutable ``CPMap`` values.
"""
from .channel_info import (
    ChannelMIReport,
    cb_norm,
    ea_capacity,
    minimax_gap,
    renyi_channel_mi,
    sandwiched_channel_mi,
)
from .channels import (
    CPMap,
    amplitude_damping,
    apply,
    channel_from_spec,
    choi_of,
    dephasing,
    depolarizing,
    erasure,
    identity,
    pauli_channel,
    random_channel,
    random_cp_map,
    tensor,
)
from .converse import (
    CodeSimResult,
    ExponentPoint,
    exponent_curve,
    simulate_superdense,
    strong_converse_exponent,
    success_prob_bound,
    weak_converse_epsilon,
)
from .divergences import (
    binary_divergence,
    mutual_information,
    relative_entropy,
    renyi_mi_explicit,
    sandwiched_mi_state,
    sandwiched_renyi,
    sibson_sigma_star,
    traditional_renyi,
)
from .linalg import (
    ValidationError,
    eig_hermitian,
    fractional_power_psd,
    kron,
    partial_trace,
    schatten_norm,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelMIReport",
    "cb_norm",
    "ea_capacity",
    "minimax_gap",
    "renyi_channel_mi",
    "sandwiched_channel_mi",
    "CPMap",
    "amplitude_damping",
    "apply",
    "channel_from_spec",
    "choi_of",
    "dephasing",
    "depolarizing",
    "erasure",
    "identity",
    "pauli_channel",
    "random_channel",
    "random_cp_map",
    "tensor",
    "CodeSimResult",
    "ExponentPoint",
    "exponent_curve",
    "simulate_superdense",
    "strong_converse_exponent",
    "success_prob_bound",
    "weak_converse_epsilon",
    "binary_divergence",
    "mutual_information",
    "relative_entropy",
    "renyi_mi_explicit",
    "sandwiched_mi_state",
    "sandwiched_renyi",
    "sibson_sigma_star",
    "traditional_renyi",
    "ValidationError",
    "eig_hermitian",
    "fractional_power_psd",
    "kron",
    "partial_trace",
    "schatten_norm",
]
