"""Deterministic lattice traffic-flow simulation and exact analysis."""

from ._kernels import BACKEND
from .core import (
    PADDED,
    RING,
    Configuration,
    WindowSpec,
    dual,
    metric_distance,
    padded,
    pattern_density,
    ring,
    ring_pattern_density,
    window_density,
)
from .dynamics import (
    BACKWARD,
    FORWARD,
    INFINITE,
    FlowParams,
    FluxReport,
    evolve,
    flux_pattern_sum,
    flux_window,
    full_ring_flux,
    fundamental_flux,
    local_velocity,
    run_to_flux,
    step,
    step_fast,
    step_general,
    step_multilane,
    step_smart,
    step_superfast,
    velocity_field,
)
from .clusters import (
    CLEAN,
    ClusterSpan,
    MinimalWordRecord,
    find_jammed_clusters,
    free_violation_radius,
    gamma_step,
    gamma_step_fast,
    is_dual_free,
    is_free,
    minimal_index,
    minimal_word_catalog,
    minimal_words,
    predict_lifetime,
    regular_membership,
    simulated_lifetime,
)
from .measures import (
    CylinderWeights,
    SampleSpec,
    bernoulli_config,
    exact_count_ring,
    product_cylinder,
    product_weight,
    pushforward,
    pushforward_iterated,
    splitmix64,
    translation_invariance_check,
)
from .sawtooth import (
    LaneBundle,
    anchor_shift_check,
    commutation_check,
    lane_balance,
    merge,
    redirect,
    redirection_report,
)
from .substitution import (
    ONE,
    FastWord,
    decode,
    encode,
    fast_lifetime,
    fast_minimal_index,
    ind,
    minimal_fast_catalog,
    normalize,
    step_substitution,
    step_tilde,
)
from .tracer import ALONG, AGAINST, TracerState, tau, tracer_run, tracer_step

__version__ = "0.1.0"
