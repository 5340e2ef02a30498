"""Exact Grover-iteration simulation with Tsallis coherence dynamics.

The package exposes four layers: validated search configurations (`core`),
Tsallis-entropy coherence quantifiers (`coherence`), an exact real-amplitude
statevector engine with a fast Walsh-Hadamard kernel (`engine`), closed-form
and asymptotic stage coherence (`analytic`), and the per-operator
production/depletion calculus with its turning point (`dynamics`).
"""

__version__ = "0.1.0"

from .core import (
    MAX_QUBITS,
    GroverConfig,
    TargetSet,
    TwoLevelState,
    config_from_json,
    config_to_json,
    expand_pattern,
    grover_angle,
    make_config,
    optimal_iterations,
    two_level_state,
)
from .coherence import (
    AlphaParam,
    c_alpha_mixed,
    c_alpha_pure,
    c_tilde_alpha,
    coherence_from_histogram,
    normalized_coherence,
    optimal_incoherent_state,
    relative_entropy_coherence,
    skew_info_coherence,
    tsallis_relative_entropy,
)
from .engine import (
    CapacityError,
    CapturePolicy,
    CoherenceSweep,
    Stage,
    StageRecord,
    Trajectory,
    apply_oracle,
    apply_phase_shift,
    coherence_sweep,
    fwht,
    grover_step,
    iter_stage_probs,
    run,
    success_probability,
    uniform_state,
)
from .analytic import (
    BlochTrack,
    CoherenceValue,
    SpectrumReport,
    bloch_track,
    c_alpha_HO_asymptotic,
    c_alpha_HO_exact,
    c_alpha_HP,
    c_alpha_max_asymptotic,
    c_alpha_psi_k_asymptotic,
    c_alpha_psi_k_exact,
    complementarity_residual,
    gamma_case,
    p_k,
    target_spectrum,
    true_max_coherence,
)
from .dynamics import (
    DeltaKind,
    DeltaSeries,
    IterationClassification,
    RelationResiduals,
    Tag,
    TurningPoint,
    classify,
    delta_between,
    delta_within,
    effective_gamma,
    probability_units_scale,
    relation_residual,
    turning_point,
)

__all__ = [name for name in dir() if not name.startswith("_")]
