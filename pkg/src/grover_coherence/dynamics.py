"""Per-operator coherence production and depletion across iterations.

The delta calculus compares the alpha-th powers C_alpha^alpha of stage
coherences, both between consecutive iterations (for the composite iteration
and each Hadamard layer) and within one iteration (each layer against the
state it acts on).  "Probability units" rescale the powered deltas by
N^(alpha-1)/(alpha-1)^alpha, the natural vertical axis for which the
between-iteration deltas reduce to success-probability differences in the
sparse-target regime; they are defined for alpha in (1,2] only.

The diagonal operators (oracle and conditional phase shift) leave the
probability multiset bit-identical, so their per-iteration coherence deltas
are exactly zero; the two Hadamard layers trade the production and depletion
roles at a turning point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .analytic import gamma_case, target_spectrum
from .core import GroverConfig, grover_angle
from .coherence import _as_alpha
from .engine import CoherenceSweep, Stage, coherence_sweep

SIGN_DEADBAND = 1e-12


class DeltaKind(str, Enum):
    G = "G"
    HO_BETWEEN = "HO_between"
    HP_BETWEEN = "HP_between"
    HO_WITHIN = "HO_within"
    HP_WITHIN = "HP_within"


class Normalization(str, Enum):
    RAW = "raw"
    PROBABILITY_UNITS = "probability_units"


class Tag(str, Enum):
    PRODUCES = "produces"
    DEPLETES = "depletes"
    UNCHANGED = "unchanged"


def probability_units_scale(N: int, alpha) -> float:
    """Normalization N^(alpha-1)/(alpha-1)^alpha for powered coherence deltas."""
    alpha = _as_alpha(alpha)
    if alpha.is_unity_limit or alpha.value <= 1.0:
        raise ValueError("probability units are defined for alpha in (1, 2] only")
    a = alpha.value
    return N ** (a - 1.0) / (a - 1.0) ** a


@dataclass(frozen=True)
class DeltaSeries:
    """Per-iteration powered-coherence differences, indexed from ``k0``."""

    kind: DeltaKind
    alpha: float
    k0: int
    values: np.ndarray
    normalization: Normalization = Normalization.RAW

    def to_probability_units(self, N: int) -> "DeltaSeries":
        if self.normalization == Normalization.PROBABILITY_UNITS:
            return self
        scale = probability_units_scale(N, self.alpha)
        return DeltaSeries(
            self.kind, self.alpha, self.k0, self.values / scale, Normalization.PROBABILITY_UNITS
        )


def _powered(sweep: CoherenceSweep, stage: Stage, alpha) -> np.ndarray:
    alpha = _as_alpha(alpha)
    c = sweep.coherence(stage, alpha.value)
    if alpha.is_unity_limit:
        return c  # the powered quantity degenerates to C itself at alpha = 1
    return c ** alpha.value


def delta_between(sweep: CoherenceSweep, alpha, which: str) -> DeltaSeries:
    """Powered-coherence change between consecutive iterations.

    ``which`` selects the composite iteration ("G"), the first Hadamard layer
    ("HO"), or the second ("HP").  The "G" series has one entry per completed
    iteration; the layer series are one shorter because they need the layer
    snapshot of the following iteration.
    """
    alpha = _as_alpha(alpha)
    if which == "G":
        psi = _powered(sweep, Stage.PSI, alpha)
        return DeltaSeries(DeltaKind.G, alpha.value, 0, np.diff(psi))
    if which == "HO":
        ho = _powered(sweep, Stage.HADAMARD_O, alpha)
        return DeltaSeries(DeltaKind.HO_BETWEEN, alpha.value, 0, np.diff(ho))
    if which == "HP":
        hp = _powered(sweep, Stage.HADAMARD_P, alpha)
        return DeltaSeries(DeltaKind.HP_BETWEEN, alpha.value, 0, np.diff(hp))
    raise ValueError(f"which must be G|HO|HP, got {which!r}")


def delta_within(sweep: CoherenceSweep, alpha, which: str) -> DeltaSeries:
    """Powered-coherence change across one layer inside a single iteration.

    "HO" compares the first-Hadamard state against the entering state; "HP"
    compares the iteration's final state against the first-Hadamard state.
    The diagonal operators in between contribute exactly zero.
    """
    alpha = _as_alpha(alpha)
    psi = _powered(sweep, Stage.PSI, alpha)
    ho = _powered(sweep, Stage.HADAMARD_O, alpha)
    if which == "HO":
        return DeltaSeries(DeltaKind.HO_WITHIN, alpha.value, 0, ho - psi[:-1])
    if which == "HP":
        hp = _powered(sweep, Stage.HADAMARD_P, alpha)
        return DeltaSeries(DeltaKind.HP_WITHIN, alpha.value, 0, hp - ho)
    raise ValueError(f"which must be HO|HP, got {which!r}")


def _first_sign_change(values: np.ndarray) -> int | None:
    """Index where the series first leaves the sign of its initial entry.

    An exact zero counts as the change point; ties therefore resolve to the
    smaller index.  Returns None when no change occurs (including a series
    that starts at the opposite sign already).
    """
    v0 = values[0]
    if v0 == 0.0:
        return 0
    for k in range(1, len(values)):
        v = values[k]
        if v == 0.0 or (v > 0) != (v0 > 0):
            return k
    return None


@dataclass(frozen=True)
class TurningPoint:
    """Closed-form and measured iteration where the first layer flips roles."""

    alpha: float
    gamma: float
    k_formula: int
    k_empirical: int | None
    k_empirical_hp: int | None  # the second layer's own flip, reported not asserted
    agreement: int | None


def effective_gamma(config: GroverConfig) -> float:
    """Tabulated weight for t <= 4, else the spectrum's first-moment value."""
    if config.t <= 4:
        return gamma_case(config.t, product=config.targets.is_subcube)
    return target_spectrum(config).gamma_effective_abs()


def turning_point(
    config: GroverConfig,
    alpha,
    sweep: CoherenceSweep | None = None,
    gamma: float | None = None,
    k_max: int | None = None,
) -> TurningPoint:
    """Locate the role-reversal iteration, by formula and by sign-change scan.

    The closed form is round(arcsin(sqrt(1/(gamma+1))) / (2 theta)); the
    empirical value is the first sign change of the within-iteration delta of
    the first Hadamard layer, computed from an exact simulation.
    """
    alpha = _as_alpha(alpha)
    if alpha.is_unity_limit or alpha.value <= 1.0:
        raise ValueError("the turning-point laws are stated for alpha in (1, 2]")
    if gamma is None:
        gamma = effective_gamma(config)
    theta = grover_angle(config)
    k_formula = int(math.floor(math.asin(math.sqrt(1.0 / (gamma + 1.0))) / (2.0 * theta) + 0.5))
    if sweep is None:
        sweep = coherence_sweep(config, k_max, alphas=[alpha.value])
    ho = delta_within(sweep, alpha, "HO").values
    hp = delta_within(sweep, alpha, "HP").values
    k_emp = _first_sign_change(ho)
    k_emp_hp = _first_sign_change(hp)
    return TurningPoint(
        alpha=alpha.value,
        gamma=gamma,
        k_formula=k_formula,
        k_empirical=k_emp,
        k_empirical_hp=k_emp_hp,
        agreement=None if k_emp is None else abs(k_formula - k_emp),
    )


@dataclass(frozen=True)
class RelationResiduals:
    """Probability-units residuals of the between-iteration delta identities.

    ``g_minus_shifted_hp[k-k0]`` is Delta(G at k) - Delta(HP at k-1), zero
    identically because the second-Hadamard state *is* the next entering
    state.  ``g_plus_ho_over_gamma[k-k0]`` is Delta(G at k) + Delta(HO at
    k)/gamma, which the sparse-target laws put near zero.
    """

    alpha: float
    gamma: float
    k0: int
    g_minus_shifted_hp: np.ndarray
    g_plus_ho_over_gamma: np.ndarray


def relation_residual(sweep: CoherenceSweep, alpha, gamma: float) -> RelationResiduals:
    """Residuals of the delta identities for k = 1 .. k_max - 2, in probability units."""
    alpha = _as_alpha(alpha)
    N = sweep.config.N
    g = delta_between(sweep, alpha, "G").to_probability_units(N).values
    ho = delta_between(sweep, alpha, "HO").to_probability_units(N).values
    hp = delta_between(sweep, alpha, "HP").to_probability_units(N).values
    hi = len(ho)  # = k_max - 1; valid k range is 1 .. k_max - 2
    ks = np.arange(1, hi)
    return RelationResiduals(
        alpha=alpha.value,
        gamma=gamma,
        k0=1,
        g_minus_shifted_hp=g[ks] - hp[ks - 1],
        g_plus_ho_over_gamma=g[ks] + ho[ks] / gamma,
    )


@dataclass(frozen=True)
class IterationClassification:
    """Production/depletion tags for the four operators of one iteration."""

    k: int
    oracle: Tag
    hadamard_o: Tag
    phase: Tag
    hadamard_p: Tag


def classify(sweep: CoherenceSweep, alpha) -> list[IterationClassification]:
    """Tag each operator at each iteration as producing/depleting/unchanged.

    The diagonal operators never move the probability multiset, so they are
    unconditionally unchanged; the Hadamard layers are tagged by the sign of
    their within-iteration delta with a dead band of 1e-12 on raw values.
    """
    alpha = _as_alpha(alpha)
    ho = delta_within(sweep, alpha, "HO").values
    hp = delta_within(sweep, alpha, "HP").values

    def tag(x: float) -> Tag:
        if abs(x) < SIGN_DEADBAND:
            return Tag.UNCHANGED
        return Tag.PRODUCES if x > 0 else Tag.DEPLETES

    return [
        IterationClassification(
            k=k,
            oracle=Tag.UNCHANGED,
            hadamard_o=tag(float(ho[k])),
            phase=Tag.UNCHANGED,
            hadamard_p=tag(float(hp[k])),
        )
        for k in range(len(ho))
    ]
