"""Closed-form and asymptotic coherence of every stage state.

Two evaluation layers coexist for the first-Hadamard stage.  The exact layer
sums over the true Walsh spectrum of the target set (ground truth against the
simulator).  The asymptotic layer uses a single tabulated spectral weight
``gamma = (t - 2 t_y)^2 / t`` per target class, which treats the spectrum as
flat over nonzero frequencies; that is exact only for a single target, so the
exact layer is what quantifies the approximation error for t >= 2.

All asymptotic formulas assume the sparse-target regime t << N; callers get a
warning once the target fraction exceeds 1e-2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coherence import LN2, _as_alpha, coherence_from_histogram
from .core import GroverConfig, TwoLevelState
from .engine import fwht

SPARSE_TARGET_FRACTION = 1e-2


@dataclass(frozen=True)
class CoherenceValue:
    """A coherence scalar with provenance: exact formula or sparse-target asymptotic."""

    value: float
    kind: str  # "exact" | "asymptotic"
    alpha: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class BlochTrack:
    """In-plane Bloch components of the two-level state after k iterations."""

    r_x: float
    r_z: float
    k: int


@dataclass(frozen=True)
class SpectrumReport:
    """Walsh spectrum of the target indicator: s_y = sum_targets (-1)^(x.y).

    ``histogram`` counts s_y values over y != 0; the zero frequency always
    carries s_0 = t.  The number of +1 rows is recoverable as (s_y + t) / 2.
    """

    n: int
    t: int
    histogram: dict[int, int]

    @property
    def s0(self) -> int:
        return self.t

    @property
    def N(self) -> int:
        return 1 << self.n

    def parseval_sum(self) -> int:
        """sum over y != 0 of s_y^2; equals N*t - t^2 for every target set."""
        return sum(s * s * c for s, c in self.histogram.items())

    @property
    def parseval_ok(self) -> bool:
        return self.parseval_sum() == self.N * self.t - self.t * self.t

    def gamma_effective_abs(self) -> float:
        """First-moment effective weight: (mean_y |s_y|)^2 / t.

        This is the averaging under which the tabulated per-class values are
        recovered (the first absolute moment is what an alpha = 2 evaluation
        sums), e.g. 1/2 for generic pairs and 3/4 for generic triples.
        """
        mean_abs = sum(abs(s) * c for s, c in self.histogram.items()) / (self.N - 1)
        return mean_abs * mean_abs / self.t

    def gamma_effective_rms(self) -> float:
        """Second-moment effective weight: mean_y s_y^2 / t = (N-t)/(N-1)."""
        return self.parseval_sum() / ((self.N - 1) * self.t)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "s0": self.s0,
            "histogram": {str(s): int(c) for s, c in sorted(self.histogram.items())},
            "parseval": {
                "sum_sy_squared": int(self.parseval_sum()),
                "expected": int(self.N * self.t - self.t * self.t),
                "ok": self.parseval_ok,
            },
            "gamma_effective_abs": self.gamma_effective_abs(),
            "gamma_effective_rms": self.gamma_effective_rms(),
        }


def p_k(theta: float, k: int) -> float:
    """Success probability after k iterations: sin^2((2k+1)*theta)."""
    if not 0.0 < theta <= math.pi / 2:
        raise ValueError(f"theta must lie in (0, pi/2], got {theta}")
    return math.sin((2 * k + 1) * theta) ** 2


def _warn_if_dense(N: int, t: int):
    if t / N > SPARSE_TARGET_FRACTION:
        warnings.warn(
            f"t/N = {t / N:.3g} exceeds {SPARSE_TARGET_FRACTION}; "
            "sparse-target asymptotics may be inaccurate",
            stacklevel=3,
        )


def c_alpha_psi_k_exact(N: int, t: int, p: float, alpha) -> CoherenceValue:
    """Exact coherence of the entering state with success probability ``p``.

    The state has t basis probabilities p/t and N-t probabilities (1-p)/(N-t),
    so the closed form is
    ``((1-p)^(1/a) (N-t)^(1-1/a) + p^(1/a) t^(1-1/a) - 1) / (a-1)``.
    For t = N only the target term exists.  The alpha -> 1 branch returns the
    full two-term entropy expression in nats (ln2 times the bit value).
    """
    alpha = _as_alpha(alpha)
    a = alpha.value
    if alpha.is_unity_limit:
        out = 0.0
        if p > 0.0:
            out += p * math.log(t / p)
        if p < 1.0 and N > t:
            out += (1.0 - p) * math.log((N - t) / (1.0 - p))
        return CoherenceValue(out, "exact", a)
    if t == N:
        value = (p ** (1.0 / a) * t ** (1.0 - 1.0 / a) - 1.0) / (a - 1.0)
        return CoherenceValue(value, "exact", a)
    ia = 1.0 / a
    s = (1.0 - p) ** ia * (N - t) ** (1.0 - ia) + p ** ia * t ** (1.0 - ia)
    return CoherenceValue((s - 1.0) / (a - 1.0), "exact", a)


def c_alpha_psi_k_asymptotic(N: int, t: int, p: float, alpha) -> CoherenceValue:
    """Sparse-target coherence of the entering state.

    alpha in (0,1): the non-target term vanishes, leaving
    ``(p^(1/a) t^(1-1/a) - 1)/(a-1)``; at alpha = 1/2 this is twice the skew
    information 1 - p^2/t.  alpha in (1,2]: the non-target term dominates,
    ``(N/(a-1)) ((1-p)/N)^(1/a)``.  alpha -> 1: ``(1-p) ln(N/(1-p))``.
    """
    alpha = _as_alpha(alpha)
    a = alpha.value
    _warn_if_dense(N, t)
    if alpha.is_unity_limit:
        value = 0.0 if p >= 1.0 else (1.0 - p) * math.log(N / (1.0 - p))
        return CoherenceValue(value, "asymptotic", a)
    if a < 1.0:
        value = (p ** (1.0 / a) * t ** (1.0 - 1.0 / a) - 1.0) / (a - 1.0)
    else:
        value = (N / (a - 1.0)) * ((1.0 - p) / N) ** (1.0 / a)
    return CoherenceValue(value, "asymptotic", a)


@lru_cache(maxsize=8)
def _spectrum_cached(config: GroverConfig) -> SpectrumReport:
    indicator = np.zeros(config.N)
    indicator[list(config.targets.indices)] = 1.0
    spectrum = fwht(indicator) * math.sqrt(config.N)
    rounded = np.rint(spectrum)
    assert np.max(np.abs(spectrum - rounded)) < 1e-6, "Walsh spectrum must be integral"
    s = rounded.astype(np.int64)
    values, counts = np.unique(s[1:], return_counts=True)
    assert int(s[0]) == config.t
    return SpectrumReport(
        n=config.n,
        t=config.t,
        histogram={int(v): int(c) for v, c in zip(values, counts)},
    )


def target_spectrum(config: GroverConfig) -> SpectrumReport:
    """Walsh spectrum of the target set, as a value -> count histogram.

    Allocates one length-N work vector; cached per configuration.
    """
    return _spectrum_cached(config)


def gamma_case(t: int, product: bool) -> float:
    """Tabulated spectral weight for small target counts.

    t = 1 -> 1, t = 2 -> 1/2, t = 3 -> 3/4; at t = 4 the weight depends on
    whether the target superposition is a product state (1/4) or an entangled
    one (9/16).  Outside t in 1..4 callers must use the spectrum-based
    effective weights instead.
    """
    if t == 1:
        return 1.0
    if t == 2:
        return 0.5
    if t == 3:
        return 0.75
    if t == 4:
        return 0.25 if product else 9.0 / 16.0
    raise ValueError(f"no tabulated weight for t={t}; use the spectrum-based value")


def _ho_probability_histogram(
    config: GroverConfig, two_level: TwoLevelState, spectrum: SpectrumReport
) -> tuple[np.ndarray, np.ndarray]:
    """Probability multiset of the first-Hadamard state, from the spectrum.

    Amplitudes: (a_k sqrt(N-t) - b_k sqrt(t)) / sqrt(N) at frequency zero and
    -s_y (a_k / sqrt(N-t) + b_k / sqrt(t)) / sqrt(N) elsewhere; the total mass
    is identically 1 by the Parseval identity.
    """
    N, t = config.N, config.t
    a_k, b_k = two_level.a_k, two_level.b_k
    p0 = (a_k * math.sqrt(N - t) - b_k * math.sqrt(t)) ** 2 / N
    values = [p0]
    counts = [1]
    nonzero = [(s, c) for s, c in spectrum.histogram.items() if s != 0]
    if nonzero:
        w = (a_k / math.sqrt(N - t) + b_k / math.sqrt(t)) ** 2 / N
        for s, c in nonzero:
            values.append(s * s * w)
            counts.append(c)
    v = np.array(values)
    c = np.array(counts, dtype=float)
    assert abs(float((v * c).sum()) - 1.0) < 1e-9
    return v, c


def c_alpha_HO_exact(
    config: GroverConfig,
    two_level: TwoLevelState,
    alpha,
    spectrum: SpectrumReport | None = None,
) -> CoherenceValue:
    """Exact coherence of the first-Hadamard state, summed over the true spectrum.

    Unlike the tabulated-gamma asymptotics, every |s_y| class contributes its
    own term, so this matches the simulator for any target set.
    """
    alpha = _as_alpha(alpha)
    if spectrum is None:
        spectrum = target_spectrum(config)
    values, counts = _ho_probability_histogram(config, two_level, spectrum)
    return CoherenceValue(
        coherence_from_histogram(values, counts, alpha), "exact", alpha.value
    )


def c_alpha_HO_asymptotic(gamma: float, p: float, N: int, t: int, alpha) -> CoherenceValue:
    """Sparse-target coherence of the first-Hadamard state with a single weight.

    alpha in (0,1): ``((p*gamma)^(1/a) N^(1-1/a) - 1)/(a-1)``; for product
    targets gamma = 1/t recovers the product-state form.  alpha in (1,2]:
    ``(N/(a-1)) (p*gamma/N)^(1/a)``.  alpha -> 1:
    ``gamma*p*ln(N/(gamma*p))`` (ln2-scaled bits); alpha = 1/2 coincides with
    twice the skew-information form 1 - (gamma*p)^2/N.
    """
    alpha = _as_alpha(alpha)
    a = alpha.value
    _warn_if_dense(N, t)
    if alpha.is_unity_limit:
        gp = gamma * p
        value = 0.0 if gp <= 0.0 else gp * math.log(N / gp)
        return CoherenceValue(value, "asymptotic", a)
    if a < 1.0:
        value = ((p * gamma) ** (1.0 / a) * N ** (1.0 - 1.0 / a) - 1.0) / (a - 1.0)
    else:
        value = (N / (a - 1.0)) * (p * gamma / N) ** (1.0 / a)
    return CoherenceValue(value, "asymptotic", a)


def c_alpha_HP(N: int, t: int, p_next: float, alpha, kind: str = "exact") -> CoherenceValue:
    """Coherence of the second-Hadamard state, which is the next entering state.

    ``p_next`` is the success probability after the completed iteration; the
    exact form coincides with `c_alpha_psi_k_exact` at k+1 and the asymptotic
    form with `c_alpha_psi_k_asymptotic`.
    """
    if kind == "exact":
        return c_alpha_psi_k_exact(N, t, p_next, alpha)
    if kind == "asymptotic":
        return c_alpha_psi_k_asymptotic(N, t, p_next, alpha)
    raise ValueError(f"kind must be 'exact' or 'asymptotic', got {kind!r}")


def bloch_track(theta: float, k: int) -> BlochTrack:
    """In-plane Bloch components after k iterations: (-sin 2theta_k, cos 2theta_k).

    Sign convention follows the iterated-rotation expressions (the initial
    state's r_x differs by sign); only r_z feeds the downstream formulas, via
    cos^2 theta_k = (1 + r_z)/2 and sin^2 theta_k = (1 - r_z)/2, which hold
    exactly for the returned values.
    """
    theta_k = (2 * k + 1) * theta
    return BlochTrack(r_x=-math.sin(2 * theta_k), r_z=math.cos(2 * theta_k), k=k)


def c_alpha_max_asymptotic(N: int, alpha) -> float:
    """Large-N maximum used to normalize coherence in the complementarity laws.

    alpha in (0,1): 1/(1-alpha).  alpha in (1,2]: (N/(alpha-1)) N^(-1/alpha).
    alpha -> 1: log2(N) (bits; multiply by ln2 for the ln2-scaled convention).
    """
    alpha = _as_alpha(alpha)
    a = alpha.value
    if alpha.is_unity_limit:
        return math.log2(N)
    if a < 1.0:
        return 1.0 / (1.0 - a)
    return (N / (a - 1.0)) * N ** (-1.0 / a)


def true_max_coherence(N: int, alpha) -> float:
    """Exact pure-state maximum (N^(1-1/alpha) - 1)/(alpha - 1), for comparison.

    Attained by the uniform superposition; the asymptotic maxima above drop
    the -1 (and the prefactor structure differs for alpha < 1).
    """
    alpha = _as_alpha(alpha)
    if alpha.is_unity_limit:
        return LN2 * math.log2(N)
    a = alpha.value
    return (N ** (1.0 - 1.0 / a) - 1.0) / (a - 1.0)


def complementarity_residual(N: int, t: int, p: float, alpha, c_exact: float) -> float:
    """Deviation of the coherence/success-probability complementarity laws.

    With the normalized coherence NC = c_exact / max (asymptotic maxima):
    alpha in (0,1): ``NC + p^(1/a) t^(1-1/a) - 1``;
    alpha in (1,2]: ``NC^a + p - 1``;
    alpha -> 1:     ``NC + p - 1`` with NC = c_exact / ln(N) (the ln2-scaled
    input divided by the ln2-scaled maximum).

    ``c_exact`` is the coherence of the entering state, from simulation or the
    exact closed form.
    """
    alpha = _as_alpha(alpha)
    a = alpha.value
    if alpha.is_unity_limit:
        nc = c_exact / (LN2 * c_alpha_max_asymptotic(N, alpha))
        return nc + p - 1.0
    nc = c_exact / c_alpha_max_asymptotic(N, alpha)
    if a < 1.0:
        return nc + p ** (1.0 / a) * t ** (1.0 - 1.0 / a) - 1.0
    return nc ** a + p - 1.0
