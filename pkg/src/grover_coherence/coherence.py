"""Tsallis relative entropy of coherence and its limiting quantifiers.

The order parameter ``alpha`` lives in (0,1) union (1,2].  For a state rho and
a diagonal (incoherent) sigma the divergence is

    D_alpha(rho || sigma) = (Tr(rho^alpha sigma^(1-alpha)) - 1) / (alpha - 1),

and the coherence measure is the minimum over diagonal sigma of the
alpha-root-corrected functional, which has the closed form

    C_alpha(rho) = (sum_j <j|rho^alpha|j>^(1/alpha) - 1) / (alpha - 1).

Conventions: base-2 logarithms for the relative entropy of coherence (bits);
the alpha -> 1 limit of the Tsallis quantities carries an explicit ln2 factor
(i.e. it is the bit value expressed in nats); 0*log(0) = 0 and 0^(1/alpha) = 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)

# |alpha - 1| below this routes to the limit formula: the 1/(alpha-1) prefactor
# amplifies rounding faster than the limit's own truncation error near 1.
ALPHA_UNITY_WINDOW = 1e-6

MAX_DENSE_DIM = 64


@dataclass(frozen=True)
class AlphaParam:
    """Validated Tsallis order, alpha in (0,1) union (1,2].

    Values within ``ALPHA_UNITY_WINDOW`` of 1 are accepted and routed to the
    alpha -> 1 limit branch by every quantifier.
    """

    value: float

    def __post_init__(self):
        a = float(self.value)
        if not math.isfinite(a):
            raise ValueError(f"alpha must be finite, got {a!r}")
        if a <= 0.0 or a > 2.0:
            raise ValueError(f"alpha must lie in (0,1) or (1,2], got {a}")
        object.__setattr__(self, "value", a)

    @property
    def is_unity_limit(self) -> bool:
        return abs(self.value - 1.0) < ALPHA_UNITY_WINDOW

    def __float__(self) -> float:
        return self.value


def _as_alpha(alpha) -> AlphaParam:
    return alpha if isinstance(alpha, AlphaParam) else AlphaParam(float(alpha))


def as_probability_vector(p, tol: float = 1e-10) -> np.ndarray:
    """Validate and return a 1-D probability vector (non-negative, sums to 1)."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"probability vector must be 1-D and non-empty, got shape {arr.shape}")
    if np.any(arr < -tol):
        raise ValueError("probability vector has negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total}, expected 1 within {tol}")
    return arr


def as_density_matrix(rho, tol: float = 1e-10, d_max: int = MAX_DENSE_DIM) -> np.ndarray:
    """Validate a small density matrix: Hermitian, PSD, unit trace, d <= d_max."""
    arr = np.asarray(rho, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {arr.shape}")
    d = arr.shape[0]
    if d > d_max:
        raise ValueError(f"dense path capped at dimension {d_max}, got {d}")
    if np.max(np.abs(arr - arr.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(arr).real - 1.0) > tol:
        raise ValueError("density matrix trace differs from 1")
    evals = np.linalg.eigvalsh(arr)
    if evals.min() < -tol:
        raise ValueError(f"density matrix is not PSD (min eigenvalue {evals.min():.3e})")
    return arr


def _diag_of_matrix_power(rho: np.ndarray, exponent: float) -> np.ndarray:
    """Diagonal of rho**exponent via Hermitian eigendecomposition.

    Eigenvalues below a relative noise floor are zeroed before the fractional
    power (0**x = 0): fractional exponents below 1 would otherwise amplify
    the O(eps) spectral noise of exactly-singular inputs such as pure states.
    """
    evals, vecs = np.linalg.eigh(rho)
    floor = max(evals.max(), 0.0) * rho.shape[0] * 16 * np.finfo(float).eps
    evals = np.where(evals > floor, evals, 0.0)
    powed = np.where(evals > 0.0, evals ** exponent, 0.0)
    return (np.abs(vecs) ** 2) @ powed


def shannon_entropy_bits(p) -> float:
    """Shannon entropy of a probability vector, in bits; 0*log(0) = 0."""
    arr = np.asarray(p, dtype=float)
    nz = arr[arr > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def tsallis_power_sum(p: np.ndarray, alpha: AlphaParam) -> float:
    """sum_j p_j^(1/alpha) with a sqrt fast path at alpha = 2."""
    if alpha.value == 2.0:
        return float(np.sqrt(p).sum())
    return float(np.power(p, 1.0 / alpha.value).sum())


def tsallis_relative_entropy(rho, sigma, alpha) -> float:
    """Tsallis relative alpha entropy D_alpha(rho || sigma) for diagonal sigma.

    Parameters
    ----------
    rho : array_like
        Density matrix (validated Hermitian PSD, unit trace, d <= 64).
    sigma : array_like
        Diagonal density matrix, given either as a d x d matrix with
        negligible off-diagonal part or as its 1-D diagonal.
    alpha : float or AlphaParam
        Tsallis order; values within 1e-6 of 1 use the limit
        ln2 * (Tr rho log2 rho - Tr rho log2 sigma).

    Returns
    -------
    float
        D_alpha, or +inf when alpha > 1 and sigma lacks support where rho
        has weight (a defined result, not an error).
    """
    alpha = _as_alpha(alpha)
    rho = as_density_matrix(rho)
    sig = np.asarray(sigma, dtype=complex)
    if sig.ndim == 2:
        if sig.shape != rho.shape:
            raise ValueError(f"dimension mismatch: rho {rho.shape} vs sigma {sig.shape}")
        off = sig - np.diag(np.diag(sig))
        if np.max(np.abs(off)) > 1e-10:
            raise ValueError("sigma must be diagonal in the incoherent basis")
        q = np.diag(sig).real
    elif sig.ndim == 1:
        if sig.shape[0] != rho.shape[0]:
            raise ValueError(f"dimension mismatch: rho {rho.shape} vs sigma {sig.shape}")
        q = sig.real
    else:
        raise ValueError(f"sigma must be a matrix or its diagonal, got shape {sig.shape}")
    if np.any(q < -1e-10) or abs(q.sum() - 1.0) > 1e-10:
        raise ValueError("sigma diagonal is not a probability vector")
    q = np.clip(q, 0.0, None)

    if alpha.is_unity_limit:
        evals = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
        nz = evals[evals > 1e-15]
        tr_rho_log_rho = float((nz * np.log2(nz)).sum())
        diag = np.diag(rho).real
        if np.any((diag > 1e-15) & (q <= 0.0)):
            return math.inf
        mask = diag > 1e-15
        tr_rho_log_sigma = float((diag[mask] * np.log2(q[mask])).sum())
        return LN2 * (tr_rho_log_rho - tr_rho_log_sigma)

    a = alpha.value
    b = _diag_of_matrix_power(rho, a)  # <j|rho^alpha|j>
    if a > 1.0 and np.any((b > 1e-15) & (q <= 0.0)):
        return math.inf
    mask = q > 0.0
    f = float((b[mask] * q[mask] ** (1.0 - a)).sum())
    return (f - 1.0) / (a - 1.0)


def c_alpha_pure(p, alpha) -> float:
    """Coherence of a pure state from its basis probability vector.

    For pure rho, rho^alpha = rho, so the closed form needs only the
    probabilities: ``(sum_j p_j^(1/alpha) - 1) / (alpha - 1)``.  On the
    alpha -> 1 branch returns ln2 times the relative entropy of coherence.
    """
    alpha = _as_alpha(alpha)
    arr = as_probability_vector(p)
    if alpha.is_unity_limit:
        return LN2 * shannon_entropy_bits(arr)
    return (tsallis_power_sum(arr, alpha) - 1.0) / (alpha.value - 1.0)


def c_alpha_mixed(rho, alpha) -> float:
    """Coherence of a general state via the diagonal of rho^alpha."""
    alpha = _as_alpha(alpha)
    rho = as_density_matrix(rho)
    if alpha.is_unity_limit:
        evals = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
        nz = evals[evals > 1e-15]
        diag = np.diag(rho).real
        dz = diag[diag > 1e-15]
        return LN2 * float((nz * np.log2(nz)).sum() - (dz * np.log2(dz)).sum())
    a = alpha.value
    b = _diag_of_matrix_power(rho, a)
    s = float(np.power(b, 1.0 / a).sum())
    return (s - 1.0) / (a - 1.0)


def c_tilde_alpha(rho, alpha) -> float:
    """Unmodified Tsallis coherence quantifier ((sum ...)^alpha - 1)/(alpha-1).

    Exposed for completeness; it shares the minimizer of `c_alpha_mixed` but
    is known not to satisfy strong monotonicity, so no monotonicity machinery
    is built around it.  Shares the alpha -> 1 limit with `c_alpha_mixed`.
    """
    alpha = _as_alpha(alpha)
    rho = as_density_matrix(rho)
    if alpha.is_unity_limit:
        return c_alpha_mixed(rho, alpha)
    a = alpha.value
    b = _diag_of_matrix_power(rho, a)
    s = float(np.power(b, 1.0 / a).sum())
    return (s ** a - 1.0) / (a - 1.0)


def relative_entropy_coherence(p) -> float:
    """Relative entropy of coherence of a pure state, in bits.

    For pure states this is the Shannon entropy of the basis probabilities.
    """
    return shannon_entropy_bits(as_probability_vector(p))


def skew_info_coherence(p) -> float:
    """Skew information of coherence of a pure state: 1 - sum_j p_j^2.

    Equals half of `c_alpha_pure` at alpha = 1/2.
    """
    arr = as_probability_vector(p)
    return float(1.0 - (arr * arr).sum())


def optimal_incoherent_state(rho, alpha) -> np.ndarray:
    """Diagonal state achieving the coherence minimum: sigma*_jj prop <j|rho^alpha|j>^(1/alpha).

    On the alpha -> 1 branch the minimizer is the dephased state diag(rho).
    Plugging sigma* back into the minimized functional reproduces
    `c_alpha_mixed(rho, alpha)`.
    """
    alpha = _as_alpha(alpha)
    rho = as_density_matrix(rho)
    d = rho.shape[0]
    if alpha.is_unity_limit:
        weights = np.clip(np.diag(rho).real, 0.0, None)
    else:
        b = _diag_of_matrix_power(rho, alpha.value)
        weights = np.power(b, 1.0 / alpha.value)
    total = weights.sum()
    assert total > 0.0, "unit-trace PSD state cannot have an all-zero diagonal"
    return np.diag(weights / total).astype(complex).reshape(d, d)


def normalized_coherence(c: float, c_max: float) -> float:
    """Ratio c / c_max; warns (does not clamp) when outside [0, 1 + 1e-6]."""
    if c_max <= 0.0:
        raise ValueError(f"maximum coherence must be positive, got {c_max}")
    ratio = c / c_max
    if ratio < -1e-12 or ratio > 1.0 + 1e-6:
        warnings.warn(
            f"normalized coherence {ratio} outside [0, 1+1e-6]; reporting unclamped",
            stacklevel=2,
        )
    return ratio


def coherence_from_histogram(values, counts, alpha) -> float:
    """Pure-state coherence from a value -> count compression of probabilities.

    Every quantifier here is a symmetric function of the probability multiset,
    so ``sum_j p_j^(1/alpha)`` collapses to ``sum_v count_v * v^(1/alpha)``.
    """
    alpha = _as_alpha(alpha)
    v = np.asarray(values, dtype=float)
    c = np.asarray(counts, dtype=float)
    if v.shape != c.shape:
        raise ValueError("histogram values and counts must align")
    nz = v > 0.0
    v, c = v[nz], c[nz]
    if alpha.is_unity_limit:
        return LN2 * float(-(c * v * np.log2(v)).sum())
    if alpha.value == 2.0:
        s = float((c * np.sqrt(v)).sum())
    else:
        s = float((c * np.power(v, 1.0 / alpha.value)).sum())
    return (s - 1.0) / (alpha.value - 1.0)
