"""Exact real-amplitude statevector simulation of the search iteration.

Every operator here (oracle, conditional phase shift, Hadamard layer) is real
orthogonal and the initial state is real, so amplitudes stay real float64:
half the memory and roughly twice the throughput of a complex simulator.

The Hadamard layer is a fast Walsh transform: a dense 64-point base block
(one BLAS matmul over the low bits) followed by radix-4 butterfly sweeps that
ping-pong between two buffers.  The full 1/sqrt(N) normalization is folded
into the base block, so the sweeps are pure add/subtract passes; intermediate
magnitudes stay below sqrt(N) times the input norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .coherence import (
    AlphaParam,
    _as_alpha,
    coherence_from_histogram,
    c_alpha_pure,
)
from .core import GroverConfig, optimal_iterations

_BASE_BLOCK_BITS = 6

# Full-probability captures above this register size exhaust commodity RAM.
FULL_CAPTURE_QUBIT_LIMIT = 24
FULL_CAPTURE_BYTE_LIMIT = 2 << 30


class CapacityError(ValueError):
    """Requested snapshot storage would exceed the documented memory budget."""


class Stage(str, Enum):
    """Snapshot points inside one search iteration."""

    PSI = "psi_k"            # state entering iteration k
    ORACLE = "psi_k_O"       # after the oracle sign flip
    HADAMARD_O = "psi_k_HO"  # after the first Hadamard layer
    HADAMARD_P = "psi_k_HP"  # after phase shift + second Hadamard (= psi_{k+1})


ALL_STAGES = (Stage.PSI, Stage.ORACLE, Stage.HADAMARD_O, Stage.HADAMARD_P)


def _dense_block(m: int, scale_exp: float):
    """H2^{otimes m} times 2**scale_exp, built by Kronecker powers."""
    h2 = np.array([[1.0, 1.0], [1.0, -1.0]])
    block = np.array([[1.0]])
    for _ in range(m):
        block = np.kron(block, h2)
    return block * (2.0 ** scale_exp)


_BLOCK_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _block_for(m: int, log2n: int) -> np.ndarray:
    key = (m, log2n)
    if key not in _BLOCK_CACHE:
        _BLOCK_CACHE[key] = _dense_block(m, -log2n / 2.0)
    return _BLOCK_CACHE[key]


def _check_power_of_two(size: int) -> int:
    if size < 1 or size & (size - 1):
        raise ValueError(f"state length must be a power of two, got {size}")
    return size.bit_length() - 1


class _Workspace:
    """Reusable buffers for one simulation run (never shared across runs)."""

    def __init__(self, n_amplitudes: int):
        self.spare = np.empty(n_amplitudes)
        self.quarter = np.empty(max(n_amplitudes // 4, 1))
        self.probs = np.empty(n_amplitudes)


def _fwht_buffers(src: np.ndarray, ws: _Workspace) -> tuple[np.ndarray, np.ndarray]:
    """Transform src using ws.spare as ping-pong partner.

    Returns (result, leftover); both are src/ws.spare in some order and
    ws.spare is rebound to the leftover buffer.
    """
    size = src.size
    log2n = _check_power_of_two(size)
    if log2n == 0:
        return src, ws.spare
    m = min(_BASE_BLOCK_BITS, log2n)
    block = _block_for(m, log2n)
    width = 1 << m
    np.matmul(src.reshape(-1, width), block, out=ws.spare.reshape(-1, width))
    cur, other = ws.spare, src

    h = width
    # radix-4 sweeps: two butterfly levels per pass over memory
    while size // h >= 4:
        s4 = cur.reshape(-1, 4, h)
        d4 = other.reshape(-1, 4, h)
        x0, x1, x2, x3 = s4[:, 0], s4[:, 1], s4[:, 2], s4[:, 3]
        g = x0.shape[0]
        quarter = ws.quarter[: g * h].reshape(g, h)
        np.add(x0, x1, out=d4[:, 0])       # u0
        np.subtract(x0, x1, out=d4[:, 1])  # u1
        np.add(x2, x3, out=quarter)        # u2
        np.subtract(x2, x3, out=d4[:, 3])  # u3 (x2, x3 now free)
        np.subtract(d4[:, 0], quarter, out=d4[:, 2])
        np.add(d4[:, 0], quarter, out=d4[:, 0])
        np.copyto(quarter, d4[:, 1])
        np.add(quarter, d4[:, 3], out=d4[:, 1])
        np.subtract(quarter, d4[:, 3], out=d4[:, 3])
        cur, other = other, cur
        h *= 4
    if h < size:  # one radix-2 level left
        s3 = cur.reshape(-1, 2, h)
        d3 = other.reshape(-1, 2, h)
        np.add(s3[:, 0], s3[:, 1], out=d3[:, 0])
        np.subtract(s3[:, 0], s3[:, 1], out=d3[:, 1])
        cur, other = other, cur
    ws.spare = other
    return cur, other


def fwht(state: np.ndarray) -> np.ndarray:
    """Normalized fast Walsh-Hadamard transform of a length-2**n vector.

    Applies (1/sqrt(N)) * sum_{x,y} (-1)^(x.y) |y><x| in O(N log N).  The
    transform is involutive: ``fwht(fwht(v)) == v`` up to rounding.

    Parameters
    ----------
    state : array_like
        Real amplitudes; length must be a power of two.

    Returns
    -------
    np.ndarray
        New array with the transformed amplitudes.
    """
    src = np.array(state, dtype=float)  # private copy; input is never mutated
    ws = _Workspace(src.size)
    out, _ = _fwht_buffers(src, ws)
    return out


def uniform_state(config: GroverConfig) -> np.ndarray:
    """Equal superposition over all N basis states."""
    N = config.N
    return np.full(N, 1.0 / math.sqrt(N))


def apply_oracle(state: np.ndarray, targets) -> np.ndarray:
    """Negate amplitudes at the target indices (diagonal +-1 operator)."""
    idx = targets.indices if hasattr(targets, "indices") else tuple(targets)
    out = np.array(state, dtype=float)
    out[list(idx)] *= -1.0
    return out


def apply_phase_shift(state: np.ndarray) -> np.ndarray:
    """Conditional phase shift 2|0><0| - I: index 0 kept, all others negated.

    This is the global-phase-equivalent sign convention; probabilities and
    every coherence quantifier are insensitive to the overall sign.
    """
    out = -np.asarray(state, dtype=float)
    out[0] = state[0]
    return out


def success_probability(state: np.ndarray, targets) -> float:
    """Total probability mass on the target indices."""
    idx = targets.indices if hasattr(targets, "indices") else tuple(targets)
    amps = np.asarray(state)[list(idx)]
    return float((amps * amps).sum())


class GroverStepResult(NamedTuple):
    after_oracle: np.ndarray
    after_first_hadamard: np.ndarray
    final: np.ndarray


def grover_step(state: np.ndarray, config: GroverConfig) -> GroverStepResult:
    """One full iteration H P H O, returning the intermediate states."""
    after_o = apply_oracle(state, config.targets)
    after_ho = fwht(after_o)
    final = fwht(apply_phase_shift(after_ho))
    return GroverStepResult(after_o, after_ho, final)


def iter_stage_probs(
    config: GroverConfig,
    k_max: int,
    stages: Iterable[Stage] = ALL_STAGES,
) -> Iterator[tuple[int, Stage, float, np.ndarray]]:
    """Stream (k, stage, success_prob, probs) over a full run.

    The probability buffer is reused between yields; consumers must copy it
    if they hold on to it.  The final-Hadamard snapshot of iteration k and
    the entering state of iteration k+1 are the same vector and are yielded
    from the same buffer, so their statistics agree bit for bit.
    """
    if k_max < 0:
        raise ValueError(f"iteration count must be non-negative, got {k_max}")
    wanted = frozenset(stages)
    N = config.N
    tgt = np.fromiter(config.targets.indices, dtype=np.intp)
    ws = _Workspace(N)
    amp = np.full(N, 1.0 / math.sqrt(N))

    def emit(k: int, stage: Stage, vec: np.ndarray, reuse_probs: bool):
        if not reuse_probs:
            np.multiply(vec, vec, out=ws.probs)
        success = float(ws.probs[tgt].sum())
        return (k, stage, success, ws.probs)

    np.multiply(amp, amp, out=ws.probs)
    if Stage.PSI in wanted:
        yield emit(0, Stage.PSI, amp, reuse_probs=True)
    for k in range(k_max):
        amp[tgt] *= -1.0
        if Stage.ORACLE in wanted:
            yield emit(k, Stage.ORACLE, amp, reuse_probs=False)
        amp, _ = _fwht_buffers(amp, ws)
        if Stage.HADAMARD_O in wanted:
            yield emit(k, Stage.HADAMARD_O, amp, reuse_probs=False)
        np.negative(amp[1:], out=amp[1:])  # phase shift 2|0><0| - I
        amp, _ = _fwht_buffers(amp, ws)
        np.multiply(amp, amp, out=ws.probs)
        if Stage.HADAMARD_P in wanted:
            yield emit(k, Stage.HADAMARD_P, amp, reuse_probs=True)
        if Stage.PSI in wanted:
            yield emit(k + 1, Stage.PSI, amp, reuse_probs=True)


@dataclass(frozen=True)
class CapturePolicy:
    """What `run` keeps per snapshot: which stages, and how probabilities are stored.

    ``probs`` is one of ``"full"`` (the N-vector), ``"hist"`` (exact value ->
    count compression of the probability multiset; every coherence quantifier
    is a symmetric function of that multiset), or ``"none"``.
    """

    stages: tuple[Stage, ...] = ALL_STAGES
    probs: str = "hist"

    def __post_init__(self):
        if self.probs not in ("full", "hist", "none"):
            raise ValueError(f"probs mode must be full|hist|none, got {self.probs!r}")


@dataclass(frozen=True)
class StageRecord:
    """One snapshot: iteration index, stage, success probability, statistics."""

    k: int
    stage: Stage
    success_prob: float
    probs: np.ndarray | None = None
    hist_values: np.ndarray | None = None
    hist_counts: np.ndarray | None = None

    def coherence(self, alpha) -> float:
        """Tsallis coherence of the snapshot (pure state, basis probabilities)."""
        if self.probs is not None:
            return c_alpha_pure(self.probs, alpha)
        if self.hist_values is not None:
            return coherence_from_histogram(self.hist_values, self.hist_counts, alpha)
        raise ValueError("record captured no probability statistics")


@dataclass
class Trajectory:
    """Ordered snapshots of one run plus the generating configuration."""

    config: GroverConfig
    k_max: int
    records: list[StageRecord] = field(default_factory=list)

    def series(self, stage: Stage) -> list[StageRecord]:
        return [r for r in self.records if r.stage == stage]

    def get(self, k: int, stage: Stage) -> StageRecord:
        for r in self.records:
            if r.k == k and r.stage == stage:
                return r
        raise KeyError(f"no record for k={k}, stage={stage}")

    def success_series(self) -> np.ndarray:
        return np.array([r.success_prob for r in self.series(Stage.PSI)])


def run(
    config: GroverConfig,
    k_max: int | None = None,
    capture: CapturePolicy | None = None,
) -> Trajectory:
    """Simulate ``k_max`` iterations (default: the optimal count) with snapshots.

    Raises
    ------
    CapacityError
        If full-probability capture is requested for n > 24 registers and the
        estimate exceeds the documented 2 GiB budget.
    """
    capture = capture or CapturePolicy()
    if k_max is None:
        k_max = optimal_iterations(config)
    if capture.probs == "full" and config.n > FULL_CAPTURE_QUBIT_LIMIT:
        n_records = k_max * len(capture.stages) + 1
        estimate = n_records * config.N * 8
        if estimate > FULL_CAPTURE_BYTE_LIMIT:
            raise CapacityError(
                f"full capture of ~{estimate / 2**30:.1f} GiB exceeds the "
                f"{FULL_CAPTURE_BYTE_LIMIT / 2**30:.0f} GiB budget; "
                "use the histogram capture or fewer stages"
            )
    traj = Trajectory(config=config, k_max=k_max)
    for k, stage, success, probs in iter_stage_probs(config, k_max, capture.stages):
        if capture.probs == "full":
            rec = StageRecord(k, stage, success, probs=probs.copy())
        elif capture.probs == "hist":
            values, counts = np.unique(probs, return_counts=True)
            rec = StageRecord(k, stage, success, hist_values=values, hist_counts=counts)
        else:
            rec = StageRecord(k, stage, success)
        traj.records.append(rec)
    return traj


@dataclass
class CoherenceSweep:
    """Per-iteration coherence series for each (stage, alpha), plus success.

    ``success[k]`` is the success probability of the entering state at
    iteration k; ``c[(stage, alpha)][i]`` is the coherence at iteration i.
    The second-Hadamard series is the entering-state series shifted by one
    iteration (they are the same states), sharing the same floats.
    """

    config: GroverConfig
    k_max: int
    alphas: tuple[float, ...]
    success: np.ndarray
    c: dict[tuple[Stage, float], np.ndarray]

    def coherence(self, stage: Stage, alpha) -> np.ndarray:
        return self.c[(stage, float(_as_alpha(alpha).value))]


def _power_sums(probs: np.ndarray, alphas: Sequence[AlphaParam]) -> list[float]:
    out = []
    for a in alphas:
        if a.is_unity_limit:
            nz = probs[probs > 0.0]
            out.append(float(-(nz * np.log(nz)).sum()))  # ln2 * C_r directly
        elif a.value == 2.0:
            out.append(float(np.sqrt(probs).sum()))
        else:
            out.append(float(np.power(probs, 1.0 / a.value).sum()))
    return out


def coherence_sweep(
    config: GroverConfig,
    k_max: int | None = None,
    alphas: Sequence[float] = (2.0,),
    stages: Iterable[Stage] = (Stage.PSI, Stage.HADAMARD_O, Stage.HADAMARD_P),
) -> CoherenceSweep:
    """Memory-bounded trajectory: stream the run, keep only scalar series.

    This is the path for large registers; storage is O(k_max * len(alphas)).
    """
    if k_max is None:
        k_max = optimal_iterations(config)
    alpha_params = [_as_alpha(a) for a in alphas]
    keys = [float(a.value) for a in alpha_params]
    wanted = frozenset(stages) | {Stage.PSI}

    needed = {Stage.PSI}
    if Stage.HADAMARD_O in wanted:
        needed.add(Stage.HADAMARD_O)
    if Stage.ORACLE in wanted:
        needed.add(Stage.ORACLE)

    psi_c = {k: np.empty(k_max + 1) for k in keys}
    ho_c = {k: np.empty(k_max) for k in keys} if Stage.HADAMARD_O in wanted else {}
    o_c = {k: np.empty(k_max) for k in keys} if Stage.ORACLE in wanted else {}
    success = np.empty(k_max + 1)

    for k, stage, succ, probs in iter_stage_probs(config, k_max, needed):
        sums = _power_sums(probs, alpha_params)
        for a, key, s in zip(alpha_params, keys, sums):
            value = s if a.is_unity_limit else (s - 1.0) / (a.value - 1.0)
            if stage == Stage.PSI:
                psi_c[key][k] = value
            elif stage == Stage.HADAMARD_O:
                ho_c[key][k] = value
            elif stage == Stage.ORACLE:
                o_c[key][k] = value
        if stage == Stage.PSI:
            success[k] = succ

    series: dict[tuple[Stage, float], np.ndarray] = {}
    for key in keys:
        if Stage.PSI in wanted:
            series[(Stage.PSI, key)] = psi_c[key]
        if Stage.HADAMARD_O in wanted:
            series[(Stage.HADAMARD_O, key)] = ho_c[key]
        if Stage.HADAMARD_P in wanted:
            series[(Stage.HADAMARD_P, key)] = psi_c[key][1:]
        if Stage.ORACLE in wanted:
            series[(Stage.ORACLE, key)] = o_c[key]
    return CoherenceSweep(
        config=config,
        k_max=k_max,
        alphas=tuple(keys),
        success=success,
        c=series,
    )
