"""Search configuration, target sets, and the two-level rotation state.

A search instance is a register of ``n`` qubits (database size ``N = 2**n``)
together with a non-empty set of marked basis indices.  Target sets are kept
as explicit sorted index tuples; a pattern string over ``{0, 1, *}`` is both
a construction convenience and the canonical witness that the uniform
superposition over the targets is a product state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Vector of 2**n float64 amplitudes; 2**30 doubles = 8 GiB is the practical
# ceiling for a single statevector on commodity hardware.
MAX_QUBITS = 30

PATTERN_CHARS = frozenset("01*")


def expand_pattern(pattern: str) -> tuple[int, ...]:
    """Expand a ``{0,1,*}`` pattern (most significant bit first) to sorted indices."""
    if not pattern or set(pattern) - PATTERN_CHARS:
        raise ValueError(f"pattern must be a non-empty string over '01*', got {pattern!r}")
    n = len(pattern)
    fixed = 0
    stars = []
    for pos, ch in enumerate(pattern):
        bit = n - 1 - pos
        if ch == "1":
            fixed |= 1 << bit
        elif ch == "*":
            stars.append(bit)
    out = []
    for combo in range(1 << len(stars)):
        idx = fixed
        for j, bit in enumerate(stars):
            if (combo >> j) & 1:
                idx |= 1 << bit
        out.append(idx)
    return tuple(sorted(out))


def subcube_pattern_of(indices: Sequence[int], n: int) -> str | None:
    """Return the pattern matching exactly ``indices``, or None if no pattern does.

    A set is a subcube iff its size is ``2**v`` where ``v`` is the number of
    bit positions on which the members disagree; the candidate pattern is then
    unique (fixed bits from any member, ``*`` on the varying positions).
    """
    t = len(indices)
    varying = 0
    first = indices[0]
    for idx in indices:
        varying |= idx ^ first
    v = bin(varying).count("1")
    if t != (1 << v):
        return None
    chars = []
    for pos in range(n):
        bit = n - 1 - pos
        if (varying >> bit) & 1:
            chars.append("*")
        else:
            chars.append("1" if (first >> bit) & 1 else "0")
    return "".join(chars)


@dataclass(frozen=True)
class TargetSet:
    """Sorted distinct marked indices with their structural classification."""

    indices: tuple[int, ...]
    n: int
    pattern: str | None  # set iff the indices form a subcube

    @property
    def t(self) -> int:
        return len(self.indices)

    @property
    def is_subcube(self) -> bool:
        return self.pattern is not None

    @property
    def structure(self) -> str:
        return "subcube" if self.is_subcube else "generic"


@dataclass(frozen=True)
class GroverConfig:
    """Validated search instance: ``n`` qubits and a target set."""

    n: int
    targets: TargetSet

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def t(self) -> int:
        return self.targets.t


@dataclass(frozen=True)
class TwoLevelState:
    """State after ``k`` iterations, resolved in the invariant rotation plane.

    ``a_k`` and ``b_k`` are the components along the uniform superpositions of
    non-target and target states; ``a_k = cos((2k+1)*theta)`` and
    ``b_k = sin((2k+1)*theta)``.
    """

    theta: float
    k: int
    a_k: float
    b_k: float

    @property
    def theta_k(self) -> float:
        return (2 * self.k + 1) * self.theta

    @property
    def success_probability(self) -> float:
        return self.b_k * self.b_k


def make_config(n: int, target_spec: str | Iterable[int]) -> GroverConfig:
    """Build a validated config from a pattern string or an index list.

    Explicit index lists are tested for subcube equivalence so that the
    product-state classification never depends on how the set was specified.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"qubit count must be an integer, got {n!r}")
    if n < 1 or n > MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    N = 1 << n

    if isinstance(target_spec, str):
        if len(target_spec) != n:
            raise ValueError(
                f"pattern length {len(target_spec)} does not match qubit count {n}"
            )
        indices = expand_pattern(target_spec)
    else:
        raw = list(target_spec)
        if not raw:
            raise ValueError("target set must be non-empty")
        indices = []
        for x in raw:
            if not isinstance(x, (int, np.integer)) or isinstance(x, bool):
                raise ValueError(f"target index must be an integer, got {x!r}")
            if x < 0 or x >= N:
                raise ValueError(f"target index {x} out of range [0, {N})")
            indices.append(int(x))
        if len(set(indices)) != len(indices):
            raise ValueError("target indices must be distinct")
        indices = tuple(sorted(indices))

    pattern = subcube_pattern_of(indices, n)
    return GroverConfig(n=int(n), targets=TargetSet(indices=tuple(indices), n=int(n), pattern=pattern))


def grover_angle(config: GroverConfig) -> float:
    """Rotation half-angle: ``theta = arcsin(sqrt(t/N))``, in (0, pi/2]."""
    return math.asin(math.sqrt(config.t / config.N))


def two_level_state(config: GroverConfig, k: int) -> TwoLevelState:
    """Analytic state after ``k`` iterations of the search operator."""
    if k < 0:
        raise ValueError(f"iteration index must be non-negative, got {k}")
    theta = grover_angle(config)
    theta_k = (2 * k + 1) * theta
    return TwoLevelState(theta=theta, k=int(k), a_k=math.cos(theta_k), b_k=math.sin(theta_k))


def optimal_iterations(config: GroverConfig) -> int:
    """Standard optimal iteration count ``floor(pi / (4*theta))``.

    The epsilon keeps exact-boundary angles (e.g. theta = pi/4 at t = N/2,
    where the ratio is exactly 1) from flooring one step low under rounding.
    """
    return int(math.pi / (4.0 * grover_angle(config)) + 1e-12)


def config_to_json(config: GroverConfig) -> str:
    """Serialize to the config schema {"n": int, "targets": {...}}."""
    targets: dict = (
        {"pattern": config.targets.pattern}
        if config.targets.is_subcube
        else {"indices": list(config.targets.indices)}
    )
    return json.dumps({"n": config.n, "targets": targets}, sort_keys=True)


def config_from_json(text: str) -> GroverConfig:
    """Parse the config schema; accepts either a pattern or an index list."""
    doc = json.loads(text)
    try:
        n = doc["n"]
        targets = doc["targets"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"config document must have 'n' and 'targets': {exc}") from exc
    if "pattern" in targets:
        return make_config(n, targets["pattern"])
    if "indices" in targets:
        return make_config(n, targets["indices"])
    raise ValueError("targets must specify 'pattern' or 'indices'")
