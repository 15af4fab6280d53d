"""Closed-weight engine for protocol states of the GHZ family.

Every pipeline stage maps a state of the form

    a |0...0><0...0|  +  sum over bit patterns of weight-dependent diagonal
    + coherence (|0...0><1...1| + h.c.)

to another of the same form, so an n-qubit state needs only n+3 numbers:
the extra |0...0| population `a` fed by damping, a per-pattern diagonal
weight indexed by the pattern's count of zeros, and the single surviving
coherence. The protocol pipeline costs O(n) per stage and reaches n in
the hundreds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import GhzParams, ProtocolParams

TRACE_TOL = 1e-12
CORNER_TOL = 1e-12


def _checked_trace(n: int, a: float, diag_weight: tuple[float, ...]) -> float:
    total = a
    for k, d in enumerate(diag_weight):
        if d:
            total += math.comb(n, k) * d
    return total


@dataclass(frozen=True)
class CompactGhzState:
    """Weight-indexed representation of a protocol state.

    diag_weight[k] is the diagonal weight shared by every basis pattern
    with exactly k zeros; `a` is the extra weight on the all-zeros
    projector on top of diag_weight[n]; `coherence` multiplies the
    corner pair |0...0><1...1| + h.c.; `norm` is the running trace,
    i.e. the success probability accumulated so far.
    """

    n: int
    a: float
    diag_weight: tuple[float, ...]
    coherence: float
    norm: float

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise DomainError(f"qubit count must be a positive integer, got {self.n!r}")
        if len(self.diag_weight) != self.n + 1:
            raise DomainError(
                f"diag_weight needs n+1={self.n + 1} entries, got {len(self.diag_weight)}")
        values = (self.a, self.coherence, self.norm, *self.diag_weight)
        if any(not math.isfinite(v) for v in values):
            raise DomainError("state weights must be finite")
        if self.a < 0.0 or any(d < 0.0 for d in self.diag_weight):
            raise DomainError("diagonal weights must be nonnegative")
        if self.norm <= 0.0:
            raise DomainError(f"norm must be positive, got {self.norm!r}")
        trace = _checked_trace(self.n, self.a, self.diag_weight)
        if abs(trace - self.norm) > TRACE_TOL * max(1.0, abs(self.norm)):
            raise DomainError(f"trace {trace!r} disagrees with recorded norm {self.norm!r}")
        # Positivity of the only non-diagonal block.
        corner = (self.a + self.diag_weight[self.n]) * self.diag_weight[0]
        if self.coherence * self.coherence > corner + CORNER_TOL:
            raise DomainError("coherence exceeds what the corner populations allow")

    def trace(self) -> float:
        return _checked_trace(self.n, self.a, self.diag_weight)


def compact_from_gghz(params: GhzParams) -> CompactGhzState:
    """Fresh alpha|0...0> + beta|1...1> in compact form, norm exactly 1."""
    alpha, beta = params.alpha, params.beta
    weights = [0.0] * (params.n + 1)
    weights[0] = beta * beta
    return CompactGhzState(
        n=params.n,
        a=alpha * alpha,
        diag_weight=tuple(weights),
        coherence=alpha * beta,
        norm=1.0,
    )


def compact_apply_weak(state: CompactGhzState, s: float) -> CompactGhzState:
    """Post-selected pre-damping collapse of strength s on every qubit.

    Each |1> amplitude survives with factor sqrt(1-s), so a pattern with
    k zeros is scaled by (1-s)^(n-k). Subnormalizes the state.
    """
    if not 0.0 <= s < 1.0:
        raise DomainError(f"weak strength s must lie in [0, 1), got {s!r}")
    sb = 1.0 - s
    n = state.n
    weights = tuple(d * sb ** (n - k) for k, d in enumerate(state.diag_weight))
    a = state.a
    coherence = state.coherence * sb ** (n / 2.0)
    return CompactGhzState(n, a, weights, coherence, _checked_trace(n, a, weights))


def compact_apply_damping(state: CompactGhzState, p: float) -> CompactGhzState:
    """Trace-preserving amplitude damping of probability p on every qubit.

    A source pattern with k zeros feeds each target pattern whose zeros
    contain the source's; collecting targets by zero count k' gives the
    transfer weight C(k', k) p^(k'-k) (1-p)^(n-k').
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"damping p must lie in [0, 1], got {p!r}")
    pb = 1.0 - p
    n = state.n
    weights = [0.0] * (n + 1)
    for k, d in enumerate(state.diag_weight):
        if d == 0.0:
            continue
        for k2 in range(k, n + 1):
            weights[k2] += math.comb(k2, k) * d * p ** (k2 - k) * pb ** (n - k2)
    a = state.a
    coherence = state.coherence * pb ** (n / 2.0)
    return CompactGhzState(n, a, tuple(weights), coherence, _checked_trace(n, a, weights))


def compact_apply_reversal(state: CompactGhzState, r: float) -> CompactGhzState:
    """Post-selected post-damping collapse of strength r on every qubit.

    Mirror image of the weak stage: each |0> amplitude survives with
    factor sqrt(1-r), so a pattern with k zeros is scaled by (1-r)^k.
    """
    if not 0.0 <= r < 1.0:
        raise DomainError(f"reversal strength r must lie in [0, 1), got {r!r}")
    rb = 1.0 - r
    n = state.n
    weights = tuple(d * rb ** k for k, d in enumerate(state.diag_weight))
    a = state.a * rb ** n
    coherence = state.coherence * rb ** (n / 2.0)
    return CompactGhzState(n, a, weights, coherence, _checked_trace(n, a, weights))


def compact_to_dense(state: CompactGhzState):
    """Expand to the full matrix; only feasible for small n."""
    from .dense import MAX_QUBITS, DenseState

    n = state.n
    if n > MAX_QUBITS:
        raise DomainError(f"expansion needs n <= {MAX_QUBITS}, got n={n}")
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for idx in range(dim):
        zeros = n - idx.bit_count()
        mat[idx, idx] = state.diag_weight[zeros]
    mat[0, 0] += state.a
    mat[0, dim - 1] += state.coherence
    mat[dim - 1, 0] += state.coherence
    return DenseState(n, mat)


def transmissivity(gp: GhzParams, pp: ProtocolParams) -> float:
    """Overall success probability of the two post-selected stages.

    Equals the trace the compact pipeline accumulates in `norm`:
    alpha^2 (1-r)^n + beta^2 (1-s)^n (1 - p r)^n.
    """
    alpha, beta = gp.alpha, gp.beta
    n = gp.n
    return (alpha * alpha * (1.0 - pp.r) ** n
            + beta * beta * (1.0 - pp.s) ** n * (1.0 - pp.p * pp.r) ** n)


def protocol_compact(gp: GhzParams, pp: ProtocolParams) -> CompactGhzState:
    """Full pipeline on the compact engine: weak collapse, damping, reversal."""
    state = compact_from_gghz(gp)
    state = compact_apply_weak(state, pp.s)
    state = compact_apply_damping(state, pp.p)
    state = compact_apply_reversal(state, pp.r)
    return state
