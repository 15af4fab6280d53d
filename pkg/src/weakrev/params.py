"""Parameter value types shared by the dense and compact engines."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class GhzParams:
    """Initial state family: alpha|0...0> + beta|1...1> on n qubits.

    alpha = cos(theta/2) and beta = sin(theta/2), so normalization holds by
    construction for any theta in [0, pi].
    """

    theta: float
    n: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 2):
            raise DomainError(f"qubit count must be an integer >= 2, got {self.n!r}")
        if not (0.0 <= self.theta <= math.pi):
            raise DomainError(f"theta must lie in [0, pi], got {self.theta!r}")

    @property
    def alpha(self) -> float:
        return math.cos(0.5 * self.theta)

    @property
    def beta(self) -> float:
        return math.sin(0.5 * self.theta)


@dataclass(frozen=True)
class ProtocolParams:
    """Channel strengths for the weak -> damping -> reversal pipeline.

    s: pre-damping weak measurement strength, in [0, 1).
    p: amplitude damping probability, in [0, 1].
    r: post-damping reversal strength, in [0, 1).
    m: bipartition size for block-eigenvalue measures; None means floor(n/2),
       resolved against a concrete n via `bipartition`.
    """

    s: float = 0.0
    p: float = 0.0
    r: float = 0.0
    m: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.s < 1.0:
            raise DomainError(f"weak strength s must lie in [0, 1), got {self.s!r}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"damping p must lie in [0, 1], got {self.p!r}")
        if not 0.0 <= self.r < 1.0:
            raise DomainError(f"reversal strength r must lie in [0, 1), got {self.r!r}")
        if self.m is not None and not (isinstance(self.m, int) and self.m >= 1):
            raise DomainError(f"bipartition m must be a positive integer, got {self.m!r}")

    def bipartition(self, n: int) -> int:
        m = n // 2 if self.m is None else self.m
        if not 1 <= m <= n - 1:
            raise DomainError(f"bipartition m={m} invalid for n={n} (need 1 <= m <= n-1)")
        return m
