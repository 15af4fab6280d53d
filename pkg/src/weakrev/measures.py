"""Entanglement measures for protocol states, closed form and dense.

The closed forms work directly on the protocol parameters and stay exact
for n in the hundreds; the dense routes diagonalize the full matrix and
exist to cross-check them on small systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedMeasureError
from .params import GhzParams, ProtocolParams

LOG_SPACE_ABOVE_N = 50
LN_DENSE_MAX_N = 8
MW_DENSE_MAX_N = 8

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class LnResult:
    """Block eigenvalue diagnostics for one bipartition.

    epsilon_m: the candidate negative eigenvalue of the partial transpose.
    negativity: max(0, -epsilon_m).
    e_ln: log2(1 + 2 * negativity).
    """

    epsilon_m: float
    negativity: float
    e_ln: float
    m: int


@dataclass(frozen=True)
class MwResult:
    """Global-entanglement diagnostics.

    c_n: the n-qubit concurrence-style correlation amplitude.
    e_mw: c_n squared.
    lambdas: the three distinct square-root-spectrum values entering c_n,
    as produced by the closed form (largest first is not guaranteed for
    the last two; their order can swap depending on parameters).
    """

    c_n: float
    e_mw: float
    lambdas: tuple[float, float, float]


def _pown(base: float, expo: float, log_route: bool) -> float:
    """Nonnegative power with graceful under/overflow on the log route."""
    if base == 0.0:
        return 1.0 if expo == 0 else 0.0
    if not log_route:
        return base ** expo
    t = expo * math.log(base)
    if t >= 709.0:
        return math.inf
    if t <= -745.0:
        return 0.0
    return math.exp(t)


def _protected_block_epsilon(alpha: float, beta: float, n: int, s: float,
                             p: float, r: float, m: int) -> float:
    """Candidate negative eigenvalue of the partial transpose, stable form.

    The raw quadratic for the 2x2 coherence block cancels catastrophically
    near the sign change, so the root is evaluated as
        eps = num / (b + sqrt(b^2 + c))
    where num carries the sign and the exploding ratio never appears alone.
    Callers guarantee beta > 0. Values p > 1 are accepted as an analytic
    continuation, meaningful when both block exponents m and n - m are even.
    """
    sb = 1.0 - s
    pb = 1.0 - p
    rb = 1.0 - r
    big = n > LOG_SPACE_ABOVE_N
    if big and (p > 1.0 or pb < 0.0):
        raise DomainError("the p > 1 continuation is limited to n <= 50")

    a2 = alpha * alpha
    b2 = beta * beta
    if big:
        t1 = _pown(p * rb, m, True) * _pown(pb, n - m, True)
        t2 = _pown(p * rb, n - m, True) * _pown(pb, m, True)
        c4 = 4.0 * ((a2 / b2) * _pown(rb * pb / sb, n, True) - _pown(rb * pb * p, n, True))
        total = a2 * _pown(rb, n, True) + b2 * _pown(sb, n, True) * _pown(1.0 - p * r, n, True)
        num = 2.0 * _pown(rb * pb, n, True) * (b2 * _pown(sb * p, n, True) - a2) / total
    else:
        t1 = (p * rb) ** m * pb ** (n - m)
        t2 = (p * rb) ** (n - m) * pb ** m
        c4 = 4.0 * ((a2 / b2) * (rb * pb / sb) ** n - (rb * pb * p) ** n)
        total = a2 * rb ** n + b2 * sb ** n * (1.0 - p * r) ** n
        num = 2.0 * (rb * pb) ** n * (b2 * (sb * p) ** n - a2) / total

    b = t1 + t2
    rad = b * b + c4
    if rad < 0.0:
        rad = 0.0  # provably nonnegative; trim float noise
    den = b + math.sqrt(rad)
    if den == 0.0 or num == 0.0:
        return 0.0
    return num / den


def ln_block_eigenvalue(gp: GhzParams, pp: ProtocolParams) -> LnResult:
    """Logarithmic negativity of the protocol state across an m|(n-m) cut."""
    n = gp.n
    m = pp.bipartition(n)
    if gp.beta == 0.0:
        return LnResult(epsilon_m=0.0, negativity=0.0, e_ln=0.0, m=m)
    eps = _protected_block_epsilon(gp.alpha, gp.beta, n, pp.s, pp.p, pp.r, m)
    neg = -eps if eps < 0.0 else 0.0
    return LnResult(epsilon_m=eps, negativity=neg, e_ln=math.log2(1.0 + 2.0 * neg), m=m)


def ln_epsilon_continued(gp: GhzParams, s: float, p: float, r: float,
                         m: int | None = None) -> LnResult:
    """Block eigenvalue with the damping strength continued past p = 1.

    The physical channel caps p at 1, where the block eigenvalue may still
    be negative; the closed form stays finite beyond that point and its
    sign change locates the death boundary. Requires even block sizes when
    p > 1 so every sign in the continuation is carried by an even power.
    """
    n = gp.n
    m = n // 2 if m is None else m
    if not isinstance(m, int) or not 1 <= m <= n - 1:
        raise DomainError(f"cut size m must be an int in [1, {n - 1}], got {m!r}")
    if not (math.isfinite(p) and p >= 0.0):
        raise DomainError(f"continued damping p must be finite and >= 0, got {p!r}")
    if not 0.0 <= s < 1.0:
        raise DomainError(f"collapse strength s must lie in [0, 1), got {s!r}")
    if not 0.0 <= r < 1.0:
        raise DomainError(f"reversal strength r must lie in [0, 1), got {r!r}")
    if p > 1.0 and (m % 2 or (n - m) % 2):
        raise DomainError(
            f"the p > 1 continuation needs even blocks, got m={m}, n-m={n - m}")
    if gp.beta == 0.0:
        return LnResult(epsilon_m=0.0, negativity=0.0, e_ln=0.0, m=m)
    eps = _protected_block_epsilon(gp.alpha, gp.beta, n, s, p, r, m)
    neg = -eps if eps < 0.0 else 0.0
    return LnResult(epsilon_m=eps, negativity=neg, e_ln=math.log2(1.0 + 2.0 * neg), m=m)


def ln_dense(state, m: int) -> LnResult:
    """Dense cross-check of `ln_block_eigenvalue` on the first-m cut."""
    from .dense import mask_first_m, partial_transpose
    from .eig import herm_eigenvalues

    if state.n > LN_DENSE_MAX_N:
        raise DomainError(f"dense route holds at most {LN_DENSE_MAX_N} qubits, got n={state.n}")
    mask = mask_first_m(state.n, m)
    tr = state.trace()
    if tr <= 0.0:
        raise DomainError(f"state trace must be positive, got {tr!r}")
    mat = state.matrix / tr
    pt_eigs = herm_eigenvalues(
        partial_transpose(type(state)._wrap(state.n, mat, True), mask).matrix
    ).eigenvalues
    eps = float(pt_eigs[-1])
    neg = float(-pt_eigs[pt_eigs < 0.0].sum())
    return LnResult(epsilon_m=eps, negativity=neg, e_ln=math.log2(1.0 + 2.0 * neg), m=m)


def _mw_pieces(gp: GhzParams, pp: ProtocolParams) -> tuple[float, float, float, float]:
    """(total, corner coherence, generic-pattern weight, trailing-diag product)."""
    n = gp.n
    alpha, beta = gp.alpha, gp.beta
    sb = 1.0 - pp.s
    pb = 1.0 - pp.p
    rb = 1.0 - pp.r
    big = n > LOG_SPACE_ABOVE_N
    a2 = alpha * alpha
    b2 = beta * beta
    half = n / 2.0

    total = a2 * _pown(rb, n, big) + b2 * _pown(sb, n, big) * _pown(1.0 - pp.p * pp.r, n, big)
    w = alpha * beta * _pown(sb * pb * rb, half, big)
    generic = b2 * _pown(sb, n, big) * _pown(rb * pb * pp.p, half, big)
    head = a2 * _pown(rb, n, big) + b2 * _pown(sb, n, big) * _pown(pp.p * rb, n, big)
    tail = b2 * _pown(sb, n, big) * _pown(pb, n, big)
    return total, w, generic, head * tail


def mw_global_entanglement(gp: GhzParams, pp: ProtocolParams) -> MwResult:
    """Closed-form n-qubit correlation amplitude; even n only.

    c_n = max(0, 2w - (2^n - 2) g) / total, where w is the surviving corner
    coherence and g the shared square-root weight of the 2^n - 2 generic
    spin-flip pairs.
    """
    n = gp.n
    if n % 2:
        raise UnsupportedMeasureError(f"this measure needs an even qubit count, got n={n}")
    total, w, generic, corner_prod = _mw_pieces(gp, pp)

    if generic == 0.0:
        bulk = 0.0
    elif n > LOG_SPACE_ABOVE_N:
        # (2^n - 2) g, assembled in log space to dodge the 2^n overflow
        t = math.log(generic) + n * _LN2 + math.log1p(-(2.0 ** (1 - n)))
        bulk = math.inf if t >= 709.0 else math.exp(t)
    else:
        bulk = float((1 << n) - 2) * generic

    raw = 2.0 * w - bulk
    c_n = raw / total if raw > 0.0 else 0.0

    root = math.sqrt(corner_prod)
    lam1 = ((root + w) / total) ** 2
    lam2 = ((root - w) / total) ** 2
    lamj = (generic / total) ** 2
    return MwResult(c_n=c_n, e_mw=c_n * c_n, lambdas=(lam1, lam2, lamj))


_SIGMA_Y_CACHE: dict[int, np.ndarray] = {}


def _sigma_y_tensor(n: int) -> np.ndarray:
    cached = _SIGMA_Y_CACHE.get(n)
    if cached is None:
        sy = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
        cached = sy
        for _ in range(n - 1):
            cached = np.kron(cached, sy)
        _SIGMA_Y_CACHE[n] = cached
    return cached


def mw_dense(state) -> MwResult:
    """Dense cross-check of the closed form; even n up to 8.

    The measure subtracts many square-rooted eigenvalues of
    sqrt(rho) (sigma_y rho* sigma_y) sqrt(rho) from the largest one, and the
    sum nearly cancels the head term. Forming that sandwich and then taking
    eigenvalue square roots would turn solver noise on true zeros into
    sqrt(ulp)-sized leaks, so instead the square roots are computed directly
    as singular values of B = sqrt(sigma_y rho* sigma_y) sqrt(rho): no
    intermediate is squared and each root carries only ulp-level absolute
    error. The spin-flip conjugation commutes with the square root, which
    makes one diagonalization of rho enough to build both factors.
    """
    from .eig import herm_eigenvalues, singular_values

    n = state.n
    if n % 2:
        raise UnsupportedMeasureError(f"this measure needs an even qubit count, got n={n}")
    if n > MW_DENSE_MAX_N:
        raise DomainError(f"dense route holds at most {MW_DENSE_MAX_N} qubits, got n={n}")
    tr = state.trace()
    if tr <= 0.0:
        raise DomainError(f"state trace must be positive, got {tr!r}")
    rho = state.matrix / tr

    es = herm_eigenvalues(rho, want_vectors=True)
    vals = np.clip(es.eigenvalues, 0.0, None)
    # Rank cleanup happens at the density-matrix level, where genuine small
    # eigenvalues of this state family sit orders of magnitude above solver
    # noise on exact zeros; downstream of the square root no floor is needed.
    vals[vals < 2.0 * np.finfo(np.float64).eps * vals[0]] = 0.0
    sqrt_rho = (es.vectors * np.sqrt(vals)) @ es.vectors.conj().T

    y = _sigma_y_tensor(n)
    sqrt_flipped = y @ sqrt_rho.conj() @ y
    roots = singular_values(sqrt_flipped @ sqrt_rho)

    c = float(roots[0] - roots[1:].sum())
    if c < 0.0:
        c = 0.0
    top = (float(roots[0] ** 2), float(roots[1] ** 2), float(roots[2] ** 2))
    return MwResult(c_n=c, e_mw=c * c, lambdas=top)


def critical_p_closed_form(gp: GhzParams, s: float, measure_kind: str) -> float:
    """Damping probability where the measure hits zero, capped at 1.

    For the block-eigenvalue measure the sign change sits at
    p = (alpha/beta)^(2/n) / (1-s); the correlation-amplitude measure
    replaces beta by beta (2^(n-1) - 1) and needs even n.
    """
    if measure_kind not in ("ln", "mw"):
        raise DomainError(f"measure kind must be 'ln' or 'mw', got {measure_kind!r}")
    if not 0.0 <= s < 1.0:
        raise DomainError(f"weak strength s must lie in [0, 1), got {s!r}")
    n = gp.n
    alpha, beta = gp.alpha, gp.beta
    if measure_kind == "mw" and n % 2:
        raise UnsupportedMeasureError(f"this measure needs an even qubit count, got n={n}")
    if beta == 0.0:
        return 1.0
    if alpha == 0.0:
        return 0.0
    sb = 1.0 - s
    if measure_kind == "ln":
        value = (alpha / beta) ** (2.0 / n) / sb
    elif n <= LOG_SPACE_ABOVE_N:
        value = (alpha / (beta * ((1 << (n - 1)) - 1))) ** (2.0 / n) / sb
    else:
        ln_count = (n - 1) * _LN2 + math.log1p(-(2.0 ** (1 - n)))
        value = math.exp((2.0 / n) * (math.log(alpha) - math.log(beta) - ln_count)) / sb
    return min(1.0, value)
