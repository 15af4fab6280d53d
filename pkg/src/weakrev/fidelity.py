"""Average fidelities for teleportation and information splitting.

Closed forms cover the symmetric resource (theta = pi/2); the dense
simulations replay the full protocol on small systems for any theta and
serve as the oracle the closed forms are checked against.

State averaging uses an exact octahedral quadrature: six single-qubit
states whose second and fourth moments match the uniform average, namely
<|a|^4> = 1/3, <|a|^2 |b|^2> = 1/6, and vanishing phase-unbalanced terms.
Correction unitaries are chosen per measurement outcome from a fixed
tensor-Pauli candidate set by that same averaged overlap, so the choice
never peeks at the unknown state.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dense import ZERO_PROB, DenseState, protocol_dense
from .errors import DomainError
from .params import GhzParams, ProtocolParams

SIM_MAX_N = 7
CLASSICAL_BOUND = 2.0 / 3.0

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_HAAR_POINTS = (
    (1.0 + 0.0j, 0.0 + 0.0j),
    (0.0 + 0.0j, 1.0 + 0.0j),
    (_INV_SQRT2 + 0.0j, _INV_SQRT2 + 0.0j),
    (_INV_SQRT2 + 0.0j, -_INV_SQRT2 + 0.0j),
    (_INV_SQRT2 + 0.0j, _INV_SQRT2 * 1.0j),
    (_INV_SQRT2 + 0.0j, -_INV_SQRT2 * 1.0j),
)

BELL_LABELS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")

CORRECTION_LABELS = ("identity", "flip_all", "phase_first", "flip_phase")


@dataclass(frozen=True)
class UnknownQubit:
    """The state to send: a|0> + b|1>, normalized within 1e-12."""

    a: complex
    b: complex

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"unknown-qubit amplitudes have norm {norm!r}, need 1")


@dataclass(frozen=True)
class BranchOutcome:
    """One Bell-measurement branch: its probability and Bob's corrected state.

    `bobs_state` is None when the branch probability is negligible.
    """

    label: str
    probability: float
    bobs_state: DenseState | None


@dataclass(frozen=True)
class FidelityReport:
    kind: str
    f_avg: float
    r_used: float
    s_used: float
    p_used: float
    n: int
    above_classical: bool


def _check_closed_args(n: int, s: float, p: float, r: float) -> None:
    if not (isinstance(n, int) and n >= 3):
        raise DomainError(f"closed forms need an integer n >= 3, got {n!r}")
    if not 0.0 <= s < 1.0:
        raise DomainError(f"weak strength s must lie in [0, 1), got {s!r}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"damping p must lie in [0, 1], got {p!r}")
    if not 0.0 <= r < 1.0:
        raise DomainError(f"reversal strength r must lie in [0, 1), got {r!r}")


def fidelity_tel_closed(n: int, s: float, p: float, r: float) -> float:
    """Average teleportation fidelity over the protected symmetric resource."""
    _check_closed_args(n, s, p, r)
    sb = 1.0 - s
    pb = 1.0 - p
    rb = 1.0 - r
    sn = sb ** n
    total2 = rb ** n + sn * (1.0 - p * r) ** n
    num = (2.0 * rb ** n * (1.0 + p ** n * sn)
           + 2.0 * pb ** n * sn
           + sn * (p * rb * pb ** (n - 1) + pb * (p * rb) ** (n - 1))
           + 2.0 * (rb * pb * sb) ** (n / 2.0))
    return num / (3.0 * total2)


def fidelity_is_closed(n: int, s: float, p: float, r: float) -> float:
    """Average information-splitting fidelity over the protected resource."""
    _check_closed_args(n, s, p, r)
    sb = 1.0 - s
    pb = 1.0 - p
    rb = 1.0 - r
    sn = sb ** n
    total2 = rb ** n + sn * (1.0 - p * r) ** n
    num = (rb ** n
           + sn * (pb + p * rb) ** (n - 2) * (pb * pb + p * p * rb * rb + p * pb * rb)
           + (rb * pb * sb) ** (n / 2.0))
    return 2.0 * num / (3.0 * total2)


def report_fidelity(kind: str, n: int, s: float, p: float, r: float) -> FidelityReport:
    """Closed-form fidelity bundled with its parameters and the 2/3 flag."""
    if kind == "tel":
        f = fidelity_tel_closed(n, s, p, r)
    elif kind == "is":
        f = fidelity_is_closed(n, s, p, r)
    else:
        raise DomainError(f"fidelity kind must be 'tel' or 'is', got {kind!r}")
    return FidelityReport(kind=kind, f_avg=f, r_used=r, s_used=s, p_used=p, n=n,
                          above_classical=f >= CLASSICAL_BOUND)


def _bell_vectors() -> tuple[np.ndarray, ...]:
    v = _INV_SQRT2
    return (
        np.array([v, 0.0, 0.0, v], dtype=np.complex128),
        np.array([v, 0.0, 0.0, -v], dtype=np.complex128),
        np.array([0.0, v, v, 0.0], dtype=np.complex128),
        np.array([0.0, v, -v, 0.0], dtype=np.complex128),
    )


def _transformed_target(label: str, a: complex, b: complex) -> tuple[complex, complex]:
    # Amplitudes of U^dag (a|0...0> + b|1...1>) for each candidate correction.
    if label == "identity":
        return a, b
    if label == "flip_all":
        return b, a
    if label == "phase_first":
        return a, -b
    if label == "flip_phase":
        return -b, a
    raise DomainError(f"unknown correction {label!r}")


def _corner_overlap(blk: np.ndarray, last: int, va: complex, vb: complex) -> float:
    val = (abs(va) ** 2 * blk[0, 0] + va.conjugate() * vb * blk[0, last]
           + vb.conjugate() * va * blk[last, 0] + abs(vb) ** 2 * blk[last, last])
    return float(val.real)


def _apply_correction(mat: np.ndarray, label: str) -> np.ndarray:
    if label == "identity":
        return mat.copy()
    if label == "flip_all":
        return np.ascontiguousarray(mat[::-1, ::-1])
    half = mat.shape[0] // 2
    z = np.ones(mat.shape[0])
    z[half:] = -1.0
    zz = np.outer(z, z)
    if label == "phase_first":
        return mat * zz
    return np.ascontiguousarray(mat[::-1, ::-1]) * zz


def _normalized_resource(gp: GhzParams, pp: ProtocolParams) -> np.ndarray:
    resource = protocol_dense(gp, pp)
    tr = resource.trace()
    if tr <= 0.0:
        raise DomainError(f"protocol success probability is {tr!r}; nothing to post-select")
    return resource.matrix / tr


def _qubit_outer(a: complex, b: complex) -> np.ndarray:
    return np.array([[a * a.conjugate(), a * b.conjugate()],
                     [b * a.conjugate(), b * b.conjugate()]], dtype=np.complex128)


def simulate_teleportation_dense(gp: GhzParams, pp: ProtocolParams,
                                 psi0: UnknownQubit):
    """Replay the teleportation protocol on the dense engine.

    Returns (branches, f_avg). The four BranchOutcome entries describe the
    sender's Bell outcomes for the given psi0, with Bob's state already
    corrected. f_avg is the exactly state-averaged fidelity, so it does
    not depend on psi0.
    """
    n = gp.n
    if n > SIM_MAX_N:
        raise DomainError(f"simulation holds at most {SIM_MAX_N} resource qubits, got n={n}")
    rho = _normalized_resource(gp, pp)
    dim_b = 1 << (n - 1)
    last = dim_b - 1
    bells = _bell_vectors()

    table = np.zeros((4, len(CORRECTION_LABELS)))
    for qa, qb in _HAAR_POINTS:
        joint = np.kron(_qubit_outer(qa, qb), rho).reshape(4, dim_b, 4, dim_b)
        for j, chi in enumerate(bells):
            blk = np.einsum("a,abcd,c->bd", chi.conj(), joint, chi)
            for ci, cand in enumerate(CORRECTION_LABELS):
                va, vb = _transformed_target(cand, qa, qb)
                table[j, ci] += _corner_overlap(blk, last, va, vb)
    table /= len(_HAAR_POINTS)
    chosen = [int(np.argmax(table[j])) for j in range(4)]
    f_avg = float(sum(table[j, chosen[j]] for j in range(4)))

    a0 = complex(psi0.a)
    b0 = complex(psi0.b)
    joint = np.kron(_qubit_outer(a0, b0), rho).reshape(4, dim_b, 4, dim_b)
    branches = []
    for j, (label, chi) in enumerate(zip(BELL_LABELS, bells)):
        blk = np.einsum("a,abcd,c->bd", chi.conj(), joint, chi)
        prob = float(np.einsum("aa->", blk).real)
        if prob <= ZERO_PROB:
            branches.append(BranchOutcome(label=label, probability=prob, bobs_state=None))
            continue
        corrected = _apply_correction(blk, CORRECTION_LABELS[chosen[j]]) / prob
        branches.append(BranchOutcome(
            label=label, probability=prob,
            bobs_state=DenseState(n - 1, corrected, normalized=True)))
    return branches, f_avg


def simulate_splitting_dense(gp: GhzParams, pp: ProtocolParams,
                             psi0: UnknownQubit) -> float:
    """Replay information splitting on the dense engine; returns f_avg.

    After the sender's Bell measurement, the first n-2 receiver qubits are
    measured along x and the last receiver applies its best Pauli
    correction per joint outcome. The returned average is exact over the
    unknown state, so psi0 only fixes the interface.
    """
    n = gp.n
    if n > SIM_MAX_N:
        raise DomainError(f"simulation holds at most {SIM_MAX_N} resource qubits, got n={n}")
    if n < 3:
        raise DomainError(f"splitting needs at least one assistant qubit, got n={n}")
    del psi0  # averaging is exact; see docstring
    rho = _normalized_resource(gp, pp)
    dim_b = 1 << (n - 1)
    k = n - 2
    dim_a = 1 << k
    bells = _bell_vectors()

    xvecs = []
    scale = 1.0 / math.sqrt(dim_a)
    for signs in itertools.product((1.0, -1.0), repeat=k):
        vec = np.array([1.0], dtype=np.complex128)
        for sgn in signs:
            vec = np.kron(vec, np.array([1.0, sgn], dtype=np.complex128))
        xvecs.append(vec * scale)

    table = np.zeros((4, dim_a, len(CORRECTION_LABELS)))
    for qa, qb in _HAAR_POINTS:
        joint = np.kron(_qubit_outer(qa, qb), rho).reshape(4, dim_b, 4, dim_b)
        for j, chi in enumerate(bells):
            blk = np.einsum("a,abcd,c->bd", chi.conj(), joint, chi)
            t = blk.reshape(dim_a, 2, dim_a, 2)
            for xi, xv in enumerate(xvecs):
                sig = np.einsum("a,abcd,c->bd", xv.conj(), t, xv)
                for ci, cand in enumerate(CORRECTION_LABELS):
                    va, vb = _transformed_target(cand, qa, qb)
                    table[j, xi, ci] += _corner_overlap(sig, 1, va, vb)
    table /= len(_HAAR_POINTS)
    return float(table.max(axis=2).sum())
