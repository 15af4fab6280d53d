"""Exact density-matrix engine on up to 10 qubits.

Index convention: qubit 0 is the most significant bit of the computational
basis index, so basis state |q0 q1 ... q_{n-1}> sits at row sum(q_i 2^(n-1-i)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import GhzParams, ProtocolParams

MAX_QUBITS = 10
HERM_TOL = 1e-12
TRACE_TOL = 1e-10
PROJECTOR_TOL = 1e-10
ZERO_PROB = 1e-14

_KRAUS_LABELS = ("damping", "weak", "reversal")


def _max_eig_2x2(h: np.ndarray) -> float:
    # Largest eigenvalue of a 2x2 Hermitian matrix, closed form.
    mean = 0.5 * (h[0, 0].real + h[1, 1].real)
    disc = math.sqrt((0.5 * (h[0, 0].real - h[1, 1].real)) ** 2 + abs(h[0, 1]) ** 2)
    return mean + disc


@dataclass(frozen=True)
class KrausPair:
    """A two-operator qubit channel {op0, op1} with a semantic label.

    For 'damping' the pair must be trace preserving. For 'weak' and
    'reversal' each operator must be a valid measurement operator
    (op^dag op <= identity); the pair need not be complete because the
    protocol post-selects one outcome.
    """

    op0: np.ndarray
    op1: np.ndarray
    label: str

    def __post_init__(self):
        for name in ("op0", "op1"):
            op = np.array(getattr(self, name), dtype=np.complex128, copy=True)
            if op.shape != (2, 2):
                raise DomainError(f"{name} must be 2x2, got shape {op.shape}")
            op.setflags(write=False)
            object.__setattr__(self, name, op)
        if self.label not in _KRAUS_LABELS:
            raise DomainError(f"unknown channel label {self.label!r}")
        total = self.op0.conj().T @ self.op0 + self.op1.conj().T @ self.op1
        if self.label == "damping":
            if np.abs(total - np.eye(2)).max() > HERM_TOL:
                raise DomainError("damping operators must satisfy completeness")
        else:
            for name in ("op0", "op1"):
                op = getattr(self, name)
                if _max_eig_2x2(op.conj().T @ op) > 1.0 + HERM_TOL:
                    raise DomainError(f"{name} exceeds unit measurement strength")


def damping_kraus(p: float) -> KrausPair:
    """Amplitude damping of probability p; op0 keeps, op1 decays |1> to |0>."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"damping p must lie in [0, 1], got {p!r}")
    op0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - p)]], dtype=np.complex128)
    op1 = np.array([[0.0, math.sqrt(p)], [0.0, 0.0]], dtype=np.complex128)
    return KrausPair(op0, op1, "damping")


def weak_kraus(s: float) -> KrausPair:
    """Pre-damping partial collapse of strength s; the protocol keeps op1."""
    if not 0.0 <= s < 1.0:
        raise DomainError(f"weak strength s must lie in [0, 1), got {s!r}")
    op0 = np.array([[0.0, 0.0], [0.0, math.sqrt(s)]], dtype=np.complex128)
    op1 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - s)]], dtype=np.complex128)
    return KrausPair(op0, op1, "weak")


def reversal_kraus(r: float) -> KrausPair:
    """Post-damping partial collapse of strength r; the protocol keeps op0."""
    if not 0.0 <= r < 1.0:
        raise DomainError(f"reversal strength r must lie in [0, 1), got {r!r}")
    op0 = np.array([[math.sqrt(1.0 - r), 0.0], [0.0, 1.0]], dtype=np.complex128)
    op1 = np.array([[math.sqrt(r), 0.0], [0.0, 0.0]], dtype=np.complex128)
    return KrausPair(op0, op1, "reversal")


class DenseState:
    """An n-qubit operator stored as its full 2^n x 2^n matrix.

    `normalized` marks whether the matrix is meant to have unit trace;
    protocol stages that post-select produce subnormalized states. The
    constructor checks shape and Hermiticity but not positivity, which
    costs a full eigensolve; tests use `min_eigenvalue` for that.
    """

    __slots__ = ("n", "matrix", "normalized")

    def __init__(self, n: int, matrix, normalized: bool | None = None):
        if not (isinstance(n, int) and 1 <= n <= MAX_QUBITS):
            raise DomainError(f"qubit count must be in 1..{MAX_QUBITS}, got {n!r}")
        mat = np.array(matrix, dtype=np.complex128, order="C", copy=True)
        dim = 1 << n
        if mat.shape != (dim, dim):
            raise DomainError(f"matrix shape {mat.shape} does not match n={n}")
        if np.abs(mat - mat.conj().T).max() > HERM_TOL:
            raise DomainError("matrix is not Hermitian")
        tr = float(mat.trace().real)
        if normalized is None:
            normalized = abs(tr - 1.0) <= TRACE_TOL
        elif normalized and abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"state marked normalized but trace is {tr!r}")
        self.n = n
        self.matrix = mat
        self.normalized = bool(normalized)

    @classmethod
    def _wrap(cls, n: int, matrix: np.ndarray, normalized: bool) -> "DenseState":
        # Internal fast path: matrix is adopted, caller guarantees validity.
        obj = object.__new__(cls)
        obj.n = n
        obj.matrix = matrix
        obj.normalized = normalized
        return obj

    def trace(self) -> float:
        return float(self.matrix.trace().real)

    def min_eigenvalue(self) -> float:
        from .eig import herm_eigenvalues

        return float(herm_eigenvalues(self.matrix).eigenvalues[-1])


def make_gghz(params: GhzParams) -> DenseState:
    """Density matrix of alpha|0...0> + beta|1...1>."""
    if params.n > MAX_QUBITS:
        raise DomainError(f"dense engine holds at most {MAX_QUBITS} qubits, got n={params.n}")
    dim = 1 << params.n
    vec = np.zeros(dim, dtype=np.complex128)
    vec[0] = params.alpha
    vec[-1] = params.beta
    return DenseState(params.n, np.outer(vec, vec.conj()), normalized=True)


def _apply_op(mat: np.ndarray, n: int, q: int, op: np.ndarray) -> np.ndarray:
    # K rho K^dag on qubit q, acting on both indices through a 6-axis view.
    lead = 1 << q
    trail = 1 << (n - 1 - q)
    t = mat.reshape(lead, 2, trail, lead, 2, trail)
    t = np.einsum("ab,xbyzcw->xayzcw", op, t)
    t = np.einsum("xayzcw,dc->xayzdw", t, op.conj())
    return np.ascontiguousarray(t).reshape(mat.shape)


def _selected_ops(kraus: KrausPair, keep_only_op: int | None) -> tuple[np.ndarray, ...]:
    if keep_only_op is None:
        return (kraus.op0, kraus.op1)
    if keep_only_op == 0:
        return (kraus.op0,)
    if keep_only_op == 1:
        return (kraus.op1,)
    raise DomainError(f"keep_only_op must be None, 0 or 1, got {keep_only_op!r}")


def _apply_map_raw(mat: np.ndarray, n: int, q: int, ops: tuple[np.ndarray, ...]) -> np.ndarray:
    out = _apply_op(mat, n, q, ops[0])
    for op in ops[1:]:
        out += _apply_op(mat, n, q, op)
    return out


def apply_single_qubit_map(state: DenseState, qubit_index: int, kraus: KrausPair,
                           keep_only_op: int | None = None) -> DenseState:
    """Apply a one-qubit channel, optionally post-selecting a single operator.

    With a selector the result is generally subnormalized; its trace is the
    probability weight of that outcome branch.
    """
    if not 0 <= qubit_index < state.n:
        raise DomainError(f"qubit index {qubit_index} out of range for n={state.n}")
    ops = _selected_ops(kraus, keep_only_op)
    out = _apply_map_raw(state.matrix, state.n, qubit_index, ops)
    return DenseState(state.n, out)


def apply_channel_all_qubits(state: DenseState, kraus: KrausPair,
                             keep_only_op: int | None = None) -> DenseState:
    """Apply the same one-qubit channel to every qubit in turn."""
    ops = _selected_ops(kraus, keep_only_op)
    mat = state.matrix
    for q in range(state.n):
        mat = _apply_map_raw(mat, state.n, q, ops)
    return DenseState(state.n, mat)


def normalize_mask(partition_mask, n: int) -> frozenset[int]:
    """Canonicalize a qubit subset given as an int bitmask or an iterable.

    Bit j of an integer mask refers to qubit j. The subset must be a
    nonempty proper subset of range(n).
    """
    if isinstance(partition_mask, (int, np.integer)):
        if partition_mask < 0:
            raise DomainError(f"bitmask must be nonnegative, got {partition_mask!r}")
        qubits = frozenset(j for j in range(n) if (int(partition_mask) >> j) & 1)
        if int(partition_mask) >> n:
            raise DomainError(f"bitmask {partition_mask:#x} references qubits beyond n={n}")
    else:
        listed = list(partition_mask)
        if any(not (isinstance(q, (int, np.integer)) and 0 <= int(q) < n) for q in listed):
            raise DomainError(f"qubit subset {listed!r} invalid for n={n}")
        qubits = frozenset(int(q) for q in listed)
        if len(qubits) != len(listed):
            raise DomainError(f"qubit subset {listed!r} contains duplicates")
    if not qubits or len(qubits) == n:
        raise DomainError("partition must be a nonempty proper subset of the qubits")
    return qubits


def mask_first_m(n: int, m: int) -> frozenset[int]:
    """The standard bipartition: first m qubits against the rest."""
    if not 1 <= m <= n - 1:
        raise DomainError(f"need 1 <= m <= n-1, got m={m}, n={n}")
    return frozenset(range(m))


def partial_transpose(state: DenseState, partition_mask) -> DenseState:
    """Transpose the indices of the given qubit subset."""
    qubits = normalize_mask(partition_mask, state.n)
    n = state.n
    t = state.matrix.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for q in qubits:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    out = np.ascontiguousarray(t.transpose(axes)).reshape(state.matrix.shape)
    return DenseState._wrap(n, out, state.normalized)


def negativity_dense(state: DenseState, partition_mask) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    from .eig import herm_eigenvalues

    if not state.normalized:
        raise DomainError("negativity is defined for unit-trace states; normalize first")
    pt = partial_transpose(state, partition_mask)
    eigs = herm_eigenvalues(pt.matrix).eigenvalues
    return float(-eigs[eigs < 0.0].sum())


def project_and_renormalize(state: DenseState, projector, acting_qubits):
    """Project a subset of qubits and renormalize.

    Returns (DenseState, probability), or (None, probability) when the
    outcome probability is at most 1e-14. `projector` must be Hermitian
    and idempotent on the listed qubits.
    """
    n = state.n
    qubits = [int(q) for q in acting_qubits]
    if not qubits or len(set(qubits)) != len(qubits):
        raise DomainError(f"acting qubits {qubits!r} must be distinct and nonempty")
    if any(not 0 <= q < n for q in qubits):
        raise DomainError(f"acting qubits {qubits!r} out of range for n={n}")
    k = len(qubits)
    proj = np.array(projector, dtype=np.complex128, copy=True)
    if proj.shape != (1 << k, 1 << k):
        raise DomainError(f"projector shape {proj.shape} does not match {k} qubits")
    if np.abs(proj - proj.conj().T).max() > PROJECTOR_TOL:
        raise DomainError("projector is not Hermitian")
    if np.abs(proj @ proj - proj).max() > PROJECTOR_TOL:
        raise DomainError("projector is not idempotent")

    rest = [q for q in range(n) if q not in qubits]
    perm = qubits + rest
    axes = perm + [n + a for a in perm]
    t = state.matrix.reshape((2,) * (2 * n)).transpose(axes)
    t = np.ascontiguousarray(t).reshape(1 << k, 1 << (n - k), 1 << k, 1 << (n - k))
    out = np.einsum("ab,bxcy,cd->axdy", proj, t, proj)

    prob = float(np.einsum("axax->", out).real)
    if prob <= ZERO_PROB:
        return None, prob

    inv = np.argsort(axes)
    full = out.reshape((2,) * (2 * n)).transpose(inv)
    full = np.ascontiguousarray(full).reshape(state.matrix.shape) / prob
    return DenseState(n, full, normalized=True), prob


def protocol_dense(gp: GhzParams, pp: ProtocolParams) -> DenseState:
    """Full pipeline on the dense engine: weak collapse, damping, reversal.

    The result is left subnormalized; its trace is the success probability
    of both post-selected stages.
    """
    state = make_gghz(gp)
    mat = state.matrix
    n = state.n
    weak = weak_kraus(pp.s)
    damp = damping_kraus(pp.p)
    rev = reversal_kraus(pp.r)
    for q in range(n):
        mat = _apply_op(mat, n, q, weak.op1)
    for q in range(n):
        mat = _apply_map_raw(mat, n, q, (damp.op0, damp.op1))
    for q in range(n):
        mat = _apply_op(mat, n, q, rev.op0)
    return DenseState._wrap(n, mat, bool(abs(mat.trace().real - 1.0) <= TRACE_TOL))
