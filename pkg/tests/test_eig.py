"""Eigensolver tests: exact small cases, NumPy cross-checks, backend parity."""

import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakrev import DomainError, NumericalError, backend_name, herm_eigenvalues, singular_values
from weakrev import _jacobi_py


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (raw + raw.conj().T) / 2.0


def random_complex(shape, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_backend_name_is_known():
    assert backend_name() in ("compiled", "python")


def test_env_override_honored():
    forced = os.environ.get("WEAKREV_PURE_PYTHON", "0") not in ("", "0")
    if forced:
        assert backend_name() == "python"


def test_compiled_extension_importable():
    pytest.importorskip("weakrev._jacobi", reason="compiled extension not built")


def test_identity_matrix_exact():
    res = herm_eigenvalues(np.eye(5, dtype=complex))
    assert res.eigenvalues.tolist() == [1.0] * 5


def test_diagonal_matrix_sorted_descending_exactly():
    res = herm_eigenvalues(np.diag([3.0, -1.0, 7.0, 0.5]).astype(complex))
    assert res.eigenvalues.tolist() == [7.0, 3.0, 0.5, -1.0]


def test_two_by_two_analytic():
    a, b = 1.25, -0.75
    w = 0.5 - 0.25j
    mat = np.array([[a, w], [np.conj(w), b]])
    mean = (a + b) / 2.0
    half = math.hypot((a - b) / 2.0, abs(w))
    res = herm_eigenvalues(mat)
    assert res.eigenvalues[0] == pytest.approx(mean + half, abs=1e-14)
    assert res.eigenvalues[1] == pytest.approx(mean - half, abs=1e-14)


@pytest.mark.parametrize("dim", [3, 8, 17, 40])
def test_matches_numpy_eigvalsh(dim):
    mat = random_hermitian(dim, seed=100 + dim)
    res = herm_eigenvalues(mat)
    ref = np.linalg.eigvalsh(mat)[::-1]
    assert np.max(np.abs(res.eigenvalues - ref)) < 1e-11


@pytest.mark.parametrize("dim", [4, 12, 24])
def test_eigenvector_reconstruction(dim):
    mat = random_hermitian(dim, seed=7 * dim)
    res = herm_eigenvalues(mat, want_vectors=True)
    rebuilt = res.vectors @ np.diag(res.eigenvalues) @ res.vectors.conj().T
    assert np.max(np.abs(rebuilt - mat)) < 1e-9
    gram = res.vectors.conj().T @ res.vectors
    assert np.max(np.abs(gram - np.eye(dim))) < 1e-10


def test_input_matrix_not_mutated():
    mat = random_hermitian(9, seed=3)
    before = mat.copy()
    herm_eigenvalues(mat, want_vectors=True)
    assert np.array_equal(mat, before)


def test_sweep_budget_exhaustion_raises():
    mat = random_hermitian(6, seed=11)
    with pytest.raises(NumericalError):
        herm_eigenvalues(mat, max_sweeps=0)


def test_rejects_non_hermitian():
    mat = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(DomainError):
        herm_eigenvalues(mat)


def test_rejects_non_square_and_empty():
    with pytest.raises(DomainError):
        herm_eigenvalues(np.zeros((2, 3), dtype=complex))
    with pytest.raises(DomainError):
        herm_eigenvalues(np.zeros((0, 0), dtype=complex))


def test_rejects_oversized_matrix():
    with pytest.raises(DomainError):
        herm_eigenvalues(np.eye(1025, dtype=complex))


def test_fallback_agrees_with_selected_backend():
    # Calling the pure kernel directly sidesteps the import-time selection,
    # so this stays a real comparison even when the extension is active.
    mat = random_hermitian(14, seed=42)
    res = herm_eigenvalues(mat)
    work = np.array(mat, dtype=np.complex128, order="C")
    diag, _, _, converged = _jacobi_py.jacobi_eigh(work, False, 64)
    assert converged
    fallback = np.sort(np.asarray(diag))[::-1]
    assert np.max(np.abs(res.eigenvalues - fallback)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(dim=st.integers(min_value=1, max_value=10), seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_property_real_spectrum_matches_numpy(dim, seed):
    mat = random_hermitian(dim, seed)
    res = herm_eigenvalues(mat)
    assert res.eigenvalues.dtype == np.float64
    assert all(x >= y for x, y in zip(res.eigenvalues, res.eigenvalues[1:]))
    assert abs(res.eigenvalues.sum() - np.trace(mat).real) < 1e-10 * max(1.0, abs(np.trace(mat).real))
    ref = np.linalg.eigvalsh(mat)[::-1]
    assert np.max(np.abs(res.eigenvalues - ref)) < 1e-10


@pytest.mark.parametrize("shape", [(4, 4), (16, 16), (40, 40), (9, 4), (4, 9)])
def test_singular_values_match_numpy(shape):
    mat = random_complex(shape, seed=sum(shape))
    ref = np.linalg.svd(mat, compute_uv=False)
    got = singular_values(mat)
    assert got.shape == ref.shape
    assert np.max(np.abs(got - ref)) < 1e-11


def test_singular_values_keep_absolute_accuracy_on_tiny_ones():
    # A graded spectrum spanning thirteen decades: resolving the small end
    # to absolute (not relative-to-itself) precision is the whole point of
    # the one-sided method here.
    rng = np.random.default_rng(5)
    u, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    v, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    svals = np.array([1.0, 0.5, 1e-5, 1e-8, 1e-13, 0.0])
    mat = (u * svals) @ v.conj().T
    got = singular_values(mat)
    assert np.max(np.abs(got - svals)) < 2e-15


def test_singular_values_of_diagonal_are_exact():
    mat = np.diag([3.0, -2.0, 0.5, 0.0]).astype(complex)
    assert np.array_equal(singular_values(mat), np.array([3.0, 2.0, 0.5, 0.0]))


def test_singular_values_rank_deficient():
    base = random_complex((7, 7), seed=13)
    base[:, 3] = base[:, 0] * (0.25 - 0.5j)
    base[:, 6] = 0.0
    ref = np.linalg.svd(base, compute_uv=False)
    got = singular_values(base)
    assert np.max(np.abs(got - ref)) < 1e-12
    assert got[-1] < 1e-13


def test_singular_values_zero_matrix():
    assert np.array_equal(singular_values(np.zeros((5, 3))), np.zeros(3))


def test_singular_values_input_not_mutated():
    mat = random_complex((8, 8), seed=21)
    before = mat.copy()
    singular_values(mat)
    assert np.array_equal(mat, before)


def test_singular_values_validation():
    with pytest.raises(DomainError):
        singular_values(np.zeros(4))
    with pytest.raises(DomainError):
        singular_values(np.zeros((0, 3)))
    with pytest.raises(DomainError):
        singular_values(np.zeros((1025, 2)))
    bad = np.ones((3, 3))
    bad[1, 1] = np.nan
    with pytest.raises(DomainError):
        singular_values(bad)
    with pytest.raises(NumericalError):
        singular_values(random_complex((6, 6), seed=2), max_sweeps=0)


def test_svd_fallback_agrees_with_selected_backend():
    mat = random_complex((12, 12), seed=31)
    got = singular_values(mat)
    sig, _, converged = _jacobi_py.jacobi_svd(np.ascontiguousarray(mat.T), 64)
    assert converged
    assert np.max(np.abs(got - np.sort(sig)[::-1])) < 1e-12


@settings(max_examples=25, deadline=None)
@given(rows=st.integers(min_value=1, max_value=9), cols=st.integers(min_value=1, max_value=9),
       seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_property_singular_values_match_numpy(rows, cols, seed):
    mat = random_complex((rows, cols), seed)
    got = singular_values(mat)
    assert got.dtype == np.float64
    assert all(x >= y for x, y in zip(got, got[1:]))
    assert got[-1] >= 0.0
    ref = np.linalg.svd(mat, compute_uv=False)
    assert np.max(np.abs(got - ref)) < 1e-10
