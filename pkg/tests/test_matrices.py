import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from schurkit.errors import (
    IndexOutOfRange,
    MalformedInput,
    NonFiniteEntry,
    NotBijective,
    NotHermitian,
    ShapeMismatch,
)
from schurkit.matrices import (
    all_ones,
    as_matrix,
    kronecker,
    matrix_from_json,
    matrix_to_json,
    matrix_unit,
    permutation_unitary,
    psd_project,
    schur_product,
    spectral_norm,
)


def complex_matrices(max_side=5, max_mag=10.0):
    side = st.integers(1, max_side)
    return side.flatmap(
        lambda m: side.flatmap(
            lambda n: arrays(
                np.complex128,
                (m, n),
                elements=st.complex_numbers(
                    max_magnitude=max_mag, allow_nan=False, allow_infinity=False
                ),
            )
        )
    )


class TestSchurProduct:
    def test_all_ones_is_identity(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        np.testing.assert_array_equal(schur_product(all_ones(2, 2), a), a)

    def test_disjoint_units_vanish(self):
        prod = schur_product(matrix_unit(2, 2, (1, 1)), matrix_unit(2, 2, (1, 2)))
        np.testing.assert_array_equal(prod, np.zeros((2, 2)))

    def test_entrywise_values(self):
        a = np.array([[1, 2], [3, 4]], dtype=complex)
        b = np.array([[2, 0], [1, 1]], dtype=complex)
        np.testing.assert_array_equal(schur_product(a, b), [[2, 0], [3, 4]])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            schur_product(np.ones((2, 2)), np.ones((2, 3)))

    @settings(max_examples=50, deadline=None)
    @given(complex_matrices())
    def test_commutative(self, a):
        b = a[::-1].copy() if a.shape[0] > 1 else a + 1
        np.testing.assert_allclose(
            schur_product(a, b), schur_product(b, a), atol=1e-14
        )

    @settings(max_examples=50, deadline=None)
    @given(complex_matrices(max_side=4, max_mag=4.0))
    def test_bilinear_and_associative(self, a):
        rng = np.random.default_rng(1)
        b = rng.standard_normal(a.shape) + 1j * rng.standard_normal(a.shape)
        c = rng.standard_normal(a.shape) + 1j * rng.standard_normal(a.shape)
        left = schur_product(schur_product(a, b), c)
        right = schur_product(a, schur_product(b, c))
        np.testing.assert_allclose(left, right, atol=1e-12)
        lin = schur_product(2 * a + 3j * b, c)
        np.testing.assert_allclose(
            lin, 2 * schur_product(a, c) + 3j * schur_product(b, c), atol=1e-12
        )


class TestMatrixUnit:
    def test_square(self):
        np.testing.assert_array_equal(matrix_unit(2, 2, (1, 1)), [[1, 0], [0, 0]])

    def test_rectangular(self):
        np.testing.assert_array_equal(matrix_unit(1, 3, (1, 2)), [[0, 1, 0]])

    def test_idempotent_under_product(self):
        e = matrix_unit(3, 4, (2, 3))
        np.testing.assert_array_equal(schur_product(e, e), e)

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            matrix_unit(2, 2, (3, 1))


class TestSpectralNorm:
    def test_single_unit(self):
        assert spectral_norm(matrix_unit(2, 2, (1, 1))) == pytest.approx(1.0, abs=1e-12)

    def test_row_of_two_units(self):
        a = matrix_unit(2, 2, (1, 1)) + matrix_unit(2, 2, (1, 2))
        assert spectral_norm(a) == pytest.approx(np.sqrt(2), rel=1e-12)

    def test_two_units_distinct_rows_and_columns(self):
        # both entries sit in their own row and column, so the norm stays 1
        a = matrix_unit(3, 3, (2, 1)) + matrix_unit(3, 3, (3, 2))
        assert spectral_norm(a) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(complex_matrices())
    def test_transpose_and_adjoint_invariance(self, a):
        ref = spectral_norm(a)
        assert spectral_norm(a.T) == pytest.approx(ref, abs=1e-10 * (1 + ref))
        assert spectral_norm(a.conj().T) == pytest.approx(ref, abs=1e-10 * (1 + ref))

    @settings(max_examples=50, deadline=None)
    @given(complex_matrices())
    def test_between_entry_sup_and_frobenius(self, a):
        ref = spectral_norm(a)
        assert np.abs(a).max() <= ref + 1e-10 * (1 + ref)
        assert ref <= np.linalg.norm(a) + 1e-10 * (1 + ref)

    def test_schur_product_submultiplicative(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            a = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
            b = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
            assert spectral_norm(a * b) <= spectral_norm(a) * spectral_norm(b) + 1e-10


class TestPsdProject:
    def test_identity_fixed(self):
        np.testing.assert_allclose(psd_project(np.eye(3)), np.eye(3), atol=1e-14)

    def test_negative_identity_to_zero(self):
        np.testing.assert_allclose(psd_project(-np.eye(3)), np.zeros((3, 3)), atol=1e-14)

    def test_eigenvalue_clipping(self):
        out = psd_project(np.diag([1.0, -2.0]))
        np.testing.assert_allclose(out, np.diag([1.0, 0.0]), atol=1e-14)

    def test_idempotent_and_psd(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            h = (h + h.conj().T) / 2
            p1 = psd_project(h)
            p2 = psd_project(p1)
            np.testing.assert_allclose(p1, p2, atol=1e-12)
            assert np.linalg.eigvalsh(p1).min() >= -1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            psd_project(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestKronecker:
    def test_scalar_factor(self):
        a = np.array([[1, 2j], [3, 4]], dtype=complex)
        np.testing.assert_array_equal(kronecker(a, [[1.0]]), a)

    def test_unit_times_unit(self):
        out = kronecker(matrix_unit(2, 2, (1, 1)), matrix_unit(2, 2, (1, 1)))
        np.testing.assert_array_equal(out, matrix_unit(4, 4, (1, 1)))

    def test_norm_multiplicative(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        b = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        assert spectral_norm(kronecker(a, b)) == pytest.approx(
            spectral_norm(a) * spectral_norm(b), rel=1e-10
        )


class TestPermutationUnitary:
    def test_identity(self):
        np.testing.assert_array_equal(permutation_unitary([1, 2, 3]), np.eye(3))

    def test_swap(self):
        np.testing.assert_array_equal(permutation_unitary([2, 1]), [[0, 1], [1, 0]])

    def test_unitary(self):
        u = permutation_unitary([3, 1, 4, 2])
        np.testing.assert_array_equal(u @ u.conj().T, np.eye(4))

    def test_rejects_non_bijection(self):
        with pytest.raises(NotBijective):
            permutation_unitary([1, 1, 3])


class TestValidation:
    def test_rejects_empty(self):
        with pytest.raises(ShapeMismatch):
            as_matrix(np.zeros((0, 2)))

    def test_rejects_nan(self):
        with pytest.raises(NonFiniteEntry):
            as_matrix(np.array([[np.nan, 0.0], [0.0, 0.0]]))

    def test_rejects_inf_imag(self):
        with pytest.raises(NonFiniteEntry):
            as_matrix(np.array([[1j * np.inf, 0.0], [0.0, 0.0]]))


class TestJson:
    def test_round_trip(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        np.testing.assert_array_equal(matrix_from_json(matrix_to_json(a)), a)

    def test_rejects_wrong_count(self):
        doc = {"rows": 2, "cols": 2, "entries": [[1.0, 0.0]] * 3}
        with pytest.raises(MalformedInput):
            matrix_from_json(doc)

    def test_rejects_bad_pair(self):
        doc = {"rows": 1, "cols": 1, "entries": [[1.0, 0.0, 2.0]]}
        with pytest.raises(MalformedInput):
            matrix_from_json(doc)

    def test_rejects_missing_field(self):
        with pytest.raises(MalformedInput):
            matrix_from_json({"rows": 1, "entries": [[1.0, 0.0]]})

    def test_rejects_nonfinite(self):
        doc = {"rows": 1, "cols": 1, "entries": [[np.inf, 0.0]]}
        with pytest.raises(MalformedInput):
            matrix_from_json(doc)
