import numpy as np
import pytest

from schurkit.errors import IndexOutOfRange, MalformedInput, NotBijective, ShapeMismatch
from schurkit.linmaps import EntryPermutation
from schurkit.structure import is_schur_null_preserving, recover_weighted_permutation
from schurkit.truncation import (
    TruncationScheme,
    corner_project,
    diagonal_row_swap,
    pointwise_convergence_check,
    rearrangement_growth_probe,
    scheme_from_json,
    scheme_to_json,
    truncated_image,
)


def random_bijection(n, rng):
    cells = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    shuffled = [cells[k] for k in rng.permutation(len(cells))]
    return EntryPermutation((n, n), (n, n), dict(zip(cells, shuffled)))


def ones_symbol(i, j):
    return 1.0


class TestCornerProject:
    def test_full_size_unchanged(self):
        a = np.arange(9, dtype=complex).reshape(3, 3)
        np.testing.assert_array_equal(corner_project(a, 3), a)

    def test_size_one(self):
        a = np.arange(9, dtype=complex).reshape(3, 3) + 1
        out = corner_project(a, 1)
        assert out[0, 0] == a[0, 0]
        assert np.count_nonzero(out) == 1

    def test_idempotent_and_composition(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        for n in (1, 2, 4, 5):
            np.testing.assert_array_equal(
                corner_project(corner_project(a, n), n), corner_project(a, n)
            )
        for n, m in [(2, 4), (4, 2), (3, 3)]:
            np.testing.assert_array_equal(
                corner_project(corner_project(a, n), m),
                corner_project(a, min(n, m)),
            )

    def test_is_schur_multiplication_by_corner_symbol(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((4, 4))
        corner = np.zeros((4, 4))
        corner[:2, :2] = 1.0
        np.testing.assert_array_equal(corner_project(a, 2), corner * a)

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            corner_project(np.ones((3, 3)), 4)
        with pytest.raises(IndexOutOfRange):
            corner_project(np.ones((3, 5)), 4)


class TestTruncatedImage:
    def test_identity_rearrangement_is_corner(self):
        rng = np.random.default_rng(2)
        f = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        scheme = TruncationScheme((2, 4), f, EntryPermutation.identity((4, 4)))
        np.testing.assert_array_equal(truncated_image(scheme, 2), corner_project(f, 2))

    def test_top_level_full_symbol(self):
        rng = np.random.default_rng(3)
        f = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        scheme = TruncationScheme((1, 3), f, random_bijection(3, rng))
        np.testing.assert_array_equal(truncated_image(scheme, 3), f)

    def test_diagonal_row_swap_range(self):
        # the 2x2 corner maps onto {(1,1), (2,2), (2,1), (1,2)} under the swap
        scheme = TruncationScheme((2, 4), ones_symbol, diagonal_row_swap(4))
        out = truncated_image(scheme, 2)
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 0] = expected[1, 1] = expected[1, 0] = expected[0, 1] = 1.0
        np.testing.assert_array_equal(out, expected)

    def test_unknown_level_rejected(self):
        scheme = TruncationScheme((2, 4), ones_symbol, diagonal_row_swap(4))
        with pytest.raises(IndexOutOfRange):
            truncated_image(scheme, 3)

    def test_values_freeze_once_covered(self):
        rng = np.random.default_rng(4)
        rho = random_bijection(5, rng)
        f = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        scheme = TruncationScheme((1, 2, 3, 4, 5), f, rho)
        images = {n: truncated_image(scheme, n) for n in scheme.levels}
        for (i, j), (k, l) in rho.mapping.items():
            cover = max(i, j)
            for n in scheme.levels:
                if n >= cover:
                    assert images[n][k - 1, l - 1] == f[k - 1, l - 1]


class TestPointwiseConvergence:
    def test_finitely_supported_exact(self):
        rng = np.random.default_rng(5)
        rho = random_bijection(6, rng)
        f = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        scheme = TruncationScheme((1, 2, 4, 6), f, rho)
        a = np.zeros((6, 6), dtype=complex)
        a[:3, :3] = rng.standard_normal((3, 3))
        probes = [(i, j) for i in (1, 3, 6) for j in (2, 5)]
        for entry in pointwise_convergence_check(scheme, a, probes):
            assert entry["stabilized_at"] is not None
            assert entry["stabilized_at"] <= entry["cover_level"]
            limit = complex(*entry["limit"])
            for level in entry["levels"]:
                if level["n"] >= entry["cover_level"]:
                    assert complex(*level["value"]) == limit

    def test_identity_scheme_matches_corner(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        scheme = TruncationScheme((1, 2, 3, 4), ones_symbol, EntryPermutation.identity((4, 4)))
        reports = pointwise_convergence_check(scheme, a, [(3, 3)])
        values = [complex(*lv["value"]) for lv in reports[0]["levels"]]
        expected = [corner_project(a, n)[2, 2] for n in scheme.levels]
        assert values == expected
        assert complex(*reports[0]["limit"]) == a[2, 2]

    def test_probe_outside_grid(self):
        scheme = TruncationScheme((1, 2), ones_symbol, EntryPermutation.identity((2, 2)))
        with pytest.raises(IndexOutOfRange):
            pointwise_convergence_check(scheme, np.ones((2, 2)), [(3, 1)])


class TestGrowthProbe:
    def test_known_small_values(self):
        assert rearrangement_growth_probe([1]) == [(1, pytest.approx(1.0, abs=1e-12))]
        assert rearrangement_growth_probe([4])[0][1] == pytest.approx(2.0, abs=1e-12)

    def test_sqrt_growth(self):
        for n, ratio in rearrangement_growth_probe([4, 16, 64]):
            assert ratio == pytest.approx(np.sqrt(n), abs=1e-12)

    def test_strictly_increasing(self):
        ratios = [r for _, r in rearrangement_growth_probe([2, 3, 5, 9])]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))

    def test_rejects_unsorted(self):
        with pytest.raises(ShapeMismatch):
            rearrangement_growth_probe([4, 2])


class TestLimitMapStructure:
    def test_limit_map_is_null_preserving(self):
        rng = np.random.default_rng(7)
        rho = random_bijection(4, rng)
        mod = rng.uniform(0.5, 2.0, size=(4, 4))
        f = mod * np.exp(2j * np.pi * rng.random((4, 4)))
        from schurkit.linmaps import from_weighted_permutation

        limit_map = from_weighted_permutation(f, rho)
        assert is_schur_null_preserving(limit_map)
        form = recover_weighted_permutation(limit_map)
        assert form.surjective  # nonzero weights + bijection


class TestSchemeJson:
    def test_round_trip_closed_form(self):
        scheme = TruncationScheme((2, 4), ones_symbol, diagonal_row_swap(4))
        doc = scheme_to_json(scheme)
        assert doc["symbol"] == {"kind": "ones"}
        back = scheme_from_json(doc)
        assert back.levels == scheme.levels
        assert back.rho.mapping == scheme.rho.mapping

    def test_round_trip_matrix_symbol(self):
        rng = np.random.default_rng(8)
        f = rng.standard_normal((3, 3))
        scheme = TruncationScheme((1, 3), f, random_bijection(3, rng))
        back = scheme_from_json(scheme_to_json(scheme))
        np.testing.assert_array_equal(back.symbol, f.astype(complex))

    def test_rejects_partial_rho(self):
        doc = {
            "levels": [1, 2],
            "symbol": {"kind": "ones"},
            "rho": {"src": [2, 2], "dst": [2, 2], "map": [[[1, 1], [1, 1]]]},
        }
        with pytest.raises(MalformedInput):
            scheme_from_json(doc)

    def test_rejects_unknown_kind(self):
        scheme = TruncationScheme((1, 2), ones_symbol, EntryPermutation.identity((2, 2)))
        doc = scheme_to_json(scheme)
        doc["symbol"] = {"kind": "mystery"}
        with pytest.raises(MalformedInput):
            scheme_from_json(doc)

    def test_scheme_validation(self):
        with pytest.raises(ShapeMismatch):
            TruncationScheme((2, 2), ones_symbol, EntryPermutation.identity((2, 2)))
        with pytest.raises(NotBijective):
            TruncationScheme(
                (1, 2),
                ones_symbol,
                EntryPermutation((2, 2), (2, 2), {(1, 1): (1, 1)}),
            )
