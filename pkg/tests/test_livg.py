"""Unit tests for independent-row selection and K-vector solving."""

import numpy as np
import pytest

import beambasis as bb
from beambasis import ValidationError


def random_complex(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def scan_matrix(n, m, start_deg, end_deg, spacing=0.5):
    geom = bb.ArrayGeometry.linear(n, spacing)
    phases = bb.build_phase_matrix(geom, bb.ScanPlan(m, start_deg, end_deg))
    return bb.build_weight_matrix(phases).values


class TestSelectLivg:
    """Tests for row selection and independence checking."""

    def test_selection_keeps_rows_and_indices(self):
        """Selected rows match the source rows in the given order."""
        rng = np.random.default_rng(0)
        b = random_complex(rng, 10, 6)
        livg = bb.select_livg(b, [7, 2, 5])
        assert livg.row_indices == (7, 2, 5)
        assert np.allclose(livg.c, b[[7, 2, 5]])
        assert livg.rank == 3

    def test_duplicate_index_rejected(self):
        """Repeated indices are a validation error."""
        rng = np.random.default_rng(1)
        with pytest.raises(ValidationError, match="duplicate"):
            bb.select_livg(random_complex(rng, 5, 4), [1, 1])

    def test_out_of_range_index_rejected(self):
        """Indices must address existing rows."""
        rng = np.random.default_rng(2)
        b = random_complex(rng, 5, 4)
        with pytest.raises(ValidationError):
            bb.select_livg(b, [0, 5])
        with pytest.raises(ValidationError):
            bb.select_livg(b, [-1, 2])

    def test_dependent_rows_rejected_with_achieved_rank(self):
        """Selecting more rows than the matrix rank reports the shortfall."""
        a = scan_matrix(8, 20, 0.0, 30.0)
        b = bb.truncate(bb.svd(a), bb.TruncationPolicy.fixed_rank(2)).values
        with pytest.raises(ValidationError, match="dependent"):
            bb.select_livg(b, [0, 9, 19])

    def test_numerical_rank(self):
        """The rank helper counts significant singular values."""
        rng = np.random.default_rng(3)
        u = random_complex(rng, 6, 2)
        v = random_complex(rng, 2, 5)
        assert bb.numerical_rank(u @ v) == 2


class TestSolveK:
    """Tests for least-squares coefficient solving."""

    def test_recovers_synthesized_coefficients(self):
        """Rows built as K0 @ C solve back to K0."""
        rng = np.random.default_rng(4)
        for _ in range(20):
            c = random_complex(rng, 4, 9)
            livg = bb.Livg(row_indices=(0, 1, 2, 3), c=c)
            k0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            target = k0 @ c
            k = bb.solve_k(livg, target)
            assert np.allclose(k.coefficients, k0, atol=1e-9)
            assert k.residual <= 1e-9

    def test_reconstruct_round_trip(self):
        """reconstruct_row inverts solve_k for spanned rows."""
        rng = np.random.default_rng(5)
        c = random_complex(rng, 3, 7)
        livg = bb.Livg(row_indices=(0, 1, 2), c=c)
        target = (rng.standard_normal(3) + 1j * rng.standard_normal(3)) @ c
        k = bb.solve_k(livg, target)
        assert np.allclose(bb.reconstruct_row(livg, k), target, atol=1e-9)

    def test_residual_reflects_unspanned_component(self):
        """A row outside the span reports its distance to the span."""
        c = np.array([[1.0 + 0j, 0.0, 0.0]])
        livg = bb.Livg(row_indices=(0,), c=c)
        k = bb.solve_k(livg, np.array([2.0 + 0j, 3.0, 0.0]))
        assert np.isclose(k.coefficients[0], 2.0)
        assert np.isclose(k.residual, 3.0)

    def test_batch_matches_single(self):
        """The batch solver agrees with per-row solves."""
        rng = np.random.default_rng(6)
        b = random_complex(rng, 12, 5)
        livg = bb.select_livg(b, [0, 4, 8, 11])
        k_matrix, residuals = bb.solve_k_batch(livg, b)
        for m in range(12):
            single = bb.solve_k(livg, b[m])
            assert np.allclose(k_matrix[m], single.coefficients, atol=1e-9)
            assert np.isclose(residuals[m], single.residual, atol=1e-9)

    def test_exact_basis_on_scan_matrix(self):
        """A full-rank basis reconstructs every scan row to round-off."""
        a = scan_matrix(8, 32, -60.0, 60.0)
        livg = bb.select_livg(a, np.round(np.linspace(0, 31, 8)).astype(int))
        _, residuals = bb.solve_k_batch(livg, a)
        row_norms = np.linalg.norm(a, axis=1)
        assert np.all(residuals <= 1e-9 * row_norms)

    def test_max_k_magnitude(self):
        """The gain diagnostic is the largest coefficient magnitude."""
        k = bb.KVector(coefficients=np.array([3 + 4j, 1.0]), residual=0.0)
        assert np.isclose(bb.max_k_magnitude(k), 5.0)
