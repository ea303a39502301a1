import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mvsapce.errors import DataError
from mvsapce.multi_index import MultiIndexSet, total_degree_set
from mvsapce.polynomial_basis import DistributionSpec, Marginal
from mvsapce.regression import (
    TrainingData,
    assemble_design,
    condition_number,
    load_data_csv,
    load_inputs_csv,
    rmse,
    solve_ols,
    write_data_csv,
    write_responses_csv,
)


class TestTrainingData:
    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            TrainingData(np.array([[1.0], [np.nan]]), np.array([[1.0], [2.0]]))
        with pytest.raises(DataError):
            TrainingData(np.array([[1.0]]), np.array([[np.inf]]))

    def test_rejects_row_mismatch(self):
        with pytest.raises(DataError):
            TrainingData(np.zeros((3, 2)), np.zeros((2, 1)))

    def test_promotes_vector_responses(self):
        data = TrainingData(np.zeros((4, 2)), np.arange(4.0))
        assert data.responses.shape == (4, 1)
        assert data.n_inputs == 2 and data.n_outputs == 1


class TestAssembleDesign:
    def test_constant_basis_gives_ones(self, standard_normal_2d):
        design = assemble_design(standard_normal_2d, MultiIndexSet([(0, 0)]), np.zeros((5, 2)))
        assert np.array_equal(design.entries, np.ones((5, 1)))

    def test_first_degree_row(self):
        spec = DistributionSpec.of([Marginal.normal(0, 1)])
        design = assemble_design(spec, MultiIndexSet([(0,), (1,)]), [[0.5]])
        assert np.allclose(design.entries, [[1.0, 0.5]], rtol=0, atol=0)

    def test_hermite_degree_two_zero_crossing(self, standard_normal_2d):
        # He_2(1) = 0, so the (2, 0) column vanishes at x1 = 1
        basis = MultiIndexSet([(0, 0), (2, 0)])
        design = assemble_design(standard_normal_2d, basis, [[1.0, -1.0]])
        assert design.entries[0, 0] == 1.0
        assert abs(design.entries[0, 1]) < 1e-15

    def test_matches_eval_multivariate(self, uniform_3d):
        from mvsapce.polynomial_basis import eval_multivariate

        rng = np.random.default_rng(3)
        basis = total_degree_set(3, 3)
        x = rng.uniform(-1, 1, (6, 3))
        design = assemble_design(uniform_3d, basis, x)
        for q in range(6):
            for j, index in enumerate(basis):
                assert design.entries[q, j] == pytest.approx(
                    eval_multivariate(uniform_3d, index, x[q]), rel=1e-12
                )

    def test_domain_error_carries_row_context(self):
        spec = DistributionSpec.of([Marginal.lognormal(1.0, 0.1)])
        with pytest.raises(DataError, match="row 1"):
            assemble_design(spec, MultiIndexSet([(0,)]), [[1.0], [-2.0]])


class TestSolveOls:
    def test_exact_representation_with_scaled_orthonormal_columns(self):
        rng = np.random.default_rng(0)
        q_factor, _ = np.linalg.qr(rng.normal(size=(4, 2)))
        design = 2.0 * q_factor
        rhs = 2.0 * q_factor[:, :1]
        coeffs = solve_ols(design, rhs)
        assert np.allclose(coeffs, [[1.0], [0.0]], atol=1e-14)

    def test_identity_design_returns_rhs(self):
        rhs = np.arange(12.0).reshape(4, 3)
        assert np.allclose(solve_ols(np.eye(4), rhs), rhs, atol=1e-14)

    def test_min_norm_underdetermined(self):
        coeffs = solve_ols(np.array([[1.0, 1.0]]), np.array([2.0]))
        assert np.allclose(coeffs, [1.0, 1.0], atol=1e-14)

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            solve_ols(np.array([[np.nan]]), np.array([1.0]))
        with pytest.raises(DataError):
            solve_ols(np.eye(2), np.array([np.inf, 0.0]))

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(11)
        design = rng.normal(size=(40, 7))
        rhs = rng.normal(size=(40, 3))
        coeffs = solve_ols(design, rhs)
        residual = rhs - design @ coeffs
        assert np.max(np.abs(design.T @ residual)) <= 1e-8 * np.max(np.abs(rhs))

    def test_exact_recovery(self, uniform_3d):
        rng = np.random.default_rng(5)
        basis = total_degree_set(3, 2)
        truth = rng.normal(size=(len(basis), 4))
        x = rng.uniform(-1, 1, (80, 3))
        design = assemble_design(uniform_3d, basis, x)
        recovered = solve_ols(design, design.entries @ truth)
        assert np.max(np.abs(recovered - truth)) <= 1e-8

    @given(
        n_rows=st.integers(min_value=2, max_value=12),
        n_cols=st.integers(min_value=1, max_value=6),
        n_rhs=st.integers(min_value=1, max_value=5),
        seed=st.integers(min_value=0, max_value=10**6),
    )
    @settings(max_examples=40, deadline=None)
    def test_multi_rhs_equals_columnwise(self, n_rows, n_cols, n_rhs, seed):
        rng = np.random.default_rng(seed)
        design = rng.normal(size=(n_rows, n_cols))
        rhs = rng.normal(size=(n_rows, n_rhs))
        # nearly singular draws amplify last-ulp solver differences past
        # any fixed entrywise bound; the equivalence targets posed systems
        s = np.linalg.svd(design, compute_uv=False)
        assume(s[-1] > 1e-6 * s[0])
        joint = solve_ols(design, rhs)
        for m in range(n_rhs):
            single = solve_ols(design, rhs[:, m])
            assert np.max(np.abs(joint[:, m] - single)) <= 1e-12


class TestConditionNumber:
    def test_single_ones_column(self):
        assert condition_number(np.ones((6, 1))) == 1.0

    def test_diagonal(self):
        assert condition_number(np.diag([2.0, 1.0])) == pytest.approx(2.0, rel=1e-14)

    def test_near_collinear_is_infinite(self):
        design = np.array([[1.0, 1.0], [0.0, 1e-16], [0.0, 0.0]])
        assert condition_number(design) == np.inf

    def test_underdetermined_is_infinite(self):
        assert condition_number(np.ones((2, 5))) == np.inf

    def test_invariant_under_column_permutation_and_scaling(self):
        rng = np.random.default_rng(9)
        design = rng.normal(size=(20, 6))
        base = condition_number(design)
        permuted = design[:, rng.permutation(6)]
        assert condition_number(permuted) == pytest.approx(base, rel=1e-12)
        assert condition_number(3.5 * design) == pytest.approx(base, rel=1e-12)


class TestRmse:
    def test_zero_for_equal_inputs(self):
        values = np.arange(8.0).reshape(4, 2)
        assert np.array_equal(rmse(values, values), np.zeros(2))

    def test_known_errors(self):
        out = rmse(np.array([[3.0], [4.0]]), np.zeros((2, 1)))
        assert out[0] == pytest.approx(5.0 / np.sqrt(2.0), rel=1e-15)

    def test_constant_offset(self):
        actual = np.random.default_rng(1).normal(size=(10, 3))
        assert np.allclose(rmse(actual + 0.25, actual), 0.25, rtol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(DataError):
            rmse(np.zeros((2, 1)), np.zeros((3, 1)))


class TestCsvInterface:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(4)
        inputs = rng.normal(size=(7, 3))
        responses = rng.normal(size=(7, 2))
        path = tmp_path / "data.csv"
        write_data_csv(path, inputs, responses)
        data = load_data_csv(path, 3, 2)
        assert np.array_equal(data.inputs, inputs)
        assert np.array_equal(data.responses, responses)

    def test_header_mismatch_names_widths(self, tmp_path):
        path = tmp_path / "data.csv"
        write_data_csv(path, np.zeros((2, 3)), np.zeros((2, 1)))
        with pytest.raises(DataError, match="2 inputs"):
            load_data_csv(path, 2, 2)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_data_csv(tmp_path / "absent.csv", 1, 1)

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,y1\n1.0,oops\n")
        with pytest.raises(DataError, match="row 1"):
            load_data_csv(path, 1, 1)

    def test_header_only_inputs(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("x1,x2\n")
        assert load_inputs_csv(path, 2).shape == (0, 2)

    def test_inputs_ignore_response_columns(self, tmp_path):
        path = tmp_path / "full.csv"
        write_data_csv(path, np.ones((3, 2)), np.zeros((3, 2)))
        assert load_inputs_csv(path, 2).shape == (3, 2)

    def test_write_responses_header(self, tmp_path):
        path = tmp_path / "y.csv"
        write_responses_csv(path, np.empty((0, 3)))
        assert path.read_text().splitlines()[0] == "y1,y2,y3"
