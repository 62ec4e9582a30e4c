import numpy as np
import pytest

from lpvssa import (
    AffineMatrixFunction,
    InputError,
    LpvSsa,
    SchedulingRegion,
    transpose_dual,
)

from conftest import make_constant_2state, random_system


class TestAffineMatrixFunction:
    def test_eval_at_zero_returns_constant_term(self, worked_example):
        A0 = np.array([[1, -2, -2], [0, 2, 1], [-2, 1, 2]], dtype=float)
        assert np.array_equal(worked_example.A(np.array([0.0])), A0)

    def test_eval_worked_example_b_at_one(self, worked_example):
        expected = np.array([[3.0], [-3.0], [-3.0]])
        assert np.array_equal(worked_example.B(np.array([1.0])), expected)

    def test_eval_any_function_at_zero(self):
        rng = np.random.default_rng(0)
        f = AffineMatrixFunction([rng.standard_normal((2, 3)) for _ in range(4)])
        assert np.array_equal(f(np.zeros(3)), f.coeffs[0])

    def test_eval_is_affine(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n_p = int(rng.integers(1, 4))
            f = AffineMatrixFunction(
                [rng.standard_normal((3, 2)) for _ in range(n_p + 1)]
            )
            p = rng.uniform(-1, 1, n_p)
            q = rng.uniform(-1, 1, n_p)
            a = rng.uniform()
            lhs = f(a * p + (1 - a) * q)
            rhs = a * f(p) + (1 - a) * f(q)
            assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_eval_rejects_wrong_length(self, worked_example):
        with pytest.raises(InputError):
            worked_example.A(np.array([0.0, 1.0]))

    def test_mismatched_coefficient_shapes_rejected(self):
        with pytest.raises(InputError):
            AffineMatrixFunction([np.eye(2), np.eye(3)])

    def test_non_finite_rejected(self):
        with pytest.raises(InputError):
            AffineMatrixFunction([np.array([[np.nan]])])

    def test_empty_coefficient_list_rejected(self):
        with pytest.raises(InputError):
            AffineMatrixFunction([])


class TestSchedulingRegion:
    def test_mismatched_bounds_rejected(self):
        with pytest.raises(InputError):
            SchedulingRegion([0.0], [1.0, 2.0])

    def test_grid_and_sample_stay_inside(self):
        region = SchedulingRegion([-1.0, 0.0], [1.0, 2.0])
        grid = region.grid(4)
        assert grid.shape == (16, 2)
        assert all(region.contains(p) for p in grid)
        rng = np.random.default_rng(2)
        assert all(region.contains(p) for p in region.sample(rng, 20))

    def test_degenerate_region_constructible(self):
        region = SchedulingRegion([0.0], [0.0])
        assert not region.has_interior()


class TestValidate:
    def test_worked_example_is_clean(self, worked_example):
        assert worked_example.validate() == []

    def test_shape_mismatch_reported_once(self, worked_example):
        bad = LpvSsa(
            A=worked_example.A,
            B=AffineMatrixFunction([np.zeros((2, 1)), np.zeros((2, 1))]),
            C=worked_example.C,
            D=worked_example.D,
            region=worked_example.region,
            domain=worked_example.domain,
        )
        violations = bad.validate()
        assert len(violations) == 1
        assert "rows" in violations[0]

    def test_empty_interior_reported_once(self, worked_example):
        bad = LpvSsa(
            A=worked_example.A,
            B=worked_example.B,
            C=worked_example.C,
            D=worked_example.D,
            region=SchedulingRegion([0.5], [0.5]),
            domain=worked_example.domain,
        )
        violations = bad.validate()
        assert len(violations) == 1
        assert "interior" in violations[0]

    def test_constructor_path_always_validates_clean(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            assert random_system(rng).validate() == []

    def test_from_matrices_rejects_bad_systems(self):
        with pytest.raises(InputError, match="rows"):
            LpvSsa.from_matrices(
                [np.eye(3), np.eye(3)],
                [np.zeros((2, 1)), np.zeros((2, 1))],
                [np.zeros((1, 3)), np.zeros((1, 3))],
                [np.zeros((1, 1)), np.zeros((1, 1))],
                ([0.0], [1.0]),
                "dt",
            )


class TestTransposeDual:
    def test_involution_exact(self, worked_example):
        twice = transpose_dual(transpose_dual(worked_example))
        for name in ("A", "B", "C", "D"):
            orig = getattr(worked_example, name)
            back = getattr(twice, name)
            assert all(
                np.array_equal(a, b) for a, b in zip(orig.coeffs, back.coeffs)
            )

    def test_involution_on_random_systems(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            sys = random_system(rng)
            twice = transpose_dual(transpose_dual(sys))
            assert sys.A.allclose(twice.A, rtol=0, atol=0)
            assert sys.B.allclose(twice.B, rtol=0, atol=0)

    def test_dual_swaps_b_and_c(self, worked_example):
        dual = transpose_dual(worked_example)
        assert np.array_equal(dual.B.coeffs[0], np.array([[1.0], [0.0], [0.0]]))
        assert np.array_equal(dual.C.coeffs[0], np.array([[1.0, -1.0, -1.0]]))

    def test_dual_of_scalar_system(self):
        sys = LpvSsa.from_matrices(
            [[[2]], [[0]]], [[[1]], [[0]]], [[[3]], [[0]]], [[[0]], [[0]]],
            ([0.0], [1.0]), "dt",
        )
        dual = transpose_dual(sys)
        assert dual.A.coeffs[0][0, 0] == 2.0
        assert dual.B.coeffs[0][0, 0] == 3.0
        assert dual.C.coeffs[0][0, 0] == 1.0

    def test_dual_preserves_validity(self):
        assert transpose_dual(make_constant_2state()).validate() == []
