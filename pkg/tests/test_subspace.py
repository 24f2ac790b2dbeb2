import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from canonctrl.errors import DimensionError, NumericalDegeneracyError
from canonctrl.subspace import (
    BehaviorBasis,
    Projector,
    RankTolerance,
    image_basis,
    intersect,
    is_subspace_of,
    orthonormal_basis,
    pinv,
    pinv_symmetric,
    principal_angles,
    projector_onto,
    subspaces_equal,
    zero_projector,
)

from conftest import kernel_method_intersection


def span(*cols):
    return orthonormal_basis(np.column_stack([np.asarray(c, dtype=float) for c in cols]))


class TestRankTolerance:
    def test_zero_matrix(self):
        assert RankTolerance().rank(np.zeros((4, 3))) == 0

    def test_scale_invariance(self):
        M = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
        tol = RankTolerance()
        assert tol.rank(M) == tol.rank(1e6 * M) == 1

    def test_full_rank(self):
        assert RankTolerance().rank(np.eye(5)) == 5

    def test_must_be_positive(self):
        with pytest.raises(ValueError):
            RankTolerance(0.0)
        with pytest.raises(ValueError):
            RankTolerance(-1e-10)


class TestOrthonormalBasis:
    def test_rank_one_example(self):
        B = orthonormal_basis(np.array([[1.0, 2.0], [2.0, 4.0]]))
        assert B.dim == 1
        expected = np.array([1.0, 2.0]) / np.sqrt(5.0)
        assert pytest.approx(abs(float(B.basis.ravel() @ expected))) == 1.0

    def test_identity(self):
        assert orthonormal_basis(np.eye(6)).dim == 6

    def test_image_preserved(self, rng):
        for _ in range(10):
            M = rng.standard_normal((9, 4))
            B = orthonormal_basis(M)
            angles = principal_angles(B, orthonormal_basis(M @ rng.standard_normal((4, 4))))
            assert B.dim == 4
            assert float(np.max(angles)) < 1e-10

    def test_idempotent_on_own_output(self, rng):
        B = orthonormal_basis(rng.standard_normal((8, 3)))
        again = orthonormal_basis(B.basis)
        assert np.allclose(again.basis.T @ again.basis, np.eye(3), atol=1e-14)
        assert subspaces_equal(B, again)[0]

    def test_zero_matrix_gives_zero_subspace(self):
        assert orthonormal_basis(np.zeros((5, 2))).dim == 0

    def test_scale_anchor_suppresses_noise(self, rng):
        noise = 1e-14 * rng.standard_normal((6, 3))
        assert orthonormal_basis(noise).dim == 3
        assert orthonormal_basis(noise, scale=1.0).dim == 0


class TestPinv:
    def test_diagonal(self):
        assert np.allclose(pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    def test_orthonormal_transpose(self, rng):
        Q = orthonormal_basis(rng.standard_normal((7, 3))).basis
        assert np.allclose(pinv(Q), Q.T, atol=1e-12)

    def test_penrose_identities(self, rng):
        for shape in [(6, 3), (3, 6), (5, 5)]:
            M = rng.standard_normal(shape)
            P = pinv(M)
            scale = np.linalg.norm(M)
            assert np.linalg.norm(M @ P @ M - M) < 1e-10 * scale
            assert np.linalg.norm(P @ M @ P - P) < 1e-8 * np.linalg.norm(P)
            assert np.linalg.norm((M @ P).T - M @ P) < 1e-8
            assert np.linalg.norm((P @ M).T - P @ M) < 1e-8

    def test_symmetric_variant_matches_and_stays_symmetric(self, rng):
        S = rng.standard_normal((6, 6))
        S = S + S.T
        X = pinv_symmetric(S)
        assert np.array_equal(X, X.T)
        assert np.allclose(X, pinv(S), atol=1e-10)


class TestProjector:
    def test_coordinate_line(self):
        P = projector_onto(span([1.0, 0.0]))
        assert np.allclose(P.matrix, [[1, 0], [0, 0]])

    def test_full_space(self):
        P = projector_onto(orthonormal_basis(np.eye(3)))
        assert np.allclose(P.matrix, np.eye(3))

    def test_fixes_basis_columns(self, rng):
        B = orthonormal_basis(rng.standard_normal((10, 4)))
        P = projector_onto(B)
        assert np.linalg.norm(P.matrix @ B.basis - B.basis) < 1e-10

    def test_invariants_enforced(self):
        with pytest.raises(NumericalDegeneracyError):
            Projector(np.array([[1.0, 0.5], [0.0, 1.0]]))  # not symmetric
        with pytest.raises(NumericalDegeneracyError):
            Projector(np.array([[0.5, 0.0], [0.0, 0.5]]))  # not idempotent

    def test_rank_of_near_zero_matrix_is_zero(self):
        P = Projector(1e-14 * np.eye(4))
        assert P.rank() == 0
        assert image_basis(P).dim == 0


class TestIntersect:
    def test_orthogonal_lines(self):
        P = intersect(projector_onto(span([1, 0])), projector_onto(span([0, 1])))
        assert np.allclose(P.matrix, np.zeros((2, 2)), atol=1e-12)

    def test_identical_subspaces(self, rng):
        B = orthonormal_basis(rng.standard_normal((8, 3)))
        PV = projector_onto(B)
        P = intersect(PV, PV)
        assert np.allclose(P.matrix, PV.matrix, atol=1e-10)

    def test_matches_kernel_method_oracle(self, rng):
        for _ in range(20):
            shared = rng.standard_normal((10, 2))
            QA = orthonormal_basis(np.hstack([shared, rng.standard_normal((10, 3))])).basis
            QB = orthonormal_basis(np.hstack([shared, rng.standard_normal((10, 2))])).basis
            P = intersect(
                projector_onto(BehaviorBasis(10, QA)),
                projector_onto(BehaviorBasis(10, QB)),
            )
            ours = image_basis(P)
            oracle = kernel_method_intersection(QA, QB)
            ok, angle = subspaces_equal(ours, oracle, 1e-8)
            assert ok, f"angle {angle}"

    def test_commutative(self, rng):
        QA = orthonormal_basis(rng.standard_normal((9, 4)))
        QB = orthonormal_basis(rng.standard_normal((9, 4)))
        P1 = intersect(projector_onto(QA), projector_onto(QB))
        P2 = intersect(projector_onto(QB), projector_onto(QA))
        assert np.allclose(P1.matrix, P2.matrix, atol=1e-8)

    def test_image_inside_both(self, rng):
        shared = rng.standard_normal((12, 3))
        A = orthonormal_basis(np.hstack([shared, rng.standard_normal((12, 2))]))
        B = orthonormal_basis(np.hstack([shared, rng.standard_normal((12, 4))]))
        inter = image_basis(intersect(projector_onto(A), projector_onto(B)))
        assert is_subspace_of(inter, A)[0]
        assert is_subspace_of(inter, B)[0]

    def test_zero_subspace_input(self):
        P = intersect(zero_projector(5), projector_onto(orthonormal_basis(np.eye(5))))
        assert np.allclose(P.matrix, np.zeros((5, 5)))

    def test_nearly_touching_subspaces_raise(self):
        theta = 1e-6
        v = np.array([1.0, 0.0])
        w = np.array([np.cos(theta), np.sin(theta)])
        with pytest.raises(NumericalDegeneracyError):
            intersect(projector_onto(span(v)), projector_onto(span(w)))

    def test_ambient_mismatch(self):
        with pytest.raises(DimensionError):
            intersect(zero_projector(3), zero_projector(4))


class TestIsSubspaceOf:
    def test_reflexive(self, rng):
        B = orthonormal_basis(rng.standard_normal((7, 3)))
        ok, residual = is_subspace_of(B, B)
        assert ok and residual < 1e-14

    def test_orthogonal_lines(self):
        ok, residual = is_subspace_of(span([1, 0]), span([0, 1]))
        assert not ok
        assert pytest.approx(residual) == 1.0

    def test_zero_subspace_in_anything(self):
        zero = orthonormal_basis(np.zeros((4, 0)))
        ok, residual = is_subspace_of(zero, span([1, 0, 0, 0]))
        assert ok and residual == 0.0

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            is_subspace_of(span([1, 0]), span([1, 0, 0]))


class TestPrincipalAngles:
    def test_identical(self, rng):
        B = orthonormal_basis(rng.standard_normal((8, 3)))
        assert float(np.max(principal_angles(B, B))) < 1e-10

    def test_orthogonal_lines(self):
        angles = principal_angles(span([1, 0]), span([0, 1]))
        assert pytest.approx(angles[0]) == np.pi / 2

    def test_diagonal_line(self):
        angles = principal_angles(span([1, 0]), span([1, 1]))
        assert pytest.approx(angles[0]) == np.pi / 4

    def test_zero_dim_gives_empty(self):
        zero = orthonormal_basis(np.zeros((4, 0)))
        assert principal_angles(zero, span([1, 0, 0, 0])).size == 0

    def test_matches_scipy(self, rng):
        for _ in range(10):
            A = rng.standard_normal((12, 4))
            B = rng.standard_normal((12, 6))
            ours = principal_angles(orthonormal_basis(A), orthonormal_basis(B))
            ref = np.sort(scipy.linalg.subspace_angles(A, B))[::-1]
            assert np.allclose(ours, ref, atol=1e-12)

    def test_resolves_tiny_angles(self):
        theta = 1e-12
        tilted = span([np.cos(theta), np.sin(theta), 0.0])
        angles = principal_angles(span([1, 0, 0]), tilted)
        assert pytest.approx(angles[0], rel=1e-3) == theta

    @given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=1000))
    @settings(max_examples=25)
    def test_range_and_order(self, dim, seed):
        gen = np.random.default_rng(seed)
        A = orthonormal_basis(gen.standard_normal((8, dim)))
        B = orthonormal_basis(gen.standard_normal((8, dim)))
        angles = principal_angles(A, B)
        assert angles.size == dim
        assert np.all(angles >= -1e-15) and np.all(angles <= np.pi / 2 + 1e-15)
        assert np.all(np.diff(angles) <= 1e-12)


class TestSubspacesEqual:
    def test_zero_dims_equal(self):
        zero = orthonormal_basis(np.zeros((4, 0)))
        assert subspaces_equal(zero, zero) == (True, 0.0)

    def test_dim_mismatch(self):
        full = orthonormal_basis(np.eye(4))
        line = span([1, 0, 0, 0])
        ok, angle = subspaces_equal(full, line)
        assert not ok and angle == pytest.approx(np.pi / 2)

    def test_same_space_different_basis(self, rng):
        M = rng.standard_normal((9, 4))
        B1 = orthonormal_basis(M)
        B2 = orthonormal_basis(M @ rng.standard_normal((4, 4)))
        ok, angle = subspaces_equal(B1, B2)
        assert ok and angle < 1e-10
