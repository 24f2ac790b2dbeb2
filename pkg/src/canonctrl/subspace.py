"""Numerical subspace algebra.

Subspaces of R^d are carried around as orthonormal-column matrices
(:class:`BehaviorBasis`) or as orthogonal projectors (:class:`Projector`).
Everything is SVD-based; rank decisions go through a single
:class:`RankTolerance` rule so the whole package cuts singular values the
same way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalDegeneracyError

#: Default tolerance on principal angles when deciding subspace equality.
DEFAULT_ANGLE_TOL = 1e-8

#: Default tolerance for inclusion residuals.
DEFAULT_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class RankTolerance:
    """Relative singular-value cutoff for numerical rank decisions.

    A singular value counts toward the rank when it exceeds
    ``tol_rel * sigma_max * max(rows, cols)``.
    """

    tol_rel: float = 1e-10

    def __post_init__(self):
        if not self.tol_rel > 0:
            raise ValueError(f"tol_rel must be positive, got {self.tol_rel}")

    def cutoff(self, sigma_max: float, shape: tuple[int, int]) -> float:
        return self.tol_rel * sigma_max * max(shape)

    def rank(self, M: np.ndarray) -> int:
        M = np.asarray(M, dtype=float)
        if M.size == 0:
            return 0
        s = np.linalg.svd(M, compute_uv=False)
        return int(np.count_nonzero(s > self.cutoff(s[0], M.shape)))


DEFAULT_RANK_TOL = RankTolerance()


@dataclass(frozen=True, eq=False)
class BehaviorBasis:
    """Orthonormal basis of a subspace of R^{ambient_dim}.

    ``basis`` has shape (ambient_dim, r) with orthonormal columns; r may be
    zero (the zero subspace is first-class).
    """

    ambient_dim: int
    basis: np.ndarray
    tol: RankTolerance = DEFAULT_RANK_TOL

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise DimensionError(
                f"basis shape {b.shape} inconsistent with ambient dim {self.ambient_dim}"
            )
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector: a symmetric idempotent matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.matrix, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DimensionError(f"projector must be square, got {P.shape}")
        scale = 1.0 + np.linalg.norm(P)
        sym_defect = np.linalg.norm(P - P.T)
        if sym_defect > 1e-10 * scale:
            raise NumericalDegeneracyError(
                f"projector not symmetric: defect {sym_defect:.3e}"
            )
        idem_defect = np.linalg.norm(P @ P - P)
        if idem_defect > 1e-8 * scale:
            raise NumericalDegeneracyError(
                f"projector not idempotent: defect {idem_defect:.3e}"
            )
        object.__setattr__(self, "matrix", P)

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    def rank(self, tol: RankTolerance = DEFAULT_RANK_TOL) -> int:
        # eigenvalues of a projector are 0 or 1, so anchor the cutoff at 1
        return image_basis(self, tol).dim


def orthonormal_basis(
    M: np.ndarray,
    tol: RankTolerance = DEFAULT_RANK_TOL,
    scale: float | None = None,
) -> BehaviorBasis:
    """Orthonormal basis of the column space of M (zero matrix gives r = 0).

    `scale` anchors the rank cutoff when M is a product whose own largest
    singular value may be pure rounding noise (for example a data matrix
    times an annihilator, or a numerically zero projector): singular values
    are then compared against max(sigma_max, scale).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={M.ndim}")
    if M.shape[1] == 0 or M.size == 0:
        return BehaviorBasis(M.shape[0], np.zeros((M.shape[0], 0)), tol)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    anchor = s[0] if s.size else 0.0
    if scale is not None:
        anchor = max(anchor, scale)
    r = int(np.count_nonzero(s > tol.cutoff(anchor, M.shape)))
    return BehaviorBasis(M.shape[0], U[:, :r].copy(), tol)


def image_basis(P: Projector, tol: RankTolerance = DEFAULT_RANK_TOL) -> BehaviorBasis:
    """Orthonormal basis of a projector's image, cutoff anchored at eigenvalue 1."""
    return orthonormal_basis(P.matrix, tol, scale=1.0)


def pinv(M: np.ndarray, tol: RankTolerance = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the package rank rule."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros((M.shape[1], M.shape[0]))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    cut = tol.cutoff(s[0] if s.size else 0.0, M.shape)
    inv = np.where(s > cut, 1.0 / np.where(s > cut, s, 1.0), 0.0)
    return (Vt.T * inv) @ U.T


def pinv_symmetric(S: np.ndarray, tol: RankTolerance = DEFAULT_RANK_TOL) -> np.ndarray:
    """Pseudoinverse of a symmetric matrix via eigendecomposition.

    Keeps the result exactly symmetric, which a generic SVD pinv does not.
    """
    S = np.asarray(S, dtype=float)
    S = 0.5 * (S + S.T)
    w, V = np.linalg.eigh(S)
    cut = tol.cutoff(float(np.max(np.abs(w))) if w.size else 0.0, S.shape)
    inv = np.where(np.abs(w) > cut, 1.0 / np.where(np.abs(w) > cut, w, 1.0), 0.0)
    X = (V * inv) @ V.T
    return 0.5 * (X + X.T)


def projector_onto(B: BehaviorBasis) -> Projector:
    """Orthogonal projector onto the image of an orthonormalized basis."""
    Q = B.basis
    return Projector(Q @ Q.T)


def zero_projector(ambient_dim: int) -> Projector:
    return Projector(np.zeros((ambient_dim, ambient_dim)))


def intersect(PV: Projector, PW: Projector, tol: RankTolerance = DEFAULT_RANK_TOL) -> Projector:
    """Orthogonal projector onto the intersection of two subspaces.

    Uses the projector-algebra formula 2 P_V (P_V + P_W)^+ P_W, which is the
    orthogonal projector on V ∩ W.  The result is re-symmetrized and then
    checked: it must be a projector and its image must lie inside both
    inputs.  A violation (possible when V and W nearly touch without
    intersecting, where the formula is ill-conditioned) raises
    NumericalDegeneracyError instead of silently rounding.
    """
    if PV.ambient_dim != PW.ambient_dim:
        raise DimensionError(
            f"ambient dims differ: {PV.ambient_dim} vs {PW.ambient_dim}"
        )
    S_pinv = pinv_symmetric(PV.matrix + PW.matrix, tol)
    X = 2.0 * PV.matrix @ S_pinv @ PW.matrix
    X = 0.5 * (X + X.T)
    P = Projector(X)
    Q = image_basis(P, tol).basis
    if Q.shape[1]:
        defect = max(
            float(np.linalg.norm(Q - PV.matrix @ Q)),
            float(np.linalg.norm(Q - PW.matrix @ Q)),
        )
        if defect > DEFAULT_RESIDUAL_TOL * (1.0 + float(np.linalg.norm(Q))):
            raise NumericalDegeneracyError(
                f"intersection image not inside both inputs: defect {defect:.3e}"
            )
    return P


def is_subspace_of(
    Bsub: BehaviorBasis,
    Bsup: BehaviorBasis,
    tol: float = DEFAULT_RESIDUAL_TOL,
) -> tuple[bool, float]:
    """Inclusion test Image(Bsub) ⊆ Image(Bsup) with residual diagnostics.

    The residual is ||(I - P_sup) Q_sub||_F; inclusion holds when it stays
    below tol * (1 + ||Q_sub||_F).
    """
    if Bsub.ambient_dim != Bsup.ambient_dim:
        raise DimensionError(
            f"ambient dims differ: {Bsub.ambient_dim} vs {Bsup.ambient_dim}"
        )
    Q = Bsub.basis
    if Q.shape[1] == 0:
        return True, 0.0
    Qs = Bsup.basis
    residual = float(np.linalg.norm(Q - Qs @ (Qs.T @ Q)))
    return residual <= tol * (1.0 + float(np.linalg.norm(Q))), residual


def principal_angles(B1: BehaviorBasis, B2: BehaviorBasis) -> np.ndarray:
    """Principal angles between two subspaces, nonincreasing, in [0, pi/2].

    The cosines are the singular values of Q1^T Q2 (clamped to [-1, 1]);
    angles below pi/4 are recomputed through the sine route (singular values
    of the out-of-subspace component), since arccos alone cannot resolve
    angles under ~1.5e-8.  The list has min(dim1, dim2) entries; subspace
    equality means equal dims and max angle below tolerance.
    """
    if B1.ambient_dim != B2.ambient_dim:
        raise DimensionError(
            f"ambient dims differ: {B1.ambient_dim} vs {B2.ambient_dim}"
        )
    if B1.dim == 0 or B2.dim == 0:
        return np.zeros(0)
    Q1, Q2 = B1.basis, B2.basis
    M = Q1.T @ Q2
    cosines = np.linalg.svd(M, compute_uv=False)  # nonincreasing
    angles = np.arccos(np.clip(cosines, -1.0, 1.0))  # nondecreasing
    small = cosines**2 >= 0.5
    if np.any(small):
        if Q1.shape[1] >= Q2.shape[1]:
            residual = Q2 - Q1 @ M
        else:
            residual = Q1 - Q2 @ M.T
        sines = np.linalg.svd(residual, compute_uv=False)[::-1]  # nondecreasing
        angles[small] = np.arcsin(np.clip(sines[small], -1.0, 1.0))
    return angles[::-1].copy()


def subspaces_equal(
    B1: BehaviorBasis,
    B2: BehaviorBasis,
    angle_tol: float = DEFAULT_ANGLE_TOL,
) -> tuple[bool, float]:
    """Equality of subspaces: same dimension and max principal angle < tol.

    Returns the max angle for diagnostics (0 for two zero subspaces,
    pi/2 when the dimensions differ).
    """
    if B1.dim != B2.dim:
        return False, float(np.pi / 2)
    if B1.dim == 0:
        return True, 0.0
    max_angle = float(principal_angles(B1, B2)[0])
    return max_angle < angle_tol, max_angle
