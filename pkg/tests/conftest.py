"""Shared helpers: independent oracles the library code must agree with."""

import numpy as np
import pytest

from canonctrl.subspace import BehaviorBasis, orthonormal_basis


def null_space(M: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of ker M via SVD (independent of the library's rank rule)."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.eye(M.shape[1])
    U, s, Vt = np.linalg.svd(M)
    cutoff = rel_tol * (s[0] if s.size else 0.0) * max(M.shape)
    rank = int(np.count_nonzero(s > cutoff))
    return Vt[rank:].T


def kernel_method_intersection(QA: np.ndarray, QB: np.ndarray) -> BehaviorBasis:
    """Intersection of two column spaces via the stacked null-space method.

    Solves QA x = QB y; the intersection is QA applied to the x-parts of the
    null space of [QA, -QB].
    """
    if QA.shape[1] == 0 or QB.shape[1] == 0:
        return orthonormal_basis(np.zeros((QA.shape[0], 0)))
    stacked = np.hstack([QA, -QB])
    N = null_space(stacked)
    return orthonormal_basis(QA @ N[: QA.shape[1], :])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
