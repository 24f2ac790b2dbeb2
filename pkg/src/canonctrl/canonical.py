"""Canonical controller synthesis from data and closed-loop verification.

The controller's finite-horizon behavior is the c-coordinate image of the
intersection of the plant's restricted behavior with the lift of the
reference (reference on w, anything on c).  All projector algebra happens in
the canonical interleaved layout; block-ordered constructions are moved over
by an explicit :class:`PermutationPlan` rather than implicit reshaping.

Trajectories entering this module must already carry their channels in
(w-block, c-block) order; use :func:`canonctrl.signal.arrange_by_partition`.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DimensionError, EmptyBasisError
from .signal import Trajectory, hankel
from .subspace import (
    DEFAULT_ANGLE_TOL,
    DEFAULT_RANK_TOL,
    BehaviorBasis,
    Projector,
    RankTolerance,
    image_basis,
    intersect,
    orthonormal_basis,
    pinv_symmetric,
    principal_angles,
    projector_onto,
    subspaces_equal,
)


@dataclass(frozen=True)
class PermutationPlan:
    """Bookkeeping between block layout and canonical interleaved layout.

    Block layout stacks all w samples (qL entries) then all c samples (kL);
    canonical layout interleaves per time step: (w(1), c(1), ..., w(L), c(L)).
    `perm` maps positions so that canonical_vec = block_vec[perm].
    """

    q: int
    k: int
    L: int

    def __post_init__(self):
        if min(self.q, self.k, self.L) < 1:
            raise ValueError("q, k, L must all be >= 1")

    @property
    def ambient_dim(self) -> int:
        return (self.q + self.k) * self.L

    @cached_property
    def perm(self) -> np.ndarray:
        q, k, L = self.q, self.k, self.L
        perm = np.empty((q + k) * L, dtype=int)
        for t in range(L):
            perm[t * (q + k) : t * (q + k) + q] = np.arange(t * q, (t + 1) * q)
            perm[t * (q + k) + q : (t + 1) * (q + k)] = q * L + np.arange(
                t * k, (t + 1) * k
            )
        return perm

    @cached_property
    def inverse_perm(self) -> np.ndarray:
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return inv

    @cached_property
    def w_rows(self) -> np.ndarray:
        """Canonical-layout positions of the w coordinates."""
        return np.array(
            [t * (self.q + self.k) + j for t in range(self.L) for j in range(self.q)],
            dtype=int,
        )

    @cached_property
    def c_rows(self) -> np.ndarray:
        """Canonical-layout positions of the c coordinates."""
        return np.array(
            [
                t * (self.q + self.k) + self.q + j
                for t in range(self.L)
                for j in range(self.k)
            ],
            dtype=int,
        )

    def to_canonical(self, block_vec: np.ndarray) -> np.ndarray:
        return np.asarray(block_vec)[self.perm]

    def to_block(self, canonical_vec: np.ndarray) -> np.ndarray:
        return np.asarray(canonical_vec)[self.inverse_perm]

    def conjugate_to_canonical(self, block_matrix: np.ndarray) -> np.ndarray:
        """Similarity transform of an operator from block to canonical layout."""
        return np.asarray(block_matrix)[np.ix_(self.perm, self.perm)]


@dataclass(frozen=True, eq=False)
class ControllerBasis:
    """Finite-horizon controller behavior: a subspace of the c-window space."""

    basis: BehaviorBasis
    k: int
    L: int

    def __post_init__(self):
        if self.basis.ambient_dim != self.k * self.L:
            raise DimensionError(
                f"controller ambient {self.basis.ambient_dim} != k*L = {self.k * self.L}"
            )

    @property
    def dim(self) -> int:
        return self.basis.dim


@dataclass(frozen=True)
class ClosedLoopReport:
    """Principal-angle comparison of the controlled behavior with the reference."""

    verified: bool
    max_angle: float
    angles: tuple[float, ...]
    dim_controlled: int
    dim_reference: int

    def to_dict(self) -> dict:
        return {
            "verified": self.verified,
            "max_angle": self.max_angle,
            "angles": list(self.angles),
            "dim_controlled": self.dim_controlled,
            "dim_reference": self.dim_reference,
        }


def plant_projector(
    plant_traj: Trajectory, L: int, tol: RankTolerance = DEFAULT_RANK_TOL
) -> Projector:
    """Orthogonal projector onto the plant's restricted behavior from data.

    `plant_traj` must hold the full (w, c) variables with w channels first;
    the Hankel image then sits in canonical interleaved layout directly.
    """
    return projector_onto(orthonormal_basis(hankel(plant_traj, L), tol))


def reference_lift_projector(
    ref_traj: Trajectory,
    k: int,
    L: int,
    plan: PermutationPlan,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> Projector:
    """Projector onto (reference windows) x (anything on c), canonical layout.

    Built block-diagonally from the reference Hankel image and an identity
    on the c coordinates, then conjugated into the interleaved layout.
    """
    if plan.q != ref_traj.q or plan.k != k or plan.L != L:
        raise DimensionError("plan does not match (q, k, L) of the inputs")
    QR = orthonormal_basis(hankel(ref_traj, L), tol).basis
    qL, kL = plan.q * L, k * L
    block = np.zeros((qL + kL, qL + kL))
    block[:qL, :qL] = QR @ QR.T
    block[qL:, qL:] = np.eye(kL)
    return Projector(plan.conjugate_to_canonical(block))


def controller_basis(
    P_r: Projector,
    P_p: Projector,
    plan: PermutationPlan,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> ControllerBasis:
    """Controller behavior synthesized from the two data projectors.

    Evaluates X = P_r (P_r + P_p)^+ P_p, keeps the c rows, and
    orthonormalizes.  The formula is evaluated unconditionally: whether the
    result implements the reference is decided by `verify_closed_loop`.
    """
    if P_r.ambient_dim != plan.ambient_dim or P_p.ambient_dim != plan.ambient_dim:
        raise DimensionError("projector ambient dims do not match the plan")
    S_pinv = pinv_symmetric(P_r.matrix + P_p.matrix, tol)
    X = P_r.matrix @ S_pinv @ P_p.matrix
    # X is (half) a projector, so its entries live on the 0..1 scale
    return ControllerBasis(
        orthonormal_basis(X[plan.c_rows, :], tol, scale=1.0), plan.k, plan.L
    )


def controller_basis_intersection_route(
    P_r: Projector,
    P_p: Projector,
    plan: PermutationPlan,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> ControllerBasis:
    """Same controller subspace through the full projector-intersection route.

    Intersects the two projectors (symmetric, idempotent result), then takes
    the c rows of the intersection's image.  Agrees with `controller_basis`
    up to numerical tolerance; kept as an independent cross-check.
    """
    P_int = intersect(P_r, P_p, tol)
    image = image_basis(P_int, tol)
    return ControllerBasis(
        orthonormal_basis(image.basis[plan.c_rows, :], tol, scale=1.0), plan.k, plan.L
    )


def lift_controller(
    C: ControllerBasis, plan: PermutationPlan, tol: RankTolerance = DEFAULT_RANK_TOL
) -> BehaviorBasis:
    """Lift a controller subspace to (anything on w) x C, canonical layout."""
    qL, kL = plan.q * plan.L, plan.k * plan.L
    Qc = C.basis.basis
    block = np.zeros((qL + kL, qL + Qc.shape[1]))
    block[:qL, :qL] = np.eye(qL)
    block[qL:, qL:] = Qc
    return orthonormal_basis(block[plan.perm, :], tol)


def verify_closed_loop(
    P_basis: BehaviorBasis,
    C: ControllerBasis,
    R_basis: BehaviorBasis,
    plan: PermutationPlan,
    tol: RankTolerance = DEFAULT_RANK_TOL,
    angle_tol: float = DEFAULT_ANGLE_TOL,
) -> tuple[bool, ClosedLoopReport]:
    """Does interconnecting the plant with C reproduce the reference on w?

    Intersects the plant's restricted behavior with the controller lift,
    projects onto the w coordinates, and compares against the reference by
    principal angles.  True iff the subspaces coincide.
    """
    if P_basis.ambient_dim != plan.ambient_dim:
        raise DimensionError("plant basis ambient does not match the plan")
    if R_basis.ambient_dim != plan.q * plan.L:
        raise DimensionError("reference basis ambient does not match the plan")
    lift = lift_controller(C, plan, tol)
    P_loop = intersect(projector_onto(P_basis), projector_onto(lift), tol)
    loop_image = image_basis(P_loop, tol)
    controlled = orthonormal_basis(loop_image.basis[plan.w_rows, :], tol, scale=1.0)
    verified, max_angle = subspaces_equal(controlled, R_basis, angle_tol)
    angles = tuple(float(a) for a in principal_angles(controlled, R_basis))
    report = ClosedLoopReport(
        verified=verified,
        max_angle=max_angle,
        angles=angles,
        dim_controlled=controlled.dim,
        dim_reference=R_basis.dim,
    )
    return verified, report


def sample_controller_trajectory(C: ControllerBasis, seed: int) -> Trajectory:
    """Random trajectory of the controller behavior, deterministic in the seed.

    A seeded random combination of the basis columns, de-interleaved into a
    k-channel, length-L trajectory.
    """
    if C.dim == 0:
        raise EmptyBasisError("controller behavior is zero-dimensional")
    rng = np.random.default_rng(seed)
    vec = C.basis.basis @ rng.standard_normal(C.dim)
    return Trajectory(vec.reshape(C.L, C.k))


def write_controller_csv(path, C: ControllerBasis) -> None:
    """Basis matrix as CSV (kL rows, one column per basis vector) plus sidecar.

    The sidecar JSON (same path with .json suffix) records k, L, and the
    vector layout.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        for row in C.basis.basis:
            writer.writerow([repr(float(x)) for x in row])
    sidecar = {"k": C.k, "L": C.L, "layout": "interleaved-time-major"}
    with open(path.with_suffix(".json"), "w", encoding="utf-8") as f:
        json.dump(sidecar, f, indent=2)
        f.write("\n")


def read_controller_csv(path) -> ControllerBasis:
    """Read back a controller basis written by `write_controller_csv`."""
    path = Path(path)
    with open(path.with_suffix(".json"), encoding="utf-8") as f:
        meta = json.load(f)
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.reader(f):
            if row:
                rows.append([float(x) for x in row])
    k, L = int(meta["k"]), int(meta["L"])
    if not rows:
        matrix = np.zeros((k * L, 0))
    else:
        matrix = np.array(rows)
    return ControllerBasis(orthonormal_basis(matrix), k, L)
