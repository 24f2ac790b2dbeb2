"""Implementability of a reference behavior, from data and from models.

The data route builds three raw-data subspaces over horizon L -- the hidden
behavior N (w-windows compatible with c pinned to zero), the reference R,
and the uncontrolled plant behavior P_w -- and decides implementability by
testing the inclusion chain N ⊆ R ⊆ P_w through least-squares residuals.
The model route computes the same three subspaces exactly from state-space
oracles; the two must agree whenever the data is sufficiently exciting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import lti_core
from .errors import DimensionError, HorizonError
from .signal import Partition, Trajectory, hankel, is_gpe, select_channels
from .subspace import (
    DEFAULT_RANK_TOL,
    DEFAULT_RESIDUAL_TOL,
    BehaviorBasis,
    RankTolerance,
    is_subspace_of,
    orthonormal_basis,
    pinv,
)


@dataclass(frozen=True)
class InvariantBounds:
    """Caller-supplied invariant bounds for the data route.

    m_*/n_* are input-count and order bounds used in the excitation rank
    tests; lag bounds the largest of the three lags entering the horizon
    precondition (plant, reference, uncontrolled plant).
    """

    m_plant: int
    n_plant: int
    m_ref: int
    n_ref: int
    lag: int

    def __post_init__(self):
        if min(self.m_plant, self.n_plant, self.m_ref, self.n_ref, self.lag) < 0:
            raise ValueError("bounds must be nonnegative")


@dataclass(frozen=True, eq=False)
class DataBundle:
    """Measured plant and reference trajectories plus the test configuration."""

    plant_traj: Trajectory
    ref_traj: Trajectory
    L: int
    partition: Partition
    bounds: InvariantBounds | None = None

    def __post_init__(self):
        self.partition.require_control_split()
        if self.plant_traj.q != self.partition.total:
            raise DimensionError(
                f"plant has {self.plant_traj.q} channels, partition {self.partition.total}"
            )
        if self.ref_traj.q != self.partition.n_w:
            raise DimensionError(
                f"reference has {self.ref_traj.q} channels, expected {self.partition.n_w}"
            )
        if not 1 <= self.L <= min(self.plant_traj.T, self.ref_traj.T):
            raise ValueError(
                f"L={self.L} outside [1, {min(self.plant_traj.T, self.ref_traj.T)}]"
            )


@dataclass(frozen=True, eq=False)
class ImplementabilityVerdict:
    """Decision plus certificates and diagnostics.

    implementable is true only when both inclusion residuals pass and both
    excitation flags hold; phi/psi solve N = R phi and R = P_w psi when the
    inclusions hold.
    """

    implementable: bool
    phi: np.ndarray | None
    psi: np.ndarray | None
    residual_hidden_in_ref: float
    residual_ref_in_plant: float
    gpe_plant: bool
    gpe_ref: bool
    rank_hidden: int
    rank_ref: int
    rank_uncontrolled: int

    def to_dict(self) -> dict:
        return {
            "implementable": self.implementable,
            "residuals": {
                "hidden_in_ref": self.residual_hidden_in_ref,
                "ref_in_plant": self.residual_ref_in_plant,
            },
            "gpe": {"plant": self.gpe_plant, "ref": self.gpe_ref},
            "ranks": {
                "N": self.rank_hidden,
                "R": self.rank_ref,
                "Pw": self.rank_uncontrolled,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def hidden_basis(
    plant_traj: Trajectory,
    partition: Partition,
    L: int,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> BehaviorBasis:
    """Data representation of the hidden behavior over horizon L.

    Annihilates the c-window coefficients: image of
    H_L(w) (I - H_L(c)^+ H_L(c)), ambient |w| L.
    """
    partition.require_control_split()
    if plant_traj.q != partition.total:
        raise DimensionError(
            f"plant has {plant_traj.q} channels, partition {partition.total}"
        )
    w = select_channels(plant_traj, partition.picks_w)
    c = select_channels(plant_traj, partition.picks_c)
    Hw = hankel(w, L)
    Hc = hankel(c, L)
    annihilator = np.eye(Hc.shape[1]) - pinv(Hc, tol) @ Hc
    # rank cutoff anchored at the data scale: the product is numerically zero
    # whenever the hidden behavior is trivial
    scale = float(np.linalg.norm(Hw, 2))
    return orthonormal_basis(Hw @ annihilator, tol, scale=scale)


def reference_basis(
    ref_traj: Trajectory, L: int, tol: RankTolerance = DEFAULT_RANK_TOL
) -> BehaviorBasis:
    """Data representation of the restricted reference behavior: image of H_L(r)."""
    return orthonormal_basis(hankel(ref_traj, L), tol)


def uncontrolled_basis(
    plant_traj: Trajectory,
    partition: Partition,
    L: int,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> BehaviorBasis:
    """Data representation of the uncontrolled plant behavior: image of H_L(w)."""
    partition.require_control_split()
    w = select_channels(plant_traj, partition.picks_w)
    return orthonormal_basis(hankel(w, L), tol)


def _verdict_from_bases(
    N: BehaviorBasis,
    R: BehaviorBasis,
    Pw: BehaviorBasis,
    gpe_plant: bool,
    gpe_ref: bool,
    residual_tol: float,
) -> ImplementabilityVerdict:
    ok_left, res_left = is_subspace_of(N, R, residual_tol)
    ok_right, res_right = is_subspace_of(R, Pw, residual_tol)
    inclusions = ok_left and ok_right
    phi = R.basis.T @ N.basis if inclusions else None
    psi = Pw.basis.T @ R.basis if inclusions else None
    return ImplementabilityVerdict(
        implementable=inclusions and gpe_plant and gpe_ref,
        phi=phi,
        psi=psi,
        residual_hidden_in_ref=res_left,
        residual_ref_in_plant=res_right,
        gpe_plant=gpe_plant,
        gpe_ref=gpe_ref,
        rank_hidden=N.dim,
        rank_ref=R.dim,
        rank_uncontrolled=Pw.dim,
    )


def check_data(
    bundle: DataBundle,
    rank_tol: RankTolerance = DEFAULT_RANK_TOL,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> ImplementabilityVerdict:
    """Decide implementability of the reference directly from trajectories.

    Requires invariant bounds in the bundle: the horizon must exceed the lag
    bound and the excitation rank tests need input/order bounds.  A failed
    excitation test is recorded in the verdict and forces a negative
    decision (the inclusion residuals are still reported).
    """
    if bundle.bounds is None:
        raise ValueError("check_data needs invariant bounds; refusing to guess")
    bounds = bundle.bounds
    if bundle.L <= bounds.lag:
        raise HorizonError(f"L={bundle.L} must exceed the lag bound {bounds.lag}")
    gpe_plant, _ = is_gpe(
        bundle.plant_traj, bundle.L, bounds.m_plant, bounds.n_plant, rank_tol
    )
    gpe_ref, _ = is_gpe(bundle.ref_traj, bundle.L, bounds.m_ref, bounds.n_ref, rank_tol)
    N = hidden_basis(bundle.plant_traj, bundle.partition, bundle.L, rank_tol)
    R = reference_basis(bundle.ref_traj, bundle.L, rank_tol)
    Pw = uncontrolled_basis(bundle.plant_traj, bundle.partition, bundle.L, rank_tol)
    return _verdict_from_bases(N, R, Pw, gpe_plant, gpe_ref, residual_tol)


def check_model(
    plant: lti_core.StateSpaceModel,
    wc_partition: Partition,
    ref: lti_core.StateSpaceModel,
    L: int,
    rank_tol: RankTolerance = DEFAULT_RANK_TOL,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> ImplementabilityVerdict:
    """Decide implementability from state-space oracles of plant and reference.

    Builds the exact restricted bases of the hidden behavior, the reference,
    and the uncontrolled plant, and tests the same inclusion chain as the
    data route.  The horizon must exceed all three lags, which are computed
    from the models.
    """
    wc_partition.require_control_split()
    if plant.q != wc_partition.total:
        raise DimensionError(
            f"plant has {plant.q} channels, partition {wc_partition.total}"
        )
    if ref.q != wc_partition.n_w:
        raise DimensionError(
            f"reference has {ref.q} channels, expected {wc_partition.n_w}"
        )
    lag_needed = max(
        lti_core.invariants_of(plant).lag,
        lti_core.invariants_of(ref).lag,
        lti_core.projected_invariants(plant, wc_partition.picks_w, rank_tol).lag,
    )
    if L <= lag_needed:
        raise HorizonError(f"L={L} must exceed the lag bound {lag_needed}")
    N = lti_core.hidden_restricted_basis(plant, wc_partition, L, rank_tol)
    R = lti_core.restricted_behavior_basis(ref, L, rank_tol)
    Pw = lti_core.projected_restricted_basis(plant, wc_partition.picks_w, L, rank_tol)
    return _verdict_from_bases(N, R, Pw, True, True, residual_tol)
