"""State-space simulation and exact finite-horizon behavior oracles.

Models here are the ground truth against which all data-driven
representations are cross-checked: a minimal (A, B, C, D) realization plus a
placement of its inputs/outputs in the full variable vector.  Restricted
behaviors are built column-by-column by simulation, never through kernel
representations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, GenerationError, MinimalityError
from .signal import Partition, Trajectory, channel_rows
from .subspace import (
    DEFAULT_RANK_TOL,
    BehaviorBasis,
    RankTolerance,
    image_basis,
    intersect,
    orthonormal_basis,
    projector_onto,
)


@dataclass(frozen=True)
class IntegerInvariants:
    """Structure integers of an LTI behavior: inputs, outputs, order, lag."""

    m_inputs: int
    p_outputs: int
    n_order: int
    lag: int

    def __post_init__(self):
        if min(self.m_inputs, self.p_outputs, self.n_order, self.lag) < 0:
            raise ValueError("invariants must be nonnegative")
        if self.lag > self.n_order:
            raise ValueError(f"lag {self.lag} exceeds order {self.n_order}")

    @property
    def q(self) -> int:
        return self.m_inputs + self.p_outputs


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """Minimal realization sigma x = Ax + Bu, y = Cx + Du.

    `partition` places the variables in the full q-channel vector: its first
    block (picks_w slot) holds the input positions, its second block (picks_c
    slot) the output positions.  Either block may be empty (autonomous
    systems have no inputs, free systems no outputs).

    Construction verifies that (A, C) is observable, which makes the
    realization a minimal representation of its behavior: the initial state
    is free, so uncontrollable-but-observable states still carry behavior
    and must not be removed.  (`random_minimal_model` additionally rejects
    uncontrollable draws so generated plants are controllable as well.)
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    partition: Partition
    tol: RankTolerance = DEFAULT_RANK_TOL

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, 0)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        m = len(self.partition.picks_w)
        p = len(self.partition.picks_c)
        B = _shaped(self.B, n, m, "B")
        C = _shaped(self.C, p, n, "C")
        D = _shaped(self.D, p, m, "D")
        for name, M in (("A", A), ("B", B), ("C", C), ("D", D)):
            object.__setattr__(self, name, M)
        if self.tol.rank(observability_matrix(A, C, n)) != n:
            raise MinimalityError("(A, C) is not observable")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def q(self) -> int:
        return self.m + self.p

    @property
    def input_picks(self) -> tuple[int, ...]:
        return self.partition.picks_w

    @property
    def output_picks(self) -> tuple[int, ...]:
        return self.partition.picks_c


def _shaped(M, rows: int, cols: int, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.size != rows * cols:
        raise DimensionError(f"{name} must have shape ({rows}, {cols}), got {M.shape}")
    return M.reshape(rows, cols)


def controllability_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    blocks, M = [], B
    for _ in range(n):
        blocks.append(M)
        M = A @ M
    return np.hstack(blocks)


def observability_matrix(A: np.ndarray, C: np.ndarray, depth: int) -> np.ndarray:
    n = A.shape[0]
    if n == 0 or depth == 0:
        return np.zeros((0, n))
    blocks, M = [], C
    for _ in range(depth):
        blocks.append(M)
        M = M @ A
    return np.vstack(blocks)


def simulate(
    model: StateSpaceModel,
    u: Trajectory | None = None,
    x0: np.ndarray | None = None,
    T: int | None = None,
) -> Trajectory:
    """Simulate the model, returning the full-variable trajectory.

    For models with inputs, `u` drives the recursion and sets the length; an
    autonomous model takes `T` instead.  x0 defaults to zero.
    """
    if model.m > 0:
        if u is None:
            raise DimensionError("model has inputs; an input trajectory is required")
        if u.q != model.m:
            raise DimensionError(f"input has {u.q} channels, model expects {model.m}")
        U = u.values
        length = u.T
        if T is not None and T != length:
            raise DimensionError(f"T={T} conflicts with input length {length}")
    else:
        if u is not None:
            raise DimensionError("autonomous model takes no input trajectory")
        if T is None or T < 1:
            raise DimensionError("autonomous model needs a positive length T")
        U = np.zeros((T, 0))
        length = T
    x = np.zeros(model.n) if x0 is None else np.asarray(x0, dtype=float).reshape(-1)
    if x.shape != (model.n,):
        raise DimensionError(f"x0 has shape {x.shape}, expected ({model.n},)")

    out = np.empty((length, model.q))
    u_cols = [pick - 1 for pick in model.input_picks]
    y_cols = [pick - 1 for pick in model.output_picks]
    for t in range(length):
        out[t, u_cols] = U[t]
        out[t, y_cols] = model.C @ x + model.D @ U[t]
        x = model.A @ x + model.B @ U[t]
    return Trajectory(out)


def invariants_of(model: StateSpaceModel) -> IntegerInvariants:
    """Integer invariants of the model's behavior; lag is the observability index."""
    n = model.n
    lag = 0
    if n > 0:
        for depth in range(1, n + 1):
            if model.tol.rank(observability_matrix(model.A, model.C, depth)) == n:
                lag = depth
                break
        else:
            raise MinimalityError("(A, C) is not observable")
    return IntegerInvariants(model.m, model.p, n, lag)


def behavior_window_map(model: StateSpaceModel, L: int) -> np.ndarray:
    """Linear map (x0, u(1..L)) -> stacked length-L window, shape (qL, n + mL).

    The image of this matrix is the restricted behavior; columns are the
    simulated responses to the parameter basis vectors.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    n, m, q = model.n, model.m, model.q
    M = np.empty((q * L, n + m * L))
    for j in range(n + m * L):
        theta = np.zeros(n + m * L)
        theta[j] = 1.0
        x0 = theta[:n]
        if m > 0:
            u = Trajectory(theta[n:].reshape(L, m))
            traj = simulate(model, u, x0=x0)
        else:
            traj = simulate(model, T=L, x0=x0)
        M[:, j] = traj.values.reshape(-1)
    return M


def restricted_behavior_basis(
    model: StateSpaceModel, L: int, tol: RankTolerance = DEFAULT_RANK_TOL
) -> BehaviorBasis:
    """Orthonormal basis of the restricted behavior over horizon L (ambient qL)."""
    return orthonormal_basis(behavior_window_map(model, L), tol)


def projected_restricted_basis(
    model: StateSpaceModel,
    picks: tuple[int, ...],
    L: int,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> BehaviorBasis:
    """Restricted behavior of the projection onto the given channels.

    Coordinate projection commutes with windowing, so this is the row
    selection of the full restricted basis, re-orthonormalized.
    """
    M = behavior_window_map(model, L)
    rows = channel_rows(picks, model.q, L)
    return orthonormal_basis(M[rows, :], tol)


def hidden_restricted_basis(
    model: StateSpaceModel,
    wc_partition: Partition,
    L: int,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> BehaviorBasis:
    """Windows of the plant's w-variables compatible with the c-variables pinned to zero.

    Realized by intersecting the full restricted behavior with the subspace
    {c-coordinates = 0} and reading off the w-coordinates (ambient = |w| L).
    """
    wc_partition.require_control_split()
    if wc_partition.total != model.q:
        raise DimensionError(
            f"partition covers {wc_partition.total} channels, model has {model.q}"
        )
    q_total = model.q
    w_rows = channel_rows(wc_partition.picks_w, q_total, L)
    plant = restricted_behavior_basis(model, L, tol)
    E = np.zeros((q_total * L, w_rows.size))
    E[w_rows, np.arange(w_rows.size)] = 1.0
    zero_c = orthonormal_basis(E, tol)
    P_hidden_full = intersect(projector_onto(plant), projector_onto(zero_c), tol)
    image = image_basis(P_hidden_full, tol)
    # intersection vectors vanish on the c coordinates, so the w-row
    # selection is norm-preserving
    return orthonormal_basis(image.basis[w_rows, :], tol)


def projected_invariants(
    model: StateSpaceModel,
    picks: tuple[int, ...],
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> IntegerInvariants:
    """Integer invariants of the behavior projected onto the given channels.

    Detected from the dimension profile d(L) of the projected restricted
    bases: above the projected lag, d(L) is affine with slope = input count
    and intercept = order.
    """
    L_hi = max(3, 2 * model.n + 4)
    dims = [0] + [
        projected_restricted_basis(model, picks, L, tol).dim
        for L in range(1, L_hi + 1)
    ]
    diffs = [dims[L + 1] - dims[L] for L in range(1, L_hi)]
    settle = max(2, model.n + 2)
    tail = diffs[-settle:]
    if len(set(tail)) != 1:
        raise ValueError("dimension profile did not settle; cannot detect invariants")
    m_proj = tail[0]
    n_proj = dims[L_hi] - m_proj * L_hi
    if n_proj == 0:
        lag = 0
    else:
        lag = 1
        for L in range(L_hi, 0, -1):
            if dims[L] != m_proj * L + n_proj:
                lag = L + 1
                break
    return IntegerInvariants(m_proj, len(picks) - m_proj, n_proj, lag)


def observable_realization(
    A: np.ndarray,
    B: np.ndarray,
    C: np.ndarray,
    D: np.ndarray,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Quotient by the unobservable subspace (exact structural reduction).

    This is the behavior-preserving state reduction: unobservable states
    never influence any trajectory, while uncontrollable-but-observable
    states are carried by the free initial condition and must be kept.  The
    unobservable subspace is A-invariant, so the orthonormal change of
    coordinates leaves an observable realization of the same behavior.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        A = A.reshape(0, 0)
    B = np.asarray(B, dtype=float)
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    if n == 0:
        return A, B, C, D
    W = orthonormal_basis(observability_matrix(A, C, n).T, tol).basis
    return W.T @ A @ W, W.T @ B, C @ W, D


def product_model(first: StateSpaceModel, second: StateSpaceModel) -> StateSpaceModel:
    """Cartesian product of two behaviors; second model's channels are appended."""

    def blkdiag(M1, M2):
        out = np.zeros((M1.shape[0] + M2.shape[0], M1.shape[1] + M2.shape[1]))
        out[: M1.shape[0], : M1.shape[1]] = M1
        out[M1.shape[0] :, M1.shape[1] :] = M2
        return out

    offset = first.q
    picks_u = first.input_picks + tuple(p + offset for p in second.input_picks)
    picks_y = first.output_picks + tuple(p + offset for p in second.output_picks)
    return StateSpaceModel(
        blkdiag(first.A, second.A),
        blkdiag(first.B, second.B),
        blkdiag(first.C, second.C),
        blkdiag(first.D, second.D),
        Partition(first.q + second.q, picks_u, picks_y),
    )


def free_model(k: int) -> StateSpaceModel:
    """Model of the totally free behavior on k channels (k inputs, no outputs)."""
    if k < 1:
        raise ValueError("free model needs k >= 1")
    return StateSpaceModel(
        np.zeros((0, 0)),
        np.zeros((0, k)),
        np.zeros((0, 0)),
        np.zeros((0, k)),
        Partition(k, tuple(range(1, k + 1)), ()),
    )


def random_minimal_model(
    q_w: int,
    q_c: int,
    n: int,
    seed: int,
    max_draws: int = 1000,
) -> tuple[StateSpaceModel, Partition]:
    """Random stable minimal model over q_w + q_c channels, plus a role split.

    Deterministic in the seed.  The model's input/output placement and the
    returned (w, c) role partition are drawn independently; the spectral
    radius is rescaled below 1 so simulated trajectories stay bounded.
    Raises GenerationError if the minimality rejection loop exhausts its
    budget.
    """
    if q_w < 1 or q_c < 1 or n < 0:
        raise ValueError("need q_w >= 1, q_c >= 1, n >= 0")
    q_total = q_w + q_c
    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        m = int(rng.integers(1, q_total))
        p = q_total - m
        if n > 0:
            A = rng.standard_normal((n, n))
            radius = float(np.max(np.abs(np.linalg.eigvals(A))))
            if radius < 1e-9:
                continue
            A *= float(rng.uniform(0.3, 0.9)) / radius
        else:
            A = np.zeros((0, 0))
        B = rng.standard_normal((n, m))
        C = rng.standard_normal((p, n))
        D = rng.standard_normal((p, m))
        io_order = rng.permutation(q_total) + 1
        role_order = rng.permutation(q_total) + 1
        partition = Partition(
            q_total, tuple(int(i) for i in role_order[:q_w]), tuple(int(i) for i in role_order[q_w:])
        )
        if DEFAULT_RANK_TOL.rank(controllability_matrix(A, B)) != n:
            continue
        try:
            model = StateSpaceModel(
                A,
                B,
                C,
                D,
                Partition(q_total, tuple(int(i) for i in io_order[:m]), tuple(int(i) for i in io_order[m:])),
            )
        except MinimalityError:
            continue
        return model, partition
    raise GenerationError(f"no minimal model found after {max_draws} draws")


def model_to_dict(model: StateSpaceModel) -> dict:
    return {
        "A": model.A.tolist(),
        "B": model.B.tolist(),
        "C": model.C.tolist(),
        "D": model.D.tolist(),
        "picks_w": list(model.input_picks),
        "picks_c": list(model.output_picks),
    }


def model_from_dict(d: dict) -> StateSpaceModel:
    picks_u = tuple(int(i) for i in d["picks_w"])
    picks_y = tuple(int(i) for i in d["picks_c"])
    m, p = len(picks_u), len(picks_y)
    A = np.asarray(d["A"], dtype=float)
    n = A.shape[0] if A.ndim == 2 else (0 if A.size == 0 else 1)
    A = A.reshape(n, n)
    B = np.asarray(d["B"], dtype=float).reshape(n, m)
    C = np.asarray(d["C"], dtype=float).reshape(p, n)
    D = np.asarray(d["D"], dtype=float).reshape(p, m)
    return StateSpaceModel(A, B, C, D, Partition(m + p, picks_u, picks_y))


def write_model_json(path, model: StateSpaceModel) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(model), f, indent=2)
        f.write("\n")


def read_model_json(path) -> StateSpaceModel:
    with open(path, encoding="utf-8") as f:
        return model_from_dict(json.load(f))
