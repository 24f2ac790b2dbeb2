"""Randomized experiment harness and hand-analyzable fixtures.

Builds reproducible test cases: random plants, references that are
implementable by construction (closed loop of the plant with a random LTI
controller acting on the control variables) or adversarial, excitation-
verified trajectories, and the battery of cross-checks between the data
route and the model route.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canonical import (
    PermutationPlan,
    controller_basis,
    controller_basis_intersection_route,
    plant_projector,
    reference_lift_projector,
    verify_closed_loop,
)
from .errors import GenerationError, MinimalityError
from .implementability import (
    DataBundle,
    InvariantBounds,
    check_data,
    check_model,
    reference_basis,
)
from .lti_core import (
    StateSpaceModel,
    invariants_of,
    observable_realization,
    projected_invariants,
    random_minimal_model,
    simulate,
)
from .signal import Partition, Trajectory, arrange_by_partition, hankel, is_gpe
from .subspace import (
    DEFAULT_ANGLE_TOL,
    DEFAULT_RANK_TOL,
    DEFAULT_RESIDUAL_TOL,
    RankTolerance,
    orthonormal_basis,
    subspaces_equal,
)


# ---------------------------------------------------------------------------
# hand-analyzable fixtures


def static_plant() -> tuple[StateSpaceModel, Partition]:
    """Memoryless plant enforcing w = c (channel 1 is w, channel 2 is c)."""
    model = StateSpaceModel(
        np.zeros((0, 0)),
        np.zeros((0, 1)),
        np.zeros((1, 0)),
        np.array([[1.0]]),
        Partition(2, (2,), (1,)),
    )
    return model, Partition(2, (1,), (2,))


def integrator_plant() -> tuple[StateSpaceModel, Partition]:
    """Accumulator plant: next w = w + c (channel 1 is w, channel 2 is c)."""
    model = StateSpaceModel(
        np.array([[1.0]]),
        np.array([[1.0]]),
        np.array([[1.0]]),
        np.array([[0.0]]),
        Partition(2, (2,), (1,)),
    )
    return model, Partition(2, (1,), (2,))


def decaying_reference(rate: float = 0.5) -> StateSpaceModel:
    """Autonomous scalar reference: next r = rate * r."""
    return StateSpaceModel(
        np.array([[rate]]),
        np.zeros((1, 0)),
        np.array([[1.0]]),
        np.zeros((1, 0)),
        Partition(1, (), (1,)),
    )


def decaying_reference_data(T: int, rate: float = 0.5, r1: float = 1.0) -> Trajectory:
    return Trajectory((r1 * rate ** np.arange(T)).reshape(-1, 1))


def plant_data(
    model: StateSpaceModel, T: int, seed: int, x0_scale: float = 1.0
) -> Trajectory:
    """Seeded random-input simulation of a plant model."""
    rng = np.random.default_rng(seed)
    x0 = x0_scale * rng.standard_normal(model.n)
    if model.m > 0:
        u = Trajectory(rng.standard_normal((T, model.m)))
        return simulate(model, u, x0=x0)
    return simulate(model, T=T, x0=x0)


# ---------------------------------------------------------------------------
# random case construction


def gpe_length(m: int, n: int, L: int, q: int) -> int:
    """Trajectory length comfortably above the excitation requirements."""
    return max((m + 1) * (L + n) + n, q * L + L + n) + 8


def gpe_trajectory(
    model: StateSpaceModel,
    L: int,
    T: int,
    rng: np.random.Generator,
    rank_tol: RankTolerance = DEFAULT_RANK_TOL,
    tries: int = 25,
) -> Trajectory:
    """Simulate until the trajectory passes the excitation rank test."""
    inv = invariants_of(model)
    for _ in range(tries):
        x0 = rng.standard_normal(model.n)
        if model.m > 0:
            traj = simulate(model, Trajectory(rng.standard_normal((T, model.m))), x0=x0)
        else:
            traj = simulate(model, T=T, x0=x0)
        ok, _ = is_gpe(traj, L, inv.m_inputs, inv.n_order, rank_tol)
        if ok:
            return traj
    raise GenerationError(f"no exciting trajectory of length {T} after {tries} tries")


def random_plant(
    q_w: int,
    q_c: int,
    n: int,
    rng: np.random.Generator,
    tries: int = 50,
) -> tuple[StateSpaceModel, Partition]:
    """Random minimal plant whose control block contains at least one input.

    The closed-loop reference construction needs an actuated control
    variable; role splits without one are redrawn.
    """
    for _ in range(tries):
        model, partition = random_minimal_model(
            q_w, q_c, n, seed=int(rng.integers(0, 2**63))
        )
        if any(pos in model.input_picks for pos in partition.picks_c):
            return model, partition
    raise GenerationError(f"no actuated plant split after {tries} draws")


def _stable_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0))
    A = rng.standard_normal((n, n))
    radius = float(np.max(np.abs(np.linalg.eigvals(A))))
    if radius < 1e-9:
        return np.zeros((n, n))
    return A * float(rng.uniform(0.3, 0.9)) / radius


def feedback_reference_model(
    plant: StateSpaceModel,
    wc_partition: Partition,
    n_ctrl: int,
    rng: np.random.Generator,
    tries: int = 50,
) -> StateSpaceModel:
    """Reference implementable by construction: the plant in closed loop
    with a random strictly proper LTI controller on the control variables.

    The controller reads the control variables that are plant outputs and
    drives the ones that are plant inputs; eliminating the shared variables
    then leaves an ordinary input/state/output system over the w channels,
    which is reduced to a minimal realization.
    """
    in_pos = {pos: i for i, pos in enumerate(plant.input_picks)}
    out_pos = {pos: i for i, pos in enumerate(plant.output_picks)}
    cu = [in_pos[p] for p in wc_partition.picks_c if p in in_pos]
    cy = [out_pos[p] for p in wc_partition.picks_c if p in out_pos]
    if not cu:
        raise GenerationError("closed-loop construction needs an actuated control variable")
    wu = [(j, in_pos[p]) for j, p in enumerate(wc_partition.picks_w) if p in in_pos]
    wy = [(j, out_pos[p]) for j, p in enumerate(wc_partition.picks_w) if p in out_pos]

    n, m, p = plant.n, plant.m, plant.p
    E_c = np.zeros((m, len(cu)))
    E_c[cu, np.arange(len(cu))] = 1.0
    m_v = len(wu)
    E_w = np.zeros((m, m_v))
    E_w[[i for _, i in wu], np.arange(m_v)] = 1.0
    S_cy = np.zeros((len(cy), p))
    S_cy[np.arange(len(cy)), cy] = 1.0

    for attempt in range(tries):
        Az = _stable_matrix(n_ctrl, rng)
        Bz = rng.standard_normal((n_ctrl, len(cy)))
        # attenuate the loop gain over retries: as it goes to zero the loop
        # matrix turns block triangular with stable blocks, so a stable draw
        # is always reached
        Cz = rng.standard_normal((len(cu), n_ctrl)) * 0.6**attempt

        # closed-loop state (x, z), free input v = the w channels that are
        # plant inputs
        BEcCz = plant.B @ E_c @ Cz
        DEcCz = plant.D @ E_c @ Cz
        A_cl = np.block(
            [
                [plant.A, BEcCz],
                [Bz @ S_cy @ plant.C, Az + Bz @ S_cy @ DEcCz],
            ]
        )
        if A_cl.size and np.max(np.abs(np.linalg.eigvals(A_cl))) >= 0.95:
            continue
        B_cl = np.vstack([plant.B @ E_w, Bz @ S_cy @ plant.D @ E_w])

        C_rows, D_rows, out_channels = [], [], []
        for j, i in wy:
            C_rows.append(np.concatenate([plant.C[i, :], DEcCz[i, :]]))
            D_rows.append((plant.D @ E_w)[i, :])
            out_channels.append(j + 1)
        n_cl = n + n_ctrl
        C_cl = np.array(C_rows).reshape(len(wy), n_cl)
        D_cl = np.array(D_rows).reshape(len(wy), m_v)

        Am, Bm, Cm, Dm = observable_realization(A_cl, B_cl, C_cl, D_cl)
        in_channels = [j + 1 for j, _ in wu]
        try:
            return StateSpaceModel(
                Am,
                Bm,
                Cm,
                Dm,
                Partition(wc_partition.n_w, tuple(in_channels), tuple(out_channels)),
            )
        except MinimalityError:
            continue
    raise GenerationError(f"no minimal closed-loop reference after {tries} draws")


def random_reference_model(
    q: int, n: int, rng: np.random.Generator, tries: int = 100
) -> StateSpaceModel:
    """Random stable reference behavior over q channels (adversarial cases).

    The input count is drawn from [0, q-1]; input-free draws keep at least
    one state so the behavior is not the zero behavior.
    """
    for _ in range(tries):
        m = int(rng.integers(0, q))
        n_eff = max(n, 1) if m == 0 else n
        p = q - m
        A = _stable_matrix(n_eff, rng)
        B = rng.standard_normal((n_eff, m))
        C = rng.standard_normal((p, n_eff))
        D = rng.standard_normal((p, m))
        order = rng.permutation(q) + 1
        try:
            return StateSpaceModel(
                A,
                B,
                C,
                D,
                Partition(q, tuple(int(i) for i in order[:m]), tuple(int(i) for i in order[m:])),
            )
        except MinimalityError:
            continue
    raise GenerationError(f"no minimal reference after {tries} draws")


def random_sub_behavior_model(
    model: StateSpaceModel,
    m_sub: int,
    rng: np.random.Generator,
    tries: int = 50,
) -> StateSpaceModel:
    """Random LTI sub-behavior of a model's behavior, over the same channels.

    Keeps m_sub of the inputs free and ties the rest to the state and the
    free inputs; every trajectory of the result is a trajectory of the
    original behavior.
    """
    if not 0 <= m_sub <= model.m:
        raise ValueError(f"m_sub must lie in [0, {model.m}]")
    free = list(range(m_sub))
    tied = list(range(m_sub, model.m))
    E_s = np.zeros((model.m, m_sub))
    E_s[free, np.arange(m_sub)] = 1.0
    E_r = np.zeros((model.m, len(tied)))
    E_r[tied, np.arange(len(tied))] = 1.0
    for attempt in range(tries):
        K = rng.standard_normal((len(tied), model.n)) * 0.6**attempt
        G = rng.standard_normal((len(tied), m_sub))
        A_s = model.A + model.B @ E_r @ K
        if A_s.size and np.max(np.abs(np.linalg.eigvals(A_s))) >= 0.95:
            continue
        B_s = model.B @ (E_s + E_r @ G)
        # channels: free inputs stay inputs; tied inputs and the original
        # outputs become outputs of the sub-behavior
        C_rows, D_rows, out_channels = [], [], []
        for i in tied:
            C_rows.append(K[tied.index(i), :])
            D_rows.append(G[tied.index(i), :])
            out_channels.append(model.input_picks[i])
        full_C = model.C + model.D @ E_r @ K
        full_D = model.D @ (E_s + E_r @ G)
        for i in range(model.p):
            C_rows.append(full_C[i, :])
            D_rows.append(full_D[i, :])
            out_channels.append(model.output_picks[i])
        C_s = np.array(C_rows).reshape(len(out_channels), model.n)
        D_s = np.array(D_rows).reshape(len(out_channels), m_sub)
        Am, Bm, Cm, Dm = observable_realization(A_s, B_s, C_s, D_s)
        in_channels = tuple(model.input_picks[i] for i in free)
        try:
            return StateSpaceModel(
                Am, Bm, Cm, Dm, Partition(model.q, in_channels, tuple(out_channels))
            )
        except MinimalityError:
            continue
    raise GenerationError(f"no minimal sub-behavior after {tries} draws")


# ---------------------------------------------------------------------------
# batch cases


@dataclass(frozen=True)
class HarnessConfig:
    q_w_max: int = 2
    q_c_max: int = 2
    n_max: int = 3
    n_ctrl_max: int = 2
    rank_tol: RankTolerance = DEFAULT_RANK_TOL
    residual_tol: float = DEFAULT_RESIDUAL_TOL
    angle_tol: float = DEFAULT_ANGLE_TOL


@dataclass(frozen=True, eq=False)
class Case:
    seed: int
    kind: str
    plant: StateSpaceModel
    wc_partition: Partition
    ref_model: StateSpaceModel
    L: int
    plant_traj: Trajectory
    ref_traj: Trajectory
    bounds: InvariantBounds


@dataclass
class CaseResult:
    seed: int
    kind: str
    implementable_data: bool
    implementable_model: bool
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def build_case(seed: int, kind: str, cfg: HarnessConfig = HarnessConfig()) -> Case:
    """Deterministically build a random test case for the given seed.

    kind "closed_loop" makes the reference implementable by construction;
    "adversarial" draws an unrelated random reference.
    """
    if kind not in ("closed_loop", "adversarial"):
        raise ValueError(f"unknown case kind {kind!r}")
    rng = np.random.default_rng(seed)
    q_w = int(rng.integers(1, cfg.q_w_max + 1))
    q_c = int(rng.integers(1, cfg.q_c_max + 1))
    n_p = int(rng.integers(0, cfg.n_max + 1))
    plant, partition = random_plant(q_w, q_c, n_p, rng)
    if kind == "closed_loop":
        n_ctrl = int(rng.integers(0, cfg.n_ctrl_max + 1))
        ref = feedback_reference_model(plant, partition, n_ctrl, rng)
    else:
        ref = random_reference_model(q_w, int(rng.integers(0, cfg.n_max + 1)), rng)

    lag_bound = max(
        invariants_of(plant).lag,
        invariants_of(ref).lag,
        projected_invariants(plant, partition.picks_w, cfg.rank_tol).lag,
    )
    L = lag_bound + int(rng.integers(1, 3))
    T_plant = gpe_length(plant.m, plant.n, L, plant.q)
    T_ref = gpe_length(ref.m, ref.n, L, ref.q)
    plant_traj = gpe_trajectory(plant, L, T_plant, rng, cfg.rank_tol)
    ref_traj = gpe_trajectory(ref, L, T_ref, rng, cfg.rank_tol)
    bounds = InvariantBounds(
        m_plant=plant.m, n_plant=plant.n, m_ref=ref.m, n_ref=ref.n, lag=lag_bound
    )
    return Case(seed, kind, plant, partition, ref, L, plant_traj, ref_traj, bounds)


def evaluate_case(case: Case, cfg: HarnessConfig = HarnessConfig()) -> CaseResult:
    """Run every cross-check on one case; failures are named for replay."""
    failures: list[str] = []
    bundle = DataBundle(
        case.plant_traj, case.ref_traj, case.L, case.wc_partition, case.bounds
    )
    vd = check_data(bundle, cfg.rank_tol, cfg.residual_tol)
    vm = check_model(
        case.plant, case.wc_partition, case.ref_model, case.L, cfg.rank_tol, cfg.residual_tol
    )
    if not (vd.gpe_plant and vd.gpe_ref):
        failures.append("gpe_flags")
    if vd.implementable != vm.implementable:
        failures.append("data_model_agreement")
    if case.kind == "closed_loop" and not vm.implementable:
        failures.append("model_positive")
    if vd.implementable:
        if max(vd.residual_hidden_in_ref, vd.residual_ref_in_plant) > cfg.residual_tol:
            failures.append("certificate_residuals")
    if vm.implementable and vd.implementable:
        failures.extend(_synthesis_checks(case, cfg))
    return CaseResult(case.seed, case.kind, vd.implementable, vm.implementable, failures)


def _synthesis_checks(case: Case, cfg: HarnessConfig) -> list[str]:
    failures: list[str] = []
    q_w, q_c, L = case.wc_partition.n_w, case.wc_partition.n_c, case.L
    plan = PermutationPlan(q_w, q_c, L)
    arranged = arrange_by_partition(case.plant_traj, case.wc_partition)
    P_p = plant_projector(arranged, L, cfg.rank_tol)
    P_r = reference_lift_projector(case.ref_traj, q_c, L, plan, cfg.rank_tol)
    ctrl = controller_basis(P_r, P_p, plan, cfg.rank_tol)
    ctrl_via_intersection = controller_basis_intersection_route(P_r, P_p, plan, cfg.rank_tol)
    routes_agree, _ = subspaces_equal(
        ctrl.basis, ctrl_via_intersection.basis, cfg.angle_tol
    )
    if not routes_agree:
        failures.append("synthesis_routes_agree")
    P_basis = orthonormal_basis(hankel(arranged, L), cfg.rank_tol)
    R_basis = reference_basis(case.ref_traj, L, cfg.rank_tol)
    verified, _ = verify_closed_loop(
        P_basis, ctrl, R_basis, plan, cfg.rank_tol, cfg.angle_tol
    )
    if not verified:
        failures.append("closed_loop_exact")
    return failures


def run_batch(
    n_cases: int,
    base_seed: int = 0,
    cfg: HarnessConfig = HarnessConfig(),
) -> dict:
    """Alternate implementable/adversarial cases and collect a JSON-able report."""
    if n_cases < 1:
        raise ValueError("need at least one case")
    results = []
    for i in range(n_cases):
        seed = base_seed + i
        kind = "closed_loop" if i % 2 == 0 else "adversarial"
        try:
            case = build_case(seed, kind, cfg)
            results.append(evaluate_case(case, cfg))
        except Exception as exc:  # recorded, not raised: seeds stay replayable
            results.append(
                CaseResult(seed, kind, False, False, [f"exception: {exc}"])
            )
    failures = [
        {"seed": r.seed, "kind": r.kind, "checks": r.failures}
        for r in results
        if not r.passed
    ]
    return {
        "cases": n_cases,
        "passes": sum(1 for r in results if r.passed),
        "failures": failures,
    }
