"""Command-line front end.

Subcommands: `simulate` (model JSON -> trajectory CSV), `check`
(implementability verdict from plant/reference CSVs), `synth` (canonical
controller basis + closed-loop verification), `proptest` (seeded batch of
randomized cross-checks).  JSON goes to stdout, diagnostics to stderr.

Exit codes: 0 success / implementable / verified, 1 definite negative,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import canonical, harness, lti_core, signal
from .errors import HorizonError
from .implementability import DataBundle, InvariantBounds, check_data, reference_basis
from .signal import Partition
from .subspace import RankTolerance, orthonormal_basis


def _parse_picks(value) -> tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return tuple(int(tok) for tok in str(value).split(",") if tok.strip())


def _parse_bound_pair(value) -> tuple[int, int]:
    """One integer applies to both plant and reference; 'a,b' splits them."""
    if isinstance(value, int):
        return value, value
    if isinstance(value, (list, tuple)):
        vals = [int(v) for v in value]
    else:
        vals = [int(tok) for tok in str(value).split(",") if tok.strip()]
    if len(vals) == 1:
        return vals[0], vals[0]
    if len(vals) == 2:
        return vals[0], vals[1]
    raise ValueError(f"expected one or two integers, got {value!r}")


def _opt(args, name: str, default=None, required: bool = False):
    value = getattr(args, name, None)
    if value is None and args.config_data:
        value = args.config_data.get(name)
    if value is None:
        if required:
            raise ValueError(f"missing required option --{name.replace('_', '-')}")
        return default
    return value


def _load_config(args) -> None:
    args.config_data = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        args.config_data = data


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def cmd_simulate(args) -> int:
    model = lti_core.read_model_json(_opt(args, "model", required=True))
    T = int(_opt(args, "T", required=True))
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    seed = int(_opt(args, "seed", default=0))
    out = Path(_opt(args, "out", required=True))
    traj = harness.plant_data(model, T, seed)
    signal.write_csv(out, traj)
    _print_json({"written": str(out), "T": traj.T, "channels": traj.q, "seed": seed})
    return 0


def _bundle_from_args(args) -> tuple[DataBundle, float]:
    plant = signal.read_csv(_opt(args, "plant", required=True))
    ref = signal.read_csv(_opt(args, "ref", required=True))
    picks_w = _parse_picks(_opt(args, "picks_w", required=True))
    picks_c = _parse_picks(_opt(args, "picks_c", required=True))
    partition = Partition(plant.q, picks_w, picks_c)
    L = int(_opt(args, "L", required=True))
    lag_bound = int(_opt(args, "lag_bound", required=True))
    m_plant, m_ref = _parse_bound_pair(_opt(args, "m_bound", required=True))
    n_plant, n_ref = _parse_bound_pair(_opt(args, "n_bound", required=True))
    bounds = InvariantBounds(m_plant, n_plant, m_ref, n_ref, lag_bound)
    residual_tol = float(_opt(args, "tol", default=1e-8))
    return DataBundle(plant, ref, L, partition, bounds), residual_tol


def cmd_check(args) -> int:
    bundle, residual_tol = _bundle_from_args(args)
    verdict = check_data(bundle, RankTolerance(), residual_tol)
    print(verdict.to_json())
    return 0 if verdict.implementable else 1


def cmd_synth(args) -> int:
    bundle, residual_tol = _bundle_from_args(args)
    out = Path(_opt(args, "out", required=True))
    rank_tol = RankTolerance()
    verdict = check_data(bundle, rank_tol, residual_tol)

    q_w, q_c, L = bundle.partition.n_w, bundle.partition.n_c, bundle.L
    plan = canonical.PermutationPlan(q_w, q_c, L)
    arranged = signal.arrange_by_partition(bundle.plant_traj, bundle.partition)
    P_p = canonical.plant_projector(arranged, L, rank_tol)
    P_r = canonical.reference_lift_projector(bundle.ref_traj, q_c, L, plan, rank_tol)
    ctrl = canonical.controller_basis(P_r, P_p, plan, rank_tol)
    canonical.write_controller_csv(out, ctrl)

    P_basis = orthonormal_basis(signal.hankel(arranged, L), rank_tol)
    R_basis = reference_basis(bundle.ref_traj, L, rank_tol)
    verified, report = canonical.verify_closed_loop(
        P_basis, ctrl, R_basis, plan, rank_tol, residual_tol
    )
    _print_json(
        {
            "verdict": verdict.to_dict(),
            "controller": {"written": str(out), "rank": ctrl.dim, "k": q_c, "L": L},
            "closed_loop": report.to_dict(),
        }
    )
    return 0 if verified else 1


def cmd_proptest(args) -> int:
    seeds = int(_opt(args, "seeds", required=True))
    if seeds < 1:
        raise ValueError(f"need at least one seed, got {seeds}")
    base_seed = int(_opt(args, "seed", default=0))
    cfg = harness.HarnessConfig(
        q_w_max=int(_opt(args, "q_w_max", default=2)),
        q_c_max=int(_opt(args, "q_c_max", default=2)),
        n_max=int(_opt(args, "n_max", default=3)),
        rank_tol=RankTolerance(float(_opt(args, "tol", default=1e-10))),
    )
    report = harness.run_batch(seeds, base_seed, cfg)
    report["base_seed"] = base_seed
    _print_json(report)
    return 0 if not report["failures"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="canonctrl",
        description="Data-driven implementability checks and canonical controller synthesis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file of option defaults (flags win)")

    p_sim = sub.add_parser("simulate", help="simulate a model JSON to a trajectory CSV")
    p_sim.add_argument("--model", help="model JSON path")
    p_sim.add_argument("--T", type=int, help="trajectory length")
    p_sim.add_argument("--seed", type=int, help="seed for input and initial state")
    p_sim.add_argument("--out", help="output CSV path")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    def add_check_args(p):
        p.add_argument("--plant", help="plant trajectory CSV")
        p.add_argument("--ref", help="reference trajectory CSV")
        p.add_argument("--picks-w", dest="picks_w", help="1-based to-be-controlled channels, e.g. 1,2")
        p.add_argument("--picks-c", dest="picks_c", help="1-based control channels, e.g. 3")
        p.add_argument("--L", type=int, help="horizon")
        p.add_argument("--lag-bound", dest="lag_bound", type=int, help="bound on the largest lag")
        p.add_argument("--m-bound", dest="m_bound", help="input-count bound(s): 'm' or 'm_plant,m_ref'")
        p.add_argument("--n-bound", dest="n_bound", help="order bound(s): 'n' or 'n_plant,n_ref'")
        p.add_argument("--tol", type=float, help="inclusion residual tolerance (default 1e-8)")
        add_common(p)

    p_check = sub.add_parser("check", help="data-driven implementability verdict")
    add_check_args(p_check)
    p_check.set_defaults(func=cmd_check)

    p_synth = sub.add_parser("synth", help="synthesize and verify the canonical controller")
    add_check_args(p_synth)
    p_synth.add_argument("--out", help="controller basis CSV path (JSON sidecar alongside)")
    p_synth.set_defaults(func=cmd_synth)

    p_prop = sub.add_parser("proptest", help="seeded batch of randomized cross-checks")
    p_prop.add_argument("--seeds", type=int, help="number of cases")
    p_prop.add_argument("--seed", type=int, help="base seed (cases use base..base+seeds-1)")
    p_prop.add_argument("--q-w-max", dest="q_w_max", type=int, help="max to-be-controlled channels")
    p_prop.add_argument("--q-c-max", dest="q_c_max", type=int, help="max control channels")
    p_prop.add_argument("--n-max", dest="n_max", type=int, help="max plant order")
    p_prop.add_argument("--tol", type=float, help="rank tolerance override (default 1e-10)")
    add_common(p_prop)
    p_prop.set_defaults(func=cmd_proptest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _load_config(args)
        return args.func(args)
    except HorizonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
