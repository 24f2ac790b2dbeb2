import json

import numpy as np
import pytest

from canonctrl import harness
from canonctrl.errors import DimensionError, HorizonError, PartitionError
from canonctrl.implementability import (
    DataBundle,
    InvariantBounds,
    check_data,
    check_model,
    hidden_basis,
    reference_basis,
    uncontrolled_basis,
)
from canonctrl.lti_core import free_model, invariants_of
from canonctrl.signal import Partition, Trajectory, hankel, select_channels
from canonctrl.subspace import orthonormal_basis, subspaces_equal


@pytest.fixture
def static_case():
    plant, partition = harness.static_plant()
    return plant, partition, harness.plant_data(plant, 40, seed=7)


@pytest.fixture
def integrator_case():
    plant, partition = harness.integrator_plant()
    return plant, partition, harness.plant_data(plant, 40, seed=7)


@pytest.fixture
def decay_ref():
    return harness.decaying_reference(), harness.decaying_reference_data(40)


class TestHiddenBasis:
    def test_static_plant_hidden_is_zero(self, static_case):
        _, partition, data = static_case
        assert hidden_basis(data, partition, 2).dim == 0

    def test_integrator_hidden_is_constants(self, integrator_case):
        _, partition, data = integrator_case
        N = hidden_basis(data, partition, 2)
        ok, angle = subspaces_equal(N, orthonormal_basis(np.array([[1.0], [1.0]])))
        assert ok, angle

    def test_zero_control_data_degenerates_to_full_hankel(self):
        # c identically zero: the annihilator is the identity
        rng = np.random.default_rng(0)
        w = rng.standard_normal((20, 1))
        data = Trajectory(np.column_stack([w, np.zeros(20)]))
        partition = Partition(2, (1,), (2,))
        N = hidden_basis(data, partition, 3)
        H = orthonormal_basis(hankel(select_channels(data, (1,)), 3))
        assert subspaces_equal(N, H)[0]

    def test_partition_required(self, static_case):
        _, _, data = static_case
        with pytest.raises(PartitionError):
            hidden_basis(data, Partition(2, (), (1, 2)), 2)


class TestReferenceBasis:
    def test_impulse_reference(self):
        # next r = 0: only the first window has a nonzero leading entry
        r = Trajectory(np.concatenate([[1.0], np.zeros(19)]).reshape(-1, 1))
        R = reference_basis(r, 2)
        assert subspaces_equal(R, orthonormal_basis(np.array([[1.0], [0.0]])))[0]

    def test_decaying_reference_is_one_dimensional(self, decay_ref):
        _, data = decay_ref
        R = reference_basis(data, 2)
        assert R.dim == 1
        assert subspaces_equal(R, orthonormal_basis(np.array([[1.0], [0.5]])))[0]

    def test_zero_reference(self):
        assert reference_basis(Trajectory(np.zeros((10, 1))), 2).dim == 0


class TestUncontrolledBasis:
    def test_static_plant_spans_everything(self, static_case):
        _, partition, data = static_case
        assert uncontrolled_basis(data, partition, 3).dim == 3

    def test_integrator_spans_everything_at_depth_two(self, integrator_case):
        _, partition, data = integrator_case
        assert uncontrolled_basis(data, partition, 2).dim == 2

    def test_zero_w_data(self):
        data = Trajectory(np.column_stack([np.zeros(15), np.ones(15)]))
        assert uncontrolled_basis(data, Partition(2, (1,), (2,)), 2).dim == 0


class TestCheckData:
    def test_static_plant_decaying_reference_implementable(self, static_case, decay_ref):
        _, partition, data = static_case
        _, ref_data = decay_ref
        bundle = DataBundle(data, ref_data, 2, partition, InvariantBounds(1, 0, 0, 1, 0))
        verdict = check_data(bundle)
        assert verdict.implementable
        assert verdict.phi is not None and verdict.psi is not None
        assert verdict.residual_hidden_in_ref < 1e-10
        assert verdict.residual_ref_in_plant < 1e-10

    def test_integrator_decaying_reference_not_implementable(
        self, integrator_case, decay_ref
    ):
        _, partition, data = integrator_case
        _, ref_data = decay_ref
        bundle = DataBundle(data, ref_data, 2, partition, InvariantBounds(1, 1, 0, 1, 1))
        verdict = check_data(bundle)
        assert not verdict.implementable
        assert verdict.phi is None
        assert verdict.residual_hidden_in_ref > 0.1

    def test_reference_equal_to_own_w_data(self, integrator_case):
        plant, partition, data = integrator_case
        w = select_channels(data, partition.picks_w)
        proj_inv = invariants_of(plant)
        bundle = DataBundle(
            data, w, 2, partition, InvariantBounds(1, 1, 1, 0, 1)
        )
        verdict = check_data(bundle)
        assert verdict.implementable

    def test_missing_bounds_refused(self, static_case, decay_ref):
        _, partition, data = static_case
        _, ref_data = decay_ref
        with pytest.raises(ValueError, match="bounds"):
            check_data(DataBundle(data, ref_data, 2, partition, None))

    def test_horizon_error(self, integrator_case, decay_ref):
        _, partition, data = integrator_case
        _, ref_data = decay_ref
        bundle = DataBundle(data, ref_data, 1, partition, InvariantBounds(1, 1, 0, 1, 1))
        with pytest.raises(HorizonError):
            check_data(bundle)

    def test_failed_excitation_blocks_positive(self):
        # constant control input: plant data is not exciting at depth 2, and
        # the verdict must refuse to certify even though the inclusions hold
        plant, partition = harness.static_plant()
        c = np.ones(30)
        data = Trajectory(np.column_stack([c, c]))
        ref = Trajectory(np.ones((30, 1)))
        bundle = DataBundle(data, ref, 2, partition, InvariantBounds(1, 0, 0, 1, 0))
        verdict = check_data(bundle)
        assert not verdict.gpe_plant
        assert not verdict.implementable
        assert verdict.residual_hidden_in_ref < 1e-10
        assert verdict.residual_ref_in_plant < 1e-10


class TestCheckModel:
    def test_reference_equals_hidden_behavior(self):
        # controller clamping c to zero leaves the constant trajectories
        plant, partition = harness.integrator_plant()
        constants = harness.decaying_reference(rate=1.0)
        verdict = check_model(plant, partition, constants, 2)
        assert verdict.implementable

    def test_reference_equals_uncontrolled_behavior(self):
        plant, partition = harness.integrator_plant()
        verdict = check_model(plant, partition, free_model(1), 2)
        assert verdict.implementable

    def test_static_decay_implementable(self, decay_ref):
        plant, partition = harness.static_plant()
        ref, _ = decay_ref
        assert check_model(plant, partition, ref, 2).implementable

    def test_integrator_decay_not_implementable(self, decay_ref):
        plant, partition = harness.integrator_plant()
        ref, _ = decay_ref
        verdict = check_model(plant, partition, ref, 2)
        assert not verdict.implementable
        assert verdict.residual_hidden_in_ref > 0.1

    def test_closed_loop_references_always_implementable(self):
        for seed in range(25):
            rng = np.random.default_rng(seed)
            plant, partition = harness.random_plant(2, 2, 2, rng)
            ref = harness.feedback_reference_model(plant, partition, 1, rng)
            lag = max(
                invariants_of(plant).lag,
                invariants_of(ref).lag,
            )
            verdict = check_model(plant, partition, ref, lag + 2)
            assert verdict.implementable, f"seed {seed}"

    def test_horizon_error(self):
        plant, partition = harness.integrator_plant()
        with pytest.raises(HorizonError):
            check_model(plant, partition, harness.decaying_reference(), 1)

    def test_channel_mismatch(self):
        plant, partition = harness.integrator_plant()
        with pytest.raises(DimensionError):
            check_model(plant, partition, free_model(2), 3)


class TestVerdictSerialization:
    def test_json_schema(self, static_case, decay_ref):
        _, partition, data = static_case
        _, ref_data = decay_ref
        bundle = DataBundle(data, ref_data, 2, partition, InvariantBounds(1, 0, 0, 1, 0))
        payload = json.loads(check_data(bundle).to_json())
        assert payload["implementable"] is True
        assert set(payload["residuals"]) == {"hidden_in_ref", "ref_in_plant"}
        assert set(payload["gpe"]) == {"plant", "ref"}
        assert set(payload["ranks"]) == {"N", "R", "Pw"}


class TestBundleValidation:
    def test_channel_counts(self, static_case, decay_ref):
        _, partition, data = static_case
        _, ref_data = decay_ref
        with pytest.raises(DimensionError):
            DataBundle(ref_data, ref_data, 2, partition, None)
        with pytest.raises(DimensionError):
            DataBundle(data, data, 2, partition, None)

    def test_horizon_inside_data(self, static_case, decay_ref):
        _, partition, data = static_case
        _, ref_data = decay_ref
        with pytest.raises(ValueError):
            DataBundle(data, ref_data, 99, partition, None)


class TestConsistencyProperties:
    def test_data_and_model_agree(self):
        for seed in range(16):
            kind = "closed_loop" if seed % 2 == 0 else "adversarial"
            case = harness.build_case(seed + 300, kind)
            result = harness.evaluate_case(case)
            assert result.passed, f"seed {seed + 300}: {result.failures}"

    def test_monotone_in_horizon(self):
        # implementable at L+1 implies implementable at L
        checked = 0
        for seed in range(10):
            case = harness.build_case(seed + 900, "closed_loop")
            L = case.L
            if min(case.plant_traj.T, case.ref_traj.T) < L + 1:
                continue
            bundle_hi = DataBundle(
                case.plant_traj, case.ref_traj, L + 1, case.wc_partition, case.bounds
            )
            if not check_data(bundle_hi).implementable:
                continue
            bundle_lo = DataBundle(
                case.plant_traj, case.ref_traj, L, case.wc_partition, case.bounds
            )
            assert check_data(bundle_lo).implementable
            checked += 1
        assert checked >= 5

    def test_model_verdict_stable_across_horizons(self):
        for seed in range(8):
            kind = "closed_loop" if seed % 2 == 0 else "adversarial"
            case = harness.build_case(seed + 1200, kind)
            v1 = check_model(case.plant, case.wc_partition, case.ref_model, case.L)
            v2 = check_model(case.plant, case.wc_partition, case.ref_model, case.L + 1)
            assert v1.implementable == v2.implementable
