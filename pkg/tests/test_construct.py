"""Target enumeration, the greedy schedule builder, and its verifier."""

from __future__ import annotations

import dataclasses
import functools
import json

import pytest

from pseudoshift.core import (
    InducingMap,
    PseudoShift,
    PseudoShiftError,
    SupportedVector,
    WeightRule,
)
from pseudoshift.construct import (
    ScheduleCertificate,
    ScheduleFailure,
    build_dhc_vector,
    enumerate_targets,
    verify_schedule,
)
from pseudoshift.criterion import NoWitness
from pseudoshift.jsonio import canonical_dumps


def affine_shift(step: int, lam: float, cutoff: int, name: str) -> PseudoShift:
    return PseudoShift(
        map=InducingMap.translation(step),
        weights=WeightRule.two_level(lam, cutoff),
        name=name,
    )


def worked_pair() -> list[PseudoShift]:
    return [affine_shift(1, 2.0, 0, "T1"), affine_shift(3, 3.0, 0, "T2")]


def vec(pairs: dict[int, float]) -> SupportedVector:
    return SupportedVector(pairs)


# ---------------------------------------------------------------------------
# target enumeration
# ---------------------------------------------------------------------------


class TestEnumerateTargets:
    def test_smallest_request(self):
        assert enumerate_targets(0, 1.0, 2) == [vec({0: 1.0}), vec({0: -1.0})]

    def test_count_zero_is_empty(self):
        assert enumerate_targets(3, 1.0, 0) == []

    def test_radius_one_first_eight(self):
        got = enumerate_targets(1, 1.0, 8)
        assert got == [
            vec({0: 1.0}),
            vec({0: -1.0}),
            vec({-1: 1.0, 0: 1.0, 1: 1.0}),
            vec({-1: 1.0, 0: 1.0, 1: -1.0}),
            vec({-1: 1.0, 0: -1.0, 1: 1.0}),
            vec({-1: 1.0, 0: -1.0, 1: -1.0}),
            vec({-1: -1.0, 0: 1.0, 1: 1.0}),
            vec({-1: -1.0, 0: 1.0, 1: -1.0}),
        ]

    def test_magnitude_cap_grows_with_count(self):
        assert enumerate_targets(0, 1.0, 4) == [
            vec({0: 1.0}),
            vec({0: -1.0}),
            vec({0: 2.0}),
            vec({0: -2.0}),
        ]

    def test_radius_sorts_before_magnitude_within_pool(self):
        # count 12 pushes the magnitude cap to 2, and the wider pool is
        # ordered radius first: every radius-0 vector precedes radius 1
        got = enumerate_targets(1, 1.0, 12)
        assert got[:4] == [
            vec({0: 1.0}),
            vec({0: -1.0}),
            vec({0: 2.0}),
            vec({0: -2.0}),
        ]
        assert got[4] == vec({-1: 1.0, 0: 1.0, 1: 1.0})

    def test_grid_scales_every_coefficient(self):
        got = enumerate_targets(0, 0.5, 4)
        assert got == [
            vec({0: 0.5}),
            vec({0: -0.5}),
            vec({0: 1.0}),
            vec({0: -1.0}),
        ]

    def test_full_support_and_nonzero_coefficients(self):
        for target in enumerate_targets(2, 0.25, 60):
            support = target.support()
            radius = max(abs(j) for j in support)
            assert support == tuple(range(-radius, radius + 1))
            assert all(target.coefficient(j) != 0.0 for j in support)

    def test_deterministic(self):
        assert enumerate_targets(2, 0.3, 25) == enumerate_targets(2, 0.3, 25)

    def test_validation(self):
        with pytest.raises(ValueError):
            enumerate_targets(-1, 1.0, 2)
        with pytest.raises(ValueError):
            enumerate_targets(0, 0.0, 2)
        with pytest.raises(ValueError):
            enumerate_targets(0, 1.0, -2)


# ---------------------------------------------------------------------------
# the builder
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=1)
def two_step_certificate() -> ScheduleCertificate:
    cert = build_dhc_vector(
        worked_pair(),
        [vec({0: 1.0}), vec({0: -1.0})],
        epsilon0=0.1,
        p=2.0,
    )
    assert isinstance(cert, ScheduleCertificate)
    return cert


class TestBuildSchedule:
    def test_two_step_structure(self):
        cert = two_step_certificate()
        assert [step.k for step in cert.steps] == [1, 2]
        assert [step.epsilon for step in cert.steps] == [0.05, 0.025]
        assert cert.steps[0].n < cert.steps[1].n
        assert cert.x == cert.steps[0].z + cert.steps[1].z

    def test_scan_times_match_condition_thresholds(self):
        # hand-checked: the growth and cross-ratio conditions for a shared
        # unit target at tolerance 0.025 first hold at n = 13, and the
        # second step must additionally keep 2^13-level images of z_2 and
        # the collapse of z_1 below 0.025, which postpones it to n = 64
        cert = two_step_certificate()
        assert [step.n for step in cert.steps] == [13, 64]

    def test_visits_hold_against_final_vector(self):
        cert = two_step_certificate()
        for step in cert.steps:
            for i, shift in enumerate(cert.operators):
                measured = (shift.apply_power(cert.x, step.n) - step.target).norm(2)
                assert measured == step.residuals[i]
                assert measured <= 2 * step.epsilon

    def test_correction_norms_stay_within_half_tolerance(self):
        cert = two_step_certificate()
        for step in cert.steps:
            assert step.z.norm(2) < step.epsilon / 2

    def test_empty_targets_give_trivial_certificate(self):
        cert = build_dhc_vector(worked_pair(), [], epsilon0=0.1)
        assert isinstance(cert, ScheduleCertificate)
        assert cert.steps == ()
        assert cert.x == SupportedVector.zero()
        assert verify_schedule(worked_pair(), cert).ok

    def test_probe_failure_reports_step_one(self):
        twins = [affine_shift(1, 2.0, 0, "T1"), affine_shift(1, 2.0, 0, "T2")]
        out = build_dhc_vector(twins, [vec({0: 1.0})], epsilon0=0.1)
        assert isinstance(out, ScheduleFailure)
        assert out.step == 1
        assert "probe" in out.reason
        assert isinstance(out.diagnosis, NoWitness)
        assert out.partial.steps == ()

    def test_window_exhaustion_keeps_partial_certificate(self):
        out = build_dhc_vector(
            worked_pair(),
            [vec({0: 1.0}), vec({0: -1.0})],
            epsilon0=0.1,
            n_max_per_step=13,
        )
        assert isinstance(out, ScheduleFailure)
        assert out.step == 2
        assert isinstance(out.diagnosis, NoWitness)
        assert out.diagnosis.scanned_from == 14
        assert out.diagnosis.scanned_to == 26
        assert len(out.partial.steps) == 1
        assert verify_schedule(worked_pair(), out.partial).ok

    def test_deterministic_certificates(self):
        runs = [
            build_dhc_vector(
                worked_pair(), [vec({0: 1.0}), vec({0: -1.0})], epsilon0=0.1, p=2.0
            )
            for _ in range(2)
        ]
        assert canonical_dumps(runs[0].to_obj()) == canonical_dumps(runs[1].to_obj())

    def test_zero_target_rejected(self):
        with pytest.raises(ValueError):
            build_dhc_vector(worked_pair(), [SupportedVector.zero()], epsilon0=0.1)

    def test_validation(self):
        with pytest.raises(ValueError):
            build_dhc_vector([], [vec({0: 1.0})], epsilon0=0.1)
        with pytest.raises(ValueError):
            build_dhc_vector(worked_pair(), [vec({0: 1.0})], epsilon0=0.0)
        with pytest.raises(ValueError):
            build_dhc_vector(
                worked_pair(), [vec({0: 1.0})], epsilon0=0.1, n_max_per_step=0
            )


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def check_map(report) -> dict[str, bool]:
    return {check.name: check.passed for check in report.checks}


class TestVerifySchedule:
    def test_round_trip_passes(self):
        cert = two_step_certificate()
        report = verify_schedule(worked_pair(), cert)
        assert report.ok
        assert all(check.passed for check in report.checks)

    def test_json_round_trip_verifies(self):
        cert = two_step_certificate()
        doc = json.loads(canonical_dumps(cert.to_obj()))
        restored = ScheduleCertificate.from_obj(doc)
        assert restored.to_obj() == cert.to_obj()
        assert verify_schedule(worked_pair(), restored).ok

    def test_dropped_correction_fails_its_own_visit(self):
        cert = two_step_certificate()
        tampered = dataclasses.replace(cert, x=cert.x - cert.steps[1].z)
        report = verify_schedule(worked_pair(), tampered)
        assert not report.ok
        outcomes = check_map(report)
        assert not outcomes["x equals the sum of corrections"]
        assert not outcomes["visit step 2 operator 1 within tolerance"]
        # the first visit only ever saw a sub-epsilon perturbation from z_2,
        # so removing z_2 leaves it within tolerance
        assert outcomes["visit step 1 operator 1 within tolerance"]
        assert outcomes["visit step 1 operator 2 within tolerance"]

    def test_shuffled_times_fail_monotonicity(self):
        cert = two_step_certificate()
        first, second = cert.steps
        tampered = dataclasses.replace(
            cert,
            steps=(
                dataclasses.replace(first, n=second.n),
                dataclasses.replace(second, n=first.n),
            ),
        )
        report = verify_schedule(worked_pair(), tampered)
        assert not report.ok
        assert not check_map(report)["times increase"]

    def test_operator_mismatch_detected(self):
        cert = two_step_certificate()
        other = [affine_shift(1, 2.5, 0, "T1"), affine_shift(3, 3.0, 0, "T2")]
        report = verify_schedule(other, cert)
        assert not check_map(report)["operators match"]

    def test_tampered_epsilon_detected(self):
        cert = two_step_certificate()
        first, second = cert.steps
        tampered = dataclasses.replace(
            cert, steps=(first, dataclasses.replace(second, epsilon=0.03))
        )
        report = verify_schedule(worked_pair(), tampered)
        assert not check_map(report)["epsilon step 2"]

    def test_foreign_support_detected(self):
        cert = two_step_certificate()
        tampered = dataclasses.replace(cert, x=cert.x + vec({999: 1e-300}))
        report = verify_schedule(worked_pair(), tampered)
        assert not check_map(report)["support inclusion"]

    def test_step_numbering_detected(self):
        cert = two_step_certificate()
        first, second = cert.steps
        tampered = dataclasses.replace(
            cert, steps=(first, dataclasses.replace(second, k=3))
        )
        report = verify_schedule(worked_pair(), tampered)
        assert not check_map(report)["step numbering"]

    def test_residual_arity_mismatch_is_an_error(self):
        cert = two_step_certificate()
        first, second = cert.steps
        broken = dataclasses.replace(
            cert, steps=(first, dataclasses.replace(second, residuals=(0.0,)))
        )
        with pytest.raises(PseudoShiftError):
            verify_schedule(worked_pair(), broken)

    def test_failure_serializes(self):
        twins = [affine_shift(1, 2.0, 0, "T1"), affine_shift(1, 2.0, 0, "T2")]
        out = build_dhc_vector(twins, [vec({0: 1.0})], epsilon0=0.1)
        assert isinstance(out, ScheduleFailure)
        doc = out.to_obj()
        assert doc["step"] == 1
        assert doc["diagnosis"]["failure_counts"]["bound_check"] > 0
        assert doc["partial"]["steps"] == []
        canonical_dumps(doc)
