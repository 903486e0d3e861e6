"""Witness search, correction bounds, and certificate verification."""

from __future__ import annotations

import json
import math
import random
from fractions import Fraction

import pytest

from pseudoshift.core import (
    InducingMap,
    PseudoShift,
    SupportedVector,
    WeightRule,
)
from pseudoshift.criterion import (
    IndexSets,
    NoWitness,
    TargetFamily,
    WitnessCertificate,
    build_correction,
    correction_bounds,
    find_witness,
    max_cross_ratio,
    verify_certificate,
)
from pseudoshift.jsonio import canonical_dumps


def affine_shift(step: int, lam: float, cutoff: int, name: str = "T") -> PseudoShift:
    return PseudoShift(
        map=InducingMap.translation(step),
        weights=WeightRule.two_level(lam, cutoff),
        name=name,
    )


def worked_pair() -> list[PseudoShift]:
    return [affine_shift(1, 2.0, 0, "T1"), affine_shift(3, 3.0, 0, "T2")]


def unit_targets(n_operators: int) -> TargetFamily:
    return TargetFamily.from_rows([[1.0]] * n_operators, M=0)


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------


class TestTargetFamily:
    def test_zero_coefficient_is_perturbed_and_recorded(self):
        fam = TargetFamily.from_rows([[2.0, 0.0, 1.0], [1.0, 1.0, 1.0]], M=1)
        delta = 1e-8 * 2.0
        assert fam.coefficient(0, 0) == delta
        assert fam.perturbations == ((0, 0, delta),)

    def test_all_zero_family_rejected(self):
        with pytest.raises(ValueError):
            TargetFamily.from_rows([[0.0], [0.0]], M=0)

    def test_direct_constructor_rejects_zero(self):
        with pytest.raises(ValueError):
            TargetFamily(M=0, coefficients=((0.0,), (1.0,)))

    def test_row_width_must_match_window(self):
        with pytest.raises(ValueError):
            TargetFamily(M=1, coefficients=((1.0, 2.0),))

    def test_shared_target_defaults_to_support_radius(self):
        fam = TargetFamily.shared(SupportedVector({-2: 1.0, 1: 3.0}), 2)
        assert fam.M == 2
        assert fam.N == 2
        assert fam.coefficient(0, 1) == 3.0
        assert fam.coefficient(1, -2) == 1.0
        # gaps inside the window got the perturbation
        assert fam.coefficient(0, 0) == 1e-8 * 3.0

    def test_gamma_is_largest_target_norm(self):
        fam = TargetFamily(M=1, coefficients=((3.0, 4.0, 12.0), (1.0, 1.0, 1.0)))
        assert fam.gamma(1) == 19.0
        assert fam.gamma(2) == 13.0

    def test_obj_roundtrip(self):
        fam = TargetFamily.from_rows([[1.0, -2.5, 0.5]], M=1)
        again = TargetFamily.from_obj(fam.to_obj())
        assert again == fam


# ---------------------------------------------------------------------------
# index sets
# ---------------------------------------------------------------------------


class TestIndexSets:
    def test_disjoint_blocks_worked_instance(self):
        sets = IndexSets.compute(worked_pair(), n=5, M=0)
        assert sets.overlap[(0, 1)] == ()
        assert sets.overlap[(1, 0)] == ()
        assert sets.cross[(0, 1)] == (5,)
        assert sets.cross[(1, 0)] == (15,)
        assert sets.preimage(0, 5) == 0
        assert sets.preimage(1, 15) == 0

    def test_overlapping_windows(self):
        shifts = [affine_shift(1, 2.0, 0), affine_shift(3, 3.0, 0)]
        sets = IndexSets.compute(shifts, n=1, M=1)
        # windows are {0,1,2} and {2,3,4}
        assert sets.overlap[(0, 1)] == (2,)
        assert sets.cross[(0, 1)] == (0, 1)
        assert sets.overlap[(1, 0)] == (2,)
        assert sets.cross[(1, 0)] == (3, 4)
        assert sets.preimage(0, 2) == 1
        assert sets.preimage(1, 2) == -1

    def test_requires_positive_time(self):
        with pytest.raises(ValueError):
            IndexSets.compute(worked_pair(), n=0, M=0)


# ---------------------------------------------------------------------------
# correction vector
# ---------------------------------------------------------------------------


class TestBuildCorrection:
    def test_worked_instance_coefficients(self):
        z = build_correction(worked_pair(), unit_targets(2), p=1, n=5)
        assert z.support() == (5, 15)
        assert z.coefficient(5) == pytest.approx(1 / 32, rel=1e-12)
        assert z.coefficient(15) == pytest.approx(1 / 243, rel=1e-12)

    def test_worked_instance_residuals(self):
        shifts = worked_pair()
        targets = unit_targets(2)
        z = build_correction(shifts, targets, p=1, n=5)

        image1 = shifts[0].apply_power(z, 5)
        res1 = image1 - targets.target_vector(0)
        assert res1.support() == (10,)
        assert res1.coefficient(10) == pytest.approx(32 / 243, rel=1e-12)

        image2 = shifts[1].apply_power(z, 5)
        res2 = image2 - targets.target_vector(1)
        assert res2.support() == (-10,)
        assert res2.coefficient(-10) == pytest.approx(1 / 96, rel=1e-12)

    def test_colliding_blocks_are_summed(self):
        # same inducing map, different weights: both blocks land on e_3
        shifts = [affine_shift(1, 2.0, 0), affine_shift(1, 3.0, 0)]
        z = build_correction(shifts, unit_targets(2), p=1, n=3)
        assert z.support() == (3,)
        assert z.coefficient(3) == pytest.approx(1 / 8 + 1 / 27, rel=1e-12)

    def test_own_block_reproduces_target_exactly(self):
        shifts = [affine_shift(2, -1.5, 1)]
        targets = TargetFamily.from_rows([[0.5, -2.0, 3.0]], M=1)
        z = build_correction(shifts, targets, p=2, n=7)
        image = shifts[0].apply_power(z, 7)
        diff = image - targets.target_vector(0)
        assert diff.norm(2) < 1e-12 * targets.gamma(2)

    def test_rejects_time_below_one(self):
        with pytest.raises(ValueError):
            build_correction(worked_pair(), unit_targets(2), p=1, n=0)

    def test_rejects_arity_mismatch(self):
        with pytest.raises(ValueError):
            build_correction(worked_pair(), unit_targets(3), p=1, n=5)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


class TestCorrectionBounds:
    def test_worked_instance_bounds(self):
        bounds = correction_bounds(worked_pair(), unit_targets(2), p=1, n=5)
        assert bounds.z_bound == pytest.approx(1 / 16, rel=1e-12)
        assert bounds.residual_bounds[0] == pytest.approx(64 / 243, rel=1e-12)
        assert bounds.residual_bounds[1] == pytest.approx(1 / 48, rel=1e-12)

    def test_worked_instance_bounds_cover_measurements(self):
        shifts = worked_pair()
        targets = unit_targets(2)
        z = build_correction(shifts, targets, p=1, n=5)
        bounds = correction_bounds(shifts, targets, p=1, n=5)
        assert z.norm(1) <= bounds.z_bound
        for i, shift in enumerate(shifts):
            residual = (shift.apply_power(z, 5) - targets.target_vector(i)).norm(1)
            assert residual <= bounds.residual_bounds[i] * (1 + 1e-12)

    def test_identical_operators_break_the_bound(self):
        # Summing colliding blocks doubles the coefficient, so the image is
        # 2x instead of x: the measured residual is ||x|| while the bound,
        # whose overlap gap is |1 - 1| = 0, collapses to zero.  The witness
        # scan compensates by measuring residuals before accepting a time.
        shifts = [affine_shift(1, 2.0, 0), affine_shift(1, 2.0, 0)]
        targets = unit_targets(2)
        z = build_correction(shifts, targets, p=1, n=5)
        assert z.support() == (5,)
        assert z.coefficient(5) == pytest.approx(2 / 32, rel=1e-12)
        bounds = correction_bounds(shifts, targets, p=1, n=5)
        assert bounds.residual_bounds == (0.0, 0.0)
        residual = (shifts[0].apply_power(z, 5) - targets.target_vector(0)).norm(1)
        assert residual == pytest.approx(1.0, rel=1e-12)

    def test_huge_weights_give_tiny_z_bound(self):
        shifts = [affine_shift(1, 10.0, 0), affine_shift(3, 10.0, 0)]
        bounds = correction_bounds(shifts, unit_targets(2), p=2, n=20)
        assert bounds.z_bound == pytest.approx(2e-20, rel=1e-9)
        z = build_correction(shifts, unit_targets(2), p=2, n=20)
        assert z.norm(2) == pytest.approx(math.sqrt(2) * 1e-20, rel=1e-9)

    def test_max_cross_ratio_worked_instance(self):
        shifts = worked_pair()
        assert max_cross_ratio(shifts, 0, 1, 5, 0) == pytest.approx(1 / 96, rel=1e-12)
        assert max_cross_ratio(shifts, 1, 0, 5, 0) == pytest.approx(32 / 243, rel=1e-12)

    def test_max_cross_ratio_empty_set_is_zero(self):
        shifts = [affine_shift(1, 2.0, 0), affine_shift(1, 3.0, 0)]
        assert max_cross_ratio(shifts, 0, 1, 4, 0) == 0.0


# ---------------------------------------------------------------------------
# witness scan
# ---------------------------------------------------------------------------


def fraction_scan_oracle(n_max: int) -> int | None:
    """Exact-arithmetic replica of the scan for the worked pair.

    Operators: step 1 with level 2 and step 3 with level 3, both cutoff 0;
    target e_0 for both, p = 1, epsilon = 1/20.  Overlaps are empty for
    every n >= 1, so only growth and the two cross ratios matter.
    """
    eps = Fraction(1, 20)
    prefactor = 2
    for n in range(1, n_max + 1):
        w1 = Fraction(2) ** n
        w2 = Fraction(3) ** n
        growth = w1 > prefactor / eps and w2 > prefactor / eps
        above = sum(1 for v in range(1, n + 1) if -2 * n + 3 * v > 0)
        cross_into_2 = Fraction(3) ** (2 * above - n) / w1 < eps / (2 * prefactor)
        cross_into_1 = Fraction(2) ** n / w2 < eps / (2 * prefactor)
        if growth and cross_into_2 and cross_into_1:
            return n
    return None


class TestFindWitness:
    def test_worked_instance_matches_fraction_oracle(self):
        oracle_n = fraction_scan_oracle(50)
        assert oracle_n == 11
        cert = find_witness(worked_pair(), unit_targets(2), p=1, epsilon=0.05)
        assert isinstance(cert, WitnessCertificate)
        assert cert.n == oracle_n
        assert max(cert.residuals) < 0.05
        assert cert.z.norm(1) < 0.05
        for residual, bound in zip(cert.residuals, cert.bounds[1:]):
            assert residual <= bound * (1 + 1e-9)

    def test_huge_epsilon_accepts_time_one(self):
        cert = find_witness(worked_pair(), unit_targets(2), p=1, epsilon=1e6)
        assert isinstance(cert, WitnessCertificate)
        assert cert.n == 1

    def test_success_is_monotone_in_epsilon(self):
        shifts = worked_pair()
        targets = unit_targets(2)
        tight = find_witness(shifts, targets, p=2, epsilon=0.02)
        loose = find_witness(shifts, targets, p=2, epsilon=0.1)
        assert isinstance(tight, WitnessCertificate)
        assert isinstance(loose, WitnessCertificate)
        assert loose.n <= tight.n

    def test_search_respects_lower_cutoff(self):
        cert = find_witness(worked_pair(), unit_targets(2), p=1, epsilon=0.05, K=20)
        assert isinstance(cert, WitnessCertificate)
        assert cert.n == 20

    def test_single_operator_needs_growth_only(self):
        cert = find_witness([affine_shift(1, 2.0, 0)], unit_targets(1), p=1, epsilon=0.01)
        assert isinstance(cert, WitnessCertificate)
        # needs 2^n > (2M+1) N Gamma / eps = 100
        assert cert.n == 7
        assert cert.bounds[1] == 0.0
        assert cert.residuals[0] <= 1e-10

    def test_skewed_targets_on_identical_operators_fail_ratio_gap(self):
        shifts = [affine_shift(1, 2.0, 0), affine_shift(1, 2.0, 0)]
        targets = TargetFamily.from_rows([[1.0], [2.0]], M=0)
        out = find_witness(shifts, targets, p=1, epsilon=0.05, K=1, n_max=40)
        assert isinstance(out, NoWitness)
        assert out.failure_counts["ratio_gap"] == 40

    def test_equal_targets_on_identical_operators_fail_bound_check(self):
        # ratio conditions all pass (everything cancels) but the measured
        # residual is ||x|| = 1, so the soundness gate must reject every time
        shifts = [affine_shift(1, 2.0, 0), affine_shift(1, 2.0, 0)]
        out = find_witness(shifts, unit_targets(2), p=1, epsilon=0.1, K=1, n_max=30)
        assert isinstance(out, NoWitness)
        # growth needs 2^n > 20, so times 5..30 reach the soundness gate
        assert out.failure_counts["growth"] == 4
        assert out.failure_counts["ratio_gap"] == 0
        assert out.failure_counts["bound_check"] == 26

    def test_collapsing_y_vector_is_accepted(self):
        y = SupportedVector.basis(-1)
        cert = find_witness(
            worked_pair(), unit_targets(2), p=1, epsilon=0.05, y_vectors=[y]
        )
        assert isinstance(cert, WitnessCertificate)
        assert cert.n == 11
        row = cert.collapse_residuals[0]
        assert row[0] == pytest.approx(0.5 ** 11, rel=1e-12)
        assert row[1] == pytest.approx(3.0 ** -11, rel=1e-12)

    def test_growing_y_vector_blocks_every_time(self):
        y = SupportedVector.basis(5)
        out = find_witness(
            worked_pair(), unit_targets(2), p=1, epsilon=0.05,
            n_max=8, y_vectors=[y],
        )
        assert isinstance(out, NoWitness)
        assert out.failure_counts["collapse"] == 8

    def test_z_budget_postpones_the_witness(self):
        shifts = worked_pair()
        targets = unit_targets(2)
        plain = find_witness(shifts, targets, p=1, epsilon=0.05)
        assert isinstance(plain, WitnessCertificate)
        # demand log||z|| < log(2^-30): the slow operator dominates, so the
        # budget forces roughly 2^-n + 3^-n < 2^-30
        capped = find_witness(
            shifts, targets, p=1, epsilon=0.05, z_budget_log=-30 * math.log(2)
        )
        assert isinstance(capped, WitnessCertificate)
        assert capped.n > plain.n
        assert capped.z.norm(1) < 2.0 ** -30

    def test_unreachable_z_budget_is_tallied(self):
        out = find_witness(
            worked_pair(), unit_targets(2), p=1, epsilon=0.05,
            n_max=20, z_budget_log=-1e9,
        )
        assert isinstance(out, NoWitness)
        assert out.failure_counts["z_budget"] == 20

    def test_protected_times_postpone_the_witness(self):
        shifts = worked_pair()
        targets = unit_targets(2)
        plain = find_witness(shifts, targets, p=2, epsilon=0.05)
        assert isinstance(plain, WitnessCertificate)
        # the image under T_1^5 is about 2^(5-n), so a 2^-30 cap needs a
        # much later time than the unprotected scan
        guarded = find_witness(
            shifts, targets, p=2, epsilon=0.05,
            n_max=200, protected_times=[(5, 2.0 ** -30)],
        )
        assert isinstance(guarded, WitnessCertificate)
        assert guarded.n > plain.n
        for shift in shifts:
            assert shift.apply_power(guarded.z, 5).norm(2) < 2.0 ** -30

    def test_unreachable_protection_is_tallied(self):
        # the protected image is about 2^(5-n), still above the cap at n = 30
        out = find_witness(
            worked_pair(), unit_targets(2), p=2, epsilon=0.05,
            n_max=30, protected_times=[(5, 2.0 ** -30)],
        )
        assert isinstance(out, NoWitness)
        assert out.failure_counts["visit_budget"] == 30

    def test_invalid_protected_times_are_errors(self):
        with pytest.raises(ValueError):
            find_witness(
                worked_pair(), unit_targets(2), p=2, epsilon=0.1,
                protected_times=[(0, 0.5)],
            )
        with pytest.raises(ValueError):
            find_witness(
                worked_pair(), unit_targets(2), p=2, epsilon=0.1,
                protected_times=[(3, 0.0)],
            )

    def test_invalid_epsilon_is_an_error(self):
        with pytest.raises(ValueError):
            find_witness(worked_pair(), unit_targets(2), p=1, epsilon=0.0)
        with pytest.raises(ValueError):
            find_witness(worked_pair(), unit_targets(2), p=1, epsilon=-1.0)

    def test_invalid_window_is_an_error(self):
        with pytest.raises(ValueError):
            find_witness(worked_pair(), unit_targets(2), p=1, epsilon=0.1, K=0)
        with pytest.raises(ValueError):
            find_witness(worked_pair(), unit_targets(2), p=1, epsilon=0.1, K=5, n_max=4)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def worked_certificate() -> WitnessCertificate:
    cert = find_witness(worked_pair(), unit_targets(2), p=1, epsilon=0.05)
    assert isinstance(cert, WitnessCertificate)
    return cert


class TestVerifyCertificate:
    def test_clean_certificate_passes(self):
        cert = worked_certificate()
        report = verify_certificate(worked_pair(), unit_targets(2), cert, p=1)
        assert report.ok
        assert all(c.passed for c in report.checks)

    def test_corrupted_z_coefficient_is_caught(self):
        cert = worked_certificate()
        pairs = dict(cert.z.items())
        first = min(pairs)
        pairs[first] *= 2.0
        tampered = WitnessCertificate(
            n=cert.n, z=SupportedVector(pairs), residuals=cert.residuals,
            bounds=cert.bounds, epsilon=cert.epsilon, K=cert.K, M=cert.M,
        )
        report = verify_certificate(worked_pair(), unit_targets(2), tampered, p=1)
        assert not report.ok
        failed = {c.name for c in report.checks if not c.passed}
        assert "z coefficients" in failed
        assert any(name.startswith("residual") for name in failed)

    def test_decremented_time_diverges(self):
        cert = worked_certificate()
        tampered = WitnessCertificate(
            n=cert.n - 1, z=cert.z, residuals=cert.residuals,
            bounds=cert.bounds, epsilon=cert.epsilon, K=cert.K, M=cert.M,
        )
        report = verify_certificate(worked_pair(), unit_targets(2), tampered, p=1)
        assert not report.ok
        failed = {c.name for c in report.checks if not c.passed}
        assert "z coefficients" in failed

    def test_lowered_epsilon_fails_the_epsilon_checks(self):
        cert = worked_certificate()
        tampered = WitnessCertificate(
            n=cert.n, z=cert.z, residuals=cert.residuals, bounds=cert.bounds,
            epsilon=max(cert.residuals) / 2, K=cert.K, M=cert.M,
        )
        report = verify_certificate(worked_pair(), unit_targets(2), tampered, p=1)
        assert not report.ok
        failed = {c.name for c in report.checks if not c.passed}
        assert any("below epsilon" in name for name in failed)

    def test_inflated_bound_is_caught(self):
        cert = worked_certificate()
        bounds = list(cert.bounds)
        bounds[1] *= 10.0
        tampered = WitnessCertificate(
            n=cert.n, z=cert.z, residuals=cert.residuals, bounds=tuple(bounds),
            epsilon=cert.epsilon, K=cert.K, M=cert.M,
        )
        report = verify_certificate(worked_pair(), unit_targets(2), tampered, p=1)
        assert not report.ok
        failed = {c.name for c in report.checks if not c.passed}
        assert "bound residual 1" in failed

    def test_collapse_rows_are_recomputed_when_y_given(self):
        y = SupportedVector.basis(-1)
        cert = find_witness(
            worked_pair(), unit_targets(2), p=1, epsilon=0.05, y_vectors=[y]
        )
        assert isinstance(cert, WitnessCertificate)
        report = verify_certificate(
            worked_pair(), unit_targets(2), cert, p=1, y_vectors=[y]
        )
        assert report.ok
        names = {c.name for c in report.checks}
        assert "collapse y1 under operator 1" in names

    def test_certificate_json_roundtrip(self):
        cert = worked_certificate()
        text = canonical_dumps(cert.to_obj())
        again = WitnessCertificate.from_obj(json.loads(text))
        assert again == cert


# ---------------------------------------------------------------------------
# randomized soundness
# ---------------------------------------------------------------------------


def random_affine_family(rng: random.Random):
    n_ops = rng.choice([2, 2, 3])
    steps = []
    step = rng.randint(1, 2)
    for _ in range(n_ops):
        steps.append(step)
        step = 2 * step + rng.randint(1, 2)
    # multiplicative gaps keep adjacent level ratios below 0.8, so the
    # cross-ratio conditions decay fast enough to land inside n_max
    lams = [rng.uniform(1.3, 1.8)]
    for _ in range(n_ops - 1):
        lams.append(lams[-1] * rng.uniform(1.25, 1.6))
    shifts = []
    for idx in range(n_ops):
        sign = rng.choice([1.0, -1.0])
        cutoff = rng.randint(-3, 3)
        shifts.append(affine_shift(steps[idx], sign * lams[idx], cutoff, f"T{idx + 1}"))
    M = rng.choice([0, 1])
    rows = [
        [rng.choice([1.0, -1.0]) * rng.uniform(0.25, 3.0) for _ in range(2 * M + 1)]
        for _ in range(n_ops)
    ]
    return shifts, TargetFamily.from_rows(rows, M)


class TestRandomizedSoundness:
    def test_every_emitted_certificate_verifies(self):
        rng = random.Random(20260814)
        found = 0
        for _ in range(120):
            shifts, targets = random_affine_family(rng)
            p = rng.choice([1, 2, 3])
            cert = find_witness(shifts, targets, p=p, epsilon=0.25, n_max=400)
            if isinstance(cert, NoWitness):
                continue
            found += 1
            assert max(cert.residuals) < 0.25
            assert cert.z.norm(p) < 0.25
            for residual, bound in zip(cert.residuals, cert.bounds[1:]):
                assert residual <= bound * (1 + 1e-9) + 1e-10 * targets.gamma(p)
            report = verify_certificate(shifts, targets, cert, p=p)
            assert report.ok, [c for c in report.checks if not c.passed]
        # the sampler is tuned so most instances admit a witness
        assert found >= 60
