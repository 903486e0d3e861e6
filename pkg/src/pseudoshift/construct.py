"""Greedy assembly of one vector that visits a whole list of targets.

Starting from x = 0, step k runs the witness scan for target_k shared
across every operator and adds the correction it returns.  Three scan
conditions tie the steps together:

  * the scan tolerance is eps_k / 2 with eps_k = 2^-k eps_0, so the step-k
    visit lands within eps_k / 2 of the target;
  * the running partial sum is passed as a collapse vector, so the mass
    already placed contributes less than eps_k / 2 at the new time;
  * every earlier scheduled time is protected, ||T_i^{n_j} z_k|| < eps_k,
    so the perturbation later steps add to visit j sums below
    sum_{k>j} eps_k < eps_j.

Together these keep every final visit error below 2 eps_k, which is the
bound the certificate records and `verify_schedule` re-derives from
scratch.  Times are searched strictly after the previous step's time, so
the schedule is increasing by construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import InducingMap, PseudoShift, PseudoShiftError, SupportedVector
from .criterion import (
    Check,
    NoWitness,
    TargetFamily,
    VerificationReport,
    find_witness,
)

__all__ = [
    "ScheduleStep",
    "ScheduleCertificate",
    "ScheduleFailure",
    "enumerate_targets",
    "build_dhc_vector",
    "verify_schedule",
]


# ---------------------------------------------------------------------------
# target enumeration
# ---------------------------------------------------------------------------


def _pool_size(M_max: int, S: int) -> int:
    return sum((2 * S) ** (2 * R + 1) for R in range(M_max + 1))


def enumerate_targets(M_max: int, grid: float, count: int) -> list[SupportedVector]:
    """The first `count` full-support box vectors, deterministically ordered.

    A box vector of radius R has support exactly [-R, R] and coefficients
    in grid * {+-1, ..., +-S}.  The magnitude cap S is the smallest one
    whose pool over radii 0..M_max holds at least `count` vectors; the
    pool is then ordered by (radius, largest magnitude, per-coordinate
    (magnitude, sign) pattern with + before -).  Capping first keeps both
    parameters meaningful: an unbounded magnitude ladder at radius 0 would
    otherwise sort ahead of every wider vector.
    """
    if not (isinstance(M_max, int) and not isinstance(M_max, bool) and M_max >= 0):
        raise ValueError(f"M_max must be an integer >= 0, got {M_max!r}")
    if not (isinstance(grid, (int, float)) and grid > 0 and math.isfinite(grid)):
        raise ValueError(f"grid must be a positive real, got {grid!r}")
    if not (isinstance(count, int) and not isinstance(count, bool) and count >= 0):
        raise ValueError(f"count must be an integer >= 0, got {count!r}")
    if count == 0:
        return []
    S = 1
    while _pool_size(M_max, S) < count:
        S += 1
    # listed in per-coordinate order: magnitude first, + before -
    values = [mag * sign for mag in range(1, S + 1) for sign in (1, -1)]
    out: list[SupportedVector] = []
    for R in range(M_max + 1):
        width = 2 * R + 1
        # product() emits patterns in lexicographic (magnitude, sign) order
        # already; a stable sort by largest magnitude finishes the key
        combos = sorted(
            itertools.product(values, repeat=width),
            key=lambda combo: max(abs(v) for v in combo),
        )
        for combo in combos:
            out.append(
                SupportedVector({m - R: grid * combo[m] for m in range(width)})
            )
            if len(out) == count:
                return out
    raise AssertionError("pool sizing made this unreachable")


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScheduleStep:
    """One visit: at time n every operator sends x near `target`.

    ``residuals`` hold the final measurements ||T_i^n x - target||_p per
    operator, taken against the fully built x, so they already include the
    perturbation added by later corrections.
    """

    k: int
    target: SupportedVector
    n: int
    epsilon: float
    z: SupportedVector
    residuals: tuple[float, ...]

    def to_obj(self) -> dict:
        return {
            "k": self.k,
            "target": self.target.to_obj(),
            "n": self.n,
            "epsilon": self.epsilon,
            "z": self.z.to_obj(),
            "residuals": list(self.residuals),
        }

    @classmethod
    def from_obj(cls, obj: object) -> "ScheduleStep":
        if not isinstance(obj, dict):
            raise PseudoShiftError("schedule step document must be an object")
        try:
            return cls(
                k=int(obj["k"]),
                target=SupportedVector.from_obj(obj["target"]),
                n=int(obj["n"]),
                epsilon=float(obj["epsilon"]),
                z=SupportedVector.from_obj(obj["z"]),
                residuals=tuple(float(r) for r in obj["residuals"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PseudoShiftError(f"bad schedule step document: {exc}") from exc


@dataclass(frozen=True)
class ScheduleCertificate:
    """A built vector x together with the visitation schedule it satisfies."""

    operators: tuple[PseudoShift, ...]
    p: float
    epsilon0: float
    steps: tuple[ScheduleStep, ...]
    x: SupportedVector

    def to_obj(self) -> dict:
        return {
            "operators": [shift.to_obj() for shift in self.operators],
            "p": self.p,
            "epsilon0": self.epsilon0,
            "steps": [step.to_obj() for step in self.steps],
            "x": self.x.to_obj(),
        }

    @classmethod
    def from_obj(
        cls, obj: object, registry: Mapping[str, InducingMap] | None = None
    ) -> "ScheduleCertificate":
        if not isinstance(obj, dict):
            raise PseudoShiftError("schedule document must be an object")
        try:
            return cls(
                operators=tuple(
                    PseudoShift.from_obj(op, registry) for op in obj["operators"]
                ),
                p=float(obj["p"]),
                epsilon0=float(obj["epsilon0"]),
                steps=tuple(ScheduleStep.from_obj(s) for s in obj["steps"]),
                x=SupportedVector.from_obj(obj["x"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PseudoShiftError(f"bad schedule document: {exc}") from exc


@dataclass(frozen=True)
class ScheduleFailure:
    """Where the builder stalled; `partial` keeps the completed steps."""

    step: int
    reason: str
    diagnosis: NoWitness | None
    partial: ScheduleCertificate

    def to_obj(self) -> dict:
        return {
            "step": self.step,
            "reason": self.reason,
            "diagnosis": None if self.diagnosis is None else self.diagnosis.to_obj(),
            "partial": self.partial.to_obj(),
        }


# ---------------------------------------------------------------------------
# the builder
# ---------------------------------------------------------------------------


def _measure_steps(
    shifts: Sequence[PseudoShift],
    p: float,
    raw_steps: Sequence[tuple[int, SupportedVector, int, float, SupportedVector]],
    x: SupportedVector,
) -> tuple[ScheduleStep, ...]:
    steps = []
    for k, target, n, eps_k, z in raw_steps:
        residuals = tuple(
            (shift.apply_power(x, n) - target).norm(p) for shift in shifts
        )
        steps.append(
            ScheduleStep(k=k, target=target, n=n, epsilon=eps_k, z=z, residuals=residuals)
        )
    return tuple(steps)


def build_dhc_vector(
    shifts: Sequence[PseudoShift],
    targets: Sequence[SupportedVector],
    epsilon0: float,
    p: float = 2.0,
    n_max_per_step: int = 2000,
) -> ScheduleCertificate | ScheduleFailure:
    """Greedily build x visiting each target in order; deterministic.

    Targets must be nonzero (``enumerate_targets`` only produces such).
    A probe scan on the shared unit target at tolerance epsilon0 runs
    first, so operator families for which the scan as such cannot work
    fail fast at step 1 instead of burning the whole step budget.  Each
    step then searches times in (n_{k-1}, n_{k-1} + n_max_per_step]; a
    step that exhausts its window returns a :class:`ScheduleFailure`
    carrying the scan tally and the partial certificate.
    """
    shifts = tuple(shifts)
    if not shifts:
        raise ValueError("need at least one operator")
    if not (isinstance(epsilon0, (int, float)) and epsilon0 > 0 and math.isfinite(epsilon0)):
        raise ValueError(f"epsilon0 must be a positive real, got {epsilon0!r}")
    if not (isinstance(n_max_per_step, int) and n_max_per_step >= 1):
        raise ValueError(f"n_max_per_step must be an integer >= 1, got {n_max_per_step!r}")
    targets = tuple(targets)
    epsilon0 = float(epsilon0)
    p = float(p)

    def certificate(raw_steps, x):
        return ScheduleCertificate(
            operators=shifts,
            p=p,
            epsilon0=epsilon0,
            steps=_measure_steps(shifts, p, raw_steps, x),
            x=x,
        )

    if not targets:
        return certificate([], SupportedVector.zero())

    probe_family = TargetFamily.shared(SupportedVector.basis(0), len(shifts))
    probe = find_witness(
        shifts, probe_family, p, epsilon0, K=1, n_max=n_max_per_step
    )
    if isinstance(probe, NoWitness):
        return ScheduleFailure(
            step=1,
            reason="probe scan found no witness for the shared unit target",
            diagnosis=probe,
            partial=certificate([], SupportedVector.zero()),
        )

    x = SupportedVector.zero()
    raw_steps: list[tuple[int, SupportedVector, int, float, SupportedVector]] = []
    prev_n = 0
    for k, target in enumerate(targets, start=1):
        eps_k = epsilon0 * 0.5 ** k
        family = TargetFamily.shared(target, len(shifts))
        found = find_witness(
            shifts,
            family,
            p,
            eps_k / 2,
            K=prev_n + 1,
            n_max=prev_n + n_max_per_step,
            y_vectors=(x,) if x else (),
            protected_times=[(n_j, eps_k) for _, _, n_j, _, _ in raw_steps],
        )
        if isinstance(found, NoWitness):
            return ScheduleFailure(
                step=k,
                reason=(
                    f"no witness for step {k} in times "
                    f"{prev_n + 1}..{prev_n + n_max_per_step}"
                ),
                diagnosis=found,
                partial=certificate(raw_steps, x),
            )
        x = x + found.z
        raw_steps.append((k, target, found.n, eps_k, found.z))
        prev_n = found.n
    return certificate(raw_steps, x)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def verify_schedule(
    shifts: Sequence[PseudoShift], cert: ScheduleCertificate
) -> VerificationReport:
    """Re-derive every claim a schedule certificate makes.

    Structure first: the supplied operators match the recorded ones, steps
    are numbered 1..K, tolerances halve from epsilon0, times strictly
    increase, x is the coefficient-wise sum of the corrections, and the
    support of x sits inside the union of the shifted target windows.
    Then the numbers: per-step correction norms stay within eps_k, the
    total correction mass stays within 2 eps_0, and every recomputed
    visit residual ||T_i^{n_k} x - target_k||_p matches the recorded one
    and fits the 2 eps_k tolerance.
    """
    shifts = tuple(shifts)
    for step in cert.steps:
        if len(step.residuals) != len(cert.operators):
            raise PseudoShiftError(
                f"step {step.k} records {len(step.residuals)} residuals "
                f"for {len(cert.operators)} operators"
            )
    p = cert.p
    checks: list[Check] = []

    ops_equal = len(shifts) == len(cert.operators) and all(
        mine.to_obj() == theirs.to_obj() for mine, theirs in zip(shifts, cert.operators)
    )
    checks.append(
        Check("operators match", float(len(cert.operators)), float(len(shifts)), ops_equal)
    )

    numbered = sum(
        1 for pos, step in enumerate(cert.steps, start=1) if step.k == pos
    )
    checks.append(
        Check("step numbering", float(numbered), float(len(cert.steps)),
              numbered == len(cert.steps))
    )

    for step in cert.steps:
        expected = cert.epsilon0 * 0.5 ** step.k
        checks.append(
            Check(f"epsilon step {step.k}", step.epsilon, expected,
                  _close(step.epsilon, expected))
        )

    times = [step.n for step in cert.steps]
    gaps = [b - a for a, b in zip([0] + times, times)]
    smallest_gap = float(min(gaps)) if gaps else 1.0
    checks.append(Check("times increase", smallest_gap, 1.0, smallest_gap >= 1.0))

    total = SupportedVector.zero()
    for step in cert.steps:
        total = total + step.z
    checks.append(
        Check(
            "x equals the sum of corrections",
            cert.x.norm(p),
            total.norm(p),
            cert.x.approx_equal(total, rel_tol=1e-9, abs_tol=1e-300),
        )
    )

    allowed: set[int] = set()
    for step in cert.steps:
        radius = max((abs(j) for j in step.target.support()), default=0)
        for shift in cert.operators:
            for m in range(-radius, radius + 1):
                allowed.add(shift.map.iterate(m, step.n))
    support = cert.x.support()
    inside = sum(1 for j in support if j in allowed)
    checks.append(
        Check("support inclusion", float(inside), float(len(support)),
              inside == len(support))
    )

    mass = 0.0
    for step in cert.steps:
        z_norm = step.z.norm(p)
        mass += z_norm
        checks.append(
            Check(f"correction norm step {step.k}", z_norm, step.epsilon,
                  z_norm <= step.epsilon)
        )
    checks.append(
        Check("total correction mass", mass, 2 * cert.epsilon0,
              mass <= 2 * cert.epsilon0)
    )

    for step in cert.steps:
        tolerance = 2 * step.epsilon
        for i, shift in enumerate(cert.operators):
            recomputed = (shift.apply_power(cert.x, step.n) - step.target).norm(p)
            checks.append(
                Check(
                    f"visit step {step.k} operator {i + 1}",
                    step.residuals[i],
                    recomputed,
                    _close(step.residuals[i], recomputed),
                )
            )
            checks.append(
                Check(
                    f"visit step {step.k} operator {i + 1} within tolerance",
                    recomputed,
                    tolerance,
                    recomputed <= tolerance * (1 + 1e-9),
                )
            )

    return VerificationReport(checks=tuple(checks), ok=all(c.passed for c in checks))


def _close(a: float, b: float, rel: float = 1e-9) -> bool:
    if a == b:
        return True
    return abs(a - b) <= rel * max(abs(a), abs(b))
