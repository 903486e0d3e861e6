"""Simultaneous-approximation witnesses for finite shift families.

Given shifts T_1..T_N and one finitely supported target per shift, this
module looks for a time n and a small correction vector z such that every
T_i^n z lands close to its target while z itself is tiny.  The correction is
assembled blockwise,

    z = sum_i sum_{|m| <= M} (a_i[m] / W_i(m, n)) e_{f_i^n(m)},

where W_i(m, n) is the forward weight product of T_i and coefficients at
colliding indices are summed.  Closed-form a-priori bounds for ||z|| and for
the per-operator residuals ||T_i^n z - x_i|| are computed alongside, and a
witness time is accepted only when the residuals are actually within those
bounds, so an emitted certificate is always self-consistent.

The search scans candidate times in ascending order and tests, per time:

  growth       every tracked product satisfies |W_i(m,n)| > (2M+1) N Gamma / eps
  cross_ratio  ratios of products across blocks that leave the window are
               below eps / (2 (2M+1) N Gamma)
  ratio_gap    where blocks overlap, the product ratio matches the target
               coefficient ratio to within the same threshold
  collapse     ||T_i^n y|| < eps for every supplied vector y
  z_budget     optional log-space cap on ||z|| (used by the schedule builder)
  visit_budget optional caps ||T_i^time z|| < cap at protected earlier times
  bound_check  measured residuals within the closed-form bounds

All magnitude comparisons happen in log-space; only the ratio_gap check
converts to plain floats, clamping ratios above e^700 to infinity (such a
ratio only ever needs to be "not small", which it is not).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (
    PseudoShift,
    PseudoShiftError,
    SignedLogScalar,
    SupportedVector,
    backward_coefficient_log,
    forward_product_log,
    lp_norm_log,
)

__all__ = [
    "CONDITIONS",
    "TargetFamily",
    "IndexSets",
    "WitnessCertificate",
    "NoWitness",
    "CorrectionBounds",
    "Check",
    "VerificationReport",
    "build_correction",
    "correction_bounds",
    "find_witness",
    "verify_certificate",
    "max_cross_ratio",
]

_RATIO_LOG_CLAMP = 700.0

# conditions in scan order; NoWitness tallies failures under these labels
CONDITIONS = (
    "growth",
    "cross_ratio",
    "ratio_gap",
    "collapse",
    "z_budget",
    "visit_budget",
    "bound_check",
)


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetFamily:
    """One dense target vector per operator, supported on [-M, M].

    Every coefficient must be nonzero: the correction construction divides
    by nothing but multiplies each coefficient ratio, and a zero coefficient
    would make the overlap ratio test degenerate.  Use :meth:`from_rows` to
    build a family from raw coefficients; exact zeros are replaced by
    delta = 1e-8 * max |a| and the replacements are recorded so certificates
    can disclose them.
    """

    M: int
    coefficients: tuple[tuple[float, ...], ...]
    perturbations: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self) -> None:
        if self.M < 0:
            raise ValueError("M must be >= 0")
        if not self.coefficients:
            raise ValueError("need at least one target row")
        width = 2 * self.M + 1
        for i, row in enumerate(self.coefficients):
            if len(row) != width:
                raise ValueError(
                    f"target row {i} has {len(row)} coefficients, expected {width}"
                )
            for m_off, a in enumerate(row):
                if a == 0.0 or not math.isfinite(a):
                    raise ValueError(
                        f"target coefficient a[{i}][{m_off - self.M}] must be "
                        f"nonzero and finite, got {a!r}"
                    )

    @property
    def N(self) -> int:
        return len(self.coefficients)

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[float]], M: int
    ) -> "TargetFamily":
        """Build a family from raw rows, perturbing exact zeros.

        The replacement value is 1e-8 times the largest magnitude present
        anywhere in the family; an all-zero family cannot be repaired.
        """
        cleaned = [[float(a) for a in row] for row in rows]
        peak = max((abs(a) for row in cleaned for a in row), default=0.0)
        if peak == 0.0:
            raise ValueError("all target coefficients are zero")
        delta = 1e-8 * peak
        perturbations = []
        for i, row in enumerate(cleaned):
            for m_off, a in enumerate(row):
                if a == 0.0:
                    row[m_off] = delta
                    perturbations.append((i, m_off - M, delta))
        return cls(
            M=M,
            coefficients=tuple(tuple(row) for row in cleaned),
            perturbations=tuple(perturbations),
        )

    @classmethod
    def shared(
        cls, target: SupportedVector, n_operators: int, M: int | None = None
    ) -> "TargetFamily":
        """The same target vector for every operator.

        M defaults to the support radius of the target; coefficients inside
        the window that the target leaves at zero get the usual perturbation.
        """
        if n_operators < 1:
            raise ValueError("need at least one operator")
        if not target:
            raise ValueError("target must be a nonzero vector")
        radius = max(abs(j) for j in target.support())
        if M is None:
            M = radius
        elif M < radius:
            raise ValueError(f"M = {M} is smaller than the target radius {radius}")
        row = [target.coefficient(m) for m in range(-M, M + 1)]
        return cls.from_rows([row] * n_operators, M)

    def coefficient(self, i: int, m: int) -> float:
        return self.coefficients[i][m + self.M]

    def target_vector(self, i: int) -> SupportedVector:
        return SupportedVector(
            {m: self.coefficient(i, m) for m in range(-self.M, self.M + 1)}
        )

    def gamma(self, p: float) -> float:
        """max_i ||x_i||_p, the size constant entering every bound."""
        return max(self.target_vector(i).norm(p) for i in range(self.N))

    def to_obj(self) -> dict:
        return {
            "M": self.M,
            "coefficients": [list(row) for row in self.coefficients],
        }

    @classmethod
    def from_obj(cls, obj: object) -> "TargetFamily":
        if not isinstance(obj, dict):
            raise PseudoShiftError("target document must be an object")
        M = obj.get("M")
        rows = obj.get("coefficients")
        if not isinstance(M, int) or isinstance(M, bool) or not isinstance(rows, list):
            raise PseudoShiftError("target document needs integer 'M' and 'coefficients'")
        try:
            return cls.from_rows(rows, M)
        except (TypeError, ValueError) as exc:
            raise PseudoShiftError(f"bad target document: {exc}") from exc


# ---------------------------------------------------------------------------
# index bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexSets:
    """Where the pushed-forward windows f_i^n([-M, M]) meet.

    For each ordered pair (ell, i), ``overlap`` holds the block indices that
    both windows reach and ``cross`` the ones only the ell-window reaches.
    Sets are computed through preimage membership, never by enumerating any
    stretch of the integers.
    """

    n: int
    M: int
    blocks: tuple[dict, ...] = field(repr=False)
    overlap: dict
    cross: dict

    @classmethod
    def compute(cls, shifts: Sequence[PseudoShift], n: int, M: int) -> "IndexSets":
        if n < 1:
            raise ValueError("index sets need n >= 1")
        blocks = tuple(
            {shift.map.iterate(m, n): m for m in range(-M, M + 1)} for shift in shifts
        )
        overlap: dict = {}
        cross: dict = {}
        for ell, block_ell in enumerate(blocks):
            for i, block_i in enumerate(blocks):
                if i == ell:
                    continue
                overlap[(ell, i)] = tuple(sorted(j for j in block_ell if j in block_i))
                cross[(ell, i)] = tuple(sorted(j for j in block_ell if j not in block_i))
        return cls(n=n, M=M, blocks=blocks, overlap=overlap, cross=cross)

    def preimage(self, i: int, j: int) -> int:
        return self.blocks[i][j]


# ---------------------------------------------------------------------------
# correction vector and its bounds
# ---------------------------------------------------------------------------


def _correction_terms(
    shifts: Sequence[PseudoShift], targets: TargetFamily, n: int
) -> dict[int, SignedLogScalar]:
    """Log-domain coefficients of z, with colliding indices summed."""
    terms: dict[int, SignedLogScalar] = {}
    for i, shift in enumerate(shifts):
        for m in range(-targets.M, targets.M + 1):
            sign, log_abs = forward_product_log(shift, m, n)
            w = SignedLogScalar(sign, log_abs)
            coeff = SignedLogScalar.from_float(targets.coefficient(i, m)) / w
            j = shift.map.iterate(m, n)
            terms[j] = terms.get(j, SignedLogScalar.zero()) + coeff
    return {j: c for j, c in terms.items() if not c.is_zero}


def build_correction(
    shifts: Sequence[PseudoShift], targets: TargetFamily, p: float, n: int
) -> SupportedVector:
    """The correction vector z at time n.

    Each block i contributes a_i[m] / W_i(m, n) at index f_i^n(m);
    coefficients at colliding indices are summed.  Applying T_i^n to its own
    block reproduces the target exactly; the other blocks contribute the
    residual that :func:`correction_bounds` controls.
    """
    _check_family(shifts, targets, p, n)
    terms = _correction_terms(shifts, targets, n)
    return SupportedVector({j: c.to_float() for j, c in terms.items()})


@dataclass(frozen=True)
class CorrectionBounds:
    """Closed-form bounds: ||z|| <= z_bound, ||T_i^n z - x_i|| <= residuals[i]."""

    z_bound: float
    residual_bounds: tuple[float, ...]

    def as_list(self) -> list[float]:
        return [self.z_bound, *self.residual_bounds]


def correction_bounds(
    shifts: Sequence[PseudoShift], targets: TargetFamily, p: float, n: int
) -> CorrectionBounds:
    """A-priori bounds for the correction at time n.

    With C = (2M+1) N Gamma:

    * z_bound = C * max over i and |m| <= M of 1 / |W_i(m, n)|;
    * the residual bound for operator i is
      C * max over ell < i of the overlap ratio gaps
      + C * max over ell != i of the cross ratios,
    where gaps and ratios run over the index sets of :class:`IndexSets`
    and empty maxima count as zero.
    """
    _check_family(shifts, targets, p, n)
    M, N = targets.M, targets.N
    prefactor = (2 * M + 1) * N * targets.gamma(p)
    sets = IndexSets.compute(shifts, n, M)

    inv_w_max = 0.0
    for i, shift in enumerate(shifts):
        for m in range(-M, M + 1):
            _, log_abs = forward_product_log(shift, m, n)
            inv_w_max = max(inv_w_max, _exp_clamped(-log_abs))
    z_bound = prefactor * inv_w_max

    residual_bounds = []
    for i, shift_i in enumerate(shifts):
        gap_max = 0.0
        for ell in range(i):
            for j in sets.overlap[(ell, i)]:
                gap_max = max(gap_max, _overlap_gap(shifts, targets, sets, ell, i, j))
        ratio_max = 0.0
        for ell in range(N):
            if ell == i:
                continue
            for j in sets.cross[(ell, i)]:
                _, log_ratio = _cross_ratio_log(shifts, sets, ell, i, j)
                ratio_max = max(ratio_max, _exp_clamped(log_ratio))
        residual_bounds.append(prefactor * gap_max + prefactor * ratio_max)
    return CorrectionBounds(z_bound=z_bound, residual_bounds=tuple(residual_bounds))


def _cross_ratio_log(
    shifts: Sequence[PseudoShift], sets: IndexSets, ell: int, i: int, j: int
) -> tuple[int, float]:
    """(sign, log) of W_i(f_i^-n(j), n) / W_ell(f_ell^-n(j), n)."""
    n = sets.n
    base_i = shifts[i].map.iterate(j, -n)
    sign_num, log_num = forward_product_log(shifts[i], base_i, n)
    sign_den, log_den = forward_product_log(shifts[ell], sets.preimage(ell, j), n)
    return sign_num * sign_den, log_num - log_den


def _overlap_gap(
    shifts: Sequence[PseudoShift],
    targets: TargetFamily,
    sets: IndexSets,
    ell: int,
    i: int,
    j: int,
) -> float:
    m_i = sets.preimage(i, j)
    m_ell = sets.preimage(ell, j)
    sign_num, log_num = forward_product_log(shifts[i], m_i, sets.n)
    sign_den, log_den = forward_product_log(shifts[ell], m_ell, sets.n)
    ratio = sign_num * sign_den * _exp_clamped(log_num - log_den)
    a_ratio = targets.coefficient(i, m_i) / targets.coefficient(ell, m_ell)
    return abs(ratio - a_ratio)


def _exp_clamped(log_value: float) -> float:
    if log_value > _RATIO_LOG_CLAMP:
        return math.inf
    if log_value < -_RATIO_LOG_CLAMP:
        return 0.0
    return math.exp(log_value)


def max_cross_ratio(
    shifts: Sequence[PseudoShift], ell: int, i: int, n: int, M: int
) -> float:
    """Largest |W_i / W_ell| over the cross set of the ordered pair (ell, i).

    Zero when the cross set is empty.  This is the quantity the family
    thresholds promise to push below epsilon.
    """
    sets = IndexSets.compute(shifts, n, M)
    worst = 0.0
    for j in sets.cross[(ell, i)]:
        _, log_ratio = _cross_ratio_log(shifts, sets, ell, i, j)
        worst = max(worst, _exp_clamped(log_ratio))
    return worst


def _check_family(
    shifts: Sequence[PseudoShift], targets: TargetFamily, p: float, n: int
) -> None:
    if len(shifts) != targets.N:
        raise ValueError(
            f"{len(shifts)} operators but {targets.N} target rows"
        )
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p >= 1.0):
        raise ValueError(f"norm exponent must be a finite real >= 1, got {p!r}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"witness time must be an integer >= 1, got {n!r}")


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessCertificate:
    """A verified witness time with its correction vector and bounds.

    ``bounds`` is [z_bound, residual_bound_1, ..., residual_bound_N];
    ``residuals`` are the measured ||T_i^n z - x_i||; ``collapse_residuals``
    holds one row per supplied y vector with ||T_i^n y|| per operator.
    Operator indices in ``perturbations`` are 0-based.
    """

    n: int
    z: SupportedVector
    residuals: tuple[float, ...]
    bounds: tuple[float, ...]
    epsilon: float
    K: int
    M: int
    perturbations: tuple[tuple[int, int, float], ...] = ()
    collapse_residuals: tuple[tuple[float, ...], ...] = ()

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "z": self.z.to_obj(),
            "residuals": list(self.residuals),
            "bounds": list(self.bounds),
            "epsilon": self.epsilon,
            "K": self.K,
            "M": self.M,
            "perturbations": [[i, m, d] for i, m, d in self.perturbations],
            "collapse_residuals": [list(row) for row in self.collapse_residuals],
        }

    @classmethod
    def from_obj(cls, obj: object) -> "WitnessCertificate":
        if not isinstance(obj, dict):
            raise PseudoShiftError("certificate document must be an object")
        try:
            return cls(
                n=int(obj["n"]),
                z=SupportedVector.from_obj(obj["z"]),
                residuals=tuple(float(r) for r in obj["residuals"]),
                bounds=tuple(float(b) for b in obj["bounds"]),
                epsilon=float(obj["epsilon"]),
                K=int(obj["K"]),
                M=int(obj["M"]),
                perturbations=tuple(
                    (int(i), int(m), float(d)) for i, m, d in obj.get("perturbations", [])
                ),
                collapse_residuals=tuple(
                    tuple(float(r) for r in row)
                    for row in obj.get("collapse_residuals", [])
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PseudoShiftError(f"bad certificate document: {exc}") from exc


@dataclass(frozen=True)
class NoWitness:
    """Diagnosis of a failed scan: how often each condition failed."""

    scanned_from: int
    scanned_to: int
    failure_counts: Mapping[str, int]

    def to_obj(self) -> dict:
        return {
            "scanned_from": self.scanned_from,
            "scanned_to": self.scanned_to,
            "failure_counts": dict(self.failure_counts),
        }


# ---------------------------------------------------------------------------
# the scan
# ---------------------------------------------------------------------------


class _ScanState:
    """Running log-domain products, advanced one time step at a time.

    For each operator and window point m the forward product W_i(m, n) obeys
    W_i(m, n+1) = W_i(m, n) * w(f_i^{n+1}(m)); for each support point of a
    supplied y vector the coefficient of T_i^n y obeys the mirrored
    recurrence.  Keeping these running makes the per-time condition checks
    O(window) instead of O(n * window).
    """

    def __init__(
        self,
        shifts: Sequence[PseudoShift],
        M: int,
        y_vectors: Sequence[SupportedVector],
    ):
        self.shifts = shifts
        self.M = M
        window = range(-M, M + 1)
        self.fwd = [
            {m: SignedLogScalar.one() for m in window} for _ in shifts
        ]
        self.fwd_pos = [{m: m for m in window} for _ in shifts]
        self.bwd = [
            [
                {k: SignedLogScalar.one() for k, _ in y.items()}
                for y in y_vectors
            ]
            for _ in shifts
        ]
        self.bwd_pos = [
            [{k: k for k, _ in y.items()} for y in y_vectors] for _ in shifts
        ]
        self.y_logs = [
            {k: math.log(abs(c)) for k, c in y.items()} for y in y_vectors
        ]
        self.n = 0

    def advance(self) -> None:
        self.n += 1
        for i, shift in enumerate(self.shifts):
            fwd, pos = self.fwd[i], self.fwd_pos[i]
            for m in fwd:
                nxt = shift.map.iterate(pos[m], 1)
                fwd[m] = fwd[m] * SignedLogScalar.from_float(shift.weight(nxt))
                pos[m] = nxt
            for y_idx in range(len(self.y_logs)):
                bwd, bpos = self.bwd[i][y_idx], self.bwd_pos[i][y_idx]
                for k in bwd:
                    cur = bpos[k]
                    bwd[k] = bwd[k] * SignedLogScalar.from_float(shift.weight(cur))
                    bpos[k] = shift.map.iterate(cur, -1)

    def blocks(self) -> list[dict[int, int]]:
        return [
            {pos[m]: m for m in pos} for pos in self.fwd_pos
        ]

    def collapse_norm_log(self, i: int, y_idx: int, p: float) -> float:
        logs = self.y_logs[y_idx]
        return lp_norm_log(
            (self.bwd[i][y_idx][k].log_abs + logs[k] for k in logs), p
        )


def find_witness(
    shifts: Sequence[PseudoShift],
    targets: TargetFamily,
    p: float,
    epsilon: float,
    K: int = 1,
    n_max: int = 1000,
    y_vectors: Sequence[SupportedVector] = (),
    z_budget_log: float | None = None,
    protected_times: Sequence[tuple[int, float]] = (),
) -> WitnessCertificate | NoWitness:
    """Scan times K..n_max for a witness; first success wins.

    Per candidate time every condition listed in :data:`CONDITIONS` is
    evaluated (no short-circuiting, so a NoWitness tally is complete).  On
    success the correction, measured residuals, closed-form bounds and
    collapse residuals are packaged into a :class:`WitnessCertificate`.

    ``z_budget_log`` optionally caps log ||z||_p; the schedule builder uses
    it with caps far below the float range, which is why it is a log.

    ``protected_times`` holds (time, cap) pairs: a candidate correction z
    is accepted only if ||T_i^time z||_p < cap for every operator and every
    pair.  The schedule builder protects earlier visits this way; the check
    runs in log space because the images are usually many orders below cap.

    Success is monotone in epsilon: every threshold relaxes as epsilon
    grows, so a witness at epsilon is also a witness at any larger value.
    """
    if not (isinstance(epsilon, (int, float)) and epsilon > 0 and math.isfinite(epsilon)):
        raise ValueError(f"epsilon must be a positive real, got {epsilon!r}")
    if not (1 <= K <= n_max):
        raise ValueError(f"need 1 <= K <= n_max, got K={K}, n_max={n_max}")
    _check_family(shifts, targets, p, 1)
    protection = []
    for time, cap in protected_times:
        if not isinstance(time, int) or isinstance(time, bool) or time < 1:
            raise ValueError(f"protected time must be an integer >= 1, got {time!r}")
        if not cap > 0:
            raise ValueError(f"protection cap must be positive, got {cap!r}")
        protection.append((time, math.log(cap)))

    M, N = targets.M, targets.N
    prefactor = (2 * M + 1) * N * targets.gamma(p)
    growth_floor_log = math.log(prefactor) - math.log(epsilon)
    ratio_cap_log = math.log(epsilon) - math.log(2 * prefactor)
    gap_cap = epsilon / (2 * prefactor)
    collapse_cap_log = math.log(epsilon)
    residual_slack = 1e-10 * max(1.0, targets.gamma(p))

    state = _ScanState(shifts, M, y_vectors)
    failures = {name: 0 for name in CONDITIONS}
    for n in range(1, n_max + 1):
        state.advance()
        if n < K:
            continue

        ok = True

        grown = all(
            slog.log_abs > growth_floor_log
            for per_op in state.fwd
            for slog in per_op.values()
        )
        if not grown:
            failures["growth"] += 1
            ok = False

        blocks = state.blocks()
        cross_ok = True
        gap_ok = True
        for ell in range(N):
            for i in range(N):
                if i == ell:
                    continue
                for j, m_ell in blocks[ell].items():
                    den = state.fwd[ell][m_ell]
                    if j in blocks[i]:
                        m_i = blocks[i][j]
                        num = state.fwd[i][m_i]
                        ratio = (num.sign * den.sign) * _exp_clamped(
                            num.log_abs - den.log_abs
                        )
                        a_ratio = targets.coefficient(i, m_i) / targets.coefficient(
                            ell, m_ell
                        )
                        if not abs(ratio - a_ratio) < gap_cap:
                            gap_ok = False
                    else:
                        base_i = shifts[i].map.iterate(j, -n)
                        _, log_num = forward_product_log(shifts[i], base_i, n)
                        if not log_num - den.log_abs < ratio_cap_log:
                            cross_ok = False
        if not cross_ok:
            failures["cross_ratio"] += 1
            ok = False
        if not gap_ok:
            failures["ratio_gap"] += 1
            ok = False

        collapsed = all(
            state.collapse_norm_log(i, y_idx, p) < collapse_cap_log
            for i in range(N)
            for y_idx in range(len(y_vectors))
        )
        if not collapsed:
            failures["collapse"] += 1
            ok = False

        if z_budget_log is not None or protection:
            terms = _correction_terms(shifts, targets, n)

        if z_budget_log is not None:
            z_log = lp_norm_log((c.log_abs for c in terms.values()), p)
            if not z_log < z_budget_log:
                failures["z_budget"] += 1
                ok = False

        if protection:
            protected_ok = True
            for time, cap_log in protection:
                for shift in shifts:
                    image_log = lp_norm_log(
                        (
                            c.log_abs + backward_coefficient_log(shift, j, time)[1]
                            for j, c in terms.items()
                        ),
                        p,
                    )
                    if not image_log < cap_log:
                        protected_ok = False
            if not protected_ok:
                failures["visit_budget"] += 1
                ok = False

        if not ok:
            continue

        z = build_correction(shifts, targets, p, n)
        bounds = correction_bounds(shifts, targets, p, n)
        residuals = tuple(
            (shift.apply_power(z, n) - targets.target_vector(i)).norm(p)
            for i, shift in enumerate(shifts)
        )
        sound = z.norm(p) <= bounds.z_bound * (1 + 1e-9) + residual_slack and all(
            r <= b * (1 + 1e-9) + residual_slack
            for r, b in zip(residuals, bounds.residual_bounds)
        )
        if not sound:
            failures["bound_check"] += 1
            continue

        collapse_residuals = tuple(
            tuple(shift.apply_power(y, n).norm(p) for shift in shifts)
            for y in y_vectors
        )
        return WitnessCertificate(
            n=n,
            z=z,
            residuals=residuals,
            bounds=tuple(bounds.as_list()),
            epsilon=float(epsilon),
            K=K,
            M=M,
            perturbations=targets.perturbations,
            collapse_residuals=collapse_residuals,
        )

    return NoWitness(scanned_from=K, scanned_to=n_max, failure_counts=failures)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    claimed: float
    recomputed: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[Check, ...]
    ok: bool

    def to_obj(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {
                    "name": c.name,
                    "claimed": c.claimed,
                    "recomputed": c.recomputed,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def verify_certificate(
    shifts: Sequence[PseudoShift],
    targets: TargetFamily,
    cert: WitnessCertificate,
    p: float,
    y_vectors: Sequence[SupportedVector] = (),
) -> VerificationReport:
    """Recompute everything a certificate claims, from scratch.

    The correction vector is rebuilt from (shifts, targets, n) and compared
    coefficient-wise; residuals are recomputed by applying the n-th power to
    the *claimed* z, so a corrupted coefficient or a decremented n shows up
    as a diverging residual.  Bounds come from :func:`correction_bounds`.
    Numeric comparisons pass at 1e-9 relative tolerance.

    ``collapse_residuals`` can only be recomputed when the y vectors are
    supplied; with none, a row-count check still runs.
    """
    if len(shifts) != targets.N:
        raise ValueError(f"{len(shifts)} operators but {targets.N} target rows")
    if len(cert.residuals) != targets.N or len(cert.bounds) != targets.N + 1:
        raise PseudoShiftError("certificate arity does not match the family")
    if cert.M != targets.M:
        raise PseudoShiftError(
            f"certificate window M={cert.M} but targets have M={targets.M}"
        )

    checks: list[Check] = []

    def record(name: str, claimed: float, recomputed: float) -> None:
        passed = _close(claimed, recomputed)
        checks.append(Check(name, claimed, recomputed, passed))

    z_rebuilt = build_correction(shifts, targets, p, cert.n)
    checks.append(
        Check(
            "z coefficients",
            cert.z.norm(p),
            z_rebuilt.norm(p),
            cert.z.approx_equal(z_rebuilt, rel_tol=1e-9, abs_tol=1e-300),
        )
    )

    bounds = correction_bounds(shifts, targets, p, cert.n)
    for idx, (claimed, recomputed) in enumerate(zip(cert.bounds, bounds.as_list())):
        label = "bound z" if idx == 0 else f"bound residual {idx}"
        record(label, claimed, recomputed)

    slack = 1e-10 * max(1.0, targets.gamma(p))
    for i, shift in enumerate(shifts):
        recomputed = (shift.apply_power(cert.z, cert.n) - targets.target_vector(i)).norm(p)
        record(f"residual {i + 1}", cert.residuals[i], recomputed)
        checks.append(
            Check(
                f"residual {i + 1} within bound",
                recomputed,
                bounds.residual_bounds[i],
                recomputed <= bounds.residual_bounds[i] * (1 + 1e-9) + slack,
            )
        )
        checks.append(
            Check(
                f"residual {i + 1} below epsilon",
                recomputed,
                cert.epsilon,
                recomputed < cert.epsilon,
            )
        )

    z_norm = cert.z.norm(p)
    checks.append(
        Check("z norm within bound", z_norm, bounds.z_bound,
              z_norm <= bounds.z_bound * (1 + 1e-9) + slack)
    )
    checks.append(Check("z norm below epsilon", z_norm, cert.epsilon, z_norm < cert.epsilon))

    if y_vectors:
        if len(cert.collapse_residuals) != len(y_vectors):
            checks.append(
                Check("collapse rows", float(len(cert.collapse_residuals)),
                      float(len(y_vectors)), False)
            )
        else:
            for y_idx, y in enumerate(y_vectors):
                for i, shift in enumerate(shifts):
                    recomputed = shift.apply_power(y, cert.n).norm(p)
                    record(
                        f"collapse y{y_idx + 1} under operator {i + 1}",
                        cert.collapse_residuals[y_idx][i],
                        recomputed,
                    )

    return VerificationReport(checks=tuple(checks), ok=all(c.passed for c in checks))


def _close(a: float, b: float, rel: float = 1e-9) -> bool:
    if a == b:
        return True
    return abs(a - b) <= rel * max(abs(a), abs(b))
