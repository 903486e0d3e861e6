"""Parameterized families of translation shifts with two-level weights.

A family is given by translation steps p_1 < ... < p_N, weight levels
lambda_1 .. lambda_N, and cutoffs l_1 .. l_N: operator i translates by p_i
and carries weight lambda_i above its cutoff, 1/lambda_i at or below it.
The defining inequalities are

    2 p_s < p_t          for all s < t   (steps separate fast),
    1 < |lambda_s| < |lambda_t|  for s < t  (levels strictly stratified),

and together they force every cross ratio between the pushed-forward
windows of two distinct members to decay geometrically in the iteration
count.  :func:`threshold_k` turns that decay into an explicit time beyond
which all cross ratios sit below a requested epsilon, both for the family
itself and for the family of inverses.

The inverse of member i is again a shift of the same shape: it translates
by -p_i and carries level 1/lambda_i with cutoff l_i - p_i.  Reflecting the
index axis turns that into a forward family with the original levels and
cutoffs p_i - l_i - 1, which is how the inverse threshold is computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import InducingMap, PseudoShift, PseudoShiftError, WeightRule

__all__ = [
    "FamilyParams",
    "make_family",
    "inverse_family",
    "derived_constants",
    "threshold_k",
]


@dataclass(frozen=True)
class FamilyParams:
    """Validated family parameters plus the norm exponent to use with them.

    Construction checks every defining inequality and reports the first
    violated one by name, with the offending indices and values.
    """

    steps: tuple[int, ...]
    lambdas: tuple[float, ...]
    cutoffs: tuple[int, ...]
    p: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        object.__setattr__(self, "cutoffs", tuple(self.cutoffs))
        n = len(self.steps)
        if n < 2:
            raise ValueError("a family needs at least two members")
        if len(self.lambdas) != n or len(self.cutoffs) != n:
            raise ValueError(
                f"length mismatch: {n} steps, {len(self.lambdas)} levels, "
                f"{len(self.cutoffs)} cutoffs"
            )
        for label, values in (("step", self.steps), ("cutoff", self.cutoffs)):
            for idx, value in enumerate(values):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ValueError(f"{label}[{idx}] must be an integer, got {value!r}")
        for s in range(n):
            if self.steps[s] < 1:
                raise ValueError(
                    f"violated 'steps positive': steps[{s}] = {self.steps[s]}"
                )
            for t in range(s + 1, n):
                if not 2 * self.steps[s] < self.steps[t]:
                    raise ValueError(
                        "violated '2 * steps[s] < steps[t] for s < t': "
                        f"s={s}, t={t}, steps=({self.steps[s]}, {self.steps[t]})"
                    )
        for idx, lam in enumerate(self.lambdas):
            if not math.isfinite(lam):
                raise ValueError(f"lambdas[{idx}] must be finite, got {lam!r}")
        if not abs(self.lambdas[0]) > 1:
            raise ValueError(
                f"violated '1 < |lambdas[0]|': lambdas[0] = {self.lambdas[0]}"
            )
        for s in range(n - 1):
            if not abs(self.lambdas[s]) < abs(self.lambdas[s + 1]):
                raise ValueError(
                    "violated '|lambdas[s]| < |lambdas[s+1]|': "
                    f"s={s}, |{self.lambdas[s]}| >= |{self.lambdas[s + 1]}|"
                )
        if not (isinstance(self.p, (int, float)) and math.isfinite(self.p) and self.p >= 1):
            raise ValueError(f"norm exponent must be a finite real >= 1, got {self.p!r}")
        object.__setattr__(self, "p", float(self.p))

    @property
    def N(self) -> int:
        return len(self.steps)

    def to_obj(self) -> dict:
        return {
            "N": self.N,
            "steps": list(self.steps),
            "lambdas": list(self.lambdas),
            "cutoffs": list(self.cutoffs),
            "p": self.p,
        }

    @classmethod
    def from_obj(cls, obj: object) -> "FamilyParams":
        if not isinstance(obj, dict):
            raise PseudoShiftError("family document must be an object")
        try:
            params = cls(
                steps=tuple(obj["steps"]),
                lambdas=tuple(obj["lambdas"]),
                cutoffs=tuple(obj["cutoffs"]),
                p=obj["p"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PseudoShiftError(f"bad family document: {exc}") from exc
        if "N" in obj and obj["N"] != params.N:
            raise PseudoShiftError(
                f"family document claims N={obj['N']} but lists {params.N} members"
            )
        return params


def make_family(params: FamilyParams) -> tuple[PseudoShift, ...]:
    """The operators T_1 .. T_N described by the parameters."""
    return tuple(
        PseudoShift(
            map=InducingMap.translation(step),
            weights=WeightRule.two_level(lam, cutoff),
            name=f"T{idx + 1}",
        )
        for idx, (step, lam, cutoff) in enumerate(
            zip(params.steps, params.lambdas, params.cutoffs)
        )
    )


def inverse_family(params: FamilyParams) -> tuple[PseudoShift, ...]:
    """The inverse operators, expressed directly as shifts.

    T_i^-1 sends e_j to (1 / w(j + p_i)) e_{j + p_i}, which is the shift
    with translation -p_i and two-level weights at level 1/lambda_i with
    cutoff l_i - p_i.  Composing with :func:`make_family` gives the exact
    identity on basis vectors.
    """
    return tuple(
        PseudoShift(
            map=InducingMap.translation(-step),
            weights=WeightRule.two_level(1.0 / lam, cutoff - step),
            name=f"T{idx + 1}_inv",
        )
        for idx, (step, lam, cutoff) in enumerate(
            zip(params.steps, params.lambdas, params.cutoffs)
        )
    )


def derived_constants(params: FamilyParams, inverse: bool = False) -> dict:
    """The decay constants the threshold formulas run on.

    gamma is the largest ratio of consecutive level magnitudes (the
    slow-over-fast decay rate), alpha the smallest magnitude, beta the
    largest, L the largest cutoff magnitude (reflected cutoffs with
    ``inverse=True``), and min_step the smallest translation step.
    """
    mags = [abs(lam) for lam in params.lambdas]
    if inverse:
        cutoffs = [step - cutoff - 1 for step, cutoff in zip(params.steps, params.cutoffs)]
    else:
        cutoffs = list(params.cutoffs)
    return {
        "gamma": max(mags[s] / mags[s + 1] for s in range(params.N - 1)),
        "alpha": mags[0],
        "beta": mags[-1],
        "L": max(abs(c) for c in cutoffs),
        "min_step": min(params.steps),
    }


def threshold_k(
    params: FamilyParams, epsilon: float, M: int, inverse: bool = False
) -> int:
    """Least time beyond which every cross ratio is provably below epsilon.

    For windows [-M, M], any n >= threshold_k(...) satisfies
    max_cross_ratio(shifts, ell, i, n, M) < epsilon for every ordered pair
    of distinct members.  Two geometric regimes are covered:

    * slow over fast: the surviving slow product against a fast one decays
      like gamma^n with gamma = max |lambda_s| / |lambda_{s+1}|, giving
      n > (ln eps - (2 (M+L) / p_1) ln beta) / ln gamma;
    * fast over slow: the fast product over indices the window left behind
      collapses at least like alpha^-n with alpha = min |lambda|, giving
      n > (-ln eps + (4 (M+L) / p_1) ln beta) / ln alpha;

    where beta = max |lambda|, L = max |cutoff| and p_1 is the smallest
    step.  With ``inverse=True`` the same formulas run with the reflected
    cutoffs p_i - l_i - 1, which describe the family of inverses.

    The bound is conservative: it certifies everything past the returned
    time, not that earlier times fail.
    """
    if not (isinstance(epsilon, (int, float)) and epsilon > 0 and math.isfinite(epsilon)):
        raise ValueError(f"epsilon must be a positive real, got {epsilon!r}")
    if not isinstance(M, int) or isinstance(M, bool) or M < 0:
        raise ValueError(f"window radius must be an integer >= 0, got {M!r}")

    constants = derived_constants(params, inverse=inverse)
    reach = (M + constants["L"]) / constants["min_step"]

    log_eps = math.log(epsilon)
    log_beta = math.log(constants["beta"])
    slow_over_fast = (log_eps - 2 * reach * log_beta) / math.log(constants["gamma"])
    fast_over_slow = (-log_eps + 4 * reach * log_beta) / math.log(constants["alpha"])
    return max(math.floor(slow_over_fast) + 1, math.floor(fast_over_slow) + 1, 1)
