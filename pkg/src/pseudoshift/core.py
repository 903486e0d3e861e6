"""Exact algebra for bilateral weighted pseudo-shifts on lp(Z).

A pseudo-shift is determined by a bijection f of the integers (the inducing
map) and a bounded sequence of nonzero weights w.  On a finitely supported
vector x it acts coordinatewise as

    (T x)_j = w_{f(j)} * x_{f(j)},      equivalently   T e_k = w_k e_{f^-1(k)}.

Everything in this module is exact in the following sense: supports are kept
as explicit integer sets, weight products are accumulated in signed
log-space (never by naive multiplication), and powers of the operator are
evaluated through the closed form

    T^n e_m = (prod_{v=0}^{n-1} w_{f^-v(m)}) e_{f^-n(m)},   n >= 0,

rather than by iterating the operator.  The helpers here are the substrate
for the witness search and schedule construction in the sibling modules.

Coefficients of vectors are plain 64-bit floats; only the weight products
flow through :class:`SignedLogScalar`, which is what keeps quantities like
lambda^{-900} meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

__all__ = [
    "PseudoShiftError",
    "InconsistentMapError",
    "NotInvertibleError",
    "SignedLogScalar",
    "SupportedVector",
    "InducingMap",
    "WeightRule",
    "PseudoShift",
]

# exp() overflows just above this; used when converting log magnitudes back
# to floats.
_LOG_FLOAT_MAX = 709.782712893384
_LOG_FLOAT_TINY = -745.133219101941


class PseudoShiftError(Exception):
    """Base class for errors raised by this package."""


class InconsistentMapError(PseudoShiftError):
    """A general inducing map failed its forward/inverse round-trip check."""


class NotInvertibleError(PseudoShiftError):
    """An operation requiring an invertible shift was given one that is not."""


# ---------------------------------------------------------------------------
# signed log-domain scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedLogScalar:
    """A real number stored as (sign, log |value|).

    ``sign`` is -1, 0 or +1; ``log_abs`` is the natural log of the magnitude
    (``-inf`` for zero).  Multiplication and division are exact additions in
    log-space, so products of thousands of weights neither overflow nor
    underflow.  Conversion back to float round-trips within 1e-12 relative
    error for magnitudes between 1e-300 and 1e300.
    """

    sign: int
    log_abs: float

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0 and self.log_abs != -math.inf:
            raise ValueError("zero must carry log_abs = -inf")

    @classmethod
    def from_float(cls, value: float) -> "SignedLogScalar":
        if value == 0.0:
            return _SLOG_ZERO
        if math.isnan(value):
            raise ValueError("cannot represent NaN")
        sign = 1 if value > 0 else -1
        return cls(sign, math.log(abs(value)))

    @classmethod
    def one(cls) -> "SignedLogScalar":
        return _SLOG_ONE

    @classmethod
    def zero(cls) -> "SignedLogScalar":
        return _SLOG_ZERO

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def to_float(self, log_clamp: float = _LOG_FLOAT_MAX) -> float:
        """Convert back to a float.

        Magnitudes with ``log_abs`` above ``log_clamp`` become signed
        infinity; magnitudes below the float range quietly underflow to
        signed zero.
        """
        if self.sign == 0:
            return 0.0
        if self.log_abs > log_clamp:
            return math.inf if self.sign > 0 else -math.inf
        if self.log_abs < _LOG_FLOAT_TINY:
            return 0.0 if self.sign > 0 else -0.0
        return self.sign * math.exp(self.log_abs)

    def __mul__(self, other: "SignedLogScalar") -> "SignedLogScalar":
        if self.sign == 0 or other.sign == 0:
            return _SLOG_ZERO
        return SignedLogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: "SignedLogScalar") -> "SignedLogScalar":
        if other.sign == 0:
            raise ZeroDivisionError("division by log-domain zero")
        if self.sign == 0:
            return _SLOG_ZERO
        return SignedLogScalar(self.sign * other.sign, self.log_abs - other.log_abs)

    def __add__(self, other: "SignedLogScalar") -> "SignedLogScalar":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_abs >= other.log_abs else (other, self)
        diff = small.log_abs - big.log_abs
        if self.sign == other.sign:
            return SignedLogScalar(big.sign, big.log_abs + math.log1p(math.exp(diff)))
        if diff == 0.0:
            return _SLOG_ZERO
        return SignedLogScalar(big.sign, big.log_abs + math.log1p(-math.exp(diff)))

    def __neg__(self) -> "SignedLogScalar":
        if self.sign == 0:
            return self
        return SignedLogScalar(-self.sign, self.log_abs)

    def reciprocal(self) -> "SignedLogScalar":
        if self.sign == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return SignedLogScalar(self.sign, -self.log_abs)


_SLOG_ZERO = SignedLogScalar(0, -math.inf)
_SLOG_ONE = SignedLogScalar(1, 0.0)


def lp_norm_log(log_terms: Iterable[float], p: float) -> float:
    """log of the lp norm of a vector given the logs of its magnitudes.

    Stable for terms far outside the float range; returns -inf for an empty
    or all-zero collection.
    """
    logs = [t for t in log_terms if t != -math.inf]
    if not logs:
        return -math.inf
    top = max(logs)
    acc = math.fsum(math.exp(p * (t - top)) for t in logs)
    return top + math.log(acc) / p


# ---------------------------------------------------------------------------
# finitely supported vectors
# ---------------------------------------------------------------------------


class SupportedVector:
    """An immutable, finitely supported vector indexed by the integers.

    Zero coefficients are never stored, so ``support()`` is always exact.
    Arithmetic returns new vectors; nothing mutates in place.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        data: dict[int, float] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for index, coeff in items:
            if not isinstance(index, int) or isinstance(index, bool):
                raise TypeError(f"index must be an int, got {index!r}")
            coeff = float(coeff)
            if math.isnan(coeff):
                raise ValueError(f"NaN coefficient at index {index}")
            if coeff != 0.0:
                if index in data:
                    raise ValueError(f"duplicate index {index}")
                data[index] = coeff
        self._entries = data

    @classmethod
    def zero(cls) -> "SupportedVector":
        return cls()

    @classmethod
    def basis(cls, index: int, coeff: float = 1.0) -> "SupportedVector":
        return cls({index: coeff})

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "SupportedVector":
        return cls((int(i), float(c)) for i, c in pairs)

    def pairs(self) -> list[tuple[int, float]]:
        """Entries as (index, coefficient) pairs, sorted by index."""
        return sorted(self._entries.items())

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._entries))

    def coefficient(self, index: int) -> float:
        return self._entries.get(index, 0.0)

    def items(self) -> Iterator[tuple[int, float]]:
        return iter(self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SupportedVector):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self) -> str:
        inside = ", ".join(f"{i}: {c!r}" for i, c in self.pairs())
        return f"SupportedVector({{{inside}}})"

    def __add__(self, other: "SupportedVector") -> "SupportedVector":
        out = dict(self._entries)
        for index, coeff in other._entries.items():
            total = out.get(index, 0.0) + coeff
            if total == 0.0:
                out.pop(index, None)
            else:
                out[index] = total
        return SupportedVector(out)

    def __sub__(self, other: "SupportedVector") -> "SupportedVector":
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> "SupportedVector":
        if factor == 0.0:
            return SupportedVector()
        return SupportedVector({i: c * factor for i, c in self._entries.items()})

    def norm(self, p: float) -> float:
        _check_exponent(p)
        if not self._entries:
            return 0.0
        return math.fsum(abs(c) ** p for c in self._entries.values()) ** (1.0 / p)

    def norm_log(self, p: float) -> float:
        """log of the lp norm, stable when coefficients are extreme."""
        _check_exponent(p)
        return lp_norm_log(
            (math.log(abs(c)) for c in self._entries.values()), p
        )

    def distance(self, other: "SupportedVector", p: float) -> float:
        return (self - other).norm(p)

    def approx_equal(
        self,
        other: "SupportedVector",
        rel_tol: float = 1e-12,
        abs_tol: float = 1e-300,
    ) -> bool:
        """Support-wise comparison with per-coefficient tolerances."""
        for index in set(self._entries) | set(other._entries):
            a = self.coefficient(index)
            b = other.coefficient(index)
            if abs(a - b) > max(rel_tol * max(abs(a), abs(b)), abs_tol):
                return False
        return True

    def to_obj(self) -> list[list[float]]:
        """JSON form: [[index, coefficient], ...] sorted by index."""
        return [[i, c] for i, c in self.pairs()]

    @classmethod
    def from_obj(cls, obj: object) -> "SupportedVector":
        if not isinstance(obj, list):
            raise PseudoShiftError("vector document must be a list of pairs")
        try:
            return cls.from_pairs(obj)  # type: ignore[arg-type]
        except (TypeError, ValueError) as exc:
            raise PseudoShiftError(f"bad vector document: {exc}") from exc


def _check_exponent(p: float) -> None:
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p >= 1.0):
        raise ValueError(f"norm exponent must be a finite real >= 1, got {p!r}")


# ---------------------------------------------------------------------------
# inducing maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InducingMap:
    """A bijection of the integers driving a pseudo-shift.

    Two kinds are supported.  ``translation`` maps n to n + step with a
    nonzero integer step and has O(1) iteration.  ``general`` wraps a pair
    of callables (forward, inverse); every single-step evaluation checks the
    round trip inverse(forward(n)) == n and raises
    :class:`InconsistentMapError` on the first index where the pair fails to
    be a two-sided inverse.
    """

    kind: str
    step: int = 0
    forward: Callable[[int], int] | None = None
    inverse: Callable[[int], int] | None = None
    name: str = ""

    @classmethod
    def translation(cls, step: int) -> "InducingMap":
        if not isinstance(step, int) or isinstance(step, bool) or step == 0:
            raise ValueError(f"translation step must be a nonzero integer, got {step!r}")
        return cls(kind="translation", step=step)

    @classmethod
    def general(
        cls,
        forward: Callable[[int], int],
        inverse: Callable[[int], int],
        name: str,
    ) -> "InducingMap":
        if not name:
            raise ValueError("general maps need a name for serialization")
        return cls(kind="general", forward=forward, inverse=inverse, name=name)

    def _step_forward(self, n: int) -> int:
        assert self.forward is not None and self.inverse is not None
        m = self.forward(n)
        if not isinstance(m, int) or isinstance(m, bool):
            raise InconsistentMapError(f"forward({n}) returned non-integer {m!r}")
        if self.inverse(m) != n:
            raise InconsistentMapError(
                f"map {self.name!r}: inverse(forward({n})) != {n}"
            )
        return m

    def _step_inverse(self, n: int) -> int:
        assert self.forward is not None and self.inverse is not None
        m = self.inverse(n)
        if not isinstance(m, int) or isinstance(m, bool):
            raise InconsistentMapError(f"inverse({n}) returned non-integer {m!r}")
        if self.forward(m) != n:
            raise InconsistentMapError(
                f"map {self.name!r}: forward(inverse({n})) != {n}"
            )
        return m

    def iterate(self, n: int, k: int) -> int:
        """Evaluate f^k(n) for any integer k (k = 0 is the identity)."""
        if self.kind == "translation":
            return n + k * self.step
        cur = n
        if k >= 0:
            for _ in range(k):
                cur = self._step_forward(cur)
        else:
            for _ in range(-k):
                cur = self._step_inverse(cur)
        return cur

    def to_obj(self) -> dict:
        if self.kind == "translation":
            return {"kind": "translation", "step": self.step}
        return {"kind": "general", "rules-ref": self.name}

    @classmethod
    def from_obj(
        cls, obj: object, registry: Mapping[str, "InducingMap"] | None = None
    ) -> "InducingMap":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise PseudoShiftError("map document must be an object with a 'kind'")
        kind = obj["kind"]
        if kind == "translation":
            step = obj.get("step")
            if not isinstance(step, int) or isinstance(step, bool):
                raise PseudoShiftError("translation map needs an integer 'step'")
            return cls.translation(step)
        if kind == "general":
            ref = obj.get("rules-ref")
            if registry is None or ref not in registry:
                raise PseudoShiftError(
                    f"general map {ref!r} is not resolvable without a registry entry"
                )
            return registry[ref]
        raise PseudoShiftError(f"unknown map kind {kind!r}")


# ---------------------------------------------------------------------------
# weight rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightRule:
    """A closed-form description of the weight sequence.

    Kinds:

    * ``twoLevel(lam, cutoff)``: w_n = lam for n > cutoff, 1/lam otherwise.
    * ``table(entries, default)``: finitely many explicit values over a
      constant background.
    * ``periodic(values)``: w_n = values[n mod len(values)].

    Every stored weight must be nonzero and finite; the extremes
    ``sup_abs`` and ``inf_abs`` are computed once from the closed form.
    Note that |lam| > 1 is *not* required here -- growth conditions belong
    to the family layer, not to the operator algebra.
    """

    kind: str
    lam: float = 0.0
    cutoff: int = 0
    entries: tuple[tuple[int, float], ...] = ()
    default: float = 1.0
    values: tuple[float, ...] = ()

    @classmethod
    def two_level(cls, lam: float, cutoff: int) -> "WeightRule":
        lam = float(lam)
        _check_weight(lam)
        if not isinstance(cutoff, int) or isinstance(cutoff, bool):
            raise ValueError(f"cutoff must be an integer, got {cutoff!r}")
        return cls(kind="twoLevel", lam=lam, cutoff=cutoff)

    @classmethod
    def table(cls, entries: Mapping[int, float], default: float = 1.0) -> "WeightRule":
        default = float(default)
        _check_weight(default)
        frozen = []
        for index, value in sorted(entries.items()):
            if not isinstance(index, int) or isinstance(index, bool):
                raise ValueError(f"table index must be an int, got {index!r}")
            value = float(value)
            _check_weight(value)
            frozen.append((index, value))
        return cls(kind="table", entries=tuple(frozen), default=default)

    @classmethod
    def periodic(cls, values: Sequence[float]) -> "WeightRule":
        if not values:
            raise ValueError("periodic rule needs at least one value")
        vals = tuple(float(v) for v in values)
        for v in vals:
            _check_weight(v)
        return cls(kind="periodic", values=vals)

    def value(self, n: int) -> float:
        if self.kind == "twoLevel":
            return self.lam if n > self.cutoff else 1.0 / self.lam
        if self.kind == "table":
            for index, v in self.entries:
                if index == n:
                    return v
            return self.default
        return self.values[n % len(self.values)]

    def _closed_form_values(self) -> list[float]:
        if self.kind == "twoLevel":
            return [self.lam, 1.0 / self.lam]
        if self.kind == "table":
            return [v for _, v in self.entries] + [self.default]
        return list(self.values)

    @property
    def sup_abs(self) -> float:
        return max(abs(v) for v in self._closed_form_values())

    @property
    def inf_abs(self) -> float:
        return min(abs(v) for v in self._closed_form_values())

    def to_obj(self) -> dict:
        if self.kind == "twoLevel":
            return {
                "kind": "twoLevel",
                "params": {"lambda": self.lam, "cutoff": self.cutoff},
            }
        if self.kind == "table":
            return {
                "kind": "table",
                "params": {
                    "entries": [[i, v] for i, v in self.entries],
                    "default": self.default,
                },
            }
        return {"kind": "periodic", "params": {"values": list(self.values)}}

    @classmethod
    def from_obj(cls, obj: object) -> "WeightRule":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise PseudoShiftError("weights document must be an object with a 'kind'")
        kind = obj["kind"]
        params = obj.get("params")
        if not isinstance(params, dict):
            raise PseudoShiftError("weights document needs a 'params' object")
        try:
            if kind == "twoLevel":
                return cls.two_level(params["lambda"], params["cutoff"])
            if kind == "table":
                entries = {int(i): float(v) for i, v in params.get("entries", [])}
                return cls.table(entries, params.get("default", 1.0))
            if kind == "periodic":
                return cls.periodic(params["values"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PseudoShiftError(f"bad weight params for kind {kind!r}: {exc}") from exc
        raise PseudoShiftError(f"unknown weight kind {kind!r}")


def _check_weight(value: float) -> None:
    if value == 0.0:
        raise ValueError("weights must be nonzero")
    if not math.isfinite(value):
        raise ValueError(f"weights must be finite, got {value!r}")


# ---------------------------------------------------------------------------
# the operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PseudoShift:
    """A weighted pseudo-shift T: (T x)_j = w_{f(j)} x_{f(j)}."""

    map: InducingMap
    weights: WeightRule
    name: str = "T"

    def weight(self, n: int) -> float:
        return self.weights.value(n)

    def invertible(self) -> bool:
        """True when inf |w| > 0 and sup |w| < inf over the closed form."""
        return self.weights.inf_abs > 0.0 and math.isfinite(self.weights.sup_abs)

    def _require_invertible(self) -> None:
        if not self.invertible():
            raise NotInvertibleError(
                f"{self.name}: weights have inf |w| = {self.weights.inf_abs}, "
                f"sup |w| = {self.weights.sup_abs}"
            )

    # -- single applications ------------------------------------------------

    def apply(self, x: SupportedVector) -> SupportedVector:
        """T x.  Support size is preserved (or shrinks on float underflow)."""
        out = {}
        for k, c in x.items():
            coeff = self.weight(k) * c
            if coeff != 0.0:
                out[self.map.iterate(k, -1)] = coeff
        return SupportedVector(out)

    def apply_inverse(self, x: SupportedVector) -> SupportedVector:
        """T^-1 x, via T^-1 e_j = (1 / w_{f(j)}) e_{f(j)}."""
        self._require_invertible()
        out = {}
        for k, c in x.items():
            j = self.map.iterate(k, 1)
            coeff = c / self.weight(j)
            if coeff != 0.0:
                out[j] = coeff
        return SupportedVector(out)

    # -- powers through the closed form -------------------------------------

    def apply_power(self, x: SupportedVector, n: int) -> SupportedVector:
        """T^n x for any integer n, never by iterating T.

        Each support point costs O(|n|) map evaluations and weight lookups;
        the coefficient is accumulated as a :class:`SignedLogScalar` so the
        only rounding is one exp() at the end.  Negative n requires an
        invertible shift.
        """
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError(f"power must be an integer, got {n!r}")
        if n == 0:
            return x
        if n < 0:
            self._require_invertible()
        out = {}
        for k, c in x.items():
            if n > 0:
                acc, target = self._backward_chain(k, n)
                coeff = (acc * SignedLogScalar.from_float(c)).to_float()
            else:
                acc, target = self._forward_chain(k, -n)
                coeff = (SignedLogScalar.from_float(c) / acc).to_float()
            if coeff != 0.0:
                out[target] = coeff
        return SupportedVector(out)

    def _backward_chain(self, m: int, n: int) -> tuple[SignedLogScalar, int]:
        # prod_{v=0}^{n-1} w_{f^-v(m)} together with the landing index f^-n(m)
        acc = SignedLogScalar.one()
        cur = m
        for _ in range(n):
            acc = acc * SignedLogScalar.from_float(self.weight(cur))
            cur = self.map.iterate(cur, -1)
        return acc, cur

    def _forward_chain(self, m: int, n: int) -> tuple[SignedLogScalar, int]:
        # prod_{v=1}^{n} w_{f^v(m)} together with the landing index f^n(m)
        acc = SignedLogScalar.one()
        cur = m
        for _ in range(n):
            cur = self.map.iterate(cur, 1)
            acc = acc * SignedLogScalar.from_float(self.weight(cur))
        return acc, cur

    def forward_product(self, m: int, n: int) -> SignedLogScalar:
        """W_{m,n} = prod_{v=1}^{n} w_{f^v(m)}; the empty product for n = 0.

        This is the coefficient in the identity T^n e_{f^n(m)} = W_{m,n} e_m.
        """
        if n < 0:
            raise ValueError("forward_product needs n >= 0")
        acc, _ = self._forward_chain(m, n)
        return acc

    def backward_coefficient(self, m: int, n: int) -> SignedLogScalar:
        """The scalar c with T^n e_m = c e_{f^-n(m)}, for n >= 0.

        Equals prod_{v=0}^{n-1} w_{f^-v(m)}; this is also the natural
        meaning of W_{m,-n} when the weight products are extended to
        negative times.
        """
        if n < 0:
            raise ValueError("backward_coefficient needs n >= 0")
        acc, _ = self._backward_chain(m, n)
        return acc

    # -- serialization -------------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "map": self.map.to_obj(),
            "weights": self.weights.to_obj(),
        }

    @classmethod
    def from_obj(
        cls, obj: object, registry: Mapping[str, InducingMap] | None = None
    ) -> "PseudoShift":
        if not isinstance(obj, dict):
            raise PseudoShiftError("operator document must be an object")
        name = obj.get("name")
        if not isinstance(name, str) or not name:
            raise PseudoShiftError("operator document needs a nonempty 'name'")
        return cls(
            map=InducingMap.from_obj(obj.get("map"), registry),
            weights=WeightRule.from_obj(obj.get("weights")),
            name=name,
        )


# ---------------------------------------------------------------------------
# closed-form fast paths (translation maps with two-level weights)
# ---------------------------------------------------------------------------


def _is_affine_two_level(shift: PseudoShift) -> bool:
    return shift.map.kind == "translation" and shift.weights.kind == "twoLevel"


def forward_product_log(shift: PseudoShift, m: int, n: int) -> tuple[int, float]:
    """(sign, log |W_{m,n}|) with an O(1) path for translation + twoLevel.

    Falls back to the iterative product otherwise.  The fast path counts how
    many of the indices m + v*step, v = 1..n, lie above the cutoff; the
    count is exact integer arithmetic, so only the final multiply rounds.
    """
    if n < 0:
        raise ValueError("forward_product_log needs n >= 0")
    if n == 0:
        return 1, 0.0
    if not _is_affine_two_level(shift):
        s = shift.forward_product(m, n)
        return s.sign, s.log_abs
    step = shift.map.step
    lam = shift.weights.lam
    cutoff = shift.weights.cutoff
    above = _count_above(m, step, cutoff, 1, n)
    sign = 1 if lam > 0 or n % 2 == 0 else -1
    return sign, (2 * above - n) * math.log(abs(lam))


def backward_coefficient_log(shift: PseudoShift, m: int, n: int) -> tuple[int, float]:
    """(sign, log |c|) for T^n e_m = c e_{f^-n(m)}, O(1) when possible."""
    if n < 0:
        raise ValueError("backward_coefficient_log needs n >= 0")
    if n == 0:
        return 1, 0.0
    if not _is_affine_two_level(shift):
        s = shift.backward_coefficient(m, n)
        return s.sign, s.log_abs
    step = shift.map.step
    lam = shift.weights.lam
    cutoff = shift.weights.cutoff
    above = _count_above(m, -step, cutoff, 0, n - 1)
    sign = 1 if lam > 0 or n % 2 == 0 else -1
    return sign, (2 * above - n) * math.log(abs(lam))


def _count_above(base: int, step: int, cutoff: int, v_lo: int, v_hi: int) -> int:
    """#{v in [v_lo, v_hi] : base + v*step > cutoff}, exactly."""
    total = v_hi - v_lo + 1
    if total <= 0:
        return 0
    # base + v*step > cutoff  <=>  v*step > cutoff - base
    rhs = cutoff - base
    if step > 0:
        # v > rhs/step  <=>  v >= floor(rhs/step) + 1
        first = rhs // step + 1
        return min(max(v_hi - first + 1, 0), total)
    # step < 0 flips the inequality: v < rhs/step  <=>  v <= ceil(rhs/step) - 1
    last = _ceil_div(rhs, step) - 1
    return min(max(last - v_lo + 1, 0), total)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)
