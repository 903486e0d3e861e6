"""Joint orbits, return sets, and window-density estimates.

An orbit run iterates every operator on the same starting vector and
records one row per time, either as full vector snapshots or as norms and
target distances only.  Return sets collect the times at which *all*
operators sit strictly inside a ball around the target at once, matching
the diagonal form in which simultaneous approach is defined.  The density
estimator is the explicitly finite surrogate of the window-limit
definition: it scans every window position up to m_max and reports the
best in-window fraction together with the (N, m_max) pair that produced
it, so no number is ever presented as the true limit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import PseudoShift, PseudoShiftError, SupportedVector
from .jsonio import format_float

__all__ = [
    "OrbitRecord",
    "DensityEstimate",
    "OrbitMemoryError",
    "orbit",
    "return_set",
    "orbit_to_csv",
    "upper_banach_density",
]


class OrbitMemoryError(PseudoShiftError):
    """A full-mode orbit would store more coefficients than the cap allows."""


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitRecord:
    """One time slice of a joint orbit.

    Full mode stores per-operator snapshots T_i^n x; stats mode stores the
    snapshot norms and, when a target was fixed, the distances to it,
    together with that target and the exponent the numbers were measured
    with.  Unused fields are None.
    """

    n: int
    snapshots: tuple[SupportedVector, ...] | None = None
    norms: tuple[float, ...] | None = None
    distances: tuple[float, ...] | None = None
    target: SupportedVector | None = None
    p: float | None = None


def orbit(
    shifts: Sequence[PseudoShift],
    x: SupportedVector,
    n_max: int,
    mode: str = "full",
    target: SupportedVector | None = None,
    p: float = 2.0,
    support_cap: int = 1_000_000,
) -> list[OrbitRecord]:
    """Records for times 0..n_max, iterating each operator on x.

    Full mode keeps the snapshots themselves; since the index map is a
    bijection, every snapshot has exactly the support size of x, so the
    total memory (n_max + 1) * len(shifts) * len(x) is known upfront and
    is refused if it exceeds ``support_cap``.  Stats mode keeps only the
    per-operator norm and, when ``target`` is given, the distance to it,
    both at exponent ``p``.
    """
    shifts = tuple(shifts)
    if not shifts:
        raise ValueError("need at least one operator")
    if not (isinstance(n_max, int) and not isinstance(n_max, bool) and n_max >= 0):
        raise ValueError(f"n_max must be an integer >= 0, got {n_max!r}")
    if mode not in ("full", "stats"):
        raise ValueError(f"mode must be 'full' or 'stats', got {mode!r}")
    if mode == "full":
        if target is not None:
            raise ValueError("a target only applies to stats mode")
        projected = (n_max + 1) * len(shifts) * len(x)
        if projected > support_cap:
            raise OrbitMemoryError(
                f"full orbit would store {projected} coefficients, "
                f"above the cap of {support_cap}"
            )

    p = float(p)
    records: list[OrbitRecord] = []
    current = tuple(x for _ in shifts)
    for n in range(n_max + 1):
        if n > 0:
            current = tuple(shift.apply(vec) for shift, vec in zip(shifts, current))
        if mode == "full":
            records.append(OrbitRecord(n=n, snapshots=current))
        else:
            records.append(
                OrbitRecord(
                    n=n,
                    norms=tuple(vec.norm(p) for vec in current),
                    distances=None
                    if target is None
                    else tuple((vec - target).norm(p) for vec in current),
                    target=target,
                    p=p,
                )
            )
    return records


def return_set(
    records: Sequence[OrbitRecord],
    target: SupportedVector,
    delta: float,
    p: float,
) -> set[int]:
    """Times at which every operator is strictly within delta of target.

    Full-mode records carry the snapshots, so the distances are computed
    here for any target.  Stats-mode records only carry numbers, which are
    usable only when they were measured against this very target at this
    very exponent; anything else is a mode mismatch.
    """
    if not (isinstance(delta, (int, float)) and delta >= 0 and math.isfinite(delta)):
        raise ValueError(f"delta must be a finite real >= 0, got {delta!r}")
    times: set[int] = set()
    for record in records:
        if record.snapshots is not None:
            distances = [(snap - target).norm(p) for snap in record.snapshots]
        elif record.distances is not None:
            if record.target != target:
                raise ValueError(
                    "stats records measured a different target; "
                    "rerun the orbit against this one"
                )
            if record.p != p:
                raise ValueError(
                    f"stats records were measured at p = {record.p}, not {p}"
                )
            distances = list(record.distances)
        else:
            raise ValueError(
                f"record at time {record.n} carries no distances and no snapshots"
            )
        if all(d < delta for d in distances):
            times.add(record.n)
    return times


def orbit_to_csv(records: Sequence[OrbitRecord], operator_names: Sequence[str]) -> str:
    """Stats records as CSV: time, per-operator norms, then distances.

    Floats print with 17 significant digits so the text round-trips the
    exact values; the distance columns appear only when the records carry
    them.
    """
    if any(record.norms is None for record in records):
        raise ValueError("CSV export needs stats-mode records")
    with_distances = bool(records) and records[0].distances is not None
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["n"] + [f"norm_{name}" for name in operator_names]
    if with_distances:
        header += [f"distance_{name}" for name in operator_names]
    writer.writerow(header)
    for record in records:
        row = [str(record.n)] + [format_float(v) for v in record.norms]
        if with_distances:
            if record.distances is None:
                raise ValueError("mixed records: distances missing mid-orbit")
            row += [format_float(v) for v in record.distances]
        writer.writerow(row)
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityEstimate:
    """Best in-window fraction over all scanned positions; a finite surrogate."""

    N: int
    m_max: int
    value: float
    set_size: int

    def to_obj(self) -> dict:
        return {
            "N": self.N,
            "m_max": self.m_max,
            "value": self.value,
            "set_size": self.set_size,
        }


def upper_banach_density(
    A: Iterable[int], N: int, m_max: int
) -> DensityEstimate:
    """max over m in 0..m_max of #(A intersect [m+1, m+N]) / N, exactly.

    Counting is exact integer work over the sorted distinct elements; no
    sampling.  The value is monotone nondecreasing in m_max because it is
    a maximum over a growing range.
    """
    if not (isinstance(N, int) and not isinstance(N, bool) and N >= 1):
        raise ValueError(f"window length must be an integer >= 1, got {N!r}")
    if not (isinstance(m_max, int) and not isinstance(m_max, bool) and m_max >= 0):
        raise ValueError(f"m_max must be an integer >= 0, got {m_max!r}")
    elements = set()
    for a in A:
        if not isinstance(a, int) or isinstance(a, bool) or a < 0:
            raise ValueError(f"set elements must be integers >= 0, got {a!r}")
        elements.add(a)
    ordered = sorted(elements)

    best = 0
    lo = hi = 0
    for m in range(m_max + 1):
        while hi < len(ordered) and ordered[hi] <= m + N:
            hi += 1
        while lo < len(ordered) and ordered[lo] <= m:
            lo += 1
        if hi - lo > best:
            best = hi - lo
    return DensityEstimate(N=N, m_max=m_max, value=best / N, set_size=len(ordered))
