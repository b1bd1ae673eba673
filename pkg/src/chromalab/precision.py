"""Big-float working precision, certified floors, and JSON rendering of reals.

All analytic quantities in this package are evaluated with mpmath at a
working precision of at least 128 mantissa bits (we use 50 decimal digits,
about 166 bits).  Floors of computed reals are *certified*: the value is
re-evaluated at increasing precision until it is provably not within the
rounding error of an integer, so results cannot flip across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import mpmath
from mpmath import mp, mpf

#: Default working precision in decimal digits (>= 128-bit mantissa).
WORK_DPS = 50

#: A computed value closer than this (in ulps at working precision) to an
#: integer is treated as ambiguous and escalated.
_GUARD_DIGITS = 10


@dataclass(frozen=True)
class FloorResult:
    """Outcome of a certified floor computation.

    ``value`` is the certified floor.  If the input sits within 2^-60 of an
    integer even at escalated precision, ``ambiguous`` is set and
    ``candidates`` carries both possible floors (value, value + 1).
    """

    value: int
    ambiguous: bool = False
    candidates: tuple[int, int] | None = None


def working_precision(extra_dps: int = 0):
    """Context manager pinning mpmath to the package working precision."""
    return mp.workdps(WORK_DPS + extra_dps)


def certified_floor(evaluate: Callable[[], mpf], max_extra_dps: int = 200) -> FloorResult:
    """Floor of ``evaluate()`` with directed-rounding certainty.

    ``evaluate`` must recompute its value under the *current* mpmath
    context each time it is called (precision is raised between calls).
    """
    extra = 0
    while True:
        with working_precision(extra):
            v = evaluate()
            f = int(mpmath.floor(v))
            tol = mpf(10) ** (-(mp.dps - _GUARD_DIGITS))
            if (v - f) > tol and (f + 1 - v) > tol:
                return FloorResult(value=f)
        if extra >= max_extra_dps:
            # Genuinely sitting on an integer to 2^-60 and beyond: report
            # both candidates rather than guessing.
            return FloorResult(value=f, ambiguous=True, candidates=(f, f + 1))
        extra = max(25, extra * 2)


def real_json(v) -> dict:
    """Render a real as a decimal string (>= 30 significant digits) plus a
    machine-readable hex-float of its double rounding."""
    with working_precision():
        x = mpf(v)
        return {"dec": mpmath.nstr(x, 32), "hex": float(x).hex()}


def real_from_json(d: dict) -> mpf:
    with working_precision():
        return mpf(d["dec"])
