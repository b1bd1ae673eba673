"""Log-domain Poisson kernel: pmf/cdf, total-variation distances, and the
constructive shifted-set mass check with explicit delta/t bookkeeping.

Masses of integer sets are computed from regularized-gamma cdf
differences (scipy); set descriptors are finite unions of integer
intervals, which covers every set the verified statements use (tails,
central windows, and their complements).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .errors import DomainError
from .rng import CounterRNG

#: Summation window: [0, lam + WINDOW_SIGMAS * sqrt(lam)].  The tail mass
#: beyond it is certified and carried as the truncation term.
WINDOW_SIGMAS = 40.0


@dataclass(frozen=True)
class PoissonSpec:
    """A Poisson law by its mean."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"Poisson mean must be positive and finite, got {self.lam}")


def poi_log_pmf(spec: PoissonSpec, k: int) -> float:
    """k ln(lam) - lam - ln k! via log-gamma."""
    if k < 0:
        raise DomainError(f"pmf support is k >= 0, got {k}")
    lam = spec.lam
    return k * math.log(lam) - lam - float(gammaln(k + 1))


def _window_end(*lams: float) -> int:
    m = max(lams)
    return int(math.ceil(m + WINDOW_SIGMAS * math.sqrt(m))) + 1


@dataclass(frozen=True)
class TVEstimate:
    """A TV distance with its certified truncation slack: the true value
    lies in [value, value + truncation_error]."""

    value: float
    truncation_error: float

    def __float__(self):
        return self.value

    @property
    def upper(self) -> float:
        return self.value + self.truncation_error


def tv_poisson(l1: float, l2: float) -> TVEstimate:
    """Total variation distance between Poi(l1) and Poi(l2) by half-L1
    summation over a certified window."""
    if l1 <= 0 or l2 <= 0:
        raise DomainError("tv_poisson requires positive means")
    end = _window_end(l1, l2)
    ks = np.arange(0, end + 1)
    p1 = stats.poisson.pmf(ks, l1)
    p2 = stats.poisson.pmf(ks, l2)
    value = 0.5 * float(np.abs(p1 - p2).sum())
    trunc = 0.5 * float(stats.poisson.sf(end, l1) + stats.poisson.sf(end, l2))
    return TVEstimate(value=value, truncation_error=trunc)


def tv_empirical(counts, spec: PoissonSpec) -> float:
    """TV distance between an empirical histogram and Poi(lam).

    ``counts`` maps k -> occurrences (dict) or is a dense array indexed
    by k.  Uses the half-L1 identity; the Poisson mass beyond the
    comparison window is included exactly (the histogram has none there).
    """
    if isinstance(counts, dict):
        hist = counts
    else:
        hist = {k: int(c) for k, c in enumerate(counts) if c}
    total = sum(hist.values())
    if total < 1:
        raise DomainError("empty histogram")
    if any(k < 0 for k in hist):
        raise DomainError("histogram keys must be non-negative")
    end = max(_window_end(spec.lam), max(hist) + 1)
    ks = np.arange(0, end + 1)
    poi = stats.poisson.pmf(ks, spec.lam)
    emp = np.zeros(end + 1)
    for k, c in hist.items():
        emp[k] = c / total
    return 0.5 * float(np.abs(emp - poi).sum() + stats.poisson.sf(end, spec.lam))


def sample_poisson_inversion(spec: PoissonSpec, size: int, seed: int,
                             stream: int = 0) -> np.ndarray:
    """Poisson variates by cdf inversion on counter-based uniforms."""
    end = _window_end(spec.lam)
    cdf = stats.poisson.cdf(np.arange(0, end + 1), spec.lam)
    rng = CounterRNG(seed, stream)
    u = np.array([rng.random() for _ in range(size)])
    return np.searchsorted(cdf, u, side="left")


# ---------------------------------------------------------------------------
# Integer interval sets


@dataclass(frozen=True)
class IntSet:
    """A finite union of integer intervals [lo, hi], hi=None meaning +inf.

    Normalized on construction: sorted, disjoint, non-adjacent.
    """

    intervals: tuple

    @staticmethod
    def of(*intervals) -> "IntSet":
        """Build from (lo, hi) pairs; hi may be None for a +inf tail."""
        items = []
        for lo, hi in intervals:
            lo = int(lo)
            if hi is not None:
                hi = int(hi)
                if hi < lo:
                    continue
            items.append((lo, hi))
        items.sort(key=lambda iv: iv[0])
        merged: list = []
        for lo, hi in items:
            if merged:
                plo, phi = merged[-1]
                if phi is None:
                    break
                if lo <= phi + 1:
                    merged[-1] = (plo, None if hi is None else max(phi, hi))
                    continue
            merged.append((lo, hi))
        return IntSet(tuple(merged))

    @staticmethod
    def empty() -> "IntSet":
        return IntSet(())

    @staticmethod
    def upper_tail(lo: int) -> "IntSet":
        return IntSet.of((lo, None))

    def is_empty(self) -> bool:
        return not self.intervals

    def shift(self, k: int) -> "IntSet":
        return IntSet.of(*((lo + k, None if hi is None else hi + k)
                           for lo, hi in self.intervals))

    def intersect(self, other: "IntSet") -> "IntSet":
        out = []
        for alo, ahi in self.intervals:
            for blo, bhi in other.intervals:
                lo = max(alo, blo)
                if ahi is None:
                    hi = bhi
                elif bhi is None:
                    hi = ahi
                else:
                    hi = min(ahi, bhi)
                if hi is None or lo <= hi:
                    out.append((lo, hi))
        return IntSet.of(*out)

    def difference(self, other: "IntSet") -> "IntSet":
        out = []
        for lo, hi in self.intervals:
            pieces = [(lo, hi)]
            for blo, bhi in other.intervals:
                next_pieces = []
                for plo, phi in pieces:
                    # cut [blo, bhi] out of [plo, phi]
                    if bhi is not None and bhi < plo:
                        next_pieces.append((plo, phi))
                        continue
                    if phi is not None and blo > phi:
                        next_pieces.append((plo, phi))
                        continue
                    if blo > plo:
                        next_pieces.append((plo, blo - 1))
                    if bhi is not None and (phi is None or bhi < phi):
                        next_pieces.append((bhi + 1, phi))
                pieces = next_pieces
            out.extend(pieces)
        return IntSet.of(*out)

    def contains(self, k: int) -> bool:
        return any(lo <= k and (hi is None or k <= hi) for lo, hi in self.intervals)

    def points(self, upper_cutoff: int):
        """Iterate members up to upper_cutoff (tails are clipped there)."""
        for lo, hi in self.intervals:
            top = upper_cutoff if hi is None else min(hi, upper_cutoff)
            yield from range(lo, top + 1)

    def is_finite(self) -> bool:
        return all(hi is not None for _, hi in self.intervals)


def poi_mass(lam: float, s: IntSet) -> float:
    """Poisson mass of an integer interval set (negative parts carry none)."""
    total = 0.0
    for lo, hi in s.intervals:
        lo = max(lo, 0)
        if hi is not None and hi < 0:
            continue
        lower = stats.poisson.cdf(lo - 1, lam) if lo > 0 else 0.0
        upper = 1.0 if hi is None else stats.poisson.cdf(hi, lam)
        total += max(0.0, float(upper - lower))
    return total


# ---------------------------------------------------------------------------
# Shifted-set mass check


@dataclass(frozen=True)
class ShiftedMassCheck:
    """Constructive finite-lambda run of the shifted-set argument.

    B is split by the central window I_t = [lam - t*r, lam + t*r] into
    B1 (outside) and B2 (inside); the shift is by r = floor(sqrt(lam)).
    Chebyshev controls the shifted B1 mass, the pointwise pmf ratio
    bound e^t controls the shifted B2 mass.
    """

    lam: float
    r: int
    epsilon: float
    delta: float
    t: float
    hypothesis_ok: bool      # Poi_lam(B) < delta
    mass_B: float
    mass_B_shifted: float
    mass_B1_shifted: float
    mass_B2_shifted: float
    ratio_bound_ok: bool     # pmf(k-r)/pmf(k) <= e^t for all k in B2, k-r >= 0
    ratio_worst_slack: float  # min over k of t - log-ratio (inf if B2 empty)
    chebyshev_ok: bool       # mass_B1_shifted <= lam / ((t-1)^2 r^2)
    b2_bound_ok: bool        # mass_B2_shifted <= (eps / 2 delta) * mass(B2)
    union_ok: bool           # mass_B_shifted <= mass_B1_shifted + mass_B2_shifted
    conclusion_ok: bool      # mass_B_shifted < epsilon

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "r": self.r,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "t": self.t,
            "hypothesis_ok": self.hypothesis_ok,
            "mass_B": self.mass_B,
            "mass_B_shifted": self.mass_B_shifted,
            "mass_B1_shifted": self.mass_B1_shifted,
            "mass_B2_shifted": self.mass_B2_shifted,
            "ratio_bound_ok": self.ratio_bound_ok,
            "ratio_worst_slack": self.ratio_worst_slack,
            "chebyshev_ok": self.chebyshev_ok,
            "b2_bound_ok": self.b2_bound_ok,
            "union_ok": self.union_ok,
            "conclusion_ok": self.conclusion_ok,
        }


def choose_delta(epsilon: float) -> float:
    """Largest dyadic delta with log(eps / (2 delta)) > sqrt(3/eps) + 1."""
    bound = (epsilon / 2) * math.exp(-(math.sqrt(3 / epsilon) + 1))
    j = 1
    while 2.0 ** -j >= bound:
        j += 1
    return 2.0 ** -j


def shifted_mass_check(lam: float, B: IntSet, epsilon: float) -> ShiftedMassCheck:
    """Run the shifted-set mass argument at finite lambda.

    delta is the largest dyadic value keeping the t-interval open; t is
    its midpoint (maximal slack on both sub-bounds).  A hypothesis
    failure (Poi_lam(B) >= delta) is reported in the result, not raised.
    """
    if lam < 4:
        raise DomainError(f"shifted_mass_check requires lambda >= 4, got {lam}")
    if not (0 < epsilon < 1):
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    r = math.isqrt(int(math.floor(lam)))  # floor(sqrt(lam)) for lam >= 1
    while (r + 1) * (r + 1) <= lam:
        r += 1
    delta = choose_delta(epsilon)
    t_lo = math.sqrt(3 / epsilon) + 1
    t_hi = math.log(epsilon / (2 * delta))
    t = 0.5 * (t_lo + t_hi)

    mass_B = poi_mass(lam, B)
    hypothesis_ok = mass_B < delta

    I_t = IntSet.of((math.ceil(lam - t * r), math.floor(lam + t * r)))
    B1 = B.difference(I_t)
    B2 = B.intersect(I_t)

    shifted = B.shift(-r)
    mass_B_shifted = poi_mass(lam, shifted)
    mass_B1_shifted = poi_mass(lam, B1.shift(-r))
    mass_B2_shifted = poi_mass(lam, B2.shift(-r))

    # pointwise ratio pmf(k - r)/pmf(k) <= e^t on B2 (B2 is inside I_t,
    # hence finite)
    log_lam = math.log(lam)
    worst = math.inf
    cutoff = int(math.floor(lam + t * r))
    for k in B2.points(cutoff):
        if k - r < 0:
            continue  # pmf is zero there; bound trivially holds
        log_ratio = float(gammaln(k + 1) - gammaln(k - r + 1)) - r * log_lam
        worst = min(worst, t - log_ratio)
    ratio_bound_ok = worst > 0

    chebyshev_ok = mass_B1_shifted <= lam / ((t - 1) ** 2 * r ** 2)
    b2_bound_ok = mass_B2_shifted <= (epsilon / (2 * delta)) * poi_mass(lam, B2)
    union_ok = mass_B_shifted <= mass_B1_shifted + mass_B2_shifted + 1e-12
    conclusion_ok = mass_B_shifted < epsilon

    return ShiftedMassCheck(
        lam=lam, r=r, epsilon=epsilon, delta=delta, t=t,
        hypothesis_ok=hypothesis_ok,
        mass_B=mass_B, mass_B_shifted=mass_B_shifted,
        mass_B1_shifted=mass_B1_shifted, mass_B2_shifted=mass_B2_shifted,
        ratio_bound_ok=ratio_bound_ok, ratio_worst_slack=worst,
        chebyshev_ok=chebyshev_ok, b2_bound_ok=b2_bound_ok,
        union_ok=union_ok, conclusion_ok=conclusion_ok,
    )
