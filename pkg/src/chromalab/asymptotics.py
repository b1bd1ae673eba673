"""Closed-form quantities of the independence-number / chromatic-number
asymptotics, evaluated in log-domain arbitrary precision.

Everything here is a pure function of integer inputs; all reals are
mpmath big-floats at the package working precision, and every floor that
feeds back into integer arithmetic is certified (see ``precision``).
Valid for n up to astronomically large values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

from .errors import BudgetExhausted, DomainError
from .precision import FloorResult, certified_floor, real_json, working_precision

#: n up to this size uses exact big-integer binomials for log2 C(n, k).
_EXACT_BINOMIAL_LIMIT = 10_000

#: Default candidate budget for the band search.
DEFAULT_BAND_CAP = 10**8


def _log2(v):
    return mp.log(v) / mp.log(2)


def alpha0(n: int):
    """Independence threshold 2log2(n) - 2log2(log2(n)) + 2log2(e/2) + 1."""
    if n < 4:
        raise DomainError(f"alpha0 requires n >= 4, got {n}")
    with working_precision():
        l2n = _log2(mpf(n))
        return 2 * l2n - 2 * _log2(l2n) + 2 * _log2(mp.e / 2) + 1


def log2_expected_ksets(n: int, k: int):
    """log2 of C(n, k) * 2^(-k(k-1)/2), the expected number of independent
    k-sets in a fair-coin random graph on n vertices.

    Exact big-integer binomials below n = 10^4; log-gamma above.
    """
    if k < 0 or k > n:
        raise DomainError(f"need 0 <= k <= n, got n={n} k={k}")
    if k == 0:
        return mpf(0)
    with working_precision():
        if n <= _EXACT_BINOMIAL_LIMIT:
            lc = _log2(mpf(math.comb(n, k)))
        else:
            lc = (
                mpmath.loggamma(mpf(n) + 1)
                - mpmath.loggamma(mpf(k) + 1)
                - mpmath.loggamma(mpf(n - k) + 1)
            ) / mp.log(2)
        return lc - mpf(k * (k - 1)) / 2


@dataclass(frozen=True)
class AsymptoticProfile:
    """All analytic quantities attached to one n."""

    n: int
    alpha0: mpf
    a: int
    log2_mu: mpf
    x: mpf
    r: int
    n_prime: int
    #: |x - (alpha0 - a)|, the finite-n gap between the two descriptions of x.
    discrepancy: mpf
    #: Set when alpha0 sits within 2^-60 of an integer; both floor
    #: candidates are then reported instead of silently picking one.
    a_ambiguous: bool = False
    a_candidates: tuple[int, int] | None = None

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "alpha0": real_json(self.alpha0),
            "a": self.a,
            "log2_mu": real_json(self.log2_mu),
            "x": real_json(self.x),
            "r": str(self.r),
            "n_prime": str(self.n_prime),
            "discrepancy": real_json(self.discrepancy),
            "a_ambiguous": self.a_ambiguous,
            "a_candidates": list(self.a_candidates) if self.a_candidates else None,
        }


def profile(n: int) -> AsymptoticProfile:
    """Full asymptotic profile at n: a, mu, x, r, n'."""
    if n < 4:
        raise DomainError(f"profile requires n >= 4, got {n}")
    fa: FloorResult = certified_floor(lambda: alpha0(n))
    a = fa.value
    with working_precision():
        lm = log2_expected_ksets(n, a) if 0 <= a <= n else mpf("-inf")
        x = lm / _log2(mpf(n))
        if lm < 0:
            r = 0  # mu < 1: floor of n^(x/2) in [0, 1)
        else:
            fr = certified_floor(lambda: mpf(2) ** (log2_expected_ksets(n, a) / 2))
            r = fr.value
        disc = abs(x - (alpha0(n) - a))
        return AsymptoticProfile(
            n=n,
            alpha0=alpha0(n),
            a=a,
            log2_mu=lm,
            x=x,
            r=r,
            n_prime=n + r * a,
            discrepancy=disc,
            a_ambiguous=fa.ambiguous,
            a_candidates=fa.candidates,
        )


def find_n_in_band(c1, c2, N: int, cap: int = DEFAULT_BAND_CAP) -> int:
    """Smallest n >= N with x(n) strictly inside (c1, c2).

    x(n) increases within each constant-a stretch and drops by about 1
    when a increments, so the scan can skip ahead using the local slope
    of x (resp. of alpha0) without passing over the first hit: steps are
    half the estimated distance and collapse to 1 near a boundary.
    """
    c1 = mpf(c1)
    c2 = mpf(c2)
    if not (0 <= c1 < c2 <= 1):
        raise DomainError(f"need 0 <= c1 < c2 <= 1, got ({c1}, {c2})")
    if N < 4:
        raise DomainError(f"band search requires N >= 4, got {N}")
    with working_precision():
        n = N
        covered = 0
        ln2 = mp.log(2)
        while covered <= cap:
            p = profile(n)
            if c1 < p.x < c2:
                return n
            if p.x <= c1:
                # climb toward c1; dx/dn ~ (a - x) / (n ln2 log2 n)
                dxdn = (p.a - p.x) / (mpf(n) * ln2 * _log2(mpf(n)))
                step = max(1, int(mpf("0.5") * (c1 - p.x) / dxdn))
            else:
                # past c2: wait for alpha0 to cross the next integer
                dadn = 2 / (mpf(n) * ln2)
                step = max(1, int(mpf("0.5") * (p.a + 1 - p.alpha0) / dadn))
            n += step
            covered += step
        raise BudgetExhausted(
            f"band search budget of {cap} candidates exhausted; last n tried {n}",
            last_tried=n,
        )


def f(n: int):
    """Leading-order chromatic number n / (alpha0(n) - 1 - 2/log 2).

    Identical to n / (2log2 n - 2log2 log2 n - 2) by the definition of
    alpha0: 2log2(e/2) + 1 - 1 - 2/log 2 = -2 exactly.
    """
    if n < 16:
        raise DomainError(f"f requires n >= 16, got {n}")
    with working_precision():
        denom = alpha0(n) - 1 - 2 / mp.log(2)
        if denom <= 0:
            raise DomainError(f"f undefined: nonpositive denominator at n={n}")
        return mpf(n) / denom


@dataclass(frozen=True)
class FGapReport:
    n: int
    n_prime: int
    a: int
    r: int
    x: mpf
    gap: mpf
    predicted: mpf
    relative_error: mpf

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "n_prime": str(self.n_prime),
            "a": self.a,
            "r": str(self.r),
            "x": real_json(self.x),
            "gap": real_json(self.gap),
            "predicted": real_json(self.predicted),
            "relative_error": real_json(self.relative_error),
        }


def f_gap(n: int) -> FGapReport:
    """f(n') - f(n) against its first-order prediction r + (1 - x) r / a."""
    p = profile(n)
    if not (0 < p.x < 1):
        raise DomainError(f"f_gap requires x(n) in (0, 1); x({n}) = {float(p.x):.4f}")
    with working_precision():
        gap = f(p.n_prime) - f(n)
        predicted = p.r + (1 - p.x) * mpf(p.r) / p.a
        rel = abs(gap - predicted) * p.a / p.r
        return FGapReport(
            n=n, n_prime=p.n_prime, a=p.a, r=p.r, x=p.x,
            gap=gap, predicted=predicted, relative_error=rel,
        )


@dataclass(frozen=True)
class YBoundReport:
    """First-moment bound on extra independent a-sets in the coupled graph."""

    n: int
    A: int
    r: int
    a: int
    sigma: dict  # t -> mpf, t in 1..a-1
    sigma_max: mpf
    argmax_t: int
    divergent: bool
    bound: mpf  # +inf when divergent

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "A": str(self.A),
            "r": str(self.r),
            "a": self.a,
            "sigma": {str(t): real_json(s) for t, s in self.sigma.items()},
            "sigma_max": real_json(self.sigma_max),
            "argmax_t": self.argmax_t,
            "divergent": self.divergent,
            "bound": "inf" if self.divergent else real_json(self.bound),
        }


def y_bound(n: int, A: int) -> YBoundReport:
    """sigma_t table and the geometric-series bound on the expected number
    of stray independent a-sets, at (n, A) with r, a from profile(n).

    sigma_t = (A+r) C(a,t) a! 2^C(t,2) / ((a-t)! (n-a)^t), evaluated in
    log domain.  The bound (r mu / (A+r)) * sum_{M>=1} (a sigma_max)^M is
    geometric-summed when a*sigma_max < 1 and flagged divergent otherwise.
    """
    if A < 1:
        raise DomainError(f"y_bound requires A >= 1, got {A}")
    p = profile(n)
    a, r = p.a, p.r
    if a < 2:
        raise DomainError(f"y_bound needs a >= 2 (n too small), got a={a}")
    with working_precision():
        ln2 = mp.log(2)
        lga1 = mpmath.loggamma(mpf(a) + 1)
        sigma = {}
        for t in range(1, a):
            ls = (
                mp.log(mpf(A + r))
                + (lga1 - mpmath.loggamma(mpf(t) + 1) - mpmath.loggamma(mpf(a - t) + 1))
                + lga1
                + mpf(t * (t - 1)) / 2 * ln2
                - mpmath.loggamma(mpf(a - t) + 1)
                - t * mp.log(mpf(n - a))
            )
            sigma[t] = mp.e ** ls
        argmax_t = max(sigma, key=lambda t: sigma[t])
        sigma_max = sigma[argmax_t]
        q = a * sigma_max
        mu = mpf(2) ** p.log2_mu
        if q >= 1:
            return YBoundReport(n=n, A=A, r=r, a=a, sigma=sigma,
                                sigma_max=sigma_max, argmax_t=argmax_t,
                                divergent=True, bound=mp.inf)
        bound = (r * mu / (A + r)) * (q / (1 - q))
        return YBoundReport(n=n, A=A, r=r, a=a, sigma=sigma,
                            sigma_max=sigma_max, argmax_t=argmax_t,
                            divergent=False, bound=bound)


@dataclass(frozen=True)
class LedgerStep:
    n_i: int
    x_i: mpf
    r_i: int
    a_i: int
    in_hypothesis_band: bool  # x_i in (epsilon, 1/2 - epsilon)


@dataclass(frozen=True)
class LedgerReport:
    """Bookkeeping for the stepped sequence n1 < n2 < ... and its
    accumulated interval-length lower bound sum r_i / (3a)."""

    c: mpf
    epsilon: mpf
    n1: int
    a: int
    M: int
    steps: tuple  # of LedgerStep, enumerated while n_i <= M
    i_max: int
    i_max_estimated: bool
    i_max_bounds: tuple[int, int] | None
    sum_r_over_3a: mpf
    crossover_n: int | None
    telescoping_ok: bool
    all_steps_in_band: bool
    a_constant: bool

    def to_json(self) -> dict:
        return {
            "c": real_json(self.c),
            "epsilon": real_json(self.epsilon),
            "n1": str(self.n1),
            "a": self.a,
            "M": str(self.M),
            "i_max": self.i_max,
            "i_max_estimated": self.i_max_estimated,
            "i_max_bounds": [str(b) for b in self.i_max_bounds] if self.i_max_bounds else None,
            "steps": [
                {"n_i": str(s.n_i), "x_i": real_json(s.x_i), "r_i": str(s.r_i),
                 "a_i": s.a_i, "in_hypothesis_band": s.in_hypothesis_band}
                for s in self.steps
            ],
            "sum_r_over_3a": real_json(self.sum_r_over_3a),
            "crossover_n": str(self.crossover_n) if self.crossover_n is not None else None,
            "telescoping_ok": self.telescoping_ok,
            "all_steps_in_band": self.all_steps_in_band,
            "a_constant": self.a_constant,
        }


def _largest_n_below_threshold(n1: int, threshold) -> int:
    """Largest n with alpha0(n) < threshold (alpha0 is increasing)."""
    with working_precision():
        lo, hi = n1, 2 * n1
        while alpha0(hi) < threshold:
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if alpha0(mid) < threshold:
                lo = mid
            else:
                hi = mid
        return lo


def _crossover_n(c, epsilon, n_floor: int = 2**10) -> int | None:
    """Smallest n where r(n)/(3 a(n)) >= n^c, using the conservative band
    edge x = 1/2 - 4*epsilon for r(n) ~ n^(x/2).

    An asymptotic-scale inequality; at desk scale the crossover sits far
    beyond enumerable n, so this is a pure analytic binary search.
    """
    with working_precision():
        x_lo = mpf(1) / 2 - 4 * epsilon
        rate = x_lo / 2 - c
        if rate <= 0:
            return None

        def h(n):
            a = certified_floor(lambda: alpha0(n)).value
            return rate * _log2(mpf(n)) - _log2(mpf(3 * a))

        lo = n_floor
        hi = lo
        while h(hi) < 0:
            hi *= 4
            if hi > 1 << 20000:
                return None
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if h(mid) < 0:
                lo = mid
            else:
                hi = mid
        return hi


def ledger(c, n1_hint: int, enumerate_cap: int = 100_000,
           band_cap: int = DEFAULT_BAND_CAP) -> LedgerReport:
    """Build the stepped-sequence ledger for exponent c in (0, 1/4).

    epsilon = (1/4)(1/4 - c); n1 is the first n >= n1_hint with x(n) in
    (1/2 - 4 epsilon, 1/2 - 3 epsilon); M is the largest n keeping
    alpha0(n) < a(n1) + 1/2 - 2 epsilon; steps follow n_{i+1} = n_i + r_i a.
    When the enumeration cap is hit, i_max is reported as an interval
    estimate from both endpoint step sizes, never as a point value.
    """
    with working_precision():
        c = mpf(c)
        if not (0 < c < mpf(1) / 4):
            raise DomainError(f"ledger requires c in (0, 1/4), got {c}")
        if n1_hint < 16:
            raise DomainError(f"ledger requires n1_hint >= 16, got {n1_hint}")
        epsilon = (mpf(1) / 4) * (mpf(1) / 4 - c)
        band = (mpf(1) / 2 - 4 * epsilon, mpf(1) / 2 - 3 * epsilon)
        n1 = find_n_in_band(band[0], band[1], n1_hint, cap=band_cap)
        p1 = profile(n1)
        a = p1.a
        M = _largest_n_below_threshold(n1, a + mpf(1) / 2 - 2 * epsilon)

        steps = []
        n_i = n1
        capped = False
        while n_i <= M:
            if len(steps) >= enumerate_cap:
                capped = True
                break
            p = profile(n_i)
            in_band = bool(epsilon < p.x < mpf(1) / 2 - epsilon)
            steps.append(LedgerStep(n_i=n_i, x_i=p.x, r_i=p.r, a_i=p.a,
                                    in_hypothesis_band=in_band))
            if p.r == 0:
                raise BudgetExhausted(
                    f"ledger stalled at n={n_i}: r=0 (mu < 1)", last_tried=n_i)
            n_i = n_i + p.r * a

        if capped:
            i_max = len(steps)
            r_here = steps[-1].r_i
            r_end = profile(M).r
            remaining = M - steps[-1].n_i
            lo = i_max + remaining // (max(r_here, r_end) * a)
            hi = i_max + remaining // (max(1, min(r_here, r_end)) * a) + 1
            bounds = (lo, hi)
            estimated = True
        else:
            i_max = len(steps)
            bounds = None
            estimated = False

        sum_r = mp.fsum(mpf(s.r_i) for s in steps[:-1]) if len(steps) > 1 else mpf(0)
        sum_r_over_3a = sum_r / (3 * a)

        telescoping_ok = (not capped) and len(steps) >= 1 and (
            sum(s.r_i * a for s in steps[:-1]) == steps[-1].n_i - n1
        )
        return LedgerReport(
            c=c, epsilon=epsilon, n1=n1, a=a, M=M,
            steps=tuple(steps), i_max=i_max,
            i_max_estimated=estimated, i_max_bounds=bounds,
            sum_r_over_3a=sum_r_over_3a,
            crossover_n=_crossover_n(c, epsilon),
            telescoping_ok=telescoping_ok,
            all_steps_in_band=all(s.in_hypothesis_band for s in steps),
            a_constant=all(s.a_i == a for s in steps),
        )
