"""Sufficient combining functions and the survival-function kernels they need.

A combining function maps m p-values to a single p-value. The two properties
that make one usable for intersection tests are (1) it is non-decreasing in
every coordinate and (2) when fed i.i.d. Uniform(0,1) inputs its output is
stochastically at least Uniform(0,1). Fisher's method is the reference
implementation here; Stouffer's z-average is provided as a second instance
of the same contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr, ndtri

COMBINER_NAMES = ("fisher", "stouffer")

# Normal quantiles are unbounded at 0 and 1; inputs at the boundary are
# clamped to this distance and flagged instead of propagating infinities.
STOUFFER_EPS = 1e-300

# Below this, exp(-x/2) is a normal double and the Poisson sum is evaluated
# directly; above it the series moves to log space.
_LOG_SPACE_CUTOFF = 700.0


@dataclass(frozen=True)
class CombineResult:
    """One combined p-value plus the statistic it came from.

    ``degenerate`` marks inputs at the boundary of [0, 1] that were handled
    by taking the limit (Fisher: a zero input forces value 0; Stouffer:
    boundary inputs are clamped to STOUFFER_EPS).
    """

    value: float
    m: int
    combiner_name: str
    statistic: float
    degenerate: bool = False


def chisq_even_df_survival(df: int, x: float) -> float:
    """P(chi-squared with even df >= x), by the exact closed form.

    For even df with m = df/2 the survival function is the Poisson tail

        exp(-x/2) * sum_{j=0}^{m-1} (x/2)^j / j!

    Terms are accumulated with compensated summation (math.fsum) and the
    result is clamped to [0, 1]. When exp(-x/2) would underflow, the series
    is evaluated in log space so very large statistics underflow to 0
    instead of producing NaN.

    Raises ValueError for odd or non-positive df, or x < 0.
    """
    if df <= 0 or df % 2 != 0:
        raise ValueError(f"df must be a positive even integer, got {df}")
    if math.isnan(x) or x < 0:
        raise ValueError(f"x must be a non-negative real, got {x}")
    if math.isinf(x):
        return 0.0
    m = df // 2
    half = x / 2.0
    if half < _LOG_SPACE_CUTOFF:
        term = math.exp(-half)
        terms = [term]
        for j in range(1, m):
            term *= half / j
            terms.append(term)
        total = math.fsum(terms)
    else:
        log_half = math.log(half)
        log_terms = [-half + j * log_half - math.lgamma(j + 1) for j in range(m)]
        peak = max(log_terms)
        # exp(peak) underflows to 0 exactly when the true value is below
        # double resolution; the multiply keeps that graceful.
        total = math.exp(peak) * math.fsum(math.exp(t - peak) for t in log_terms)
    return min(max(total, 0.0), 1.0)


def _validated(ps: Iterable[float]) -> list[float]:
    out = [float(p) for p in ps]
    if not out:
        raise ValueError("need at least one p-value to combine")
    for p in out:
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"p-value outside [0, 1]: {p!r}")
    return out


class Combiner:
    """Base class: a named, coordinate-wise monotone p-value combiner.

    Subclasses provide an additive per-input term, the statistic formed
    from a term sum, and the statistic's survival function. ``combine`` is
    the public entry point; ``suffix_results`` combines every suffix of an
    ascending sequence in one pass, which is what the conjunction curve
    needs.
    """

    name: str = ""

    def term(self, p: float) -> float:
        raise NotImplementedError

    def statistic_of(self, term_sum: float, m: int) -> float:
        raise NotImplementedError

    def survival(self, statistic: float, m: int) -> float:
        raise NotImplementedError

    def survival_array(self, statistics: np.ndarray, m: int) -> np.ndarray:
        return np.array([self.survival(float(s), m) for s in statistics])

    def statistic_array(self, term_sums: np.ndarray, m: int) -> np.ndarray:
        return np.array([self.statistic_of(float(t), m) for t in term_sums])

    def is_degenerate_input(self, p: float) -> bool:
        raise NotImplementedError

    def combine(self, ps: Iterable[float]) -> CombineResult:
        ps = _validated(ps)
        m = len(ps)
        degenerate = any(self.is_degenerate_input(p) for p in ps)
        if m == 1 and not degenerate:
            # The survival of the m=1 statistic is exactly the input; return
            # it unchanged rather than round-tripping through transcendentals.
            return CombineResult(ps[0], 1, self.name, self.term_statistic(ps[0]), False)
        total = math.fsum(self.term(p) for p in ps)
        stat = self.statistic_of(total, m)
        value = self.survival(stat, m)
        return CombineResult(min(max(value, 0.0), 1.0), m, self.name, stat, degenerate)

    def term_statistic(self, p: float) -> float:
        return self.statistic_of(self.term(p), 1)

    def suffix_results(self, sorted_ps: Sequence[float]) -> list[CombineResult]:
        """Combine every suffix sorted_ps[i:] of an ascending sequence.

        One pass from the right with a compensated running sum: n term
        evaluations total instead of the quadratic cost of combining each
        suffix from scratch. Entry i is the combination of the n-i largest
        values.
        """
        n = len(sorted_ps)
        if n == 0:
            raise ValueError("need at least one p-value")
        out: list[CombineResult | None] = [None] * n
        total = 0.0
        comp = 0.0
        degenerate = False
        for i in range(n - 1, -1, -1):
            p = sorted_ps[i]
            degenerate = degenerate or self.is_degenerate_input(p)
            t = self.term(p)
            # Neumaier update; compensation is meaningless once infinities
            # enter, so fall back to plain accumulation there.
            if math.isfinite(t) and math.isfinite(total):
                s = total + t
                if abs(total) >= abs(t):
                    comp += (total - s) + t
                else:
                    comp += (t - s) + total
                total = s
            else:
                total += t
                comp = 0.0
            m = n - i
            if m == 1:
                out[i] = self.combine(sorted_ps[i:])
            else:
                stat = self.statistic_of(total + comp, m)
                value = self.survival(stat, m)
                out[i] = CombineResult(
                    min(max(value, 0.0), 1.0), m, self.name, stat, degenerate
                )
        return out  # type: ignore[return-value]


class FisherCombiner(Combiner):
    """Fisher's method: -2 * sum(log p) referred to chi-squared with 2m df."""

    name = "fisher"

    def term(self, p: float) -> float:
        if p == 0.0:
            return -math.inf
        return math.log(p)

    def statistic_of(self, term_sum: float, m: int) -> float:
        return abs(-2.0 * term_sum)  # abs() normalizes -0.0 from all-ones input

    def survival(self, statistic: float, m: int) -> float:
        return chisq_even_df_survival(2 * m, statistic)

    def survival_array(self, statistics: np.ndarray, m: int) -> np.ndarray:
        out = np.zeros_like(statistics, dtype=float)
        finite = np.isfinite(statistics)
        half = statistics[finite] / 2.0
        term = np.exp(-half)
        total = term.copy()
        for j in range(1, m):
            term = term * (half / j)
            total += term
        out[finite] = np.clip(total, 0.0, 1.0)
        return out

    def statistic_array(self, term_sums: np.ndarray, m: int) -> np.ndarray:
        return np.abs(-2.0 * term_sums)

    def is_degenerate_input(self, p: float) -> bool:
        return p == 0.0

    def combine(self, ps: Iterable[float]) -> CombineResult:
        ps = _validated(ps)
        m = len(ps)
        if any(p == 0.0 for p in ps):
            # The statistic diverges; 0 is the correct limit and keeps the
            # downstream bounds well defined.
            return CombineResult(0.0, m, self.name, math.inf, degenerate=True)
        if m == 1:
            return CombineResult(ps[0], 1, self.name, -2.0 * math.log(ps[0]), False)
        stat = abs(-2.0 * math.fsum(math.log(p) for p in ps))
        return CombineResult(
            chisq_even_df_survival(2 * m, stat), m, self.name, stat, False
        )


class StoufferCombiner(Combiner):
    """Stouffer's method: mean normal quantile referred back to the normal."""

    name = "stouffer"

    def term(self, p: float) -> float:
        p = min(max(p, STOUFFER_EPS), 1.0 - STOUFFER_EPS)
        return float(-ndtri(p))  # upper-tail z score

    def statistic_of(self, term_sum: float, m: int) -> float:
        return term_sum / math.sqrt(m)

    def survival(self, statistic: float, m: int) -> float:
        return float(ndtr(-statistic))

    def survival_array(self, statistics: np.ndarray, m: int) -> np.ndarray:
        return np.asarray(ndtr(-statistics), dtype=float)

    def statistic_array(self, term_sums: np.ndarray, m: int) -> np.ndarray:
        return term_sums / math.sqrt(m)

    def is_degenerate_input(self, p: float) -> bool:
        return p <= 0.0 or p >= 1.0


_COMBINERS: dict[str, Combiner] = {
    "fisher": FisherCombiner(),
    "stouffer": StoufferCombiner(),
}


def get_combiner(name: str) -> Combiner:
    """Look up a combiner by its registered name (fisher | stouffer)."""
    try:
        return _COMBINERS[name]
    except KeyError:
        raise ValueError(
            f"unknown combiner {name!r}; choose one of {', '.join(COMBINER_NAMES)}"
        ) from None


def combine(combiner: Combiner | str, ps: Iterable[float]) -> CombineResult:
    """Apply a combiner (by instance or name) to a sequence of p-values."""
    if isinstance(combiner, str):
        combiner = get_combiner(combiner)
    return combiner.combine(ps)


def fisher_combine(ps: Iterable[float]) -> CombineResult:
    return _COMBINERS["fisher"].combine(ps)


def stouffer_combine(ps: Iterable[float]) -> CombineResult:
    return _COMBINERS["stouffer"].combine(ps)
