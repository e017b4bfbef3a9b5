"""Partial-conjunction p-values and the lower confidence bound they yield.

For n hypotheses, the claim "at least u of them are false" is tested by
combining the n-u+1 largest p-values. Scanning u upward, the largest u
whose combined value (and all before it) stays at or below alpha is a
valid 1-alpha lower confidence bound on the number of false hypotheses.
The scan must stop at the first value above alpha even if later values
dip back under; only the prefix rule keeps the coverage guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .combine import CombineResult, Combiner, get_combiner
from .core import AnalysisConfig, PValueVector


@dataclass(frozen=True)
class ConjunctionCurve:
    """The full map u -> combined p-value for u = 1..n.

    values[u-1] tests "at least u false"; statistics[u-1] is the combining
    statistic behind it. Entry n combines only the largest p-value and
    equals it exactly.
    """

    values: tuple[float, ...]
    statistics: tuple[float, ...]
    combiner_name: str

    @property
    def n(self) -> int:
        return len(self.values)

    def value(self, u: int) -> float:
        if not 1 <= u <= self.n:
            raise ValueError(f"u must be in 1..{self.n}, got {u}")
        return self.values[u - 1]


@dataclass(frozen=True)
class ConfidenceBound:
    """u_max: with confidence 1-alpha, at least u_max hypotheses are false."""

    u_max: int
    alpha: float
    n: int

    @property
    def interval(self) -> tuple[int, int]:
        return (self.u_max, self.n)


@dataclass(frozen=True)
class BoundRow:
    u: int
    m: int
    statistic: float
    p_value: float
    le_alpha: bool


@dataclass(frozen=True)
class BoundReport:
    """Everything the bound command reports for one vector."""

    n: int
    alpha: float
    combiner: str
    u_max: int
    rows: tuple[BoundRow, ...]
    independence_assumed: bool = True

    @property
    def interval(self) -> tuple[int, int]:
        return (self.u_max, self.n)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "combiner": self.combiner,
            "u_max": self.u_max,
            "interval": list(self.interval),
            "independence_assumed": self.independence_assumed,
            "curve": [
                {
                    "u": r.u,
                    "m": r.m,
                    "statistic": r.statistic if math.isfinite(r.statistic) else None,
                    "p_value": r.p_value,
                    "le_alpha": r.le_alpha,
                }
                for r in self.rows
            ],
        }

    def format_table(self) -> str:
        lines = [
            f"n = {self.n}   combiner = {self.combiner}   alpha = {self.alpha:g}",
            f"u_max = {self.u_max}   "
            f"{100 * (1 - self.alpha):g}% confidence interval for #false: "
            f"[{self.u_max}, {self.n}]",
            "",
            f"{'u':>4}  {'m':>4}  {'statistic':>14}  {'p-value':>14}  <= alpha",
        ]
        for r in self.rows:
            stat = f"{r.statistic:.8g}" if math.isfinite(r.statistic) else "inf"
            lines.append(
                f"{r.u:>4}  {r.m:>4}  {stat:>14}  {r.p_value:>14.8g}  "
                f"{'yes' if r.le_alpha else 'no'}"
            )
        return "\n".join(lines)


def curve_results(sorted_ps: Sequence[float], combiner: Combiner) -> list[CombineResult]:
    """Suffix combinations of an ascending p-value sequence; entry u-1 tests u."""
    return combiner.suffix_results(sorted_ps)


def curve_from_sorted(sorted_ps: Sequence[float], combiner: Combiner | str) -> ConjunctionCurve:
    if isinstance(combiner, str):
        combiner = get_combiner(combiner)
    results = combiner.suffix_results(sorted_ps)
    return ConjunctionCurve(
        values=tuple(r.value for r in results),
        statistics=tuple(r.statistic for r in results),
        combiner_name=combiner.name,
    )


def pc_curve(vector: PValueVector, combiner: Combiner | str = "fisher") -> ConjunctionCurve:
    """The conjunction curve for a vector, sorting its p-values first."""
    return curve_from_sorted(vector.sorted_ps(), combiner)


def pc_pvalue(vector: PValueVector, u: int, combiner: Combiner | str = "fisher") -> float:
    """The combined p-value testing "at least u of n are false"."""
    if isinstance(combiner, str):
        combiner = get_combiner(combiner)
    sorted_ps = vector.sorted_ps()
    if not 1 <= u <= len(sorted_ps):
        raise ValueError(f"u must be in 1..{len(sorted_ps)}, got {u}")
    return combiner.combine(sorted_ps[u - 1 :]).value


def umax_from_values(values: Sequence[float], alpha: float) -> int:
    """Length of the leading run of values at or below alpha.

    The comparison is <=, not <: a value exactly at alpha still rejects.
    """
    u_max = 0
    for v in values:
        if v <= alpha:
            u_max += 1
        else:
            break
    return u_max


def lower_bound_umax(
    vector: PValueVector, config: AnalysisConfig | None = None
) -> ConfidenceBound:
    config = config or AnalysisConfig()
    curve = pc_curve(vector, config.combiner)
    return ConfidenceBound(
        u_max=umax_from_values(curve.values, config.alpha),
        alpha=config.alpha,
        n=curve.n,
    )


def report_bound(vector: PValueVector, config: AnalysisConfig | None = None) -> BoundReport:
    """Bound plus the full curve, ready for table or JSON output."""
    config = config or AnalysisConfig()
    combiner = get_combiner(config.combiner)
    results = combiner.suffix_results(vector.sorted_ps())
    n = len(results)
    u_max = umax_from_values([r.value for r in results], config.alpha)
    rows = tuple(
        BoundRow(
            u=i + 1,
            m=n - i,
            statistic=r.statistic,
            p_value=r.value,
            le_alpha=r.value <= config.alpha,
        )
        for i, r in enumerate(results)
    )
    return BoundReport(
        n=n, alpha=config.alpha, combiner=config.combiner, u_max=u_max, rows=rows
    )


def family_reports(
    vector: PValueVector, config: AnalysisConfig | None = None
) -> dict[str, BoundReport]:
    """Per-family bounds at the Bonferroni-split level alpha / #families.

    Splitting alpha across families keeps all the per-family intervals
    simultaneously valid.
    """
    config = config or AnalysisConfig()
    groups = vector.by_family()
    adjusted = AnalysisConfig(config.alpha / len(groups), config.combiner)
    return {fam: report_bound(v, adjusted) for fam, v in groups.items()}
