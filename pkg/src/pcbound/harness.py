"""Monte Carlo checks of the bounds, plus data splitting for two-stage use.

Synthetic data: false nulls draw a one-sided normal p-value with shift
``effect``; true nulls draw Uniform(0, 1). Every replication gets its own
counter-based stream keyed by (seed, rep), so results do not depend on
execution order and any single replication can be reproduced in isolation.

The coverage probes run the same production code paths a user hits: the
suffix-combination curve for u_max and the full lattice for selection
bounds. Nothing is reimplemented here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .closedtest import lattice_arrays, mask_bound
from .combine import COMBINER_NAMES, get_combiner
from .conjunction import curve_results, umax_from_values
from .core import PValueVector, ValidationError


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation setting: which data to fake and how often."""

    n: int
    k_false: int
    effect: float
    alpha: float = 0.05
    combiner: str = "fisher"
    reps: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.k_false, int) or not 0 <= self.k_false <= self.n:
            raise ValidationError(f"k_false must be in 0..{self.n}, got {self.k_false!r}")
        object.__setattr__(self, "effect", float(self.effect))
        if math.isnan(self.effect) or self.effect < 0:
            raise ValidationError(f"effect must be a non-negative real, got {self.effect!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must be inside (0, 1), got {self.alpha!r}")
        if self.combiner not in COMBINER_NAMES:
            raise ValidationError(f"unknown combiner {self.combiner!r}")
        if not isinstance(self.reps, int) or self.reps < 1:
            raise ValidationError(f"reps must be a positive integer, got {self.reps!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValidationError(f"seed must be a non-negative integer, got {self.seed!r}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k_false": self.k_false,
            "effect": self.effect,
            "alpha": self.alpha,
            "combiner": self.combiner,
            "reps": self.reps,
            "seed": self.seed,
        }


def _rep_generator(seed: int, rep: int) -> np.random.Generator:
    # Philox is counter-based: keying by (seed, rep) gives independent
    # streams without any sequential state running across replications.
    return np.random.Generator(np.random.Philox(key=np.array([seed, rep], dtype=np.uint64)))


def _draw_pvalues(spec: ScenarioSpec, rng: np.random.Generator) -> np.ndarray:
    """One replication's p-values; the first k_false entries are false nulls."""
    z = rng.standard_normal(spec.k_false) + spec.effect
    p_false = ndtr(-z)
    p_true = rng.random(spec.n - spec.k_false)
    return np.concatenate([p_false, p_true])


@dataclass(frozen=True)
class CoverageReport:
    """How often u_max stayed at or below the true number of false nulls."""

    spec: ScenarioSpec
    covered: int
    coverage: float
    se: float
    mean_u_max: float

    def to_dict(self) -> dict:
        return {
            "scenario": self.spec.to_dict(),
            "covered": self.covered,
            "coverage": self.coverage,
            "se": self.se,
            "mean_u_max": self.mean_u_max,
        }


def simulate_coverage(spec: ScenarioSpec) -> CoverageReport:
    """Empirical coverage of [u_max, n] for the number of false nulls."""
    combiner = get_combiner(spec.combiner)
    covered = 0
    u_total = 0
    for rep in range(spec.reps):
        rng = _rep_generator(spec.seed, rep)
        ps = np.sort(_draw_pvalues(spec, rng)).tolist()
        results = curve_results(ps, combiner)
        u_max = umax_from_values([r.value for r in results], spec.alpha)
        covered += u_max <= spec.k_false
        u_total += u_max
    coverage = covered / spec.reps
    return CoverageReport(
        spec=spec,
        covered=covered,
        coverage=coverage,
        se=math.sqrt(coverage * (1.0 - coverage) / spec.reps),
        mean_u_max=u_total / spec.reps,
    )


@dataclass(frozen=True)
class SelectionCoverageReport:
    """Coverage for bounds on a data-chosen subset, adjusted vs. naive.

    The naive route reruns the plain curve on just the selected p-values
    as if they had been fixed in advance; it is recorded to show what the
    adjustment buys, not as a valid procedure.
    """

    spec: ScenarioSpec
    select_size: int
    covered: int
    coverage: float
    se: float
    mean_f_alpha: float
    naive_covered: int
    naive_coverage: float
    naive_se: float
    mean_naive_bound: float

    def to_dict(self) -> dict:
        return {
            "scenario": self.spec.to_dict(),
            "select_size": self.select_size,
            "covered": self.covered,
            "coverage": self.coverage,
            "se": self.se,
            "mean_f_alpha": self.mean_f_alpha,
            "naive_covered": self.naive_covered,
            "naive_coverage": self.naive_coverage,
            "naive_se": self.naive_se,
            "mean_naive_bound": self.mean_naive_bound,
        }


def simulate_selection_coverage(spec: ScenarioSpec, select_size: int) -> SelectionCoverageReport:
    """Select the smallest p-values each replication, then bound them.

    Selection coverage means f_alpha(R) <= (true false count inside R).
    """
    if not isinstance(select_size, int) or not 1 <= select_size <= spec.n:
        raise ValidationError(f"select_size must be in 1..{spec.n}, got {select_size!r}")
    combiner = get_combiner(spec.combiner)
    covered = 0
    naive_covered = 0
    f_total = 0
    naive_total = 0
    for rep in range(spec.reps):
        rng = _rep_generator(spec.seed, rep)
        ps = _draw_pvalues(spec, rng)
        chosen = np.argsort(ps)[:select_size]
        truth = int(np.sum(chosen < spec.k_false))

        mask = 0
        for b in chosen:
            mask |= 1 << int(b)
        _, rejected, card = lattice_arrays(ps.tolist(), spec.alpha, combiner)
        f, _ = mask_bound(rejected, card, mask)
        covered += f <= truth
        f_total += f

        sub = np.sort(ps[chosen]).tolist()
        naive = umax_from_values([r.value for r in curve_results(sub, combiner)], spec.alpha)
        naive_covered += naive <= truth
        naive_total += naive
    coverage = covered / spec.reps
    naive_coverage = naive_covered / spec.reps
    return SelectionCoverageReport(
        spec=spec,
        select_size=select_size,
        covered=covered,
        coverage=coverage,
        se=math.sqrt(coverage * (1.0 - coverage) / spec.reps),
        mean_f_alpha=f_total / spec.reps,
        naive_covered=naive_covered,
        naive_coverage=naive_coverage,
        naive_se=math.sqrt(naive_coverage * (1.0 - naive_coverage) / spec.reps),
        mean_naive_bound=naive_total / spec.reps,
    )


# Stream tag for the split permutation, distinct from any replication key.
_SPLIT_STREAM = 0x73706C6974


@dataclass(frozen=True)
class SplitPlan:
    """A seeded two-stage split: explore on one part, confirm on the other."""

    exploration_ids: tuple[str, ...]
    confirmation_ids: tuple[str, ...]
    fraction: float
    seed: int

    @property
    def n_total(self) -> int:
        return len(self.exploration_ids) + len(self.confirmation_ids)

    def to_dict(self) -> dict:
        return {
            "exploration_ids": list(self.exploration_ids),
            "confirmation_ids": list(self.confirmation_ids),
            "fraction": self.fraction,
            "seed": self.seed,
            "n_exploration": len(self.exploration_ids),
            "n_confirmation": len(self.confirmation_ids),
        }


def split_dataset(vector: PValueVector, fraction: float, seed: int = 0) -> SplitPlan:
    """Randomly assign round(fraction * n) hypotheses to the exploration side.

    Both sides keep the vector's original order. Each side must end up
    non-empty, so n must be at least 2.
    """
    fraction = float(fraction)
    if math.isnan(fraction) or not 0.0 < fraction < 1.0:
        raise ValidationError(f"fraction must be inside (0, 1), got {fraction!r}")
    n = vector.n
    if n < 2:
        raise ValidationError("need at least 2 hypotheses to split")
    n_explore = int(round(fraction * n))
    n_explore = min(max(n_explore, 1), n - 1)
    rng = np.random.Generator(
        np.random.Philox(key=np.array([seed, _SPLIT_STREAM], dtype=np.uint64))
    )
    chosen = set(rng.permutation(n)[:n_explore].tolist())
    ids = vector.ids
    return SplitPlan(
        exploration_ids=tuple(ids[i] for i in range(n) if i in chosen),
        confirmation_ids=tuple(ids[i] for i in range(n) if i not in chosen),
        fraction=fraction,
        seed=seed,
    )


def load_scenario(path: "str | Path") -> tuple[ScenarioSpec, int | None]:
    """Read a scenario from JSON; returns (spec, select_size or None)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("scenario file must hold a JSON object")
    allowed = {"n", "k_false", "effect", "alpha", "combiner", "reps", "seed", "select_size"}
    extra = set(data) - allowed
    if extra:
        raise ValidationError(f"unknown scenario key(s): {', '.join(sorted(extra))}")
    select_size = data.pop("select_size", None)
    if select_size is not None and (not isinstance(select_size, int) or isinstance(select_size, bool)):
        raise ValidationError(f"select_size must be an integer, got {select_size!r}")
    required = {"n", "k_false", "effect"}
    missing = required - set(data)
    if missing:
        raise ValidationError(f"scenario is missing key(s): {', '.join(sorted(missing))}")
    try:
        spec = ScenarioSpec(**data)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None
    return spec, select_size
