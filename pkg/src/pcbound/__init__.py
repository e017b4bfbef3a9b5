"""Confidence bounds on the number of false null hypotheses.

Given p-values for n hypotheses, this package answers "at least how many
of these nulls are false?" with a 1-alpha lower confidence bound, both for
the whole collection (conjunction curve) and for any data-driven selection
(exhaustive closed testing). A Monte Carlo harness checks the coverage
claims, and CLI / HTTP front ends expose the lot.
"""

from .combine import (
    COMBINER_NAMES,
    CombineResult,
    Combiner,
    FisherCombiner,
    StoufferCombiner,
    chisq_even_df_survival,
    combine,
    fisher_combine,
    get_combiner,
    stouffer_combine,
)
from .core import (
    DEFAULT_FAMILY,
    AnalysisConfig,
    Hypothesis,
    PValueVector,
    SelectionSet,
    ValidationError,
    load_pvalues,
    parse_pvalues,
    resolve_selection,
    write_pvalues,
)
from .conjunction import (
    BoundReport,
    ConfidenceBound,
    ConjunctionCurve,
    family_reports,
    lower_bound_umax,
    pc_curve,
    pc_pvalue,
    report_bound,
    umax_from_values,
)
from .closedtest import (
    LATTICE_CAP,
    CapExceededError,
    EquivalenceCheck,
    IntersectionLattice,
    SelectionBound,
    build_lattice,
    check_shortcut_equivalence,
    full_set_bound,
    selection_bound,
)
from .harness import (
    CoverageReport,
    ScenarioSpec,
    SelectionCoverageReport,
    SplitPlan,
    simulate_coverage,
    simulate_selection_coverage,
    split_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "COMBINER_NAMES",
    "CombineResult",
    "Combiner",
    "FisherCombiner",
    "StoufferCombiner",
    "chisq_even_df_survival",
    "combine",
    "fisher_combine",
    "get_combiner",
    "stouffer_combine",
    "DEFAULT_FAMILY",
    "AnalysisConfig",
    "Hypothesis",
    "PValueVector",
    "SelectionSet",
    "ValidationError",
    "load_pvalues",
    "parse_pvalues",
    "resolve_selection",
    "write_pvalues",
    "BoundReport",
    "ConfidenceBound",
    "ConjunctionCurve",
    "family_reports",
    "lower_bound_umax",
    "pc_curve",
    "pc_pvalue",
    "report_bound",
    "umax_from_values",
    "LATTICE_CAP",
    "CapExceededError",
    "EquivalenceCheck",
    "IntersectionLattice",
    "SelectionBound",
    "build_lattice",
    "check_shortcut_equivalence",
    "full_set_bound",
    "selection_bound",
    "CoverageReport",
    "ScenarioSpec",
    "SelectionCoverageReport",
    "SplitPlan",
    "simulate_coverage",
    "simulate_selection_coverage",
    "split_dataset",
    "__version__",
]
