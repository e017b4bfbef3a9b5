"""Closed testing over the full intersection lattice, for post-hoc selection.

After looking at the data and picking a subset R of hypotheses, "how many
of the ones I picked are false?" needs selection-adjusted evidence. Closed
testing supplies it: test every non-empty intersection of the n hypotheses,
reject an intersection only if it and all its supersets have local p-values
at or below alpha, and then

    f_alpha(R) = |R| - max{ |I| : I subseteq R, I non-empty, not rejected }

(with f_alpha(R) = |R| when everything inside R is rejected) is a lower
bound on the number of false hypotheses in R, simultaneously over every
possible R. The lattice has 2^n - 1 nodes, so this brute-force route is
capped at LATTICE_CAP hypotheses.

Subsets are encoded as bitmasks over the vector's id order: bit b set means
ids[b] is in the subset. Arrays are indexed by mask, entry 0 (empty set)
unused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combine import Combiner, get_combiner
from .conjunction import lower_bound_umax
from .core import AnalysisConfig, PValueVector, SelectionSet, ValidationError

LATTICE_CAP = 20


class CapExceededError(ValueError):
    """The vector is too large for exhaustive closed testing."""


def lattice_arrays(
    ps: "list[float] | tuple[float, ...] | np.ndarray",
    alpha: float,
    combiner: Combiner,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local p-values, closed rejections, and cardinalities for all masks.

    Returns (local_p, rejected, card), each of length 2^n and indexed by
    subset bitmask. rejected[mask] is the closed-testing decision: the
    local test at mask and at every superset came in at or below alpha.
    """
    n = len(ps)
    if n > LATTICE_CAP:
        raise CapExceededError(
            f"closed testing enumerates 2^n subsets; n = {n} exceeds the cap of {LATTICE_CAP}"
        )
    if n == 0:
        raise ValidationError("need at least one hypothesis")

    # Subset-sum table by doubling: after consuming term b, bit b of the
    # index says whether that term is included.
    sums = np.zeros(1)
    card = np.zeros(1, dtype=np.int8)
    one = np.ones(1, dtype=np.int8)
    for p in ps:
        t = combiner.term(float(p))
        sums = np.concatenate([sums, sums + t])
        card = np.concatenate([card, card + one])

    size = 1 << n
    local_p = np.ones(size)
    for m in range(1, n + 1):
        sel = np.flatnonzero(card == m)
        stats = combiner.statistic_array(sums[sel], m)
        local_p[sel] = combiner.survival_array(stats, m)
    for b in range(n):
        # Singleton tests are the elementary p-values themselves.
        local_p[1 << b] = float(ps[b])

    rejected = local_p <= alpha
    rejected[0] = False
    # Close downward, one cardinality level at a time. A mask at level c
    # reads only its immediate supersets at level c+1, which are final by
    # the time the loop reaches c.
    levels = [np.flatnonzero(card == c) for c in range(n + 1)]
    for c in range(n - 1, 0, -1):
        level = levels[c]
        for b in range(n):
            bit = 1 << b
            sub = level[(level & bit) == 0]
            rejected[sub] &= rejected[sub | bit]
    return local_p, rejected, card


def mask_bound(rejected: np.ndarray, card: np.ndarray, mask: int) -> tuple[int, int]:
    """(f_alpha, witness_mask) for the selection encoded by ``mask``.

    witness_mask is a largest non-rejected subset of the selection, or 0
    when every non-empty subset is rejected.
    """
    idx = np.arange(rejected.size)
    inside = (idx & ~mask) == 0
    surviving = np.flatnonzero(inside & ~rejected)
    surviving = surviving[surviving != 0]
    r = int(card[mask])
    if surviving.size == 0:
        return r, 0
    witness = int(surviving[np.argmax(card[surviving])])
    return r - int(card[witness]), witness


@dataclass(frozen=True)
class IntersectionLattice:
    """All 2^n - 1 intersection tests for one vector, closure applied."""

    ids: tuple[str, ...]
    ps: tuple[float, ...]
    alpha: float
    combiner_name: str
    local_p: np.ndarray
    rejected: np.ndarray
    card: np.ndarray

    @property
    def n(self) -> int:
        return len(self.ids)

    def mask_of(self, ids: "tuple[str, ...] | list[str]") -> int:
        position = {h: b for b, h in enumerate(self.ids)}
        mask = 0
        unknown = []
        for i in ids:
            b = position.get(i)
            if b is None:
                unknown.append(i)
            else:
                mask |= 1 << b
        if unknown:
            raise ValidationError(f"unknown id(s) in selection: {', '.join(sorted(unknown))}")
        if mask == 0:
            raise ValidationError("selection must contain at least one id")
        return mask

    def ids_of(self, mask: int) -> tuple[str, ...]:
        return tuple(h for b, h in enumerate(self.ids) if mask >> b & 1)

    def local_p_of(self, ids: "tuple[str, ...] | list[str]") -> float:
        return float(self.local_p[self.mask_of(ids)])


def build_lattice(vector: PValueVector, config: AnalysisConfig | None = None) -> IntersectionLattice:
    config = config or AnalysisConfig()
    combiner = get_combiner(config.combiner)
    local_p, rejected, card = lattice_arrays(vector.ps, config.alpha, combiner)
    return IntersectionLattice(
        ids=vector.ids,
        ps=vector.ps,
        alpha=config.alpha,
        combiner_name=config.combiner,
        local_p=local_p,
        rejected=rejected,
        card=card,
    )


@dataclass(frozen=True)
class SelectionBound:
    """f_alpha for one post-hoc selection, with the subset that pins it.

    All bounds from the same lattice hold simultaneously at level alpha,
    however many selections are queried.
    """

    f_alpha: int
    selection: tuple[str, ...]
    witness: tuple[str, ...]
    alpha: float
    combiner: str

    @property
    def selection_size(self) -> int:
        return len(self.selection)

    def to_dict(self) -> dict:
        return {
            "f_alpha": self.f_alpha,
            "selection": list(self.selection),
            "selection_size": self.selection_size,
            "witness": list(self.witness),
            "alpha": self.alpha,
            "combiner": self.combiner,
            "simultaneous": True,
        }


def selection_bound(lattice: IntersectionLattice, ids: "tuple[str, ...] | list[str]") -> SelectionBound:
    """Lower confidence bound on the number of false hypotheses among ids."""
    mask = lattice.mask_of(SelectionSet(tuple(ids)).ids)
    f, witness_mask = mask_bound(lattice.rejected, lattice.card, mask)
    return SelectionBound(
        f_alpha=f,
        selection=lattice.ids_of(mask),
        witness=lattice.ids_of(witness_mask),
        alpha=lattice.alpha,
        combiner=lattice.combiner_name,
    )


def full_set_bound(lattice: IntersectionLattice) -> int:
    """f_alpha for the selection 'everything'."""
    full = (1 << lattice.n) - 1
    f, _ = mask_bound(lattice.rejected, lattice.card, full)
    return f


@dataclass(frozen=True)
class EquivalenceCheck:
    """Comparison of the conjunction-curve bound with full-set closed testing."""

    equal: bool
    u_max: int
    closed_bound: int
    n: int
    alpha: float
    combiner: str

    def __bool__(self) -> bool:
        return self.equal


def check_shortcut_equivalence(
    vector: PValueVector, config: AnalysisConfig | None = None
) -> EquivalenceCheck:
    """Verify that the curve's u_max matches closed testing over the full set.

    The curve is the shortcut: among size-m subsets the one holding the m
    largest p-values maximizes every monotone combiner, so if any size-m
    subset survives closure that one does, and those sets are exactly what
    the curve tests. This check runs the brute force anyway and compares.
    """
    config = config or AnalysisConfig()
    u_max = lower_bound_umax(vector, config).u_max
    closed = full_set_bound(build_lattice(vector, config))
    return EquivalenceCheck(
        equal=u_max == closed,
        u_max=u_max,
        closed_bound=closed,
        n=vector.n,
        alpha=config.alpha,
        combiner=config.combiner,
    )
