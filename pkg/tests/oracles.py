"""Independent reference implementations the tests compare against.

Two layers, deliberately separate from the package code paths:

* high-precision scalar kernels via mpmath (60 significant digits), for
  pinning survival functions and combined p-values;
* a brute-force closed-testing procedure written with itertools and
  scipy.stats, for checking the lattice logic on small n.

Nothing here imports from pcbound.
"""

from __future__ import annotations

import itertools
import math

import mpmath as mp
from scipy.stats import chi2, norm

mp.mp.dps = 60


def mp_chisq_sf(df: int, x: float) -> mp.mpf:
    return mp.gammainc(mp.mpf(df) / 2, mp.mpf(x) / 2, mp.inf, regularized=True)


def mp_norm_sf(z) -> mp.mpf:
    return mp.erfc(mp.mpf(z) / mp.sqrt(2)) / 2


def mp_norm_isf(p) -> mp.mpf:
    # Upper-tail quantile: P(Z >= result) = p.
    return mp.sqrt(2) * mp.erfinv(1 - 2 * mp.mpf(p))


def mp_fisher(ps) -> tuple[mp.mpf, mp.mpf]:
    """(statistic, combined p) for Fisher's method at high precision."""
    stat = -2 * mp.fsum(mp.log(mp.mpf(p)) for p in ps)
    return stat, mp_chisq_sf(2 * len(ps), stat)


def mp_stouffer(ps) -> tuple[mp.mpf, mp.mpf]:
    """(z statistic, combined p) for Stouffer's method at high precision."""
    z = mp.fsum(mp_norm_isf(p) for p in ps) / mp.sqrt(len(ps))
    return z, mp_norm_sf(z)


# ---------------------------------------------------------------------------
# Brute-force closed testing, subsets as sorted index tuples.

_CLAMP = 1e-300


def oracle_local_p(ps, combiner: str) -> float:
    m = len(ps)
    if combiner == "fisher":
        if any(p == 0.0 for p in ps):
            return 0.0
        stat = -2.0 * math.fsum(math.log(p) for p in ps)
        return float(chi2.sf(stat, 2 * m))
    if combiner == "stouffer":
        z = math.fsum(
            float(norm.isf(min(max(p, _CLAMP), 1.0 - _CLAMP))) for p in ps
        ) / math.sqrt(m)
        return float(norm.sf(z))
    raise ValueError(combiner)


def oracle_closed_rejections(ps, alpha: float, combiner: str):
    """(local, rejected) dicts over every non-empty index subset.

    rejected[sub] is True when sub and every superset of sub have local
    p-values at or below alpha, checked by explicit enumeration.
    """
    n = len(ps)
    idx = tuple(range(n))
    local: dict[tuple, float] = {}
    for r in range(1, n + 1):
        for sub in itertools.combinations(idx, r):
            local[sub] = oracle_local_p([ps[i] for i in sub], combiner)
    rejected: dict[tuple, bool] = {}
    for sub in local:
        rest = [i for i in idx if i not in sub]
        ok = local[sub] <= alpha
        if ok:
            for extra in range(1, len(rest) + 1):
                for addition in itertools.combinations(rest, extra):
                    if local[tuple(sorted(sub + addition))] > alpha:
                        ok = False
                        break
                if not ok:
                    break
        rejected[sub] = ok
    return local, rejected


def oracle_selection_bound(ps, alpha: float, combiner: str, selection) -> int:
    """f_alpha for the given selected indices, by brute force."""
    _, rejected = oracle_closed_rejections(ps, alpha, combiner)
    sel = tuple(sorted(selection))
    largest_open = 0
    for r in range(1, len(sel) + 1):
        for sub in itertools.combinations(sel, r):
            if not rejected[sub]:
                largest_open = max(largest_open, r)
    return len(sel) - largest_open


def oracle_umax(ps, alpha: float, combiner: str) -> int:
    """u_max from first principles: combine each suffix, scan the prefix."""
    sorted_ps = sorted(ps)
    n = len(sorted_ps)
    u_max = 0
    for u in range(1, n + 1):
        if oracle_local_p(sorted_ps[u - 1 :], combiner) <= alpha:
            u_max = u
        else:
            break
    return u_max
