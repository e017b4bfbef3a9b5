import itertools

import numpy as np
import pytest

from pcbound.closedtest import (
    LATTICE_CAP,
    CapExceededError,
    build_lattice,
    check_shortcut_equivalence,
    full_set_bound,
    selection_bound,
)
from pcbound.conjunction import lower_bound_umax
from pcbound.core import AnalysisConfig, Hypothesis, PValueVector, ValidationError

from oracles import oracle_closed_rejections, oracle_selection_bound

# Local p-values for (h1, h2, h3) = (0.001, 0.9, 0.01) under Fisher,
# pinned with mpmath at 60 digits; keys are index subsets.
FIXTURE_LOCAL = {
    (0,): 0.001,
    (1,): 0.9,
    (2,): 0.01,
    (0, 1): 0.007211804215175967,
    (0, 2): 0.00012512925464970229,
    (1, 2): 0.05139477631481326,
    (0, 1, 2): 0.0007209951349001153,
}


def make_vector(ps, prefix="h"):
    return PValueVector(tuple(Hypothesis(f"{prefix}{i + 1}", p) for i, p in enumerate(ps)))


def fixture_lattice(alpha=0.05):
    return build_lattice(make_vector([0.001, 0.9, 0.01]), AnalysisConfig(alpha, "fisher"))


def test_lattice_local_pvalues_match_reference():
    lat = fixture_lattice()
    for subset, want in FIXTURE_LOCAL.items():
        ids = tuple(f"h{i + 1}" for i in subset)
        assert lat.local_p_of(ids) == pytest.approx(want, rel=1e-12), subset


def test_singleton_local_p_is_the_raw_p_exactly():
    lat = fixture_lattice()
    assert lat.local_p_of(["h1"]) == 0.001
    assert lat.local_p_of(["h2"]) == 0.9
    assert lat.local_p_of(["h3"]) == 0.01


def test_selection_bound_fixture():
    lat = fixture_lattice()
    b1 = selection_bound(lat, ["h1"])
    assert b1.f_alpha == 1
    assert b1.selection == ("h1",)
    assert b1.witness == ()
    # h3 alone clears alpha but its superset {h2, h3} does not, so closed
    # testing refuses to count it.
    b3 = selection_bound(lat, ["h3"])
    assert b3.f_alpha == 0
    assert b3.witness == ("h3",)
    ball = selection_bound(lat, ["h1", "h2", "h3"])
    assert ball.f_alpha == 1
    assert len(ball.witness) == 2


def test_selection_bound_second_fixture():
    lat = build_lattice(make_vector([1e-6, 0.5, 0.6]), AnalysisConfig(0.05, "fisher"))
    assert selection_bound(lat, ["h2", "h3"]).f_alpha == 0
    assert selection_bound(lat, ["h1"]).f_alpha == 1
    assert selection_bound(lat, ["h1", "h2", "h3"]).f_alpha == 1


def test_selection_bound_to_dict_shape():
    d = selection_bound(fixture_lattice(), ["h1", "h3"]).to_dict()
    assert d["simultaneous"] is True
    assert d["selection_size"] == 2
    assert set(d) == {
        "f_alpha",
        "selection",
        "selection_size",
        "witness",
        "alpha",
        "combiner",
        "simultaneous",
    }


def test_rejections_match_brute_force_oracle():
    rng = np.random.default_rng(31)
    for case in range(25):
        n = int(rng.integers(2, 7))
        # Mix of active and null-looking values.
        ps = np.where(rng.random(n) < 0.4, rng.random(n) * 0.02, rng.random(n)).tolist()
        combiner = ("fisher", "stouffer")[case % 2]
        alpha = (0.01, 0.05, 0.2)[case % 3]
        _, want_rejected = oracle_closed_rejections(ps, alpha, combiner)
        lat = build_lattice(make_vector(ps), AnalysisConfig(alpha, combiner))
        for subset, want in want_rejected.items():
            mask = 0
            for i in subset:
                mask |= 1 << i
            assert bool(lat.rejected[mask]) == want, (ps, subset, combiner, alpha)


def test_selection_bounds_match_brute_force_oracle():
    rng = np.random.default_rng(32)
    for case in range(15):
        n = int(rng.integers(2, 7))
        ps = np.where(rng.random(n) < 0.5, rng.random(n) * 0.03, rng.random(n)).tolist()
        combiner = ("fisher", "stouffer")[case % 2]
        lat = build_lattice(make_vector(ps), AnalysisConfig(0.05, combiner))
        for size in range(1, n + 1):
            chosen = rng.choice(n, size=size, replace=False).tolist()
            ids = [f"h{i + 1}" for i in chosen]
            want = oracle_selection_bound(ps, 0.05, combiner, chosen)
            assert selection_bound(lat, ids).f_alpha == want, (ps, chosen, combiner)


def test_full_set_bound_equals_umax():
    rng = np.random.default_rng(33)
    for case in range(40):
        n = int(rng.integers(1, 11))
        ps = np.where(rng.random(n) < 0.4, rng.random(n) * 0.02, rng.random(n)).tolist()
        combiner = ("fisher", "stouffer")[case % 2]
        alpha = (0.01, 0.05, 0.2)[case % 3]
        config = AnalysisConfig(alpha, combiner)
        check = check_shortcut_equivalence(make_vector(ps), config)
        assert check.equal, (ps, combiner, alpha, check)
        assert bool(check)
        assert check.u_max == lower_bound_umax(make_vector(ps), config).u_max


def test_rejected_set_is_upward_closed():
    lat = build_lattice(
        make_vector([0.004, 0.3, 0.02, 0.6, 0.01]), AnalysisConfig(0.05, "fisher")
    )
    n = lat.n
    for mask in range(1, 1 << n):
        if lat.rejected[mask]:
            for b in range(n):
                sup = mask | (1 << b)
                assert lat.rejected[sup], (mask, b)


def test_adding_to_selection_never_lowers_the_bound():
    lat = build_lattice(
        make_vector([0.001, 0.04, 0.2, 0.009, 0.5, 0.03]), AnalysisConfig(0.05, "fisher")
    )
    ids = lat.ids
    for size in range(1, len(ids)):
        for chosen in itertools.combinations(ids, size):
            base = selection_bound(lat, list(chosen)).f_alpha
            for extra in set(ids) - set(chosen):
                grown = selection_bound(lat, list(chosen) + [extra]).f_alpha
                assert grown >= base


def test_witness_is_a_valid_certificate():
    lat = build_lattice(
        make_vector([0.001, 0.04, 0.2, 0.009, 0.5, 0.03]), AnalysisConfig(0.05, "fisher")
    )
    for size in (2, 4, 6):
        for chosen in itertools.combinations(lat.ids, size):
            b = selection_bound(lat, list(chosen))
            assert 0 <= b.f_alpha <= size
            assert len(b.witness) == size - b.f_alpha
            assert set(b.witness) <= set(chosen)
            if b.witness:
                assert not lat.rejected[lat.mask_of(b.witness)]


def test_zero_pvalue_in_lattice():
    lat = build_lattice(make_vector([0.0, 0.5, 0.9]), AnalysisConfig(0.05, "fisher"))
    assert lat.local_p_of(["h1"]) == 0.0
    assert lat.local_p_of(["h1", "h2", "h3"]) == 0.0
    assert selection_bound(lat, ["h1"]).f_alpha == 1
    assert selection_bound(lat, ["h2", "h3"]).f_alpha == 0


def test_cap_is_enforced():
    ps = [0.5] * (LATTICE_CAP + 1)
    with pytest.raises(CapExceededError, match="21"):
        build_lattice(make_vector(ps))


def test_cap_boundary_builds():
    # Exactly at the cap must still work. The signal has to be strong
    # enough to survive dilution across all 19 nulls in the full set.
    ps = [1e-8] + [0.5] * (LATTICE_CAP - 1)
    lat = build_lattice(make_vector(ps), AnalysisConfig(0.05, "fisher"))
    assert selection_bound(lat, ["h1"]).f_alpha == 1
    assert full_set_bound(lat) == lower_bound_umax(make_vector(ps)).u_max


def test_mask_round_trip_and_errors():
    lat = fixture_lattice()
    mask = lat.mask_of(("h3", "h1"))
    assert lat.ids_of(mask) == ("h1", "h3")
    with pytest.raises(ValidationError, match="zz"):
        lat.mask_of(("h1", "zz"))
    with pytest.raises(ValidationError):
        selection_bound(lat, [])
    with pytest.raises(ValidationError, match="duplicate"):
        selection_bound(lat, ["h1", "h1"])


def test_single_hypothesis_lattice():
    lat = build_lattice(make_vector([0.01]), AnalysisConfig(0.05, "fisher"))
    assert selection_bound(lat, ["h1"]).f_alpha == 1
    assert full_set_bound(lat) == 1
    lat2 = build_lattice(make_vector([0.2]), AnalysisConfig(0.05, "fisher"))
    assert selection_bound(lat2, ["h1"]).f_alpha == 0
