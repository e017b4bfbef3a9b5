"""End-to-end checks with pinned tolerances and runtime caps.

Each test prints one visible PASS/FAIL line through capsys.disabled so the
whole gate can be read off a plain pytest run.
"""

import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from pcbound.closedtest import build_lattice, check_shortcut_equivalence, mask_bound
from pcbound.combine import fisher_combine, get_combiner, chisq_even_df_survival
from pcbound.core import AnalysisConfig, Hypothesis, PValueVector
from pcbound.harness import ScenarioSpec, simulate_coverage, simulate_selection_coverage, split_dataset

from oracles import mp_chisq_sf

DATA = Path(__file__).parent / "data" / "basic.csv"

# Fixture curve for (0.01, 0.2, 0.8) under Fisher, pinned with mpmath.
GOLDEN_CURVE = (0.04505611968252525, 0.45321303419972964, 0.8)


def _report(capsys, name, ok, detail=""):
    line = f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    with capsys.disabled():
        print("\n" + line, flush=True)
    assert ok, line


def _vector(ps):
    return PValueVector(tuple(Hypothesis(f"v{i}", float(p)) for i, p in enumerate(ps)))


def test_single_pvalue_identity(capsys):
    # Combining one p-value must return it unchanged: n-th curve entry
    # equals the largest p exactly.
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    ps = 10.0 ** rng.uniform(-10, 0, size=1000)
    worst = max(abs(fisher_combine([float(p)]).value - float(p)) for p in ps)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 1.0
    _report(capsys, "single-p identity", ok, f"max |err| {worst:.2e}, {elapsed:.2f}s")


def test_survival_kernel_against_high_precision(capsys):
    start = time.perf_counter()
    worst = 0.0
    for df in range(2, 62, 2):
        for x in np.linspace(0.0, 200.0, 50):
            got = chisq_even_df_survival(df, float(x))
            want = float(mp_chisq_sf(df, float(x)))
            err = abs(got - want) / want if want > 0 else abs(got - want)
            worst = max(worst, err)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 10.0
    _report(capsys, "survival kernel vs 60-digit reference", ok, f"max rel err {worst:.2e}, {elapsed:.1f}s")


def test_curve_bound_equals_closed_testing(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(202)
    alphas = (0.01, 0.05, 0.2)
    mismatches = 0
    checked = 0
    for case in range(500):
        n = int(rng.integers(1, 11))
        raw = rng.random(n)
        ps = np.where(rng.random(n) < 0.4, raw * 0.02, raw).tolist()
        alpha = alphas[case % 3]
        vec = _vector(ps)
        for combiner in ("fisher", "stouffer"):
            check = check_shortcut_equivalence(vec, AnalysisConfig(alpha, combiner))
            checked += 1
            mismatches += not check.equal
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 30.0
    _report(
        capsys,
        "u_max equals full-set closed testing",
        ok,
        f"{checked} checks, {mismatches} mismatches, {elapsed:.1f}s",
    )


def test_interval_coverage(capsys):
    start = time.perf_counter()
    results = []
    seed = 4000
    for k in (0, 2, 4, 8):
        for effect in (0.0, 2.0, 3.0):
            seed += 1
            spec = ScenarioSpec(
                n=10, k_false=k, effect=effect, alpha=0.05, reps=10_000, seed=seed
            )
            results.append((k, effect, simulate_coverage(spec).coverage))
    elapsed = time.perf_counter() - start
    worst = min(c for _, _, c in results)
    ok = worst >= 0.9435 and elapsed < 120.0
    _report(
        capsys,
        "interval coverage across 12 scenarios",
        ok,
        f"min coverage {worst:.4f} (need >= 0.9435), {elapsed:.1f}s",
    )


def test_selection_coverage_after_picking_minima(capsys):
    start = time.perf_counter()
    spec = ScenarioSpec(n=8, k_false=0, effect=0.0, alpha=0.05, reps=10_000, seed=777)
    rep = simulate_selection_coverage(spec, select_size=3)
    elapsed = time.perf_counter() - start
    ok = rep.coverage >= 0.9435 and elapsed < 120.0
    _report(
        capsys,
        "selection-adjusted coverage, top 3 of 8 nulls",
        ok,
        f"adjusted {rep.coverage:.4f} (need >= 0.9435), naive {rep.naive_coverage:.4f}, {elapsed:.1f}s",
    )


def test_structural_invariants(capsys):
    start = time.perf_counter()
    violations = []

    # Closed rejections are upward-closed: checked on every mask of a
    # 10-hypothesis lattice.
    rng = np.random.default_rng(303)
    ps = np.where(rng.random(10) < 0.4, rng.random(10) * 0.02, rng.random(10)).tolist()
    lat = build_lattice(_vector(ps), AnalysisConfig(0.05, "fisher"))
    for mask in range(1, 1 << 10):
        if lat.rejected[mask]:
            for b in range(10):
                if not lat.rejected[mask | (1 << b)]:
                    violations.append(("closure", mask, b))

    # Growing a selection never lowers its bound: every selection of an
    # 8-hypothesis lattice against every one-element extension.
    ps8 = np.where(rng.random(8) < 0.5, rng.random(8) * 0.03, rng.random(8)).tolist()
    lat8 = build_lattice(_vector(ps8), AnalysisConfig(0.05, "fisher"))
    f_of = {
        mask: mask_bound(lat8.rejected, lat8.card, mask)[0] for mask in range(1, 1 << 8)
    }
    for mask in range(1, 1 << 8):
        for b in range(8):
            grown = mask | (1 << b)
            if grown != mask and f_of[grown] < f_of[mask]:
                violations.append(("selection monotonicity", mask, b))

    # Combined p-values are monotone in every coordinate: 10^4 random cases.
    for case in range(10_000):
        name = ("fisher", "stouffer")[case % 2]
        combiner = get_combiner(name)
        m = int(rng.integers(1, 7))
        base = (rng.random(m) * 0.999 + 1e-6).tolist()
        i = int(rng.integers(0, m))
        raised = list(base)
        raised[i] = raised[i] + (1.0 - raised[i]) * float(rng.random())
        if combiner.combine(raised).value < combiner.combine(base).value:
            violations.append(("combiner monotonicity", name, case))

    elapsed = time.perf_counter() - start
    ok = not violations
    _report(
        capsys,
        "structural invariants",
        ok,
        f"{len(violations)} violations, {elapsed:.1f}s" + (f"; first: {violations[0]}" if violations else ""),
    )


def test_split_counts_are_exact(capsys):
    v500 = PValueVector(tuple(Hypothesis(f"a{i}", 0.5) for i in range(500)))
    v100 = PValueVector(tuple(Hypothesis(f"b{i}", 0.5) for i in range(100)))
    n1 = len(split_dataset(v500, 0.2, seed=1).exploration_ids)
    n2 = len(split_dataset(v100, 0.15, seed=1).exploration_ids)
    ok = n1 == 100 and n2 == 15
    _report(capsys, "split sizes", ok, f"500@0.2 -> {n1}, 100@0.15 -> {n2}")


def test_cli_golden_output(capsys):
    proc = subprocess.run(
        [sys.executable, "-m", "pcbound.cli", "bound", str(DATA), "--format", "json"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    ok = proc.returncode == 0
    detail = f"exit {proc.returncode}"
    if ok:
        got = json.loads(proc.stdout)
        curve_ok = all(
            abs(row["p_value"] - want) <= 1e-9
            for row, want in zip(got["curve"], GOLDEN_CURVE)
        )
        ok = got["u_max"] == 1 and got["n"] == 3 and curve_ok
        detail = f"u_max {got['u_max']}, curve within 1e-9: {curve_ok}"
    _report(capsys, "command-line golden run", ok, detail)
