"""Acceptance criteria 1-10.

Each test appends one PASS/FAIL line to ``RESULTS`` (printed at the end of the
pytest run, or directly when this file is executed as a script) and then
asserts. Tolerances and runtime budgets are pinned as module constants.
"""
import json
import math
import sys
import time

import numpy as np
import pytest

from realzeros.asymptotics import predicted_total, window
from realzeros.covariance import CovarianceModel
from realzeros.harness import run
from realzeros.kac_rice import expected_zeros_total, integrand_values, partition_counts
from realzeros.moments import moments_diagonal, moments_direct, moments_spectral
from realzeros.simulation import count_real_zeros, sample_coefficients, simulate
from realzeros.sturm import sturm_count

from conftest import catalog

RESULTS: list[str] = []

C1_TOL = 1e-6
C1_BUDGET = 1.0
C2_CASES, C2_DIAG_TOL, C2_SPEC_TOL, C2_BUDGET = 50, 1e-9, 1e-6, 30.0
C3_ABS, C3_RATIO_BAND, C3_BUDGET = 2.0, (0.8, 1.2), 120.0
C4_FACTOR, C4_BUDGET = 3.0, 120.0
C5_PRED_REL, C5_INDEP_REL, C5_BUDGET = 0.25, 0.55, 120.0
C6_WINDOW_REL, C6_OUTER_FACTOR, C6_BUDGET = 0.15, 3.0, 60.0
C7_SIGMAS, C7_TRIALS, C7_BUDGET = 3.0, 2000, 60.0
C8_SAMPLES, C8_MAX_DEGREE, C8_BUDGET = 500, 48, 120.0
C9_BAND, C9_POINTS, C9_BUDGET = (0.85, 1.15), 10, 10.0
C10_BUDGET = 60.0


def record(num, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} -- {detail}"
    RESULTS.append(line)
    return ok


def rel_err(a, b, scale):
    return abs(a - b) / scale if scale > 0 else abs(a - b)


def test_c01_degree_one_exactness():
    t0 = time.perf_counter()
    models = [CovarianceModel.exponential(r) for r in (0.0, 0.3, 0.9, -0.5)] + [CovarianceModel.independent()]
    worst = max(abs(expected_zeros_total(m, 1).value - 1.0) for m in models)
    means = [simulate(m, 1, 10 ** 4, master_seed=1).mean_zeros for m in models]
    elapsed = time.perf_counter() - t0
    ok = worst <= C1_TOL and all(mu == 1.0 for mu in means) and elapsed < C1_BUDGET
    record(1, "degree-1 exactness", ok,
           f"max|KR-1|={worst:.2e} (tol {C1_TOL:g}), MC means={means}, {elapsed:.2f}s (< {C1_BUDGET:g}s)")
    assert ok


def test_c02_triple_method_agreement():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    models = catalog()
    worst_diag = worst_spec = 0.0
    spectral_cases = 0
    for _ in range(C2_CASES):
        m = models[rng.integers(len(models))]
        n = int(rng.integers(1, 201))
        x = float(rng.uniform(-0.999, 0.999))
        ref = moments_direct(m, n, x)
        # B is measured against sqrt(AC), its Cauchy-Schwarz bound, since B can cross zero.
        scales = (ref.A, math.sqrt(ref.A * ref.C), ref.C)
        d = moments_diagonal(m, n, x)
        worst_diag = max(worst_diag, *(rel_err(u, v, s) for u, v, s in zip((d.A, d.B, d.C), (ref.A, ref.B, ref.C), scales)))
        if m.has_density:
            s = moments_spectral(m, n, x)
            spectral_cases += 1
            worst_spec = max(worst_spec, *(rel_err(u, v, sc) for u, v, sc in zip((s.A, s.B, s.C), (ref.A, ref.B, ref.C), scales)))
    elapsed = time.perf_counter() - t0
    ok = worst_diag <= C2_DIAG_TOL and worst_spec <= C2_SPEC_TOL and elapsed < C2_BUDGET
    record(2, "triple-method moment agreement", ok,
           f"diag max rel {worst_diag:.1e} (<= {C2_DIAG_TOL:g}), spectral max rel {worst_spec:.1e} "
           f"(<= {C2_SPEC_TOL:g}, {spectral_cases} cases), {elapsed:.1f}s")
    assert ok


def test_c03_kac_law_independent():
    t0 = time.perf_counter()
    ns = [2 ** 8, 2 ** 10, 2 ** 12, 2 ** 14]
    vals = [expected_zeros_total(CovarianceModel.independent(), n).value for n in ns]
    preds = [predicted_total(n).value for n in ns]
    gaps = [abs(v - p) for v, p in zip(vals, preds)]
    ratios = [v / p for v, p in zip(vals, preds)]
    # "increases toward 1" is read as: each step moves the ratio strictly closer to 1.
    closing = all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))
    literal_increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    elapsed = time.perf_counter() - t0
    lo, hi = C3_RATIO_BAND
    ok = max(gaps) <= C3_ABS and all(lo <= r <= hi for r in ratios) and closing and elapsed < C3_BUDGET
    record(3, "Kac law (independent)", ok,
           f"gaps {[round(g, 4) for g in gaps]} (<= {C3_ABS}), ratios {[round(r, 4) for r in ratios]} in [{lo}, {hi}], "
           f"monotone approach to 1: {closing} (ratio itself increasing: {literal_increasing}), {elapsed:.1f}s")
    assert ok


def test_c04_universality():
    t0 = time.perf_counter()
    n = 2 ** 12
    base = expected_zeros_total(CovarianceModel.independent(), n).value
    models = [CovarianceModel.exponential(0.3), CovarianceModel.exponential(0.45), CovarianceModel.tabulated([1.0, 0.4])]
    diffs = [abs(expected_zeros_total(m, n).value - base) for m in models]
    bound = C4_FACTOR * math.log(math.log(n))
    elapsed = time.perf_counter() - t0
    ok = max(diffs) <= bound and elapsed < C4_BUDGET
    record(4, "non-vanishing density universality", ok,
           f"|model - independent| = {[round(d, 4) for d in diffs]} (<= {bound:.4f}), {elapsed:.1f}s")
    assert ok


def test_c05_constant_covariance_halving():
    t0 = time.perf_counter()
    model = CovarianceModel.constant(0.5)
    details, ok = [], True
    for n in (2 ** 10, 2 ** 12):
        c = expected_zeros_total(model, n).value
        ind = expected_zeros_total(CovarianceModel.independent(), n).value
        pred = predicted_total(n, "constant_covariance").value
        # cross-check one point of the integrand against the O(n^2) direct sums
        x = 1 - window(n)[1]
        d = moments_direct(model, n, x)
        direct_val = math.sqrt(d.A * d.C - d.B ** 2) / (math.pi * d.A)
        assert abs(integrand_values(model, n, [x])[0] - direct_val) <= 1e-9 * direct_val
        rel_pred = abs(c - pred) / pred
        rel_ind = abs(c - ind) / ind
        ok &= rel_pred <= C5_PRED_REL and rel_ind <= C5_INDEP_REL and c < ind
        details.append(f"n={n}: E={c:.4f}, (1/pi)ln n={pred:.4f} (off {rel_pred:.1%}, tol {C5_PRED_REL:.0%}), "
                       f"independent={ind:.4f} (off {rel_ind:.1%}, tol {C5_INDEP_REL:.0%})")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < C5_BUDGET
    record(5, "constant-covariance halving", ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert ok


def test_c06_partition_structure():
    t0 = time.perf_counter()
    n = 2 ** 14
    rep = partition_counts(CovarianceModel.independent(), n)
    target = math.log(n) / (2 * math.pi)
    windows = [rep.window_negative.value, rep.window_positive.value]
    outer = [e.value for e in rep.outer]
    bound = C6_OUTER_FACTOR * math.log(math.log(n))
    elapsed = time.perf_counter() - t0
    ok = (all(abs(w - target) / target <= C6_WINDOW_REL for w in windows)
          and all(o <= bound for o in outer) and elapsed < C6_BUDGET)
    record(6, "partition structure", ok,
           f"window {[round(w, 4) for w in windows]} vs (1/2pi)ln n={target:.4f} (+-{C6_WINDOW_REL:.0%}), "
           f"outer {[round(o, 4) for o in outer]} (<= {bound:.3f}), {elapsed:.1f}s")
    assert ok


def test_c07_monte_carlo_vs_kac_rice():
    t0 = time.perf_counter()
    details, ok = [], True
    for m in (CovarianceModel.independent(), CovarianceModel.exponential(0.3)):
        s = simulate(m, 50, C7_TRIALS, master_seed=0)
        kr = expected_zeros_total(m, 50).value
        z = abs(s.mean_zeros - kr) / s.std_error
        ok &= z <= C7_SIGMAS
        details.append(f"{m.label}: mean {s.mean_zeros:.4f} +- {s.std_error:.4f}, KR {kr:.4f} ({z:.2f} se)")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < C7_BUDGET
    record(7, "Monte Carlo vs Kac-Rice", ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert ok


def test_c08_counter_vs_sturm():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    models = catalog()
    mismatches = []
    for i in range(C8_SAMPLES):
        m = models[i % len(models)]
        n = int(rng.integers(1, C8_MAX_DEGREE + 1))
        c = sample_coefficients(m, n, int(rng.integers(2 ** 63))).values
        if count_real_zeros(c) != sturm_count(c):
            mismatches.append((m.label, n))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < C8_BUDGET
    record(8, "grid counter vs Sturm oracle", ok,
           f"{len(mismatches)} mismatches in {C8_SAMPLES} samples, degrees <= {C8_MAX_DEGREE}, {elapsed:.1f}s")
    assert ok


def test_c09_integrand_collapse():
    t0 = time.perf_counter()
    n = 2 ** 14
    delta, eps = window(n)
    # interior points of a log-spaced grid on [delta, eps]
    ys = np.geomspace(delta, eps, C9_POINTS + 2)[1:-1]
    vals = math.pi * integrand_values(CovarianceModel.independent(), n, 1 - ys) * 2 * ys
    elapsed = time.perf_counter() - t0
    lo, hi = C9_BAND
    ok = bool(np.all((vals >= lo) & (vals <= hi))) and elapsed < C9_BUDGET
    record(9, "integrand collapse to 1/(2y)", ok,
           f"pi*integrand*2y in [{vals.min():.4f}, {vals.max():.4f}] (band [{lo}, {hi}]), {elapsed:.2f}s")
    assert ok


def test_c10_determinism(tmp_path):
    t0 = time.perf_counter()
    texts = []
    for i, workers in enumerate((1, 2, 1)):
        cfg = {
            "models": [{"kind": "independent"}, {"kind": "exponential", "rho": 0.3},
                       {"kind": "tabulated", "gamma": [1.0, 0.4]}],
            "degrees": [1, 20, 64], "trials": 200, "master_seed": 99,
            "outputs": {"csv_path": str(tmp_path / f"r{i}.csv"), "json_path": str(tmp_path / f"m{i}.json")},
            "comparisons": {"kac_rice": True, "monte_carlo": True, "prediction": True, "partition": True},
            "workers": workers,
        }
        written = run(cfg)
        texts.append(written["csv"].read_bytes() + written["partition"].read_bytes())
    elapsed = time.perf_counter() - t0
    ok = texts[0] == texts[1] == texts[2] and elapsed < C10_BUDGET
    record(10, "end-to-end determinism", ok,
           f"3 runs (workers 1, 2, 1) byte-identical: {texts[0] == texts[1] == texts[2]}, {elapsed:.1f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
