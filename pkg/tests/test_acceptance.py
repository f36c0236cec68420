"""One test per acceptance criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines as
they are produced; they are also repeated in the terminal summary.
"""
import math
import time

import numpy as np
from scipy import stats

from helpers import ASYM_PARAMS, SYM_PARAMS, combined_z, discretised_ouvg_step, gamma_ou_log_mgf_quad
from ouvg.cli import main
from ouvg.diagnostics import empirical_log_mgf, sample_moments, validate_ouvg
from ouvg.ou import OUVGParams, TimeGrid, gamma_ou_increment, simulate_skeleton, step_ouvg
from ouvg.pricing import (
    AsianSpec,
    ForwardCurve,
    SpotModel1F,
    SpotModel2F,
    StorageSpec,
    intrinsic_value,
    price_asian,
    price_storage,
    simulate_spot_paths,
)
from ouvg.sampling import RngStream
from ouvg.special_functions import dilog
from ouvg.vg import VGParams

P1A = OUVGParams.from_values(**ASYM_PARAMS)
P1B = OUVGParams.from_values(**SYM_PARAMS)
N_S = 10**6
Z_MAX = 4.0
FLAT = ForwardCurve.flat(15.0)
MODEL_2F = SpotModel2F(FLAT, P1A, VGParams(-0.05, 0.2, 0.15))
MODEL_1F = SpotModel1F(FLAT, SYM_PARAMS["k"], SYM_PARAMS["nu"], SYM_PARAMS["sigma"])
DAILY = TimeGrid.uniform(1.0, 365)


def fmt_z(z):
    return "[" + ", ".join(f"{v:+.2f}" for v in z) + "]"


def test_criterion_01_dilogarithm(acceptance_line):
    start = time.perf_counter()
    closed = {1.0: math.pi ** 2 / 6, -1.0: -math.pi ** 2 / 12, 0.5: math.pi ** 2 / 12 - math.log(2) ** 2 / 2}
    closed_err = max(abs(dilog(z) - v) for z, v in closed.items())
    z = np.linspace(0.0, 1.0, 100)
    dup_err = float(np.max(np.abs(dilog(z) + dilog(-z) - dilog(z * z) / 2)))
    elapsed = time.perf_counter() - start
    ok = closed_err <= 1e-12 and dup_err <= 1e-10 and elapsed < 1.0
    acceptance_line(1, ok, f"closed-form err {closed_err:.1e}, duplication err {dup_err:.1e}, {elapsed:.3f}s")
    assert ok


def test_criterion_02_ouvg_one_step_moments(acceptance_line):
    start = time.perf_counter()
    report = validate_ouvg(P1A, 0.2, 1, N_S, seed=2002)
    elapsed = time.perf_counter() - start
    ok = all(abs(z) < Z_MAX for z in report.z_scores) and elapsed < 60
    acceptance_line(2, ok, f"z = {fmt_z(report.z_scores)}, {elapsed:.1f}s")
    assert ok, report.to_text()


def test_criterion_03_ousvg_moments(acceptance_line):
    start = time.perf_counter()
    report = validate_ouvg(P1B, 0.2, 1, N_S, seed=2003, symmetric=True)
    elapsed = time.perf_counter() - start
    assert report.theoretical[2] == 0.0
    _, z_var, z_skew, z_kurt = report.z_scores
    ok = max(abs(z_var), abs(z_skew), abs(z_kurt)) < Z_MAX and elapsed < 30
    acceptance_line(3, ok, f"z(var, skew vs 0, kurt) = {fmt_z((z_var, z_skew, z_kurt))}, {elapsed:.1f}s")
    assert ok, report.to_text()


def test_criterion_04_multi_step_exactness(acceptance_line):
    five = simulate_skeleton(P1A, TimeGrid.uniform(1.0, 5), N_S, 2004).values[:, -1]
    one = simulate_skeleton(P1A, TimeGrid.uniform(1.0, 1), N_S, 2005).values[:, -1]
    a, b = sample_moments(five, seed=1), sample_moments(one, seed=2)
    z = [combined_z(a.values[i], a.stderr[i], b.values[i], b.stderr[i]) for i in range(4)]
    ok = all(abs(v) < Z_MAX for v in z)
    acceptance_line(4, ok, f"5 x 1/5 vs 1 x 1 combined z = {fmt_z(z)}")
    assert ok


def test_criterion_05_gamma_ou_increment_law(acceptance_line):
    alpha, beta, k, dt = 2.0, 3.0, 0.5, 0.25
    y = gamma_ou_increment(alpha, beta, k, dt, RngStream(2006), size=N_S)
    z = []
    for u in (-3.0, 0.3, 1.2):
        est, se = empirical_log_mgf(y, u)
        z.append((est - gamma_ou_log_mgf_quad(u, alpha, beta, k, dt)) / se)
    ok = all(abs(v) < Z_MAX for v in z)
    acceptance_line(5, ok, f"log-MGF z at u = -3, 0.3, 1.2: {fmt_z(z)}")
    assert ok


def test_criterion_06_discretisation_oracle(acceptance_line):
    oracle = discretised_ouvg_step(0.2, 0.025, 0.02, 0.3, 0.2, 10**5, 2000, 777)
    exact = step_ouvg(0.0, P1A, 0.2, RngStream(2007), size=10**5)
    p = stats.ks_2samp(exact, oracle).pvalue
    ok = p > 1e-3
    acceptance_line(6, ok, f"two-sample KS p = {p:.3f} (2000 substeps, 1e5 draws each)")
    assert ok


def test_criterion_07_martingale(acceptance_line):
    grid = TimeGrid(np.array([0.0, 0.25, 0.5, 1.0]))
    worst = {}
    for name, model in (("2F", MODEL_2F), ("1F", MODEL_1F)):
        s = simulate_spot_paths(model, grid, N_S, 2008).values[:, 1:] / FLAT(grid.t[1:])
        z = (s.mean(axis=0) - 1) / (s.std(axis=0, ddof=1) / math.sqrt(N_S))
        worst[name] = z
    ok = all(np.all(np.abs(z) < Z_MAX) for z in worst.values())
    acceptance_line(7, ok, "z at t = 0.25, 0.5, 1: " + "; ".join(f"{k} {fmt_z(v)}" for k, v in worst.items()))
    assert ok


def test_criterion_08_asian(acceptance_line):
    single = price_asian(MODEL_2F, AsianSpec(0.0, [1.0]), 10**5, 2009)
    k0_ok = abs(single.price - FLAT(1.0)) < 3 * single.error
    spec = AsianSpec.equally_spaced(15.0, 1.0, 365)
    runs = [price_asian(MODEL_2F, spec, n, 2010 + i) for i, n in enumerate((10**3, 10**4, 10**5))]
    ratios = [runs[i].error / runs[i + 1].error / math.sqrt(10) for i in range(2)]
    scale_ok = all(0.8 <= r <= 1.2 for r in ratios)
    gap = combined_z(runs[1].price, runs[1].error, runs[2].price, runs[2].error)
    ok = k0_ok and scale_ok and abs(gap) < 3 and all(r.price > 0 for r in runs)
    acceptance_line(
        8, ok,
        f"K=0 price {single.price:.4f} +/- {single.error:.4f} vs F=15; ATM prices "
        + ", ".join(f"{r.price:.4f} ({r.error:.4f})" for r in runs)
        + f"; error ratio / sqrt(10) = {ratios[0]:.3f}, {ratios[1]:.3f}; 1e4 vs 1e5 z = {gap:+.2f}",
    )
    assert ok


def test_criterion_09_storage(acceptance_line):
    frozen = SpotModel1F(FLAT, SYM_PARAMS["k"], SYM_PARAMS["nu"], 0.0)
    zero_spec = StorageSpec(k_in=0.0, k_out=0.0, k_n=0.0, penalty="none")
    degenerate = price_storage(frozen, zero_spec, DAILY, 1000, 2011).price
    spec = StorageSpec()
    a = price_storage(MODEL_1F, spec, DAILY, 10**4, 2012)
    b = price_storage(MODEL_1F, spec, DAILY, 10**4, 2013)
    intrinsic = intrinsic_value(FLAT, spec, DAILY)
    knots = np.linspace(0.0, 1.0, 13)
    seasonal_curve = ForwardCurve(knots, 15.0 + 2.0 * np.cos(2 * np.pi * knots))
    seasonal = price_storage(SpotModel1F(seasonal_curve, SYM_PARAMS["k"], SYM_PARAMS["nu"], SYM_PARAMS["sigma"]),
                             spec, DAILY, 10**4, 2014)
    seasonal_intrinsic = intrinsic_value(seasonal_curve, spec, DAILY)
    spread = combined_z(a.price, a.error, b.price, b.error)
    cpu_ok = 0 < a.cpu_paths_seconds < a.cpu_seconds and 0 < b.cpu_paths_seconds < b.cpu_seconds
    above = min(a.price, b.price) >= intrinsic and seasonal.price >= seasonal_intrinsic
    ok = degenerate == 0.0 and above and abs(spread) < 4 and cpu_ok
    acceptance_line(
        9, ok,
        f"degenerate {degenerate!r}; prices {a.price:.4f} ({a.error:.4f}), {b.price:.4f} ({b.error:.4f}) "
        f">= intrinsic {intrinsic:.4f}; seasonal curve {seasonal.price:.4f} >= {seasonal_intrinsic:.4f}; "
        f"seed spread z = {spread:+.2f}; "
        f"cpu paths/total = {a.cpu_paths_seconds:.2f}/{a.cpu_seconds:.2f}s",
    )
    assert ok


def _run_cli(argv, out):
    assert main([*argv, "--out", str(out), "--quiet"]) == 0
    return out.read_bytes()


def _deterministic_price_fields(data):
    header, row = data.decode().splitlines()
    assert header == "n_paths,price,stdev,error,cpu_seconds,cpu_paths_seconds"
    return row.split(",")[:4]


def test_criterion_10_reproducibility(acceptance_line, tmp_path):
    runs = {
        "simulate": ["simulate", "--paths", "500", "--steps", "50", "--seed", "5"],
        "validate": ["validate", "--paths", "20000", "--steps", "5", "--seed", "6"],
        "price-asian": ["price-asian", "--paths", "5000", "--fixings", "52", "--seed", "7"],
        "price-storage": ["price-storage", "--paths", "2000", "--volume-steps", "20", "--a-in", "0.1",
                          "--a-w", "0.1", "--seed", "8"],
    }
    results = {}
    for name, argv in runs.items():
        outputs = [
            _run_cli(argv + ["--threads", str(t)], tmp_path / f"{name}-{i}.csv")
            for i, t in enumerate((1, 1, 4))
        ]
        if name.startswith("price"):
            fields = [_deterministic_price_fields(o) for o in outputs]
            results[name] = fields[0] == fields[1] == fields[2]
        else:
            results[name] = outputs[0] == outputs[1] == outputs[2]
    ok = all(results.values())
    acceptance_line(
        10, ok,
        "identical across reruns and threads 1/4: "
        + ", ".join(f"{k} {'yes' if v else 'NO'}" for k, v in results.items())
        + " (price files compared without their two timing columns)",
    )
    assert ok
