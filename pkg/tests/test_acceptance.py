"""Acceptance gate. Each test records one PASS/FAIL line in the terminal summary."""

import time

import mpmath
import numpy as np
import pytest

from swexner.harness import (
    MAX_BUDGET_DEFECT,
    MAX_ORACLE_RESIDUAL,
    MAX_QB_IDENTITY,
    MAX_REL_L1,
    RATE_BOUNDS,
    REDUCTION_BOUNDS,
    BenchmarkConfig,
    qb_identity_defect,
    run_benchmark,
    run_convergence,
    verify_oracle,
)
from swexner.mesh import Mesh1D, project_exact
from swexner.schemes import SCHEMES, BoundaryCondition, integrate, relaxation_step, rusanov_step
from swexner.sediment_laws import SedimentLaw, effective_params, fixed_bed

BENCH = BenchmarkConfig()
CONVERGE_J = (100, 200, 400, 800)


def timed(fn, *args, **kwargs):
    tic = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - tic


@pytest.fixture(scope="module")
def bench_runs():
    return {s: timed(run_benchmark, BenchmarkConfig(scheme=s)) for s in SCHEMES}


@pytest.fixture(scope="module")
def convergence_runs():
    tic = time.perf_counter()
    reports = {s: run_convergence(BenchmarkConfig(scheme=s), CONVERGE_J, T=1.0) for s in SCHEMES}
    return reports, time.perf_counter() - tic


def test_oracle_residual(criterion):
    report, wall = timed(verify_oracle, BENCH, samples=100, dx=1e-3, dt=1e-3)
    lo, hi = REDUCTION_BOUNDS
    ok = report["max_residual"] <= MAX_ORACLE_RESIDUAL and lo <= report["reduction"] <= hi and wall < 1.0
    criterion(1, "oracle residual", ok,
              f"max {report['max_residual']:.2e}, reduction {report['reduction']:.3f}, {wall:.3f} s")
    assert report["skipped"] == 0
    assert report["max_residual"] <= MAX_ORACLE_RESIDUAL
    assert lo <= report["reduction"] <= hi
    assert wall < 1.0


def test_qb_identity(criterion):
    defect, wall = timed(qb_identity_defect, BENCH, 500)
    ok = defect <= MAX_QB_IDENTITY and wall < 0.1
    criterion(2, "q_b identity", ok, f"max defect {defect:.2e} over 500 cells, {wall:.4f} s")
    assert defect <= MAX_QB_IDENTITY
    assert wall < 0.1


def test_benchmark_reproduction(criterion, bench_runs):
    report, wall = bench_runs["relaxation"]
    assert report.config["J"] == 500 and report.config["cfl"] == 1.0 and report.config["T"] == 7.0
    rel = {k: report.norms[k].rel_l1 for k in MAX_REL_L1}
    ok = all(rel[k] <= tol for k, tol in MAX_REL_L1.items()) and wall < 30.0
    criterion(3, "benchmark reproduction", ok,
              ", ".join(f"rel L1({k}) {v:.2e}" for k, v in rel.items()) + f", {wall:.2f} s")
    for k, tol in MAX_REL_L1.items():
        assert rel[k] <= tol
    assert wall < 30.0


def test_convergence_rate(criterion, convergence_runs):
    reports, wall = convergence_runs
    rates = {s: r.rates["h"] for s, r in reports.items()}
    lo, hi = RATE_BOUNDS
    ok = all(lo <= r <= hi for r in rates.values()) and wall < 60.0
    criterion(4, "convergence rate", ok,
              ", ".join(f"{s} {r:.3f}" for s, r in rates.items()) + f", {wall:.1f} s")
    for r in rates.values():
        assert lo <= r <= hi
    assert wall < 60.0


def test_conservation(criterion, bench_runs, convergence_runs):
    runs = [r for r, _ in bench_runs.values()]
    runs += [r for conv in convergence_runs[0].values() for r in conv.reports]
    worst = max(max(r.budgets["mass"], r.budgets["bed"]) for r in runs)
    criterion(5, "conservation", worst <= MAX_BUDGET_DEFECT,
              f"worst relative budget defect {worst:.2e} over {len(runs)} runs")
    assert worst <= MAX_BUDGET_DEFECT


def test_lake_at_rest(criterion):
    sol = BENCH.build_solution()
    mesh = BENCH.build_mesh()
    bed = project_exact(mesh, sol).z_b
    level = bed.max() + 0.5
    bc = BoundaryCondition.both("transmissive")
    drift = {}
    for scheme, step in (("relaxation", relaxation_step), ("rusanov", rusanov_step)):
        start = project_exact(mesh, sol)
        start.h = level - bed
        start.hu = np.zeros(mesh.J)
        cur = start
        for _ in range(100):
            cur, _ = step(cur, fixed_bed(), bc, BENCH.cfl)
        drift[scheme] = max(np.max(np.abs(cur.eta - start.eta)), np.max(np.abs(cur.hu)))
    worst = max(drift.values())
    criterion(6, "lake at rest", worst <= 1e-12,
              ", ".join(f"{s} {d:.1e}" for s, d in drift.items()))
    assert worst <= 1e-12


def _frozen_drift(scheme, J):
    frozen = BENCH.build_solution().frozen_bed()
    mesh = Mesh1D(BENCH.x_min, BENCH.x_max, J)
    start = project_exact(mesh, frozen)
    out, _ = integrate(start, fixed_bed(), BoundaryCondition.both("exact", frozen), BENCH.cfl, 1.0, scheme)
    return max(np.max(np.abs(out.h - start.h)), np.max(np.abs(out.u - start.u)))


def test_frozen_bed_steady_state(criterion):
    ratios = {s: _frozen_drift(s, 200) / _frozen_drift(s, 400) for s in SCHEMES}
    ok = all(r >= 1.5 for r in ratios.values())
    criterion(7, "frozen-bed steady state", ok,
              ", ".join(f"{s} drift ratio {r:.2f}" for s, r in ratios.items()))
    assert ok


def test_cross_scheme_agreement(criterion, bench_runs):
    relax = bench_runs["relaxation"][0].norms["h"].l1
    rus = bench_runs["rusanov"][0].norms["h"].l1
    factor = max(relax, rus) / min(relax, rus)
    criterion(8, "cross-scheme agreement", factor <= 5.0,
              f"L1(h) relaxation {relax:.3e}, rusanov {rus:.3e}, factor {factor:.2f}")
    assert factor <= 5.0


def _brute_force_params(f, s, d_s, g, kappa=8, p=1.5, tau_cr=0.047):
    """Reduce the dimensional law numerically in high precision."""
    with mpmath.workdps(50):
        f, s, d_s, g = map(mpmath.mpf, (f, s, d_s, g))
        kappa, p, tau_cr = mpmath.mpf(kappa), mpmath.mpf(p), mpmath.mpf(tau_cr)

        def tau(u):
            return f * u * u / (8 * (s - 1) * g * d_s)

        def rate(u):
            return kappa * (tau(u) - tau_cr) ** p * mpmath.sqrt((s - 1) * g * d_s**3)

        u_cr = mpmath.findroot(lambda u: tau(u) - tau_cr, mpmath.mpf(1))
        u = 3 * u_cr
        A = rate(u) / (u * u - u_cr * u_cr) ** p
        return float(A), float(u_cr * u_cr)


def test_mpm_self_consistency(criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        f, s, d_s = rng.uniform(0.01, 0.3), rng.uniform(1.2, 3.5), rng.uniform(1e-4, 1e-2)
        A, u_cr2 = effective_params(SedimentLaw(kappa=8.0, p=1.5, tau_cr=0.047, f=f, s=s, d_s=d_s, g=9.81))
        A_ref, u_cr2_ref = _brute_force_params(f, s, d_s, 9.81)
        worst = max(worst, abs(A - A_ref) / A_ref, abs(u_cr2 - u_cr2_ref) / u_cr2_ref)
    criterion(9, "MPM preset self-consistency", worst <= 1e-12, f"worst relative error {worst:.1e} over 20 tuples")
    assert worst <= 1e-12
