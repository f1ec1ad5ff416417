import math

import numpy as np
import pytest

from swexner.errors import ConfigError
from swexner.harness import (
    _thread_cap,
    BenchmarkConfig,
    qb_identity_defect,
    run_benchmark,
    run_convergence,
    verify_oracle,
)
from swexner.sediment_laws import GrassLaw, SedimentLaw


def test_defaults_reproduce_benchmark_setup():
    cfg = BenchmarkConfig()
    assert (cfg.q, cfg.alpha, cfg.beta, cfg.C, cfg.A_g) == (1.0, 0.005, 0.005, 1.0, 0.005)
    assert (cfg.J, cfg.cfl, cfg.T) == (500, 1.0, 7.0)
    assert isinstance(cfg.build_law(), GrassLaw)


def test_from_mapping_parses_strings():
    cfg = BenchmarkConfig.from_mapping({"J": "64", "cfl": "0.5", "scheme": "rusanov"})
    assert cfg.J == 64 and cfg.cfl == 0.5 and cfg.scheme == "rusanov"


def test_from_mapping_names_unknown_key():
    with pytest.raises(ConfigError, match="'cells_per_meter'"):
        BenchmarkConfig.from_mapping({"cells_per_meter": "3"})


def test_validate_lists_every_problem():
    cfg = BenchmarkConfig(q=-1.0, cfl=0.0, scheme="roe", x_min=-5.0)
    with pytest.raises(ConfigError) as info:
        cfg.validate()
    text = " ".join(info.value.problems)
    for word in ("q must", "cfl must", "scheme", "alpha*x + beta"):
        assert word in text
    assert len(info.value.problems) >= 4


def test_custom_law_built():
    law = BenchmarkConfig(law="custom", kappa=4.0, p=1.2, tau_cr=0.03).build_law()
    assert law == SedimentLaw(4.0, 1.2, 0.03, 0.1, 2.65, 0.001, 9.81)


def test_qb_identity_defect_tiny():
    assert qb_identity_defect(BenchmarkConfig()) <= 1e-12


@pytest.mark.parametrize("scheme", ["relaxation", "rusanov"])
def test_zero_time_run_has_no_error(scheme):
    report = run_benchmark(BenchmarkConfig(J=100, T=0.0, scheme=scheme))
    assert report.steps == 0
    for err in report.norms.values():
        assert max(err.l1, err.l2, err.linf) <= 1e-15
    assert report.passed


def test_report_echoes_config():
    report = run_benchmark(BenchmarkConfig(J=50, T=0.2))
    d = report.to_dict()
    assert d["config"]["J"] == 50 and d["config"]["T"] == 0.2
    assert d["scheme"]["bc"] == "exact"
    assert d["preflight"]["passed"]
    assert set(d["acceptance"]) == {"rel_l1_h", "rel_l1_u", "rel_l1_z_b", "mass_budget", "bed_budget"}


def test_report_reproducible_from_echo():
    first = run_benchmark(BenchmarkConfig(J=40, T=0.3, scheme="rusanov"))
    echo = {k: v for k, v in first.config.items()}
    second = run_benchmark(BenchmarkConfig.from_mapping(echo))
    assert first.snapshot.h.tobytes() == second.snapshot.h.tobytes()
    assert first.to_dict()["norms"] == second.to_dict()["norms"]


def test_mpm_benchmark_runs():
    report = run_benchmark(BenchmarkConfig(law="mpm", J=100, T=0.5))
    assert report.passed


def test_convergence_needs_three_meshes():
    with pytest.raises(ConfigError, match="at least 3"):
        run_convergence(BenchmarkConfig(), [50, 100])


def test_convergence_needs_increasing_meshes():
    with pytest.raises(ConfigError, match="increasing"):
        run_convergence(BenchmarkConfig(), [100, 50, 200])


def test_convergence_report_small(monkeypatch):
    monkeypatch.setenv("EXNER_BENCH_THREADS", "2")
    report = run_convergence(BenchmarkConfig(scheme="rusanov"), [50, 100, 200], T=0.5)
    assert report.J == [50, 100, 200]
    assert len(report.errors["h"]) == 3
    assert 0.7 <= report.rates["h"] <= 1.3
    assert report.fit_residual["h"] >= 0
    assert len(report.pairwise["h"]) == 2


def test_convergence_repeated_mesh_is_bitwise_identical():
    cfg = BenchmarkConfig(J=60, T=0.2)
    a = run_benchmark(cfg)
    b = run_benchmark(cfg)
    assert a.norms == b.norms


def test_verify_oracle_default():
    report = verify_oracle(BenchmarkConfig(), samples=100)
    assert report["passed"]
    assert report["max_residual"] <= 1e-4
    assert report["order"] >= 1.9
    assert report["max_residual_by_equation"]["mass"] <= 1e-12
    assert report["bed_slope_rel_err"] <= 1e-6
    assert report["seed"] == 0


def test_verify_oracle_seed_recorded_and_deterministic():
    a = verify_oracle(BenchmarkConfig(seed=5), samples=10)
    b = verify_oracle(BenchmarkConfig(seed=5), samples=10)
    assert a == b and a["seed"] == 5


def test_verify_oracle_counts_skipped_samples():
    # a wide stencil near the root of alpha*x + beta reaches outside the domain
    cfg = BenchmarkConfig(x_min=-0.999, x_max=-0.99, J=1000)
    report = verify_oracle(cfg, samples=2000, dx=5e-3, dt=5e-3)
    assert report["skipped"] > 0
    assert report["samples"] == 2000


def test_verify_oracle_rejects_zero_samples():
    with pytest.raises(ConfigError):
        verify_oracle(BenchmarkConfig(), samples=0)


@pytest.mark.parametrize("raw,expected", [("3", 3), ("0", 1), ("-2", 1)])
def test_thread_cap_from_env(monkeypatch, raw, expected):
    monkeypatch.setenv("EXNER_BENCH_THREADS", raw)
    assert _thread_cap() == expected


def test_thread_cap_ignores_garbage(monkeypatch):
    monkeypatch.setenv("EXNER_BENCH_THREADS", "many")
    assert _thread_cap() >= 1


def test_convergence_independent_of_thread_count(monkeypatch):
    results = []
    for threads in ("1", "3"):
        monkeypatch.setenv("EXNER_BENCH_THREADS", threads)
        d = run_convergence(BenchmarkConfig(), [40, 80, 160], T=0.2).to_dict()
        for run in d["runs"]:
            run.pop("wall_time")
        results.append(d)
    assert results[0] == results[1]
