"""Benchmark orchestration: reproduction runs, convergence studies, oracle checks."""

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .exact import ExactSolution, qb_of_exact, residual
from .mesh import Mesh1D, norms, project_exact
from .schemes import BC_MODES, SCHEMES, BoundaryCondition, budget_defect, integrate
from .sediment_laws import GrassLaw, SedimentLaw, meyer_peter_muller

log = logging.getLogger(__name__)

LAWS = ("grass", "mpm", "custom")
THREADS_ENV = "EXNER_BENCH_THREADS"

# acceptance thresholds of a benchmark run
MAX_REL_L1 = {"h": 2e-2, "z_b": 2e-2, "u": 5e-2}
MAX_BUDGET_DEFECT = 1e-10
RATE_BOUNDS = (0.7, 1.3)
MAX_ORACLE_RESIDUAL = 1e-4
REDUCTION_BOUNDS = (3.5, 4.5)
MAX_QB_IDENTITY = 1e-12


@dataclass(frozen=True)
class BenchmarkConfig:
    """Flat run configuration; defaults reproduce the Grass benchmark.

    ``kappa``, ``p`` and ``tau_cr`` are only read by the ``custom`` law;
    ``f``, ``s`` and ``d_s`` by ``mpm`` and ``custom``.
    """

    law: str = "grass"
    A_g: float = 0.005
    kappa: float = 8.0
    p: float = 1.5
    tau_cr: float = 0.047
    f: float = 0.1
    s: float = 2.65
    d_s: float = 0.001
    g: float = 9.81
    q: float = 1.0
    alpha: float = 0.005
    beta: float = 0.005
    C: float = 1.0
    x_min: float = 0.0
    x_max: float = 4.0
    J: int = 500
    cfl: float = 1.0
    T: float = 7.0
    T_converge: float = 1.0
    scheme: str = "relaxation"
    bc: str = "exact"
    seed: int = 0
    samples: int = 100

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_mapping(cls, values):
        """Build a config from string or typed values, rejecting unknown keys."""
        types = {f.name: f.type for f in fields(cls)}
        problems = []
        kwargs = {}
        for key, raw in values.items():
            if key not in types:
                problems.append(f"unknown config key {key!r}")
                continue
            conv = types[key]
            try:
                kwargs[key] = conv(raw)
            except (TypeError, ValueError):
                problems.append(f"{key}: cannot parse {raw!r} as {conv.__name__}")
        if problems:
            raise ConfigError(problems)
        return cls(**kwargs)

    def build_law(self):
        if self.law == "grass":
            return GrassLaw(self.A_g)
        if self.law == "mpm":
            return meyer_peter_muller(self.f, self.s, self.d_s, self.g)
        return SedimentLaw(self.kappa, self.p, self.tau_cr, self.f, self.s, self.d_s, self.g)

    def build_solution(self):
        return ExactSolution(self.q, self.alpha, self.beta, self.C, self.build_law(), self.g)

    def build_mesh(self, J=None):
        return Mesh1D(self.x_min, self.x_max, self.J if J is None else J)

    def validate(self):
        """Raise ConfigError listing every violated bound."""
        problems = []
        if self.law not in LAWS:
            problems.append(f"law must be one of {LAWS} (got {self.law!r})")
        if self.scheme not in SCHEMES:
            problems.append(f"scheme must be one of {SCHEMES} (got {self.scheme!r})")
        if self.bc not in BC_MODES:
            problems.append(f"bc must be one of {BC_MODES} (got {self.bc!r})")
        for key in ("q", "g", "cfl"):
            if not getattr(self, key) > 0:
                problems.append(f"{key} must be > 0 (got {getattr(self, key)})")
        for key in ("T", "T_converge"):
            if not getattr(self, key) >= 0:
                problems.append(f"{key} must be >= 0 (got {getattr(self, key)})")
        if self.J < 2:
            problems.append(f"J must be >= 2 (got {self.J})")
        if not self.x_max > self.x_min:
            problems.append(f"x_max must exceed x_min ({self.x_min}, {self.x_max})")
        if self.samples < 1:
            problems.append(f"samples must be >= 1 (got {self.samples})")
        law = None
        if self.law in LAWS:
            try:
                law = self.build_law()
            except ValueError as exc:
                problems.append(f"law parameters: {exc}")
        if law is not None and not law.A > 0:
            problems.append("sediment law must have A > 0 (kappa > 0)")
        if self.J >= 2 and self.x_max > self.x_min:
            dx = (self.x_max - self.x_min) / self.J
            # ghost cells sit half a cell outside the domain
            for x in (self.x_min - 0.5 * dx, self.x_max + 0.5 * dx):
                if not self.alpha * x + self.beta > 0:
                    problems.append(
                        f"alpha*x + beta = {self.alpha * x + self.beta:.6g} <= 0 at x={x:.6g}: "
                        "exact solution undefined on the mesh"
                    )
        if problems:
            raise ConfigError(problems)
        return self

    def as_dict(self):
        return asdict(self)


@dataclass
class RunReport:
    config: dict
    scheme: dict
    norms: dict
    budgets: dict
    steps: int
    t_final: float
    wall_time: float
    preflight: dict
    snapshot: object = field(default=None, repr=False)

    def acceptance(self):
        checks = {
            f"rel_l1_{k}": self.norms[k].rel_l1 <= tol for k, tol in MAX_REL_L1.items()
        }
        checks["mass_budget"] = self.budgets["mass"] <= MAX_BUDGET_DEFECT
        checks["bed_budget"] = self.budgets["bed"] <= MAX_BUDGET_DEFECT
        return checks

    @property
    def passed(self):
        return all(self.acceptance().values())

    def to_dict(self):
        return {
            "config": self.config,
            "scheme": self.scheme,
            "norms": {k: v.as_dict() for k, v in self.norms.items()},
            "budgets": self.budgets,
            "steps": self.steps,
            "t_final": self.t_final,
            "wall_time": self.wall_time,
            "preflight": self.preflight,
            "acceptance": self.acceptance(),
            "passed": self.passed,
        }


@dataclass
class ConvergenceReport:
    J: list
    errors: dict  # field -> list of absolute L1 errors, ordered like J
    rates: dict  # field -> least-squares log-log slope
    fit_residual: dict  # field -> RMS residual of the log-log fit
    pairwise: dict  # field -> observed order between consecutive meshes
    reports: list = field(default_factory=list, repr=False)

    def rate_ok(self, name="h"):
        lo, hi = RATE_BOUNDS
        return lo <= self.rates[name] <= hi

    def to_dict(self):
        return {
            "J": self.J,
            "l1_errors": self.errors,
            "rates": self.rates,
            "fit_residual": self.fit_residual,
            "pairwise_rates": self.pairwise,
            "rate_bounds": list(RATE_BOUNDS),
            "runs": [r.to_dict() for r in self.reports],
        }


def scheme_metadata(cfg):
    return {
        "name": cfg.scheme,
        "bc": cfg.bc,
        "cfl": cfg.cfl,
        "order": 1,
        "time_integration": "forward Euler, final step clipped to T",
        "boundary_note": (
            "ghost cells filled from the exact solution at the current time"
            if cfg.bc == "exact"
            else "ghost cells copy the adjacent interior cell"
        ),
    }


def qb_identity_defect(cfg, J=None):
    """Max over cell centers of ``|q_b(exact u) - (alpha x + beta)|``."""
    sol = cfg.build_solution()
    x = cfg.build_mesh(J).centers
    return float(np.max(np.abs(qb_of_exact(sol, x) - sol.flux_line(x))))


def run_benchmark(cfg, J=None, T=None):
    """Project the exact solution, integrate to ``T`` and measure the errors.

    Raises:
        ConfigError: invalid configuration.
        RuntimeError: the oracle preflight failed; scheme errors would be
            meaningless.
        NumericalFailure: the scheme broke down.
    """
    cfg.validate()
    T = cfg.T if T is None else T
    mesh = cfg.build_mesh(J)
    sol = cfg.build_solution()
    law = sol.law

    qb_defect = qb_identity_defect(cfg, mesh.J)
    preflight = {"qb_identity_max": qb_defect, "passed": qb_defect <= MAX_QB_IDENTITY}
    if not preflight["passed"]:
        raise RuntimeError(f"oracle preflight failed: q_b identity defect {qb_defect:.3g}")

    bc = BoundaryCondition.both(cfg.bc, sol)
    start = project_exact(mesh, sol, 0.0)
    tic = time.perf_counter()
    final, reports = integrate(start, law, bc, cfg.cfl, T, cfg.scheme, g=cfg.g)
    wall = time.perf_counter() - tic

    echo = cfg.as_dict()
    echo.update(J=mesh.J, T=T)
    return RunReport(
        config=echo,
        scheme=scheme_metadata(cfg),
        norms=norms(final, sol),
        budgets=budget_defect(start, final, reports),
        steps=len(reports),
        t_final=final.t,
        wall_time=wall,
        preflight=preflight,
        snapshot=final,
    )


def _thread_cap():
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
    return os.cpu_count() or 1


def run_convergence(cfg, J_list=(100, 200, 400, 800), T=None):
    """Run the benchmark on each mesh in ``J_list`` and fit convergence rates.

    Runs execute concurrently (capped by ``EXNER_BENCH_THREADS``); results
    are collected in ``J_list`` order so the report is deterministic.
    """
    J_list = [int(j) for j in J_list]
    if len(J_list) < 3:
        raise ConfigError(f"convergence study needs at least 3 meshes (got {len(J_list)})")
    if any(b <= a for a, b in zip(J_list, J_list[1:])):
        raise ConfigError(f"J_list must be strictly increasing (got {J_list})")
    cfg.validate()
    T = cfg.T_converge if T is None else T

    workers = min(_thread_cap(), len(J_list))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(lambda j: run_benchmark(cfg, J=j, T=T), J_list))

    dx = np.array([(cfg.x_max - cfg.x_min) / j for j in J_list])
    errors, rates, resid, pairwise = {}, {}, {}, {}
    for name in ("h", "u", "z_b"):
        e = np.array([r.norms[name].l1 for r in reports])
        errors[name] = e.tolist()
        coef, res, *_ = np.polyfit(np.log(dx), np.log(e), 1, full=True)
        rates[name] = float(coef[0])
        resid[name] = float(math.sqrt(res[0] / len(e))) if len(res) else 0.0
        pairwise[name] = [float(np.log(e[i] / e[i + 1]) / np.log(dx[i] / dx[i + 1]))
                          for i in range(len(e) - 1)]
    return ConvergenceReport(J_list, errors, rates, resid, pairwise, reports)


def verify_oracle(cfg, samples=None, seed=None, dx=1e-3, dt=1e-3):
    """Check the closed-form solution against the PDEs and its own identities.

    Random ``(x, t)`` samples are drawn in ``[x_min, x_max] x [0, T]``.
    Samples whose stencil leaves the validity domain are skipped and counted.

    Returns:
        dict with the max residual per equation at ``dx`` and ``dx/2``, the
        reduction factor under halving, and the identity defects.
    """
    cfg.validate()
    samples = cfg.samples if samples is None else samples
    seed = cfg.seed if seed is None else seed
    if samples < 1:
        raise ConfigError(f"samples must be >= 1 (got {samples})")
    sol = cfg.build_solution()
    rng = np.random.default_rng(seed)
    x = rng.uniform(cfg.x_min, cfg.x_max, samples)
    t = rng.uniform(0.0, cfg.T, samples)

    ok = sol.flux_line(x - dx) > 0
    skipped = int(np.count_nonzero(~ok))
    if skipped:
        log.warning("verify_oracle: skipped %d samples outside the validity domain", skipped)
    x, t = x[ok], t[ok]
    if x.size == 0:
        raise ConfigError("no sample inside the validity domain")

    coarse = np.abs(np.array(residual(sol, x, t, dx, dt)))
    fine = np.abs(np.array(residual(sol, x, t, dx / 2, dt / 2)))
    max_coarse = float(coarse.max())
    max_fine = float(fine.max())
    reduction = max_coarse / max_fine if max_fine > 0 else math.inf

    h0, u0, z0 = sol.eval(x, 0.0)
    h1, u1, z1 = sol.eval(x, t)
    steady = bool(np.array_equal(h0, h1) and np.array_equal(u0, u1))
    scale = np.maximum(np.maximum(np.abs(cfg.alpha * t), np.abs(z0)), 1e-300)
    bed_motion = float(np.max(np.abs((z1 - z0) + cfg.alpha * t) / scale))
    lin = sol.flux_line(x)
    qb_lin = float(np.max(np.abs(qb_of_exact(sol, x) - lin) / np.maximum(1.0, lin)))
    discharge = float(np.max(np.abs(h0 * u0 - cfg.q)) / cfg.q)

    eps = 1e-4
    inner = sol.flux_line(x - eps) > 0
    xs = x[inner]
    fd = (sol.eval(xs + eps)[2] - sol.eval(xs - eps)[2]) / (2 * eps)
    exact_slope = sol.dbed0_dx(xs)
    slope_err = float(np.max(np.abs(fd - exact_slope) / np.maximum(np.abs(exact_slope), 1e-300)))

    report = {
        "seed": seed,
        "samples": samples,
        "skipped": skipped,
        "dx": dx,
        "dt": dt,
        "max_residual": max_coarse,
        "max_residual_half": max_fine,
        "max_residual_by_equation": dict(zip(("mass", "momentum", "exner"), coarse.max(axis=1).tolist())),
        "reduction": reduction,
        "order": math.log2(reduction) if math.isfinite(reduction) else math.inf,
        "steady": steady,
        "bed_motion_rel_err": bed_motion,
        "qb_linearity_err": qb_lin,
        "discharge_rel_err": discharge,
        "bed_slope_rel_err": slope_err,
    }
    report["passed"] = (
        max_coarse <= MAX_ORACLE_RESIDUAL
        and REDUCTION_BOUNDS[0] <= reduction <= REDUCTION_BOUNDS[1]
        and steady
        and qb_lin <= MAX_QB_IDENTITY
        and slope_err <= 1e-6
    )
    return report
