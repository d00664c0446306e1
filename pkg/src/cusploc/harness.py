"""Monte Carlo experiment orchestration: rate sweeps, limit comparisons,
log-log slope fits, config parsing, and report emission.

Every experiment is a pure function of (config, master_seed): replication r
at grid point g draws from a stream derived from (master_seed, g, r), tasks
are aggregated in (g, r) order whatever the worker count, and all file
output happens here, never in the compute modules.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats as _stats

from . import _svg
from .constants import gamma_for_model, hurst, normalizing_rate
from .errors import NumericalError, SpecError
from .estimators import bayes_estimate, estimate, mle
from .limit import (
    LimitDensity,
    LimitMoments,
    limit_density,
    limit_functionals,
    limit_moments,
    mle_density_analytic_h_half,
)
from .models import (
    CuspModelSpec,
    HFunction,
    constant,
    gaussian_bump,
    linear,
    simulate_dynamical,
    simulate_ergodic_diffusion,
    simulate_gaussian_signal,
    simulate_iid,
    simulate_poisson,
)

SCHEMA_VERSION = 1

DEFAULT_EPSILON_GRID = (0.1, 0.05, 0.025, 0.0125)
DEFAULT_COUNT_GRID = (64, 256, 1024)
DEFAULT_HORIZON_GRID = (250.0, 1000.0, 4000.0)

# observation step rule for the continuously observed small-noise models:
# a fixed fraction of the horizon, tightened to track the error scale phi
# once phi drops below it so the discretization floor shrinks with phi
_OBS_TIME_FRACTION = 1e-4
_OBS_RATE_MULTIPLE = 20.0
_MIN_OBSERVATIONS = 50
_DIFFUSION_STEP = 1e-3

_INTERIOR_MARGIN = 10.0
_MIN_REPLICATIONS = 50

# grid-index namespaces for seed streams that are not rate replications
_LIMIT_STREAM = 2**32
_REPORT_STREAM = 2**32 + 1

_SMALL_NOISE = ("gaussian_signal", "small_noise_dynamical")

_H_FACTORIES = {"constant": constant, "linear": linear, "gaussian_bump": gaussian_bump}

GALLERY_KAPPAS = (0.625, 0.5, 0.125, 0.0, -0.375)


def replication_seed(master_seed: int, grid_index: int, replication: int) -> int:
    """Deterministic per-replication seed from the (master, g, r) stream."""
    entropy = (int(master_seed), int(grid_index), int(replication))
    return int(np.random.SeedSequence(entropy=entropy).generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class ComparisonSettings:
    """Limit-comparison knobs; thresholds arm the acceptance exit path."""

    limit_draws: int = 10_000
    ks_threshold: float | None = None
    slope_tolerance: float | None = None
    gamma_mode: str = "model"

    def __post_init__(self):
        if self.limit_draws < 100:
            raise SpecError(f"limit_draws must be at least 100, got {self.limit_draws}")
        if self.ks_threshold is not None and not (0.0 < self.ks_threshold <= 1.0):
            raise SpecError(f"ks_threshold must sit in (0, 1], got {self.ks_threshold}")
        if self.slope_tolerance is not None and self.slope_tolerance <= 0.0:
            raise SpecError(f"slope_tolerance must be positive, got {self.slope_tolerance}")
        if self.gamma_mode not in ("model", "unit"):
            raise SpecError(f"gamma_mode must be 'model' or 'unit', got {self.gamma_mode!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment: model, asymptotic grid, and bookkeeping."""

    model: CuspModelSpec
    asymptotic_grid: tuple
    replications: int
    master_seed: int
    outputs: str | None = None
    comparison: ComparisonSettings | None = None
    estimators: tuple = ("mle", "bayes")

    def __post_init__(self):
        grid = tuple(float(v) for v in self.asymptotic_grid)
        object.__setattr__(self, "asymptotic_grid", grid)
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if len(grid) < 1 or any(v <= 0.0 for v in grid):
            raise SpecError("the asymptotic grid needs at least one positive value")
        steps = np.diff(grid)
        if steps.size and not (np.all(steps > 0.0) or np.all(steps < 0.0)):
            raise SpecError("the asymptotic grid must be strictly monotone")
        if self.replications < _MIN_REPLICATIONS:
            raise SpecError(f"replications must be at least {_MIN_REPLICATIONS}, got {self.replications}")
        if self.master_seed < 0:
            raise SpecError(f"master_seed must be a nonnegative integer, got {self.master_seed}")
        if not self.estimators or any(e not in ("mle", "bayes") for e in self.estimators):
            raise SpecError(f"estimators must be a nonempty subset of mle/bayes, got {self.estimators}")
        if self.model.variant not in _SMALL_NOISE:
            for v in grid:
                if self.model.variant in ("iid_density", "poisson_periodic") and v != int(v):
                    raise SpecError(f"count-driven grids need integer values, got {v}")


def _require_keys(mapping: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise SpecError(f"unknown {where} keys: {', '.join(unknown)}")


def h_from_mapping(mapping: dict) -> HFunction:
    _require_keys(mapping, {"name", "scale", "width"}, "h")
    name = mapping.get("name")
    if name not in _H_FACTORIES:
        raise SpecError(f"unknown h name {name!r}; known: {sorted(_H_FACTORIES)}")
    if "scale" not in mapping:
        raise SpecError("h needs a scale")
    if name == "gaussian_bump" and "width" in mapping:
        return gaussian_bump(mapping["scale"], mapping["width"])
    if "width" in mapping:
        raise SpecError(f"h {name!r} takes no width")
    return _H_FACTORIES[name](mapping["scale"])


_MODEL_KEYS = {"variant", "kappa", "theta0", "alpha", "beta", "a", "signal", "delta",
               "h", "T", "epsilon", "tau", "n_periods", "x0"}


def model_from_mapping(mapping: dict) -> CuspModelSpec:
    _require_keys(mapping, _MODEL_KEYS, "model")
    fields = dict(mapping)
    if "h" in fields:
        fields["h"] = h_from_mapping(fields["h"])
    try:
        return CuspModelSpec(**fields)
    except TypeError as exc:
        raise SpecError(f"bad model mapping: {exc}") from None


@dataclass(frozen=True)
class SimulationSettings:
    """Per-run simulation knobs from the config's `simulate` group."""

    seed: int = 0
    step: float | None = None
    n: int | None = None
    T: float | None = None


def simulation_from_mapping(mapping: dict) -> SimulationSettings:
    _require_keys(mapping, {"seed", "step", "n", "T"}, "simulate")
    return SimulationSettings(**mapping)


_TOP_KEYS = {"schema_version", "model", "grid", "replications", "seed", "outputs",
             "comparison", "estimators", "simulate"}


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    _require_keys(mapping, _TOP_KEYS, "config")
    version = mapping.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SpecError(f"config schema_version must be {SCHEMA_VERSION}, got {version}")
    if "model" not in mapping:
        raise SpecError("config needs a model")
    model = model_from_mapping(mapping["model"])
    grid = mapping.get("grid")
    if grid is None:
        grid = default_grid(model.variant)
    comparison = None
    if "comparison" in mapping:
        _require_keys(mapping["comparison"],
                      {"limit_draws", "ks_threshold", "slope_tolerance", "gamma_mode"},
                      "comparison")
        comparison = ComparisonSettings(**mapping["comparison"])
    return ExperimentConfig(
        model=model,
        asymptotic_grid=tuple(grid),
        replications=int(mapping.get("replications", _MIN_REPLICATIONS)),
        master_seed=int(mapping.get("seed", 0)),
        outputs=mapping.get("outputs"),
        comparison=comparison,
        estimators=tuple(mapping.get("estimators", ("mle", "bayes"))),
    )


def load_config_mapping(path: str) -> dict:
    """Read a JSON experiment config file into a plain mapping."""
    try:
        with open(path, encoding="utf-8") as handle:
            mapping = json.load(handle)
    except OSError as exc:
        raise SpecError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(mapping, dict):
        raise SpecError("config must be a JSON object")
    return mapping


def load_config(path: str) -> ExperimentConfig:
    """Parse a JSON experiment config; unknown keys are rejected outright."""
    return config_from_mapping(load_config_mapping(path))


def default_grid(variant: str) -> tuple:
    if variant in _SMALL_NOISE:
        return DEFAULT_EPSILON_GRID
    if variant == "ergodic_diffusion":
        return DEFAULT_HORIZON_GRID
    return DEFAULT_COUNT_GRID


# ---------------------------------------------------------------------------
# simulation wiring

def observation_step(spec: CuspModelSpec, epsilon: float) -> float:
    """Observation step for the continuously observed small-noise models,
    snapped so it divides the horizon exactly.

    For kappa < 0 the sampling grid mollifies the cusp, leaving a
    discretization penalty proportional to epsilon * step^(1 - H); only a
    step proportional to the normalizing rate keeps that penalty a fixed
    multiple of the statistical error across a noise sweep, so the fixed
    time-fraction cap is not applied there.
    """
    scaled = _OBS_RATE_MULTIPLE * normalizing_rate(spec, epsilon)
    if spec.kappa < 0.0:
        target = min(spec.T / _MIN_OBSERVATIONS, scaled)
    else:
        target = min(_OBS_TIME_FRACTION * spec.T, scaled)
    return spec.T / int(math.ceil(spec.T / target))


def _simulate_for(spec: CuspModelSpec, value: float, seed: int):
    """Data set at one asymptotic grid value; returns (spec_used, data)."""
    if spec.variant == "gaussian_signal":
        used = replace(spec, epsilon=value)
        return used, simulate_gaussian_signal(used, observation_step(used, value), seed)
    if spec.variant == "small_noise_dynamical":
        used = replace(spec, epsilon=value)
        return used, simulate_dynamical(used, used.T, observation_step(used, value), seed)
    if spec.variant == "iid_density":
        return spec, simulate_iid(spec, int(value), seed)
    if spec.variant == "poisson_periodic":
        used = replace(spec, n_periods=int(value))
        return used, simulate_poisson(used, seed)
    return spec, simulate_ergodic_diffusion(spec, float(value), step=_DIFFUSION_STEP, seed=seed)


def _rate_task(args):
    spec, grid_index, value, rep, master_seed, estimators = args
    seed = replication_seed(master_seed, grid_index, rep)
    try:
        used, data = _simulate_for(spec, value, seed)
        if estimators == ("mle",):
            return mle(used, data) - spec.theta0, None
        if estimators == ("bayes",):
            return None, bayes_estimate(used, data) - spec.theta0
        result = estimate(used, data)
        return result.theta_mle - spec.theta0, result.theta_bayes - spec.theta0
    except Exception as exc:
        raise NumericalError(
            f"replication {rep} at grid value {value} failed (seed {seed}): {exc}"
        ) from exc


def _resolve_workers(workers) -> int:
    if workers is None:
        workers = os.environ.get("CUSPLOC_WORKERS", "1")
    try:
        workers = int(workers)
    except (TypeError, ValueError):
        raise SpecError(f"worker count must be an integer, got {workers!r}") from None
    if workers < 1:
        raise SpecError(f"worker count must be at least 1, got {workers}")
    return workers


def _map_tasks(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# rate experiments

@dataclass(frozen=True)
class RatePoint:
    """RMSE of each estimator at one asymptotic grid value."""

    grid_value: float
    replications: int
    rmse_mle: float | None
    rmse_bayes: float | None


@dataclass(frozen=True)
class LoglogFit:
    """OLS fit of log y on log x."""

    slope: float
    intercept: float
    slope_stderr: float


@dataclass(frozen=True)
class RateFitResult:
    """Slope fit of RMSE against the asymptotic parameter, with the table
    and the raw per-replication errors behind it."""

    slope: float
    intercept: float
    slope_stderr: float
    theoretical_exponent: float
    table: tuple
    errors_mle: tuple
    errors_bayes: tuple

    def __post_init__(self):
        if len(self.errors_mle) != len(self.table) or len(self.errors_bayes) != len(self.table):
            raise SpecError("per-point error arrays must match the table length")


def fit_loglog_slope(points) -> LoglogFit:
    """Least squares on (log x, log y); stderr from the residuals."""
    points = [(float(x), float(y)) for x, y in points]
    if len(points) < 3:
        raise SpecError(f"slope fitting needs at least 3 points, got {len(points)}")
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise SpecError("slope fitting needs strictly positive coordinates")
    if np.unique(xs).size != xs.size:
        raise SpecError("slope fitting needs distinct x values")
    lx, ly = np.log(xs), np.log(ys)
    dx = lx - lx.mean()
    slope = float(np.dot(dx, ly - ly.mean()) / np.dot(dx, dx))
    intercept = float(ly.mean() - slope * lx.mean())
    residuals = ly - (intercept + slope * lx)
    dof = lx.size - 2
    var = float(np.dot(residuals, residuals) / dof) if dof else 0.0
    return LoglogFit(slope=slope, intercept=intercept,
                     slope_stderr=math.sqrt(var / float(np.dot(dx, dx))))


def _check_interior(config: ExperimentConfig) -> None:
    spec = config.model
    least = max(config.asymptotic_grid) if spec.variant in _SMALL_NOISE else min(config.asymptotic_grid)
    phi = normalizing_rate(spec, least)
    margin = _INTERIOR_MARGIN * phi
    if spec.theta0 - spec.alpha < margin or spec.beta - spec.theta0 < margin:
        raise SpecError(
            f"theta0 = {spec.theta0} must sit at least {margin:.6g} inside "
            f"({spec.alpha}, {spec.beta}) at the coarsest grid value"
        )


def asymptotic_end(config: ExperimentConfig) -> float:
    """The most informative grid value: smallest noise, largest count/horizon."""
    if config.model.variant in _SMALL_NOISE:
        return min(config.asymptotic_grid)
    return max(config.asymptotic_grid)


def _theoretical_exponent(spec: CuspModelSpec, grid) -> float:
    """Slope of log phi against the log grid parameter.

    phi is an exact power law in every regime, so two evaluations pin the
    exponent: 1/H for small-noise cusp models, 1 for the smooth signal,
    -1/(2 kappa + 1) for count- and horizon-driven models.
    """
    a, b = min(grid), max(grid)
    return math.log(normalizing_rate(spec, b) / normalizing_rate(spec, a)) / math.log(b / a)


def run_rate_experiment(config: ExperimentConfig, workers=None) -> RateFitResult:
    """RMSE of the estimators across the grid plus a log-log slope fit.

    The headline slope follows the first configured estimator. Any failing
    replication aborts the sweep with its seed in the message.
    """
    workers = _resolve_workers(workers)
    if len(config.asymptotic_grid) < 3:
        raise SpecError("a rate experiment needs at least 3 grid points for the slope fit")
    _check_interior(config)
    tasks = [
        (config.model, g, value, rep, config.master_seed, config.estimators)
        for g, value in enumerate(config.asymptotic_grid)
        for rep in range(config.replications)
    ]
    outcomes = _map_tasks(_rate_task, tasks, workers)
    table, errors_mle, errors_bayes = [], [], []
    for g, value in enumerate(config.asymptotic_grid):
        chunk = outcomes[g * config.replications : (g + 1) * config.replications]
        e_mle = np.array([c[0] for c in chunk], dtype=float) if chunk[0][0] is not None else None
        e_bayes = np.array([c[1] for c in chunk], dtype=float) if chunk[0][1] is not None else None
        errors_mle.append(e_mle)
        errors_bayes.append(e_bayes)
        table.append(RatePoint(
            grid_value=value,
            replications=config.replications,
            rmse_mle=None if e_mle is None else float(np.sqrt(np.mean(e_mle**2))),
            rmse_bayes=None if e_bayes is None else float(np.sqrt(np.mean(e_bayes**2))),
        ))
    lead = "mle" if "mle" in config.estimators else "bayes"
    rmses = [p.rmse_mle if lead == "mle" else p.rmse_bayes for p in table]
    fit = fit_loglog_slope(zip(config.asymptotic_grid, rmses))
    return RateFitResult(
        slope=fit.slope,
        intercept=fit.intercept,
        slope_stderr=fit.slope_stderr,
        theoretical_exponent=_theoretical_exponent(config.model, config.asymptotic_grid),
        table=tuple(table),
        errors_mle=tuple(errors_mle),
        errors_bayes=tuple(errors_bayes),
    )


# ---------------------------------------------------------------------------
# limit comparison

@dataclass(frozen=True)
class ComparisonReport:
    """Two-sample KS distances between normalized errors and limit draws."""

    grid_value: float
    n_errors: int
    n_limit: int
    ks_mle: float
    ks_bayes: float
    threshold: float | None
    passed: bool | None
    normalized_mle: np.ndarray
    normalized_bayes: np.ndarray
    limit_mle: np.ndarray
    limit_bayes: np.ndarray


def run_limit_comparison(config: ExperimentConfig, workers=None) -> ComparisonReport:
    """Finite-model normalized errors vs limit functionals, two-sample KS.

    Errors are taken at the most informative grid value. With
    gamma_mode="unit" both samples are rescaled by gamma^(1/H) pathwise, so
    the comparison runs against unit-gamma limit draws with identical KS
    distances.
    """
    workers = _resolve_workers(workers)
    _check_interior(config)
    settings = config.comparison if config.comparison is not None else ComparisonSettings()
    value = asymptotic_end(config)
    grid_index = config.asymptotic_grid.index(value)
    spec = config.model
    tasks = [
        (spec, grid_index, value, rep, config.master_seed, ("mle", "bayes"))
        for rep in range(config.replications)
    ]
    outcomes = _map_tasks(_rate_task, tasks, workers)
    phi = normalizing_rate(spec, value)
    raw_mle = np.array([o[0] for o in outcomes]) / phi
    raw_bayes = np.array([o[1] for o in outcomes]) / phi
    h_exp = hurst(spec.kappa)
    gamma = gamma_for_model(replace(spec, epsilon=value) if spec.variant in _SMALL_NOISE else spec)
    limit_seed = replication_seed(config.master_seed, _LIMIT_STREAM, 0)
    draws = limit_functionals(h_exp, gamma, settings.limit_draws, limit_seed)
    if settings.gamma_mode == "unit":
        scale = gamma ** (1.0 / h_exp)
        raw_mle = raw_mle * scale
        raw_bayes = raw_bayes * scale
        draws = limit_functionals(h_exp, 1.0, settings.limit_draws, limit_seed,
                                  window=draws.window * scale)
    ks_mle = float(_stats.ks_2samp(raw_mle, draws.xi_mle).statistic)
    ks_bayes = float(_stats.ks_2samp(raw_bayes, draws.xi_bayes).statistic)
    passed = None
    if settings.ks_threshold is not None:
        passed = ks_mle < settings.ks_threshold and ks_bayes < settings.ks_threshold
    return ComparisonReport(
        grid_value=value,
        n_errors=config.replications,
        n_limit=settings.limit_draws,
        ks_mle=ks_mle,
        ks_bayes=ks_bayes,
        threshold=settings.ks_threshold,
        passed=passed,
        normalized_mle=raw_mle,
        normalized_bayes=raw_bayes,
        limit_mle=draws.xi_mle,
        limit_bayes=draws.xi_bayes,
    )


# ---------------------------------------------------------------------------
# CSV output

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_rate_csv(result: RateFitResult, path: str) -> None:
    _write_csv(path, ["grid_value", "replications", "rmse_mle", "rmse_bayes"],
               [(p.grid_value, p.replications, p.rmse_mle, p.rmse_bayes) for p in result.table])


def write_rate_fit_csv(result: RateFitResult, path: str) -> None:
    _write_csv(path, ["slope", "intercept", "slope_stderr", "theoretical_exponent"],
               [(result.slope, result.intercept, result.slope_stderr, result.theoretical_exponent)])


def write_comparison_csv(report: ComparisonReport, path: str) -> None:
    _write_csv(
        path,
        ["grid_value", "n_errors", "n_limit", "ks_mle", "ks_bayes", "threshold", "passed"],
        [(report.grid_value, report.n_errors, report.n_limit, report.ks_mle,
          report.ks_bayes, report.threshold, report.passed)],
    )


# ---------------------------------------------------------------------------
# report bundle

@dataclass(frozen=True)
class ReportBundle:
    """Everything emit_report renders: shape gallery inputs, limit moment
    curves, the Brownian-case density overlay, and optional rate fits."""

    moments: tuple
    density: LimitDensity
    rate_results: dict
    gallery_kappas: tuple = GALLERY_KAPPAS


def build_default_report(
    master_seed: int,
    *,
    moment_hursts=(0.5, 0.6, 0.7, 0.8, 0.9),
    moment_draws: int = 2000,
    density_draws: int = 20_000,
    rate_results: dict | None = None,
    workers=None,
) -> ReportBundle:
    """Assemble the report inputs: limit moments per Hurst index, the
    Brownian density, and any precomputed rate fits."""
    moments = []
    for k, h_exp in enumerate(moment_hursts):
        seed = replication_seed(master_seed, _REPORT_STREAM, k)
        moments.append((float(h_exp), limit_moments(h_exp, 1.0, moment_draws, seed)))
    density_seed = replication_seed(master_seed, _REPORT_STREAM, len(moment_hursts))
    density = limit_density(0.5, 1.0, density_draws, density_seed)
    return ReportBundle(moments=tuple(moments), density=density,
                        rate_results=dict(rate_results or {}))


def _gallery_rows(kappas):
    xs = np.linspace(-1.0, 1.0, 401)
    rows = []
    for kappa in kappas:
        mags = np.abs(xs)
        if kappa < 0.0:
            mags = np.maximum(mags, 1e-12)
        values = np.sign(xs) * mags**kappa
        rows.append((kappa, xs, values))
    return rows


def emit_report(bundle: ReportBundle, outputs: str) -> list:
    """Write the CSV tables and SVG charts; returns the paths written."""
    try:
        os.makedirs(outputs, exist_ok=True)
        probe = os.path.join(outputs, ".writable")
        with open(probe, "w", encoding="utf-8") as handle:
            handle.write("")
        os.remove(probe)
    except OSError as exc:
        raise NumericalError(f"output directory {outputs} is not writable: {exc}") from None
    written = []

    def path_of(name):
        written.append(os.path.join(outputs, name))
        return written[-1]

    gallery = _gallery_rows(bundle.gallery_kappas)
    _write_csv(path_of("signals.csv"), ["kappa", "x", "value"],
               [(kappa, float(x), float(v)) for kappa, xs, vs in gallery for x, v in zip(xs, vs)])
    _svg.line_chart(
        path_of("signals.svg"),
        [_svg.Series(label=f"kappa = {kappa}", xs=xs, ys=vs) for kappa, xs, vs in gallery],
        title="Cusp signal shapes",
        xlabel="x",
        ylabel="sgn(x) |x|^kappa",
    )

    if bundle.moments:
        _write_csv(
            path_of("moments.csv"),
            ["hurst", "mean_sq_mle", "se_mle", "mean_sq_bayes", "se_bayes", "n_draws", "window"],
            [(h, m.mean_sq_mle, m.se_mle, m.mean_sq_bayes, m.se_bayes, m.n_draws, m.window)
             for h, m in bundle.moments],
        )
        hs = [h for h, _ in bundle.moments]
        _svg.line_chart(
            path_of("moments.svg"),
            [
                _svg.Series(label="E xi_mle^2", xs=hs, ys=[m.mean_sq_mle for _, m in bundle.moments]),
                _svg.Series(label="E xi_bayes^2", xs=hs, ys=[m.mean_sq_bayes for _, m in bundle.moments]),
            ],
            title="Limit second moments vs Hurst index",
            xlabel="H",
            ylabel="second moment",
            markers=True,
        )

    density = bundle.density
    centers = 0.5 * (density.bin_edges[:-1] + density.bin_edges[1:])
    analytic = mle_density_analytic_h_half(centers)
    _write_csv(
        path_of("density.csv"),
        ["bin_left", "bin_right", "density_mle", "density_bayes", "analytic_mle_center"],
        [(float(l), float(r), float(dm), float(db), float(an))
         for l, r, dm, db, an in zip(density.bin_edges[:-1], density.bin_edges[1:],
                                     density.mle_density, density.bayes_density, analytic)],
    )
    _svg.histogram_chart(
        path_of("density.svg"),
        density.bin_edges,
        density.mle_density,
        overlays=[_svg.Series(label="analytic H=1/2", xs=centers, ys=analytic)],
        title="Argmax law at H = 1/2: histogram vs closed form",
        xlabel="xi",
        ylabel="density",
    )

    for label, result in bundle.rate_results.items():
        write_rate_csv(result, path_of(f"rates_{label}.csv"))
        write_rate_fit_csv(result, path_of(f"rates_{label}_fit.csv"))
        xs = [p.grid_value for p in result.table]
        series = []
        if result.table[0].rmse_mle is not None:
            series.append(_svg.Series(label="RMSE mle", xs=xs, ys=[p.rmse_mle for p in result.table]))
        if result.table[0].rmse_bayes is not None:
            series.append(_svg.Series(label="RMSE bayes", xs=xs, ys=[p.rmse_bayes for p in result.table]))
        fitted = [math.exp(result.intercept) * x**result.slope for x in xs]
        series.append(_svg.Series(label=f"fit slope {result.slope:.3f}", xs=xs, ys=fitted))
        _svg.line_chart(
            path_of(f"rates_{label}.svg"),
            series,
            title=f"Convergence rate: {label}",
            xlabel="asymptotic parameter",
            ylabel="RMSE",
            logx=True,
            logy=True,
            markers=True,
        )
    return written
