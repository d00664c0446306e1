"""Exact per-model log-likelihoods and the MLE / Bayes location estimators.

The likelihood of the cusp location is smooth nowhere near the data points,
so both estimators avoid derivatives entirely: a coarse scan over the
admissible interval locates the basin, and a bracketing trisection refines
the maximizer; the Bayes estimate integrates the posterior on the scan grid
refined near the maximizer.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as _sig

from .constants import gamma_for_model, hurst, normalizing_rate
from .errors import NumericalError, SpecError
from .models import (
    CuspModelSpec,
    EventRecord,
    Sample,
    Trajectory,
    drift_value,
    iid_normalizer,
    signal_value,
)

_log = logging.getLogger(__name__)

_SCAN_POINTS = 13
_BRACKET_CELLS = 2.0
_REFINE_FACTOR = 10
_REFINE_REACH = 20
_CHUNK_OPS = 1 << 22
_MAX_GRID = 50_000_000
_GRADED_CORE = 10.0
_GRADED_REACH = 500.0

_DATA_TYPES = {
    "gaussian_signal": Trajectory,
    "iid_density": Sample,
    "poisson_periodic": EventRecord,
    "ergodic_diffusion": Trajectory,
    "small_noise_dynamical": Trajectory,
}


@dataclass(frozen=True)
class LikelihoodCurve:
    """Log-likelihood values on an increasing grid of candidate locations."""

    thetas: np.ndarray
    loglik: np.ndarray
    model: CuspModelSpec

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        loglik = np.asarray(self.loglik, dtype=float)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "loglik", loglik)
        if thetas.ndim != 1 or thetas.size != loglik.size:
            raise SpecError("curve needs matching 1-d theta and log-likelihood arrays")
        if thetas.size and (np.any(np.diff(thetas) <= 0.0)):
            raise SpecError("curve thetas must be strictly increasing")
        if thetas.size and (thetas[0] <= self.model.alpha or thetas[-1] >= self.model.beta):
            raise SpecError("curve thetas must lie inside the open admissible interval")


@dataclass(frozen=True)
class EstimationResult:
    """Both location estimates plus the resolution the search reached."""

    theta_mle: float
    theta_bayes: float
    grid_step_final: float
    loglik_at_mle: float
    normalized_errors: tuple | None = None

    def __post_init__(self):
        if self.grid_step_final <= 0.0:
            raise SpecError("grid_step_final must be positive")


# ---------------------------------------------------------------------------
# priors

def uniform_prior():
    """Flat prior; any positive constant gives the same Bayes estimate."""
    return lambda thetas: np.ones_like(np.asarray(thetas, dtype=float))


def truncated_gaussian_prior(mean: float, sd: float):
    """Gaussian shape restricted to the admissible interval by the quadrature."""
    if not (math.isfinite(mean) and math.isfinite(sd)) or sd <= 0.0:
        raise SpecError(f"prior needs a finite mean and positive sd, got {mean}, {sd}")
    return lambda thetas: np.exp(-((np.asarray(thetas, dtype=float) - mean) ** 2) / (2.0 * sd * sd))


PRIOR_REGISTRY = {
    "uniform": uniform_prior,
    "truncated_gaussian": truncated_gaussian_prior,
}


def _resolve_prior(prior, prior_params):
    if callable(prior):
        return prior
    if prior not in PRIOR_REGISTRY:
        raise SpecError(f"unknown prior {prior!r}; registered: {sorted(PRIOR_REGISTRY)}")
    return PRIOR_REGISTRY[prior](**(prior_params or {}))


# ---------------------------------------------------------------------------
# likelihood evaluation

def _check_data(spec: CuspModelSpec, data):
    want = _DATA_TYPES[spec.variant]
    if not isinstance(data, want):
        raise SpecError(
            f"{spec.variant} expects {want.__name__} data, got {type(data).__name__}"
        )
    if spec.variant == "poisson_periodic":
        if data.tau != spec.tau:
            raise SpecError(
                f"event record period {data.tau} does not match the model period {spec.tau}"
            )
        if data.n_periods != spec.n_periods:
            raise SpecError(
                f"event record spans {data.n_periods} periods but the model declares {spec.n_periods}"
            )


def _noise_scale(data: Trajectory) -> float:
    # A missing or zero recorded noise level drops the 1/eps^2 prefactor;
    # a positive constant factor never moves the maximizer or the posterior
    # mean under a flat prior, and zero-noise data is degenerate anyway.
    if data.epsilon is None or data.epsilon == 0.0:
        return 1.0
    return 1.0 / float(data.epsilon) ** 2


def _asymptotic_parameter(spec: CuspModelSpec, data) -> float:
    if spec.variant in ("gaussian_signal", "small_noise_dynamical"):
        if data.epsilon is None or data.epsilon <= 0.0:
            raise SpecError(
                "the trajectory carries no positive noise level; pass asymptotic_parameter explicitly"
            )
        return float(data.epsilon)
    if spec.variant == "iid_density":
        return float(data.values.size)
    if spec.variant == "poisson_periodic":
        return float(spec.n_periods)
    return float(data.horizon)


def _poisson_compensator(spec: CuspModelSpec, thetas: np.ndarray) -> np.ndarray:
    # integral of (lambda - 1) over one period, in closed form; the unit
    # reference rate cancels in likelihood ratios but is kept verbatim
    kp1 = spec.kappa + 1.0
    cusp = spec.a * (np.abs(spec.tau - thetas) ** kp1 - np.abs(thetas) ** kp1) / kp1
    h_part = spec.h.antiderivative(spec.tau - thetas) - spec.h.antiderivative(-thetas)
    return cusp + h_part - spec.tau


def _loglik_many(spec: CuspModelSpec, data, thetas: np.ndarray) -> np.ndarray:
    """Exact log-likelihood at each candidate location (vectorized, chunked)."""
    thetas = np.asarray(thetas, dtype=float)
    out = np.empty(thetas.size)
    if spec.variant == "gaussian_signal":
        increments = np.diff(data.values)
        times = data.times
        weights = np.full(times.size, data.step)
        weights[0] *= 0.5
        weights[-1] *= 0.5
        scale = _noise_scale(data)
        chunk = max(1, _CHUNK_OPS // times.size)
        for lo in range(0, thetas.size, chunk):
            block = thetas[lo : lo + chunk, None]
            s = signal_value(spec, 0.0, times[None, :] - block)
            out[lo : lo + chunk] = scale * (
                s[:, :-1] @ increments - 0.5 * (s * s) @ weights
            )
        return out
    if spec.variant == "iid_density":
        log_c = math.log(iid_normalizer(spec))
        values = data.values
        chunk = max(1, _CHUNK_OPS // values.size)
        for lo in range(0, thetas.size, chunk):
            y = values[None, :] - thetas[lo : lo + chunk, None]
            with np.errstate(divide="ignore"):
                log_h = np.log(spec.h.value(y))
            term = log_h + spec.a * np.sign(y) * np.abs(y) ** spec.kappa
            out[lo : lo + chunk] = values.size * log_c + np.sum(term, axis=1)
        bad = int(np.sum(~np.isfinite(out) & (out < 0)))
        if bad:
            _log.info("%d candidate locations hit a zero-density sentinel", bad)
        return out
    if spec.variant == "poisson_periodic":
        phases = np.mod(data.events, spec.tau)
        compensator = spec.n_periods * _poisson_compensator(spec, thetas)
        if phases.size == 0:
            return -compensator
        chunk = max(1, _CHUNK_OPS // phases.size)
        for lo in range(0, thetas.size, chunk):
            x = phases[None, :] - thetas[lo : lo + chunk, None]
            lam = spec.a * np.sign(x) * np.abs(x) ** spec.kappa + spec.h.value(x)
            if np.any(lam <= 0.0):
                raise SpecError("the intensity is not positive at an observed event")
            out[lo : lo + chunk] = np.sum(np.log(lam), axis=1)
        return out - compensator
    # state-driven models share the Girsanov form
    increments = np.diff(data.values)
    states = data.values
    weights = np.full(states.size, data.step)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    scale = _noise_scale(data) if spec.variant == "small_noise_dynamical" else 1.0
    chunk = max(1, _CHUNK_OPS // states.size)
    for lo in range(0, thetas.size, chunk):
        block = thetas[lo : lo + chunk, None]
        b = drift_value(spec, 0.0, states[None, :] - block)
        out[lo : lo + chunk] = scale * (b[:, :-1] @ increments - 0.5 * (b * b) @ weights)
    return out


def log_likelihood(spec: CuspModelSpec, data, theta: float) -> float:
    """Exact log-likelihood of one candidate location.

    Continuous-path models use the left-endpoint sum for the stochastic
    integral and the trapezoid rule for the quadratic compensator; the
    i.i.d. model sums log densities; the Poisson model sums log intensities
    at the events minus the closed-form mean measure.
    """
    _check_data(spec, data)
    theta = float(theta)
    if not (spec.alpha < theta < spec.beta):
        raise SpecError(
            f"theta = {theta} must lie inside the open admissible interval "
            f"({spec.alpha}, {spec.beta})"
        )
    return float(_loglik_many(spec, data, np.array([theta]))[0])


def likelihood_curve(spec: CuspModelSpec, data, thetas=None) -> LikelihoodCurve:
    """Exact log-likelihood on a grid (default: 1023 interior points)."""
    _check_data(spec, data)
    if thetas is None:
        thetas = np.linspace(spec.alpha, spec.beta, 1025)[1:-1]
    thetas = np.asarray(thetas, dtype=float)
    if thetas.size == 0:
        raise SpecError("the candidate grid is empty")
    if np.any(thetas <= spec.alpha) or np.any(thetas >= spec.beta) or np.any(np.diff(thetas) <= 0):
        raise SpecError("candidate locations must increase strictly inside the open interval")
    return LikelihoodCurve(thetas=thetas, loglik=_loglik_many(spec, data, thetas), model=spec)


# ---------------------------------------------------------------------------
# stage 1: coarse scan

def _correlate(weights: np.ndarray, kernel: np.ndarray, r_hi: int) -> np.ndarray:
    """corr[j] = sum_b weights[b] * kernel(b - j), kernel given for r <= r_hi.

    The kernel array lists values at consecutive integer offsets ending at
    r_hi, so corr[j] sits at index r_hi + j of the full correlation.
    """
    full = _sig.fftconvolve(weights, kernel[::-1], mode="full")
    return full, r_hi


def _gaussian_scan(spec: CuspModelSpec, data: Trajectory, pitch_target: float):
    """Half-offset lattice scan via FFT correlation (exact up to roundoff).

    Candidates sit at (m + 1/2) * step so the template never hits the cusp
    singularity; thinning keeps the lattice spacing at or under the target
    whenever the observation step allows it.
    """
    step = data.step
    n_inc = data.values.size - 1
    thin = max(1, int(math.floor(pitch_target / step)))
    m_lo = int(math.ceil(spec.alpha / step - 0.5 + 1e-9)) + 1
    m_hi = int(math.floor(spec.beta / step - 0.5 - 1e-9)) - 1
    ms = np.arange(m_lo, m_hi + 1, thin)
    if ms.size < 3:
        raise SpecError("the admissible interval holds fewer than three lattice candidates")
    if ms.size > _MAX_GRID:
        raise NumericalError(f"coarse lattice would need {ms.size} points; coarsen the grid")
    thetas = (ms + 0.5) * step
    # Ito term: offsets r = i - m over increments i = 0..n_inc-1
    r1 = np.arange(-m_hi, n_inc - m_lo)
    k1 = signal_value(spec, 0.0, (r1 - 0.5) * step)
    full1, hi1 = _correlate(np.diff(data.values), k1, r1[-1])
    # compensator: trapezoid weights over all n_inc + 1 grid values
    r2 = np.arange(-m_hi, n_inc + 1 - m_lo)
    k2 = signal_value(spec, 0.0, (r2 - 0.5) * step) ** 2
    weights = np.full(n_inc + 1, step)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    full2, hi2 = _correlate(weights, k2, r2[-1])
    scale = _noise_scale(data)
    values = scale * (full1[hi1 + ms] - 0.5 * full2[hi2 + ms])
    return thetas, values, thin * step


def _binned_iid_scan(spec: CuspModelSpec, data: Sample, pitch: float, count: int):
    """Histogram scan for large samples: counts correlated with a log-density
    template at cell centers. Bracketing accuracy only; stage 2 is exact."""
    thetas = spec.alpha + pitch * np.arange(1, count)
    bins = np.floor((data.values - spec.alpha) / pitch).astype(np.int64)
    b_lo = int(bins.min())
    bins -= b_lo
    n_bins = int(bins.max()) + 1
    counts = np.bincount(bins, minlength=n_bins).astype(float)
    j_shift = np.arange(1, count) - b_lo
    r = np.arange(-int(j_shift.max()), n_bins - int(j_shift.min()))
    x = (r + 0.5) * pitch
    template = np.log(spec.h.value(x)) + spec.a * np.sign(x) * np.abs(x) ** spec.kappa
    full, hi = _correlate(counts, template, r[-1])
    values = data.values.size * math.log(iid_normalizer(spec)) + full[hi + j_shift]
    return thetas, values, pitch


def _binned_scan(spec: CuspModelSpec, data: Trajectory, pitch: float, count: int):
    """State-occupation scan for the state-driven models.

    Observed states are binned at the lattice pitch; correlating the binned
    increment and time weights with the drift template approximates every
    lattice log-likelihood at once, good enough to bracket the maximizer.
    """
    thetas = spec.alpha + pitch * np.arange(1, count)
    bins = np.floor((data.values - spec.alpha) / pitch).astype(np.int64)
    b_lo = int(bins.min())
    bins -= b_lo
    n_bins = int(bins.max()) + 1
    w1 = np.bincount(bins[:-1], weights=np.diff(data.values), minlength=n_bins)
    tw = np.full(data.values.size, data.step)
    tw[0] *= 0.5
    tw[-1] *= 0.5
    w2 = np.bincount(bins, weights=tw, minlength=n_bins)
    # offsets r = b - j in shifted bin units; template at cell centers
    j_shift = np.arange(1, count) - b_lo
    r = np.arange(-int(j_shift.max()), n_bins - int(j_shift.min()))
    template = drift_value(spec, 0.0, (r + 0.5) * pitch)
    full1, hi1 = _correlate(w1, template, r[-1])
    full2, hi2 = _correlate(w2, template**2, r[-1])
    scale = _noise_scale(data) if spec.variant == "small_noise_dynamical" else 1.0
    values = scale * (full1[hi1 + j_shift] - 0.5 * full2[hi2 + j_shift])
    return thetas, values, pitch


def _stage1(spec: CuspModelSpec, data, coarse_step: float):
    """Coarse scan over the admissible interval; returns (thetas, values, pitch)."""
    span = spec.beta - spec.alpha
    if spec.variant == "gaussian_signal":
        return _gaussian_scan(spec, data, coarse_step)
    count = int(math.ceil(span / coarse_step))
    if count < 4:
        count = 4
    if count > _MAX_GRID:
        raise NumericalError(f"coarse grid would need {count} points; coarsen the grid")
    pitch = span / count
    n_data = data.events.size if isinstance(data, EventRecord) else data.values.size
    if n_data * (count - 1) > 4 * _CHUNK_OPS:
        if spec.variant in ("ergodic_diffusion", "small_noise_dynamical"):
            return _binned_scan(spec, data, pitch, count)
        if spec.variant == "iid_density":
            return _binned_iid_scan(spec, data, pitch, count)
    thetas = spec.alpha + pitch * np.arange(1, count)
    return thetas, _loglik_many(spec, data, thetas), pitch


# ---------------------------------------------------------------------------
# stage 2: bracketing trisection

def _trisect(spec: CuspModelSpec, data, center: float, pitch: float, final_step: float):
    margin = 1e-12 * (spec.beta - spec.alpha)
    lo = max(spec.alpha + margin, center - _BRACKET_CELLS * pitch)
    hi = min(spec.beta - margin, center + _BRACKET_CELLS * pitch)
    while True:
        pts = np.linspace(lo, hi, _SCAN_POINTS)
        vals = _loglik_many(spec, data, pts)
        best = int(np.argmax(vals))  # first maximum: ties go to the smallest theta
        s = (hi - lo) / (_SCAN_POINTS - 1)
        if s <= final_step:
            return float(pts[best]), float(s), float(vals[best])
        lo = max(spec.alpha + margin, pts[best] - 2.0 * s)
        hi = min(spec.beta - margin, pts[best] + 2.0 * s)


def _resolve_steps(spec, data, asymptotic_parameter, coarse_step, final_step):
    if coarse_step is None or final_step is None:
        p = asymptotic_parameter
        if p is None:
            p = _asymptotic_parameter(spec, data)
        phi = normalizing_rate(spec, p)
        if coarse_step is None:
            coarse_step = phi / 10.0
        if final_step is None:
            final_step = phi / 1000.0
    if coarse_step <= 0.0 or final_step <= 0.0:
        raise SpecError("grid steps must be positive")
    return float(coarse_step), float(final_step)


def mle(
    spec: CuspModelSpec,
    data,
    *,
    asymptotic_parameter: float | None = None,
    coarse_step: float | None = None,
    final_step: float | None = None,
) -> float:
    """Maximum-likelihood location: coarse scan plus bracketing trisection.

    Grid resolution is tied to the error scale phi of the model at the
    data's asymptotic parameter: the scan spacing targets phi/10 and the
    refinement stops at phi/1000. The objective is non-smooth, so no
    derivative-based step is ever taken.
    """
    _check_data(spec, data)
    coarse_step, final_step = _resolve_steps(spec, data, asymptotic_parameter, coarse_step, final_step)
    thetas, values, pitch = _stage1(spec, data, coarse_step)
    center = float(thetas[int(np.argmax(values))])
    theta, _, _ = _trisect(spec, data, center, pitch, final_step)
    return theta


# ---------------------------------------------------------------------------
# Bayes posterior mean

def _posterior_mean(thetas, loglik, prior_values) -> float:
    """Trapezoid posterior mean, stabilized by subtracting the peak."""
    loglik = np.asarray(loglik, dtype=float)
    finite = np.isfinite(loglik)
    if not np.any(finite):
        raise NumericalError("every candidate hit a zero-likelihood sentinel")
    dropped = int(loglik.size - np.count_nonzero(finite))
    if dropped:
        _log.info("excluding %d zero-likelihood candidates from the posterior", dropped)
    prior_values = np.asarray(prior_values, dtype=float)
    top = prior_values.max() if prior_values.size else 0.0
    if not math.isfinite(top) or top <= 0.0 or np.any(prior_values < 0.0):
        raise SpecError("prior values must be nonnegative with a positive maximum")
    weights = np.where(finite, np.exp(loglik - loglik[finite].max()), 0.0)
    weights = weights * (prior_values / top)
    den = np.trapezoid(weights, thetas)
    if not math.isfinite(den) or den <= 0.0:
        raise NumericalError("posterior normalization vanished")
    return float(np.trapezoid(thetas * weights, thetas) / den)


def _graded_offsets(scale: float) -> np.ndarray:
    """One-sided offsets dense at the origin, stretching to the far tail."""
    core = np.arange(0.0, _GRADED_CORE, 0.05)
    tail = [float(_GRADED_CORE)]
    while tail[-1] < _GRADED_REACH:
        tail.append(tail[-1] + 0.1 * math.sqrt(tail[-1]))
    return scale * np.concatenate([core, np.array(tail)])


def _refined_points(spec: CuspModelSpec, center: float, pitch: float) -> np.ndarray:
    """Refinement points near the maximizer: tenfold for kappa >= 0, graded
    for kappa < 0 where the posterior concentrates on the much smaller scale
    gamma^(-1/H) * phi, far below the lattice pitch."""
    margin = 1e-12 * (spec.beta - spec.alpha)
    lo = max(spec.alpha + margin, center - _REFINE_REACH * pitch)
    hi = min(spec.beta - margin, center + _REFINE_REACH * pitch)
    if spec.kappa >= 0.0:
        return np.linspace(lo, hi, 2 * _REFINE_REACH * _REFINE_FACTOR + 1)
    gamma = gamma_for_model(spec)
    u = _graded_offsets(gamma ** (-1.0 / hurst(spec.kappa)) * pitch)
    fine = np.concatenate([center - u[::-1], center + u[1:]])
    return fine[(fine > lo) & (fine < hi)]


def _posterior_grid(spec, data, thetas, values, center, pitch):
    """Scan grid merged with exact evaluations on the refinement points.

    Stage-1 values carry the far tail, where the posterior weight is
    negligible; near the maximizer every value is an exact evaluation."""
    fine = _refined_points(spec, center, pitch)
    fine_vals = _loglik_many(spec, data, fine)
    merged = np.concatenate([fine, thetas])
    merged_vals = np.concatenate([fine_vals, values])
    grid, first = np.unique(merged, return_index=True)
    return grid, merged_vals[first]


def bayes_estimate(
    spec: CuspModelSpec,
    data,
    prior="uniform",
    *,
    prior_params: dict | None = None,
    asymptotic_parameter: float | None = None,
    coarse_step: float | None = None,
    final_step: float | None = None,
) -> float:
    """Posterior-mean location under a registry prior (uniform by default)."""
    _check_data(spec, data)
    prior_fn = _resolve_prior(prior, prior_params)
    coarse_step, final_step = _resolve_steps(spec, data, asymptotic_parameter, coarse_step, final_step)
    thetas, values, pitch = _stage1(spec, data, coarse_step)
    center = float(thetas[int(np.argmax(values))])
    grid, loglik = _posterior_grid(spec, data, thetas, values, center, pitch)
    return _posterior_mean(grid, loglik, prior_fn(grid))


def normalized_errors(
    spec: CuspModelSpec,
    theta_mle: float,
    theta_bayes: float,
    theta0: float,
    asymptotic_parameter: float,
) -> tuple:
    """Estimation errors divided by the error scale phi."""
    phi = normalizing_rate(spec, asymptotic_parameter)
    return ((theta_mle - theta0) / phi, (theta_bayes - theta0) / phi)


def estimate(
    spec: CuspModelSpec,
    data,
    prior="uniform",
    *,
    prior_params: dict | None = None,
    theta0: float | None = None,
    asymptotic_parameter: float | None = None,
    coarse_step: float | None = None,
    final_step: float | None = None,
) -> EstimationResult:
    """Run both estimators on one data set, sharing a single coarse scan."""
    _check_data(spec, data)
    prior_fn = _resolve_prior(prior, prior_params)
    if asymptotic_parameter is None:
        asymptotic_parameter = _asymptotic_parameter(spec, data)
    coarse_step, final_step = _resolve_steps(spec, data, asymptotic_parameter, coarse_step, final_step)
    thetas, values, pitch = _stage1(spec, data, coarse_step)
    center = float(thetas[int(np.argmax(values))])
    theta_mle, s_final, loglik_at = _trisect(spec, data, center, pitch, final_step)
    grid, loglik = _posterior_grid(spec, data, thetas, values, center, pitch)
    theta_bayes = _posterior_mean(grid, loglik, prior_fn(grid))
    errors = None
    if theta0 is not None:
        errors = normalized_errors(spec, theta_mle, theta_bayes, theta0, asymptotic_parameter)
    return EstimationResult(
        theta_mle=theta_mle,
        theta_bayes=theta_bayes,
        grid_step_final=s_final,
        loglik_at_mle=loglik_at,
        normalized_errors=errors,
    )
