"""The five observation models built around a cusp-shaped location signal.

Every model hides the same local shape a sgn(x)|x|^kappa near the unknown
location: as a drift ramp observed in white Gaussian noise, as a marginal
density of an i.i.d. sample, as a periodic Poisson intensity, as the drift
of an ergodic diffusion, and as the dynamics of a small-noise system.
This module holds the parameterization, the model functions themselves,
and exact seedable simulators for all five.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from ._rng import rng_for
from .constants import VARIANTS
from .errors import NumericalError, SpecError

_log = logging.getLogger(__name__)

# |x|^kappa is clamped below this for negative exponents; any continuous
# sampling scheme misses the exact singular point with probability one.
_SINGULARITY_CLAMP = 1e-12

_POSITIVITY_GRID = 8193
_ENVELOPE_GRID = 16385
_ENVELOPE_SAFETY = 1.001
_THINNING_SAFETY = 1.001
_ESCAPE_BOUND = 1000.0


# ---------------------------------------------------------------------------
# nuisance-function registry

_H_NAMES = ("constant", "linear", "gaussian_bump")


@dataclass(frozen=True)
class HFunction:
    """One nuisance term from the closed registry of named shapes.

    constant(c) is c everywhere, linear(b) is -b*x, and
    gaussian_bump(c, width) is c*exp(-x^2 / (2 width^2)).
    """

    name: str
    scale: float
    width: float = 1.0

    def __post_init__(self):
        if self.name not in _H_NAMES:
            raise SpecError(f"unknown nuisance function {self.name!r}; choose from {_H_NAMES}")
        if not math.isfinite(self.scale):
            raise SpecError(f"nuisance scale must be finite, got {self.scale}")
        if not math.isfinite(self.width) or self.width <= 0.0:
            raise SpecError(f"nuisance width must be a positive real, got {self.width}")

    def value(self, x):
        """Evaluate h pointwise; accepts scalars or arrays."""
        x = np.asarray(x, dtype=float)
        if self.name == "constant":
            return np.full_like(x, self.scale)
        if self.name == "linear":
            return -self.scale * x
        return self.scale * np.exp(-(x * x) / (2.0 * self.width**2))

    def antiderivative(self, x):
        """Integral of h from 0 to x; accepts scalars or arrays."""
        x = np.asarray(x, dtype=float)
        if self.name == "constant":
            return self.scale * x
        if self.name == "linear":
            return -0.5 * self.scale * x * x
        root2 = math.sqrt(2.0)
        return self.scale * self.width * math.sqrt(math.pi / 2.0) * special.erf(x / (root2 * self.width))


def constant(c: float) -> HFunction:
    """Constant nuisance h(x) = c."""
    return HFunction(name="constant", scale=float(c))


def linear(b: float) -> HFunction:
    """Mean-reverting nuisance h(x) = -b x; the slope b must be positive."""
    b = float(b)
    if not b > 0.0:
        raise SpecError(f"linear nuisance needs a positive slope, got {b}")
    return HFunction(name="linear", scale=b)


def gaussian_bump(c: float, width: float = 1.0) -> HFunction:
    """Bell-shaped nuisance h(x) = c exp(-x^2 / (2 width^2)) with c > 0."""
    c = float(c)
    if not c > 0.0:
        raise SpecError(f"gaussian_bump needs a positive height, got {c}")
    return HFunction(name="gaussian_bump", scale=c, width=float(width))


# ---------------------------------------------------------------------------
# cusp shape

def _cusp_term(a: float, kappa: float, x):
    """a sgn(x)|x|^kappa, with |x| clamped away from 0 for negative kappa."""
    x = np.asarray(x, dtype=float)
    magnitude = np.abs(x)
    if kappa < 0.0:
        magnitude = np.maximum(magnitude, _SINGULARITY_CLAMP)
    return a * np.sign(x) * magnitude**kappa


def _maybe_scalar(out: np.ndarray):
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# model parameterization

@dataclass(frozen=True)
class CuspModelSpec:
    """Full parameterization of one observation model.

    variant selects the observation scheme; kappa the cusp exponent; a the
    cusp amplitude (a = 0 is accepted so degenerate no-cusp checks can be
    simulated, but estimation entry points reject it); theta0 the true
    location; (alpha, beta) the open location domain.  The remaining fields
    apply only where noted: signal picks the Gaussian-model drift shape
    ("ramp": the three-piece normalized ramp of half-width delta; "cusp":
    cusp term plus nuisance), h the nuisance function, T the time horizon,
    epsilon the noise scale, tau and n_periods the period structure, x0
    the starting state.
    """

    variant: str
    kappa: float
    theta0: float
    alpha: float
    beta: float
    a: float = 1.0
    signal: str = "cusp"
    delta: float | None = None
    h: HFunction | None = None
    T: float | None = None
    epsilon: float | None = None
    tau: float | None = None
    n_periods: int | None = None
    x0: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise SpecError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if not math.isfinite(self.a):
            raise SpecError(f"cusp amplitude must be finite, got {self.a}")
        for label, value in (("theta0", self.theta0), ("alpha", self.alpha), ("beta", self.beta)):
            if not math.isfinite(value):
                raise SpecError(f"{label} must be finite, got {value}")
        if not self.alpha < self.beta:
            raise SpecError(f"need alpha < beta, got ({self.alpha}, {self.beta})")
        if not self.alpha < self.theta0 < self.beta:
            raise SpecError(
                f"theta0 = {self.theta0} must lie inside the open domain ({self.alpha}, {self.beta})"
            )
        getattr(self, f"_validate_{self.variant}")()

    # -- shared pieces ----------------------------------------------------

    def _require_kappa_cusp_range(self):
        if not -0.5 < self.kappa < 0.5:
            raise SpecError(f"kappa must lie in (-1/2, 1/2), got {self.kappa}")

    def _require_kappa_positive_range(self):
        if not 0.0 < self.kappa < 0.5:
            raise SpecError(
                f"the {self.variant} model needs kappa in (0, 1/2), got {self.kappa}"
            )

    def _require_horizon(self):
        if self.T is None or not math.isfinite(self.T) or self.T <= 0.0:
            raise SpecError(f"this variant needs a positive horizon T, got {self.T}")

    def _require_noise(self):
        if self.epsilon is None or not math.isfinite(self.epsilon) or self.epsilon < 0.0:
            raise SpecError(f"this variant needs a noise scale epsilon >= 0, got {self.epsilon}")

    def _require_h(self):
        if self.h is None:
            raise SpecError(f"the {self.variant} model needs a nuisance function h")

    # -- per-variant validation --------------------------------------------

    def _validate_gaussian_signal(self):
        self._require_horizon()
        self._require_noise()
        if self.signal == "ramp":
            self._require_kappa_cusp_range()
            if self.delta is None or not math.isfinite(self.delta) or self.delta <= 0.0:
                raise SpecError(f"the ramp signal needs a positive half-width delta, got {self.delta}")
            if not (self.alpha > self.delta and self.beta < self.T - self.delta):
                raise SpecError(
                    f"the ramp must fit inside the horizon: need alpha > delta and "
                    f"beta < T - delta, got alpha={self.alpha}, beta={self.beta}, "
                    f"delta={self.delta}, T={self.T}"
                )
        elif self.signal == "cusp":
            self._require_h()
            if not (-0.5 < self.kappa < 0.5 or 0.5 < self.kappa < 1.0):
                raise SpecError(
                    f"the cusp signal needs kappa in (-1/2, 1/2) or the smooth "
                    f"band (1/2, 1), got {self.kappa}"
                )
            if not (0.0 < self.alpha and self.beta < self.T):
                raise SpecError(
                    f"need 0 < alpha < beta < T, got ({self.alpha}, {self.beta}) with T={self.T}"
                )
        else:
            raise SpecError(f"unknown signal form {self.signal!r}; choose 'ramp' or 'cusp'")

    def _validate_iid_density(self):
        self._require_kappa_positive_range()
        self._require_h()
        if self.h.name != "gaussian_bump":
            raise SpecError(
                "the i.i.d. marginal density is normalizable only with the "
                f"gaussian_bump nuisance, got {self.h.name!r}"
            )

    def _validate_poisson_periodic(self):
        self._require_kappa_positive_range()
        self._require_h()
        if self.tau is None or not math.isfinite(self.tau) or self.tau <= 0.0:
            raise SpecError(f"the periodic model needs a positive period tau, got {self.tau}")
        if self.n_periods is None or int(self.n_periods) != self.n_periods or self.n_periods < 1:
            raise SpecError(f"the periodic model needs an integer period count >= 1, got {self.n_periods}")
        if not (0.0 < self.alpha and self.beta < self.tau):
            raise SpecError(
                f"need 0 < alpha < beta < tau, got ({self.alpha}, {self.beta}) with tau={self.tau}"
            )
        # the intensity profile must stay positive for every admissible
        # location, i.e. on the full argument range (-beta, tau - alpha)
        args = np.linspace(-self.beta, self.tau - self.alpha, _POSITIVITY_GRID)
        profile = _cusp_term(self.a, self.kappa, args) + self.h.value(args)
        if np.min(profile) <= 0.0:
            worst = args[int(np.argmin(profile))]
            raise SpecError(
                f"the intensity profile drops to {np.min(profile):.3g} at offset "
                f"{worst:.3g}; it must stay positive over the whole period"
            )

    def _validate_ergodic_diffusion(self):
        self._require_kappa_positive_range()
        self._require_h()
        if self.h.name != "linear":
            raise SpecError(
                "the ergodic diffusion needs the mean-reverting linear nuisance, "
                f"got {self.h.name!r}"
            )
        if not math.isfinite(self.x0):
            raise SpecError(f"x0 must be finite, got {self.x0}")

    def _validate_small_noise_dynamical(self):
        self._require_kappa_positive_range()
        self._require_h()
        self._require_horizon()
        self._require_noise()
        if not self.alpha > self.x0:
            raise SpecError(f"need alpha > x0, got alpha={self.alpha}, x0={self.x0}")
        # the dynamics must be strictly increasing for every admissible
        # location, and every location must be reached before the horizon
        terminals = []
        for theta in np.linspace(self.alpha, self.beta, 9):
            terminals.append(_checked_ode_terminal(self, float(theta)))
        if not self.beta < min(terminals):
            raise SpecError(
                f"beta = {self.beta} is not reached by the horizon: the slowest "
                f"noise-free path ends at {min(terminals):.6g}; lower beta or raise T"
            )


def _scalar_h(h: HFunction):
    """Plain-float evaluator for h, for the step-by-step integrators."""
    if h.name == "constant":
        c = h.scale
        return lambda y: c
    if h.name == "linear":
        b = h.scale
        return lambda y: -b * y
    c, w = h.scale, h.width
    return lambda y: c * math.exp(-(y * y) / (2.0 * w * w))


def _checked_rate(spec: CuspModelSpec, theta: float):
    """Scalar rate x -> drift(x - theta), raising if it is not positive."""
    a, kappa = spec.a, spec.kappa
    h_at = _scalar_h(spec.h)

    def rate(x: float) -> float:
        y = x - theta
        value = math.copysign(a * abs(y) ** kappa, y) + h_at(y)
        if value <= 0.0:
            raise SpecError(
                f"the dynamical rate drops to {value:.3g} at state {x:.6g} with "
                f"location {theta:.6g}; it must stay positive"
            )
        return value

    return rate


def _checked_ode_terminal(spec: CuspModelSpec, theta: float) -> float:
    """Noise-free terminal state, verifying positivity of the rate en route."""
    n_steps = 1000
    step = spec.T / n_steps
    rate = _checked_rate(spec, theta)
    x = spec.x0
    for _ in range(n_steps):
        k1 = rate(x)
        k2 = rate(x + 0.5 * step * k1)
        k3 = rate(x + 0.5 * step * k2)
        k4 = rate(x + step * k3)
        x += step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return x


# ---------------------------------------------------------------------------
# observation containers

@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled path on [0, step * (len(values) - 1)]."""

    values: np.ndarray
    step: float
    epsilon: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 2 or not np.all(np.isfinite(values)):
            raise SpecError("a trajectory needs a 1-d finite value array of length >= 2")
        if not math.isfinite(self.step) or self.step <= 0.0:
            raise SpecError(f"step must be a positive real, got {self.step}")

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(self.values.size)

    @property
    def horizon(self) -> float:
        return self.step * (self.values.size - 1)


@dataclass(frozen=True)
class EventRecord:
    """Sorted event times of a periodic counting-process observation."""

    events: np.ndarray
    tau: float
    n_periods: int

    def __post_init__(self):
        events = np.asarray(self.events, dtype=float)
        object.__setattr__(self, "events", events)
        if events.ndim != 1:
            raise SpecError("events must form a 1-d array")
        if events.size and (np.any(np.diff(events) < 0) or events[0] < 0 or events[-1] > self.tau * self.n_periods):
            raise SpecError("events must be sorted and lie within [0, tau * n_periods]")


@dataclass(frozen=True)
class Sample:
    """An unordered batch of independent scalar observations."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 1:
            raise SpecError("a sample needs a 1-d array with at least one value")


# ---------------------------------------------------------------------------
# Gaussian signal model

def signal_value(spec: CuspModelSpec, theta: float, t):
    """Drift value at time t for a candidate location theta.

    The ramp form rises from 0 to 1 over [theta - delta, theta + delta]
    through a normalized cusp; the cusp form is the raw cusp term plus the
    nuisance.  Accepts scalar or array t.
    """
    if spec.variant != "gaussian_signal":
        raise SpecError(f"signal_value applies to the gaussian_signal model, not {spec.variant}")
    x = np.asarray(t, dtype=float) - theta
    if spec.signal == "ramp":
        ramp = 0.5 * (1.0 + _cusp_term(1.0, spec.kappa, x) / spec.delta**spec.kappa)
        return _maybe_scalar(np.where(x <= -spec.delta, 0.0, np.where(x >= spec.delta, 1.0, ramp)))
    return _maybe_scalar(_cusp_term(spec.a, spec.kappa, x) + spec.h.value(x))


def simulate_gaussian_signal(spec: CuspModelSpec, grid_step: float, seed: int) -> Trajectory:
    """Euler path of dX = S(theta0, t) dt + epsilon dW from X(0) = 0."""
    if spec.variant != "gaussian_signal":
        raise SpecError(f"simulate_gaussian_signal needs the gaussian_signal model, not {spec.variant}")
    n_steps = _commensurate_steps(spec.T, grid_step)
    times = grid_step * np.arange(n_steps)
    drift = signal_value(spec, spec.theta0, times) * grid_step
    noise = spec.epsilon * math.sqrt(grid_step) * rng_for(seed).standard_normal(n_steps)
    values = np.concatenate(([0.0], np.cumsum(drift + noise)))
    return Trajectory(values=values, step=grid_step, epsilon=spec.epsilon)


def _commensurate_steps(span: float, step: float) -> int:
    if not math.isfinite(step) or step <= 0.0:
        raise SpecError(f"step must be a positive real, got {step}")
    n = round(span / step)
    if n < 1 or abs(n * step - span) > 1e-9 * span:
        raise SpecError(f"step {step} does not divide the span {span}")
    return n


def fold_periods(trajectory: Trajectory, tau: float, n: int) -> Trajectory:
    """Average the n period segments of a path on [0, n tau] into one.

    The folded path keeps the per-period drift while shrinking the noise
    scale by sqrt(n), turning a periodic observation into a small-noise
    one on [0, tau].
    """
    if int(n) != n or n < 1:
        raise SpecError(f"period count must be an integer >= 1, got {n}")
    n = int(n)
    per = _commensurate_steps(tau, trajectory.step)
    if trajectory.values.size != n * per + 1:
        raise SpecError(
            f"the path has {trajectory.values.size} samples but {n} periods of "
            f"{per} steps need {n * per + 1}"
        )
    starts = per * np.arange(n)[:, None]
    segments = trajectory.values[starts + np.arange(per + 1)[None, :]]
    folded = (segments - segments[:, :1]).mean(axis=0)
    scaled = None if trajectory.epsilon is None else trajectory.epsilon / math.sqrt(n)
    return Trajectory(values=folded, step=trajectory.step, epsilon=scaled)


def estimate_noise_level(trajectory: Trajectory) -> float:
    """Recover the noise scale from realized quadratic variation.

    The sum of squared increments over the horizon converges to epsilon^2;
    the drift contributes only O(step).
    """
    increments = np.diff(trajectory.values)
    if increments.size < 100:
        warnings.warn(
            f"only {increments.size} increments; the noise-level estimate is imprecise",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(np.sqrt(np.sum(increments * increments) / (trajectory.step * increments.size)))


# ---------------------------------------------------------------------------
# i.i.d. density model

def iid_normalizer(spec: CuspModelSpec) -> float:
    """Constant c making c * h(y) exp(a sgn(y)|y|^kappa) a probability density."""
    if spec.variant != "iid_density":
        raise SpecError(f"iid_normalizer applies to the iid_density model, not {spec.variant}")

    def unnormalized(y: float) -> float:
        return float(spec.h.value(y)) * math.exp(float(_cusp_term(spec.a, spec.kappa, y)))

    total = 0.0
    for lo, hi in ((-np.inf, 0.0), (0.0, np.inf)):
        value, _ = integrate.quad(unnormalized, lo, hi, limit=200)
        total += value
    if not math.isfinite(total) or total <= 0.0:
        raise NumericalError(f"density normalization integral came out as {total}")
    return 1.0 / total


def iid_density(spec: CuspModelSpec, theta: float, x):
    """Marginal density c * h(x - theta) exp(a sgn(x - theta)|x - theta|^kappa)."""
    c = iid_normalizer(spec)
    y = np.asarray(x, dtype=float) - theta
    return _maybe_scalar(c * spec.h.value(y) * np.exp(_cusp_term(spec.a, spec.kappa, y)))


def _iid_envelope(spec: CuspModelSpec) -> tuple[float, float]:
    """Dominating-constant and proposal width for rejection sampling.

    Proposals come from a centered Gaussian of doubled variance; the bound
    on unnormalized-density over proposal-density is taken on a wide grid
    with a safety factor, and rechecked at every proposal.
    """
    width = spec.h.width * math.sqrt(2.0)
    grid = np.linspace(-12.0 * spec.h.width, 12.0 * spec.h.width, _ENVELOPE_GRID)
    unnormalized = spec.h.value(grid) * np.exp(_cusp_term(spec.a, spec.kappa, grid))
    proposal = np.exp(-(grid * grid) / (2.0 * width**2)) / (width * math.sqrt(2.0 * math.pi))
    bound = _ENVELOPE_SAFETY * float(np.max(unnormalized / proposal))
    return bound, width


def simulate_iid(spec: CuspModelSpec, n: int, seed: int) -> Sample:
    """n independent draws from the marginal density, by rejection."""
    if spec.variant != "iid_density":
        raise SpecError(f"simulate_iid needs the iid_density model, not {spec.variant}")
    if int(n) != n or n < 1:
        raise SpecError(f"sample size must be an integer >= 1, got {n}")
    n = int(n)
    bound, width = _iid_envelope(spec)
    rng = rng_for(seed)
    out = np.empty(n)
    filled = 0
    proposed = 0
    while filled < n:
        batch = max(4096, 2 * (n - filled))
        y = width * rng.standard_normal(batch)
        unnormalized = spec.h.value(y) * np.exp(_cusp_term(spec.a, spec.kappa, y))
        ceiling = bound * np.exp(-(y * y) / (2.0 * width**2)) / (width * math.sqrt(2.0 * math.pi))
        if np.any(unnormalized > ceiling):
            raise NumericalError("the rejection envelope was exceeded; the dominating bound is wrong")
        keep = y[rng.random(batch) * ceiling < unnormalized]
        proposed += batch
        take = min(keep.size, n - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    _log.info("rejection sampler accepted %.1f%% of %d proposals", 100.0 * n / proposed, proposed)
    return Sample(values=spec.theta0 + out)


# ---------------------------------------------------------------------------
# periodic Poisson model

def poisson_intensity(spec: CuspModelSpec, theta: float, t):
    """Periodic intensity: the cusp-plus-nuisance profile anchored at theta.

    The profile is laid out over one period [0, tau) of the time axis and
    repeated, so the cusp sits at phase theta in every period.
    """
    if spec.variant != "poisson_periodic":
        raise SpecError(f"poisson_intensity applies to the poisson_periodic model, not {spec.variant}")
    x = np.mod(np.asarray(t, dtype=float), spec.tau) - theta
    return _maybe_scalar(_cusp_term(spec.a, spec.kappa, x) + spec.h.value(x))


def poisson_period_integral(spec: CuspModelSpec, theta: float) -> float:
    """Integral of the intensity profile over one period, in closed form."""
    if spec.variant != "poisson_periodic":
        raise SpecError(f"poisson_period_integral applies to the poisson_periodic model, not {spec.variant}")
    kp1 = spec.kappa + 1.0
    cusp_part = spec.a * (abs(spec.tau - theta) ** kp1 - abs(theta) ** kp1) / kp1
    h_part = float(spec.h.antiderivative(spec.tau - theta) - spec.h.antiderivative(-theta))
    return cusp_part + h_part


def simulate_poisson(spec: CuspModelSpec, seed: int) -> EventRecord:
    """Events of the periodic counting process over n_periods periods.

    Thinning against a gridded intensity ceiling (with a safety factor,
    rechecked at every proposal) keeps the draw exact.
    """
    if spec.variant != "poisson_periodic":
        raise SpecError(f"simulate_poisson needs the poisson_periodic model, not {spec.variant}")
    phases = np.linspace(0.0, spec.tau, _POSITIVITY_GRID)[:-1]
    ceiling = _THINNING_SAFETY * float(np.max(poisson_intensity(spec, spec.theta0, phases)))
    rng = rng_for(seed)
    span = spec.tau * spec.n_periods
    count = rng.poisson(ceiling * span)
    times = np.sort(rng.uniform(0.0, span, count))
    rates = poisson_intensity(spec, spec.theta0, times)
    if np.any(rates > ceiling):
        raise NumericalError("the thinning ceiling was exceeded; the intensity grid missed its peak")
    events = times[rng.random(count) * ceiling < rates]
    return EventRecord(events=events, tau=spec.tau, n_periods=spec.n_periods)


# ---------------------------------------------------------------------------
# ergodic diffusion model

def drift_value(spec: CuspModelSpec, theta: float, x):
    """State-dependent drift a sgn(x - theta)|x - theta|^kappa + h(x - theta)."""
    if spec.variant not in ("ergodic_diffusion", "small_noise_dynamical"):
        raise SpecError(f"drift_value applies to the state-driven models, not {spec.variant}")
    y = np.asarray(x, dtype=float) - theta
    return _maybe_scalar(_cusp_term(spec.a, spec.kappa, y) + spec.h.value(y))


def _stationary_exponent(spec: CuspModelSpec, y):
    """Twice the integral of the drift from 0 to y (log of the unnormalized law)."""
    y = np.asarray(y, dtype=float)
    kp1 = spec.kappa + 1.0
    return 2.0 * (spec.a * np.abs(y) ** kp1 / kp1 + spec.h.antiderivative(y))


def invariant_density_normalizer(spec: CuspModelSpec) -> float:
    """Constant G making G exp(2 * integral of drift) a probability density."""
    if spec.variant != "ergodic_diffusion":
        raise SpecError(f"invariant_density_normalizer applies to the ergodic_diffusion model, not {spec.variant}")

    def unnormalized(y: float) -> float:
        return math.exp(float(_stationary_exponent(spec, y)))

    total = 0.0
    for lo, hi in ((-np.inf, 0.0), (0.0, np.inf)):
        value, _ = integrate.quad(unnormalized, lo, hi, limit=200)
        total += value
    if not math.isfinite(total) or total <= 0.0:
        raise NumericalError(f"stationary-law normalization integral came out as {total}")
    return 1.0 / total


def invariant_density(spec: CuspModelSpec, x):
    """Stationary density of the diffusion, centered at theta0."""
    G = invariant_density_normalizer(spec)
    law = G * np.exp(_stationary_exponent(spec, np.asarray(x, dtype=float) - spec.theta0))
    return _maybe_scalar(law)


def simulate_ergodic_diffusion(
    spec: CuspModelSpec,
    T: float,
    step: float = 1e-3,
    burnin: float | None = None,
    seed: int = 0,
    escape: float = _ESCAPE_BOUND,
) -> Trajectory:
    """Euler path of dX = drift dt + dW after discarding a burn-in stretch.

    The default burn-in is ten mean-reversion times of the linear nuisance.
    A path wandering farther than `escape` from theta0 aborts with a hint
    to shrink the step.
    """
    if spec.variant != "ergodic_diffusion":
        raise SpecError(f"simulate_ergodic_diffusion needs the ergodic_diffusion model, not {spec.variant}")
    if burnin is None:
        burnin = 10.0 / spec.h.scale
    n_burn = _commensurate_steps(burnin, step) if burnin > 0.0 else 0
    n_keep = _commensurate_steps(T, step)
    noise = (math.sqrt(step) * rng_for(seed).standard_normal(n_burn + n_keep)).tolist()
    theta0, a, kappa, b = spec.theta0, spec.a, spec.kappa, spec.h.scale
    values = np.empty(n_keep + 1)
    x = spec.x0
    for i in range(n_burn):
        y = x - theta0
        x += (math.copysign(a * abs(y) ** kappa, y) - b * y) * step + noise[i]
        if abs(x - theta0) > escape:
            raise NumericalError(
                f"the diffusion escaped past |x - theta0| = {escape:g} during "
                f"burn-in; try a smaller step"
            )
    values[0] = x
    for i in range(n_keep):
        y = x - theta0
        x += (math.copysign(a * abs(y) ** kappa, y) - b * y) * step + noise[n_burn + i]
        if abs(x - theta0) > escape:
            raise NumericalError(
                f"the diffusion escaped past |x - theta0| = {escape:g} at step {i}; "
                f"try a smaller step"
            )
        values[i + 1] = x
    return Trajectory(values=values, step=step, epsilon=None)


# ---------------------------------------------------------------------------
# small-noise dynamical model

def ode_limit_path(spec: CuspModelSpec, T: float, step: float) -> Trajectory:
    """Noise-free limit path: dx/dt = drift(x), by the classical 4th-order method."""
    if spec.variant != "small_noise_dynamical":
        raise SpecError(f"ode_limit_path needs the small_noise_dynamical model, not {spec.variant}")
    n_steps = _commensurate_steps(T, step)
    rate = _checked_rate(spec, spec.theta0)
    values = np.empty(n_steps + 1)
    values[0] = spec.x0
    x = spec.x0
    for i in range(n_steps):
        k1 = rate(x)
        k2 = rate(x + 0.5 * step * k1)
        k3 = rate(x + 0.5 * step * k2)
        k4 = rate(x + step * k3)
        x += step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        values[i + 1] = x
    if np.any(np.diff(values) <= 0.0):
        raise NumericalError(
            "the integrated path is not strictly increasing although the rate is "
            "positive; use a smaller step"
        )
    return Trajectory(values=values, step=step, epsilon=0.0)


def simulate_dynamical(spec: CuspModelSpec, T: float, step: float, seed: int) -> Trajectory:
    """Euler path of dX = drift(X) dt + epsilon dW from X(0) = x0."""
    if spec.variant != "small_noise_dynamical":
        raise SpecError(f"simulate_dynamical needs the small_noise_dynamical model, not {spec.variant}")
    n_steps = _commensurate_steps(T, step)
    noise = (spec.epsilon * math.sqrt(step) * rng_for(seed).standard_normal(n_steps)).tolist()
    theta0, a, kappa = spec.theta0, spec.a, spec.kappa
    h_at = _scalar_h(spec.h)
    values = np.empty(n_steps + 1)
    values[0] = spec.x0
    x = spec.x0
    for i in range(n_steps):
        y = x - theta0
        x += (math.copysign(a * abs(y) ** kappa, y) + h_at(y)) * step + noise[i]
        values[i + 1] = x
    return Trajectory(values=values, step=step, epsilon=spec.epsilon)
