"""Structural constants shared by all five observation models.

Four quantities drive everything downstream: the L2 norm gamma_star of the
cusp increment kernel, the Hurst index H = kappa + 1/2, the model-specific
scale gamma multiplying the fractional Brownian motion in the limit
likelihood ratio, and the normalizing rate phi at which estimation errors
shrink as the asymptotic parameter (noise level, sample size, or horizon)
improves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import NumericalError, SpecError

# Core window for the kernel-norm quadrature; beyond it the integrand is
# replaced by its asymptotic series (decay |s|^(2*kappa - 2) is too slow to
# truncate outright for kappa near 1/2).
_TAIL_WINDOW = 1.0e4

_SMALL_NOISE = ("gaussian_signal", "small_noise_dynamical")
_COUNT_DRIVEN = ("iid_density", "poisson_periodic")

VARIANTS = (
    "gaussian_signal",
    "iid_density",
    "poisson_periodic",
    "ergodic_diffusion",
    "small_noise_dynamical",
)


def _check_cusp_exponent(kappa: float) -> float:
    kappa = float(kappa)
    if not math.isfinite(kappa) or not -0.5 < kappa < 0.5:
        raise SpecError(f"cusp exponent must lie in (-1/2, 1/2), got {kappa}")
    return kappa


def hurst(kappa: float) -> float:
    """Hurst index of the limit fractional Brownian motion, kappa + 1/2."""
    return _check_cusp_exponent(kappa) + 0.5


def _increment_kernel_sq(s: float, kappa: float) -> float:
    # [sgn(s-1)|s-1|^kappa - sgn(s)|s|^kappa]^2; the quadrature below never
    # evaluates exactly at the kink points s = 0, 1.
    left = math.copysign(abs(s - 1.0) ** kappa, s - 1.0) if s != 1.0 else 0.0
    right = math.copysign(abs(s) ** kappa, s) if s != 0.0 else 0.0
    return (left - right) ** 2


def _tail_beyond(window: float, kappa: float) -> float:
    # Asymptotic value of the kernel-norm integral over (window, infinity),
    # where the integrand equals [(u+1)^k - u^k]^2 after shifting.  Expanding
    # (1 + 1/u)^k gives kappa^2 u^(2k-2) [1 + (k-1)/u + c2/u^2 + O(u^-3)];
    # at window = 1e4 the dropped term is below 1e-12 for |k| < 1/2.
    k = kappa
    c2 = (k - 1.0) ** 2 / 4.0 + (k - 1.0) * (k - 2.0) / 3.0
    return (k * k) * (
        window ** (2.0 * k - 1.0) / (1.0 - 2.0 * k)
        + (k - 1.0) * window ** (2.0 * k - 2.0) / (2.0 - 2.0 * k)
        + c2 * window ** (2.0 * k - 3.0) / (3.0 - 2.0 * k)
    )


def gamma_star_sq(kappa: float) -> float:
    """Squared L2 norm of the cusp increment kernel.

    Computed as adaptive quadrature of the defining integrand on a finite
    core window split at the kink points (where the integrand is unbounded
    but integrable for kappa < 0), plus the analytic tail correction for
    both ends of the line.  Absolute accuracy is well below 1e-8 across the
    admissible range.
    """
    kappa = _check_cusp_exponent(kappa)
    w = _TAIL_WINDOW
    panels = ((-w, -1.0), (-1.0, 0.0), (0.0, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, w + 1.0))
    core = 0.0
    budget = 0.0
    for lo, hi in panels:
        # full_output suppresses the roundoff warning QUADPACK emits when a
        # singular panel saturates below the requested tolerance; the actual
        # error estimate is checked against an explicit budget instead.
        out = integrate.quad(
            _increment_kernel_sq, lo, hi, args=(kappa,),
            epsabs=1e-12, epsrel=1e-12, limit=800, full_output=1,
        )
        core += out[0]
        budget += out[1]
    # Relative budget: the estimate saturates near the edges of the exponent
    # range where the integrand is barely integrable, while the value itself
    # grows like 2 / (2 kappa + 1).
    if budget > 1e-8 * max(1.0, abs(core)):
        raise NumericalError(
            f"kernel-norm quadrature error estimate {budget:.2e} exceeds budget at kappa={kappa}"
        )
    return core + 2.0 * _tail_beyond(w, kappa)


def gamma_star(kappa: float) -> float:
    """L2 norm of the cusp increment kernel (square root of gamma_star_sq)."""
    return math.sqrt(gamma_star_sq(kappa))


def gamma_for_model(spec) -> float:
    """Limit scale gamma for one observation model.

    The scale depends on the local geometry of the model at the cusp: the
    ramp signal contributes its slope normalization 1/(2 delta^kappa), the
    density-driven models weigh the cusp amplitude by the information
    density at the cusp point, and the ergodic diffusion by the invariant
    density normalizer.
    """
    kappa = spec.kappa
    gs = gamma_star(kappa)
    variant = spec.variant
    if variant == "gaussian_signal" and spec.signal == "ramp":
        if spec.delta is None or spec.delta <= 0.0:
            raise SpecError("ramp signal requires a positive half-width delta")
        return gs / (2.0 * spec.delta ** kappa)
    # a = 0 is a legal degenerate model (no cusp) but has no limit scale.
    if spec.a == 0.0:
        raise SpecError("the limit scale degenerates at a = 0; there is no cusp to locate")
    if variant == "gaussian_signal":
        return abs(spec.a) * gs
    if variant == "iid_density":
        from . import models

        c = models.iid_normalizer(spec)
        f_at_cusp = c * spec.h.value(0.0)
        if f_at_cusp <= 0.0:
            raise SpecError("i.i.d. density must be positive at the cusp point")
        return abs(spec.a) * math.sqrt(f_at_cusp) * gs
    if variant == "poisson_periodic":
        h0 = spec.h.value(0.0)
        if h0 <= 0.0:
            raise SpecError("Poisson intensity requires h(0) > 0")
        return abs(spec.a) * gs / math.sqrt(h0)
    if variant == "ergodic_diffusion":
        from . import models

        g_norm = models.invariant_density_normalizer(spec)
        return abs(spec.a) * gs * math.sqrt(g_norm)
    if variant == "small_noise_dynamical":
        h0 = spec.h.value(0.0)
        if h0 <= 0.0:
            raise SpecError("dynamical-system scale requires h(0) > 0")
        return abs(spec.a) * gs / math.sqrt(h0)
    raise SpecError(f"unknown model variant {variant!r}")


def normalizing_rate(spec, asymptotic_parameter: float) -> float:
    """Error scale phi at a given noise level / sample size / horizon.

    Small-noise models: phi = epsilon^(1/H) in the cusp range, and plain
    epsilon for the smooth-signal regime kappa > 1/2 (Gaussian model only).
    Count-driven models (i.i.d., Poisson periods): phi = n^(-1/(2 kappa + 1)).
    Ergodic diffusion: phi = T^(-1/(2 kappa + 1)).
    """
    p = float(asymptotic_parameter)
    if not math.isfinite(p) or p <= 0.0:
        raise SpecError(f"asymptotic parameter must be positive, got {asymptotic_parameter}")
    variant = spec.variant
    kappa = float(spec.kappa)
    if variant in _SMALL_NOISE:
        if kappa == 0.5:
            raise SpecError("kappa = 1/2 carries a logarithmic rate factor; not supported")
        if kappa > 0.5:
            if variant != "gaussian_signal" or kappa >= 1.0:
                raise SpecError(f"smooth regime requires the Gaussian model and kappa < 1, got {kappa}")
            return p
        return p ** (1.0 / hurst(kappa))
    if variant in _COUNT_DRIVEN or variant == "ergodic_diffusion":
        if not 0.0 < kappa < 0.5:
            raise SpecError(f"{variant} requires kappa in (0, 1/2), got {kappa}")
        return p ** (-1.0 / (2.0 * kappa + 1.0))
    raise SpecError(f"unknown model variant {variant!r}")


@dataclass(frozen=True)
class ModelConstants:
    """Bundle of the structural constants for one model spec."""

    gamma_star: float
    gamma: float
    hurst: float
    rate_exponent: float


def model_constants(spec) -> ModelConstants:
    """All structural constants of a model in one bundle.

    rate_exponent is the log-log slope of phi against its driving
    parameter: +1/H for small-noise models, -1/(2 kappa + 1) for the
    count- and horizon-driven ones.
    """
    kappa = _check_cusp_exponent(spec.kappa)
    if spec.variant in _SMALL_NOISE:
        exponent = 1.0 / hurst(kappa)
    else:
        exponent = -1.0 / (2.0 * kappa + 1.0)
    return ModelConstants(
        gamma_star=gamma_star(kappa),
        gamma=gamma_for_model(spec),
        hurst=hurst(kappa),
        rate_exponent=exponent,
    )
