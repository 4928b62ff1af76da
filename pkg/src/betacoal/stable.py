"""The maximally left-skewed stable reference law and the limit transforms.

The reference variable here, written ``sigma-law`` draws below, is the
alpha-stable random variable with 1 < alpha < 2 pinned down by three
properties: zero mean, right tail o(x^-alpha), and left tail satisfying
P(draw < -x) * x^alpha -> 1.  Maximal left skewness makes the right tail
lighter than any power alpha tail, and the scale is then forced.

Scale derivation.  In the common (alpha, beta, scale, shift) parametrization
with characteristic function

    exp(-scale^alpha |t|^alpha (1 - i beta sign(t) tan(pi alpha / 2)) + i shift t)

a variable with beta = -1, shift = 0 has mean zero (for alpha > 1 the shift
is the mean) and left-tail expansion

    P(X < -x) ~ C_alpha scale^alpha x^-alpha,
    C_alpha = (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2)).

Setting C_alpha scale^alpha = 1 gives

    scale(alpha) = (Gamma(2 - alpha) |cos(pi alpha / 2)| / (alpha - 1))^(1/alpha),

using that cos(pi alpha / 2) < 0 and 1 - alpha < 0 on (1, 2).  Sampling uses
the Chambers-Mallows-Stuck trigonometric transform, which in this
parametrization needs no location correction for alpha != 1.

The normalizing transforms map simulated merger counts and branch lengths
onto quantities whose distributional limits are known multiples of the
reference law, so two-sample comparisons against the sampler close the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rates import AlphaParam, alpha_value

ALPHA_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

TOTAL_REGIME_POWER = "power_rescaled"
TOTAL_REGIME_LOG = "log_rescaled"
TOTAL_REGIME_CENTERED = "centered_only"


@dataclass(frozen=True)
class StableSpec:
    """Parameters of the reference stable law.

    ``skew`` is fixed at -1 (the maximally left-skewed extreme) and
    ``scale`` at the value that makes the left-tail constant exactly 1.
    """

    alpha: float
    skew: float
    scale: float


@dataclass(frozen=True)
class LimitConstants:
    """Closed-form constants appearing in the branch-length limits."""

    c1: float
    c2: float
    c1_prime: float
    c2_prime: float
    gamma: float
    alpha0: float


def stable_scale(alpha: AlphaParam | float) -> float:
    """Scale making the left-tail constant of the skew -1 law exactly 1."""
    a = alpha_value(alpha)
    return (math.gamma(2.0 - a) * abs(math.cos(math.pi * a / 2.0)) / (a - 1.0)) ** (1.0 / a)


def stable_spec(alpha: AlphaParam | float) -> StableSpec:
    """The fully determined reference law for this tail index."""
    a = alpha_value(alpha)
    return StableSpec(alpha=a, skew=-1.0, scale=stable_scale(a))


def sample_stable_block(spec: StableSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` independent draws from the reference law.

    Chambers-Mallows-Stuck transform: with V uniform on (-pi/2, pi/2) and
    W standard exponential,

        B = arctan(beta tan(pi alpha / 2)) / alpha
        S = (1 + beta^2 tan(pi alpha / 2)^2)^(1 / (2 alpha))
        X = S sin(alpha (V + B)) / cos(V)^(1/alpha)
              * (cos(V - alpha (V + B)) / W)^((1 - alpha)/alpha)

    X then follows the unit-scale law in the parametrization documented in
    the module docstring; the spec's scale multiplies it.  Draw order is
    one uniform block then one exponential block.
    """
    count = int(count)
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    a = alpha_value(spec.alpha)
    beta = spec.skew
    if count == 0:
        return np.empty(0)
    v = math.pi * (rng.random(count) - 0.5)
    w = rng.standard_exponential(count)
    tan_half = math.tan(math.pi * a / 2.0)
    b = math.atan(beta * tan_half) / a
    s = (1.0 + (beta * tan_half) ** 2) ** (1.0 / (2.0 * a))
    av_b = a * (v + b)
    x = (
        s
        * np.sin(av_b)
        / np.cos(v) ** (1.0 / a)
        * (np.cos(v - av_b) / w) ** ((1.0 - a) / a)
    )
    return spec.scale * x


def sample_stable(spec: StableSpec, rng: np.random.Generator) -> float:
    """One draw from the reference law (single-element block)."""
    return float(sample_stable_block(spec, rng, 1)[0])


def limit_constants(alpha: AlphaParam | float) -> LimitConstants:
    """All six closed-form constants for this tail index."""
    a = alpha_value(alpha)
    gamma_a = math.gamma(a)
    c1 = a * (a - 1.0) * gamma_a
    c2 = (
        a
        * (2.0 - a)
        * (a - 1.0) ** (1.0 / a + 1.0)
        * gamma_a
        / math.gamma(2.0 - a) ** (1.0 / a)
    )
    return LimitConstants(
        c1=c1,
        c2=c2,
        c1_prime=c1 / (2.0 - a),
        c2_prime=c2 / (2.0 - a),
        gamma=1.0 / (a - 1.0),
        alpha0=ALPHA_GOLDEN,
    )


def tau_limit_scale(alpha: AlphaParam | float) -> float:
    """Scale multiplying the reference law in the merger-count limit.

    The centered, n^(1/alpha)-rescaled merger count converges to this
    multiple of the reference draw: (alpha-1)^(1/alpha+1) / Gamma(2-alpha)^(1/alpha).
    """
    a = alpha_value(alpha)
    return (a - 1.0) ** (1.0 / a + 1.0) / math.gamma(2.0 - a) ** (1.0 / a)


def total_limit_scale(alpha: AlphaParam | float) -> float:
    """Scale multiplying the reference law for the rescaled total length.

    Only meaningful in the rescaled regimes: below the golden-ratio
    threshold the limit is c2' / (1 + alpha - alpha^2)^(1/alpha) times the
    reference draw; at the threshold it is c2' itself.
    """
    a = alpha_value(alpha)
    cons = limit_constants(a)
    if a == ALPHA_GOLDEN:
        return cons.c2_prime
    if a > ALPHA_GOLDEN:
        raise ValueError(
            f"no stable limit scale above the threshold {ALPHA_GOLDEN!r}; got alpha={a!r}")
    return cons.c2_prime / (1.0 + a - a * a) ** (1.0 / a)


def _check_n(n: int) -> int:
    n = int(n)
    if n < 2:
        raise ValueError(f"need sample size n >= 2, got {n}")
    return n


def normalize_tau(tau, n: int, alpha: AlphaParam | float):
    """Center the merger count at n(alpha-1) and rescale by n^(1/alpha).

    The result converges in law to tau_limit_scale(alpha) times the
    reference draw.  Accepts a scalar or an array of counts.
    """
    n = _check_n(n)
    a = alpha_value(alpha)
    arr = np.asarray(tau, dtype=np.float64)
    out = (arr - n * (a - 1.0)) / float(n) ** (1.0 / a)
    return float(out) if np.isscalar(tau) or arr.ndim == 0 else out


def normalize_external(ell, n: int, alpha: AlphaParam | float):
    """Center the external length at c1 n^(2-alpha), rescale by n^(1/alpha+1-alpha).

    The result converges in law to c2 times the reference draw, for every
    alpha in (1, 2).  Accepts a scalar or an array of lengths.
    """
    n = _check_n(n)
    a = alpha_value(alpha)
    cons = limit_constants(a)
    arr = np.asarray(ell, dtype=np.float64)
    out = (arr - cons.c1 * float(n) ** (2.0 - a)) / float(n) ** (1.0 / a + 1.0 - a)
    return float(out) if np.isscalar(ell) or arr.ndim == 0 else out


def normalize_total(L, n: int, alpha: AlphaParam | float):
    """Center and (below the golden-ratio threshold) rescale the total length.

    Returns ``(value, regime)``:

    - alpha < (1+sqrt 5)/2: value = (L - c1' n^(2-alpha)) / n^(1/alpha+1-alpha),
      regime "power_rescaled"; the limit is total_limit_scale(alpha) times
      the reference draw.
    - alpha == (1+sqrt 5)/2 exactly: value = (L - c1' n^(2-alpha)) / (log n)^(1/alpha),
      regime "log_rescaled"; the limit is c2' times the reference draw.
    - alpha > the threshold: value = L - c1' n^(2-alpha) unrescaled, regime
      "centered_only"; the centered sequence converges to a nondegenerate
      law that is not identified further, so only tightness is testable.

    Accepts a scalar or an array of lengths.
    """
    n = _check_n(n)
    a = alpha_value(alpha)
    cons = limit_constants(a)
    arr = np.asarray(L, dtype=np.float64)
    centered = arr - cons.c1_prime * float(n) ** (2.0 - a)
    if a < ALPHA_GOLDEN:
        out = centered / float(n) ** (1.0 / a + 1.0 - a)
        tag = TOTAL_REGIME_POWER
    elif a == ALPHA_GOLDEN:
        out = centered / math.log(n) ** (1.0 / a)
        tag = TOTAL_REGIME_LOG
    else:
        out = centered
        tag = TOTAL_REGIME_CENTERED
    if np.isscalar(L) or arr.ndim == 0:
        return float(out), tag
    return out, tag
