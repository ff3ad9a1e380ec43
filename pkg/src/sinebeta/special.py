"""Scalar special functions and coefficient sequences shared by every engine.

The central object is the Pochhammer-ratio sequence

    c_k = (-delta)^(k) / (1+delta)^(k),   (x)^(k) = x (x+1) ... (x+k-1),

which weights the angular moments E[cos(k alpha_lambda(0))] in the density
formulas.  For integer delta = n the sequence terminates: c_k = 0 for k > n.
The remaining entries here (the angle density on the circle, its Fourier
coefficients, the sine integral, and a 1F2 series) are the scalar building
blocks of the closed-form oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import gammaln, sici

TWO_PI = 2.0 * math.pi

# Si switch point: the alternating Taylor series needs ~16 terms at x = 4
# for 1e-15 absolute accuracy; beyond that the asymptotic evaluation wins.
_SI_SERIES_CUTOFF = 4.0
_SI_MAX_ARG = 1.0e4

_HYP_MAX_TERMS = 100_000
_HYP_MAX_ABS_Z = 1.0e4


class ConvergenceError(RuntimeError):
    """A series or quadrature failed to reach its stopping criterion."""


@dataclass(frozen=True)
class CoeffSeq:
    """Pochhammer-ratio coefficients c_1..c_K for a fixed delta > 0."""

    delta: float
    values: np.ndarray

    @property
    def k_max(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        """c_k with 1-based k; c_0 = 1 by convention."""
        if k == 0:
            return 1.0
        return float(self.values[k - 1])


def pochhammer_ratio_seq(delta: float, k_max: int) -> CoeffSeq:
    """Accumulate c_k = c_{k-1} * (-delta + k - 1) / (delta + k), c_0 = 1.

    Multiplicative accumulation keeps every term finite for large k and
    produces exact zeros once the factor (-delta + k - 1) vanishes at
    integer delta.  Quotients of Gamma functions would overflow and lose
    the exact-zero structure.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    values = np.empty(k_max)
    c = 1.0
    for k in range(1, k_max + 1):
        c *= (-delta + k - 1) / (delta + k)
        values[k - 1] = c
    return CoeffSeq(delta=delta, values=values)


def coeff_tail_bound(delta: float, k_from: int, k_probe: int = 100_000) -> float:
    """Upper bound on sum_{k >= k_from} |c_k|.

    Sums |c_k| directly up to k_probe and closes with the integral bound
    c * x^(-2 delta) / (2 delta) implied by |c_k| <= c k^(-1-2 delta).
    Exact (zero) for integer delta once k_from > delta.
    """
    if delta == round(delta) and k_from > int(round(delta)):
        return 0.0
    seq = pochhammer_ratio_seq(delta, k_probe)
    absval = np.abs(seq.values)
    tail = float(absval[k_from - 1 :].sum())
    # |c_k| ~ const * k^(-1-2 delta); extend past the probe horizon.
    const = absval[-1] * k_probe ** (1.0 + 2.0 * delta)
    tail += const * k_probe ** (-2.0 * delta) / (2.0 * delta)
    return tail


def theta_density(delta: float, theta: float) -> float:
    """Density (1/2pi) Gamma(1+delta)^2/Gamma(1+2 delta) (2 - 2 cos t)^delta.

    The normalizing ratio is evaluated through log-Gamma differences so it
    stays finite for delta up to ~50.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if not 0.0 <= theta < TWO_PI:
        raise ValueError(f"theta must lie in [0, 2*pi), got {theta}")
    log_ratio = 2.0 * gammaln(1.0 + delta) - gammaln(1.0 + 2.0 * delta)
    base = 2.0 - 2.0 * math.cos(theta)
    if base <= 0.0:
        return 0.0
    return math.exp(log_ratio + delta * math.log(base)) / TWO_PI


def theta_fourier_coeff(delta: float, k: int) -> float:
    """Fourier coefficient a_k = (1/2pi) (-delta)^(k)/(1+delta)^(k), k >= 0."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0:
        return 1.0 / TWO_PI
    return pochhammer_ratio_seq(delta, k)[k] / TWO_PI


def theta_cdf_partial(delta: float, x: float, k_terms: int) -> float:
    """Partial sum x/2pi + (1/pi) sum_{k<=m} c_k sin(kx)/k of the angle CDF."""
    if not 0.0 <= x <= TWO_PI:
        raise ValueError(f"x must lie in [0, 2*pi], got {x}")
    seq = pochhammer_ratio_seq(delta, k_terms)
    k = np.arange(1, k_terms + 1)
    return x / TWO_PI + float(np.sum(seq.values * np.sin(k * x) / k)) / math.pi


def sine_integral(x: float) -> float:
    """Si(x) = integral of sin(t)/t on [0, x], for 0 <= x <= 1e4.

    Alternating Taylor series below the switch point; asymptotic
    auxiliary-function evaluation (scipy's Cephes port) beyond it.
    """
    if not 0.0 <= x <= _SI_MAX_ARG:
        raise ValueError(f"x must lie in [0, {_SI_MAX_ARG:.0e}], got {x}")
    if x <= _SI_SERIES_CUTOFF:
        # sum (-1)^m x^(2m+1) / ((2m+1) (2m+1)!)
        term = x
        total = 0.0
        x2 = x * x
        m = 0
        while True:
            total += term / (2 * m + 1)
            m += 1
            term *= -x2 / ((2 * m) * (2 * m + 1))
            if abs(term) < 1e-17 * (1.0 + abs(total)):
                return total
    si, _ = sici(x)
    return float(si)


def hyp1f2(a: float, b1: float, b2: float, z: float) -> float:
    """Generalized hypergeometric sum_{m>=0} (a)^(m)/((b1)^(m)(b2)^(m)) z^m/m!.

    Terms are accumulated until the current term drops below 1e-16 times the
    magnitude of the running sum for 3 consecutive terms; the hysteresis
    matters because the terms alternate in sign for z < 0.  For strongly
    negative z the partial sums grow like exp(2 sqrt|z|) before cancelling
    down to O(1), so the summation switches to extended precision with the
    digit budget set by that growth.
    """
    for b in (b1, b2):
        if b <= 0 and b == round(b):
            raise ValueError(f"lower parameter must not be a non-positive integer, got {b}")
    if abs(z) > _HYP_MAX_ABS_Z:
        raise ValueError(f"|z| must be <= {_HYP_MAX_ABS_Z:.0e}, got {z}")

    cancel_digits = 0.8686 * math.sqrt(-z) if z < 0 else 0.0
    if cancel_digits <= 3.0:
        return _hyp1f2_sum(a, b1, b2, z, float, abs)
    with mp.workdps(20 + int(cancel_digits)):
        value = _hyp1f2_sum(mp.mpf(a), mp.mpf(b1), mp.mpf(b2), mp.mpf(z), mp.mpf, mp.fabs)
    return float(value)


def _hyp1f2_sum(a, b1, b2, z, num, fabs):
    term = num(1)
    total = num(1)
    below = 0
    for m in range(_HYP_MAX_TERMS):
        term = term * (a + m) / ((b1 + m) * (b2 + m)) * z / (m + 1)
        total += term
        if fabs(term) < 1e-16 * fabs(total):
            below += 1
            if below >= 3:
                return total
        else:
            below = 0
    raise ConvergenceError(
        f"hyp1f2({a}, {b1}, {b2}, {z}) did not converge within {_HYP_MAX_TERMS} terms"
    )
