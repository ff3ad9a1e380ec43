"""Explicit formulas used as oracles for the generic engines.

Covers the two classical pair correlations (beta = 2 sine kernel and the
beta = 4 expression built from sinc and the sine integral), the closed-form
second moment vector component at beta = 4, and the delta = 1 density of the
conditioned process in both its hypergeometric and oscillatory-integral
forms.
"""

from __future__ import annotations

import math

from scipy.integrate import quad

from .special import hyp1f2, sine_integral

FOUR_PI_SQ = 4.0 * math.pi**2

# below this the direct sinc formulas are replaced by their Taylor forms
_SMALL = 1e-4


def _sinc(x: float) -> float:
    if abs(x) < _SMALL:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def _sinc_prime(x: float) -> float:
    if abs(x) < _SMALL:
        x2 = x * x
        return x * (-1.0 / 3.0 + x2 / 30.0)
    return (x * math.cos(x) - math.sin(x)) / (x * x)


def sine2_rho2(lam: float) -> float:
    """Pair correlation at beta = 2: (1/4pi^2) (1 - sinc^2(lam/2))."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if lam < _SMALL:
        # 1 - sinc^2(x) = x^2/3 - 2 x^4/45 + O(x^6) at x = lam/2
        x2 = (lam / 2.0) ** 2
        return (x2 / 3.0 - 2.0 * x2 * x2 / 45.0) / FOUR_PI_SQ
    s = _sinc(lam / 2.0)
    return (1.0 - s * s) / FOUR_PI_SQ


def sine4_rho2(lam: float) -> float:
    """Pair correlation at beta = 4:
    (1/4pi^2) (1 - sinc^2(lam) + sinc'(lam) * Si(lam))."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if lam < _SMALL:
        # the three terms cancel to lam^4/135 at leading order
        return lam**4 / 135.0 / FOUR_PI_SQ
    s = _sinc(lam)
    return (1.0 - s * s + _sinc_prime(lam) * sine_integral(lam)) / FOUR_PI_SQ


def beta4_q2(lam: float) -> complex:
    """Second moment component at beta = 4 (n = 2):
    q2 = 3i (1 + 2i lam - e^{2i lam}) / (2 lam^3) - 3i e^{i lam} Si(lam) / lam^2.

    The formula cancels catastrophically as lam -> 0; the series engine
    covers that regime, so arguments at or below 1e-3 are rejected.
    """
    if lam <= 1e-3:
        raise ValueError(f"lambda must exceed 1e-3 (use the series engine below), got {lam}")
    e2 = complex(math.cos(2 * lam), math.sin(2 * lam))
    e1 = complex(math.cos(lam), math.sin(lam))
    return (3j * (1 + 2j * lam - e2)) / (2 * lam**3) - 3j * e1 * sine_integral(lam) / lam**2


def beta4_q1(lam: float) -> complex:
    """First moment component at beta = 4, recovered from the moment ODE
    lam q2' = 4 q1 - 4 q2 + 2 i lam q2 with q2' differentiated analytically."""
    if lam <= 1e-3:
        raise ValueError(f"lambda must exceed 1e-3 (use the series engine below), got {lam}")
    e2 = complex(math.cos(2 * lam), math.sin(2 * lam))
    e1 = complex(math.cos(lam), math.sin(lam))
    si = sine_integral(lam)
    q2 = beta4_q2(lam)
    dq2 = (
        (3j / 2) * ((2j - 2j * e2) / lam**3 - 3 * (1 + 2j * lam - e2) / lam**4)
        - 3j * (1j * e1 * si / lam**2 - 2 * e1 * si / lam**3 + e1 * _sinc(lam) / lam**2)
    )
    return (lam * dq2 + 4 * q2 - 2j * lam * q2) / 4.0


def hp_delta1_density(beta: float, lam: float, form: str = "hypergeometric") -> float:
    """Density of the delta = 1 conditioned process at lam, beta > 0.

    form="hypergeometric":
        lam^2 / (4 pi (1+2/beta)(1+4/beta)) * 1F2(1; 3/2+2/beta, 2+2/beta; -lam^2/4)
    form="integral":
        1/2pi - (2/(beta pi)) lam^{-4/beta} * int_0^lam s^{4/beta-1} cos(lam-s) ds
    The integrand s^{4/beta-1} is singular at s = 0 when beta > 4; the
    substitution s = t^{beta/4} removes it, at the cost of nothing when
    beta <= 4, where the direct form is already smooth.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if form == "hypergeometric":
        pref = lam * lam / (4.0 * math.pi * (1.0 + 2.0 / beta) * (1.0 + 4.0 / beta))
        return pref * hyp1f2(1.0, 1.5 + 2.0 / beta, 2.0 + 2.0 / beta, -lam * lam / 4.0)
    if form == "integral":
        if lam == 0.0:
            raise ValueError("the integral form requires lambda > 0")
        a = 4.0 / beta
        # absolute tolerance follows the integrand's scale (~ lam^a) so the
        # request stays achievable in float64; the gate below checks what the
        # density actually inherits after the lam^{-a} scaling
        epsabs = 1e-11 * (1.0 + lam**a)
        if beta > 4.0:
            val, err = quad(
                lambda t: math.cos(lam - t ** (beta / 4.0)),
                0.0,
                lam**a,
                epsabs=epsabs,
                epsrel=1e-11,
                limit=400,
            )
            integral = (beta / 4.0) * val
            err_raw = (beta / 4.0) * err
        else:
            val, err = quad(
                lambda s: s ** (a - 1.0) * math.cos(lam - s),
                0.0,
                lam,
                epsabs=epsabs,
                epsrel=1e-11,
                limit=400,
            )
            integral = val
            err_raw = err
        # the error that matters is the one propagated into the density
        err_density = (2.0 / (beta * math.pi)) * lam ** (-a) * err_raw
        if err_density > 1e-10:
            raise ArithmeticError(
                f"quadrature failure for beta={beta}, lambda={lam}: "
                f"propagated error estimate {err_density:.2e}"
            )
        return 1.0 / (2.0 * math.pi) - (2.0 / (beta * math.pi)) * lam ** (-a) * integral
    raise ValueError(f"form must be 'hypergeometric' or 'integral', got {form!r}")
