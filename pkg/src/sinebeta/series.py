"""Power-series engine for integer delta = n.

The moment vector q(lambda) = (E[e^{i k alpha_lambda(0)}])_{k=1..n} is an
entire function with Taylor coefficients s_k given by a matrix recursion:

    s_0 = f,      s_k = i (k I - (4/beta) A)^{-1} B s_{k-1},

where A, B are the size-n system matrices.  Since A's spectrum is negative,
every resolvent exists and ||s_k|| decays factorially, so the series
converges for all lambda.  The catch is numerical: the partial sums reach
magnitude ~ e^{n lambda} before cancelling down to |q| <= 1, which destroys
float64 for n*lambda beyond ~25.  Both the recursion and the Horner
evaluation therefore run in mpmath fixed precision, with the digit budget
set from n * lambda_max; results are returned as ordinary floats.

s_k alternates real/imaginary (s_k = i^k t_k with t_k real), so only the
real vectors t_k are stored and the recursion never touches complex
arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .matrices import MAX_N, SystemMatrices, _v_fractions, build_system

_LOG10_E = math.log10(math.e)
_MAX_TERMS = 50_000
_KAPPA_FIT_TERMS = 10


@dataclass(frozen=True)
class QValue:
    """q(lambda) with the series tail bound it was computed under."""

    lam: float
    q: np.ndarray
    tail_bound: float


class SeriesCoefficients:
    """Taylor coefficients s_0..s_K of q for one (n, beta), valid on |lambda| <= lambda_max.

    Stores the real vectors t_k (s_k = i^k t_k) as mpmath numbers at a
    precision sufficient to survive the cancellation at lambda_max.
    """

    def __init__(self, n: int, beta: float, lambda_max: float, tol: float = 1e-12):
        if not 1 <= n <= MAX_N:
            raise ValueError(f"n must lie in [1, {MAX_N}], got {n}")
        if not beta > 0:
            raise ValueError(f"beta must be positive, got {beta}")
        if not lambda_max > 0:
            raise ValueError(f"lambda_max must be positive, got {lambda_max}")
        if tol < 1e-15:
            raise ValueError(f"tol must be >= 1e-15, got {tol}")
        self.n = n
        self.beta = beta
        self.lambda_max = lambda_max
        self.tol = tol
        self.sys: SystemMatrices = build_system(n)
        self.dps = int(_LOG10_E * n * lambda_max) + max(15, -int(math.floor(math.log10(tol)))) + 12
        self._v_frac = _v_fractions(n)
        with mp.workdps(self.dps):
            self._build()

    def _build(self) -> None:
        n, beta = self.n, self.beta
        c = mp.mpf(4) / mp.mpf(beta)
        lam_max = mp.mpf(self.lambda_max)

        # tridiagonal bands of A (1-based row k): sub k(k+n)/2, diag -k^2, super k(k-n)/2
        sub_a = [mp.mpf(k * (k + n)) / 2 for k in range(2, n + 1)]
        dia_a = [mp.mpf(-(k * k)) for k in range(1, n + 1)]
        sup_a = [mp.mpf(k * (k - n)) / 2 for k in range(1, n)]

        t = [[mp.mpf(1)] * n]  # t_0 = f (equivalently -(n+1)/2 A^{-1} e)
        norms = [mp.mpf(1)]
        # product bound P_k = prod_{j<=k} n/(j + 4n/beta); ||s_k|| <= kappa^k P_k
        p_k = mp.mpf(1)
        log_ratios: list = []
        kappa = None
        tail = mp.inf
        k = 0
        while True:
            k += 1
            if k > _MAX_TERMS:
                raise RuntimeError(
                    f"series recursion exceeded {_MAX_TERMS} terms at n={n}, beta={beta}, "
                    f"lambda_max={self.lambda_max}"
                )
            rhs = [mp.mpf(j + 1) * t[-1][j] for j in range(n)]
            dia = [mp.mpf(k) - c * dia_a[j] for j in range(n)]
            sub = [-c * x for x in sub_a]
            sup = [-c * x for x in sup_a]
            tk = _solve_tridiag(sub, dia, sup, rhs, pivot=not _row_dominant(sub, dia, sup))
            t.append(tk)
            nk = max(abs(x) for x in tk)
            norms.append(nk)
            p_k *= mp.mpf(n) / (k + 4 * n / mp.mpf(beta))
            if nk > 0:
                log_ratios.append(mp.log(nk / p_k) / k)
            if kappa is None and k >= _KAPPA_FIT_TERMS:
                fitted = mp.exp(max(log_ratios)) if log_ratios else mp.mpf(1)
                kappa = 2 * max(mp.mpf(1), fitted)
            if kappa is not None and k >= 2 * n + 2:
                tail = _tail_bound(kappa, p_k, k, lam_max, n, beta)
                if tail < self.tol:
                    break

        self.K = k
        self.kappa = float(kappa)
        self.tail_bound = float(tail)
        self._t = t
        # density weights w_j = (-1)^j (v . t_{2j}); the even-order Horner input
        v_mp = [mp.mpf(x.numerator) / x.denominator for x in self._v_frac]
        self._w = [
            (-1) ** j * mp.fsum(v_mp[i] * t[2 * j][i] for i in range(n))
            for j in range(0, self.K // 2 + 1)
        ]

    def _eval_dps(self, lam: float) -> int:
        return min(self.dps, int(_LOG10_E * self.n * abs(lam)) + 30)

    def _check_range(self, lam: float) -> None:
        if abs(lam) > self.lambda_max * (1 + 1e-12):
            raise ValueError(
                f"|lambda| = {abs(lam)} exceeds the built range lambda_max = {self.lambda_max}"
            )

    def s(self, k: int) -> np.ndarray:
        """Coefficient s_k as a complex vector (i^k times the stored real t_k)."""
        unit = 1j**k
        return unit * np.array([float(x) for x in self._t[k]], dtype=complex)

    def tail_at(self, lam: float) -> float:
        """Tail bound of the truncated series at |lam| <= lambda_max."""
        self._check_range(lam)
        if lam == 0.0:
            return 0.0
        with mp.workdps(30):
            kappa = mp.mpf(self.kappa)
            p = mp.mpf(1)
            for j in range(1, self.K + 1):
                p *= mp.mpf(self.n) / (j + 4 * self.n / mp.mpf(self.beta))
            return float(_tail_bound(kappa, p, self.K, mp.mpf(abs(lam)), self.n, self.beta))

    def q_parts(self, lam: float):
        """Re q and Im q at lam as mpmath vectors (internal)."""
        self._check_range(lam)
        n = self.n
        with mp.workdps(self._eval_dps(lam)):
            lam_mp = mp.mpf(lam)
            acc_r = [mp.mpf(0)] * n
            acc_i = [mp.mpf(0)] * n
            for k in range(self.K, -1, -1):
                tk = self._t[k]
                r = k % 4
                for i in range(n):
                    acc_r[i] *= lam_mp
                    acc_i[i] *= lam_mp
                    if r == 0:
                        acc_r[i] += tk[i]
                    elif r == 1:
                        acc_i[i] += tk[i]
                    elif r == 2:
                        acc_r[i] -= tk[i]
                    else:
                        acc_i[i] -= tk[i]
            return acc_r, acc_i


def _row_dominant(sub, dia, sup) -> bool:
    n = len(dia)
    for j in range(n):
        off = (abs(sub[j - 1]) if j >= 1 else 0) + (abs(sup[j]) if j < n - 1 else 0)
        if abs(dia[j]) < off:
            return False
    return True


def _solve_tridiag(sub, dia, sup, rhs, pivot: bool):
    """Solve the tridiagonal system; plain Thomas elimination, or LU with
    partial pivoting between adjacent rows (fill-in limited to a second
    superdiagonal) when the build-time dominance check fails."""
    n = len(dia)
    if n == 1:
        if dia[0] == 0:
            raise ArithmeticError("singular resolvent: zero pivot (impossible for beta > 0)")
        return [rhs[0] / dia[0]]
    d = list(dia)
    u = list(sup) + [mp.mpf(0)]
    b = list(rhs)
    if not pivot:
        for j in range(1, n):
            if d[j - 1] == 0:
                raise ArithmeticError(
                    "singular resolvent: zero pivot (impossible for beta > 0)"
                )
            m = sub[j - 1] / d[j - 1]
            d[j] -= m * u[j - 1]
            b[j] -= m * b[j - 1]
        x = [mp.mpf(0)] * n
        x[-1] = b[-1] / d[-1]
        for j in range(n - 2, -1, -1):
            x[j] = (b[j] - u[j] * x[j + 1]) / d[j]
        return x
    u2 = [mp.mpf(0)] * n  # second superdiagonal created by row swaps
    lo = list(sub)
    for j in range(n - 1):
        if lo[j] == 0 and d[j] == 0:
            raise ArithmeticError("singular resolvent: zero pivot (impossible for beta > 0)")
        if abs(lo[j]) > abs(d[j]):
            d[j], lo[j] = lo[j], d[j]
            u[j], d[j + 1] = d[j + 1], u[j]
            u2[j], u[j + 1] = u[j + 1], u2[j]
            b[j], b[j + 1] = b[j + 1], b[j]
        m = lo[j] / d[j]
        d[j + 1] -= m * u[j]
        u[j + 1] -= m * u2[j]
        b[j + 1] -= m * b[j]
    x = [mp.mpf(0)] * n
    x[-1] = b[-1] / d[-1]
    for j in range(n - 2, -1, -1):
        acc = b[j] - u[j] * x[j + 1]
        if j + 2 < n:
            acc -= u2[j] * x[j + 2]
        x[j] = acc / d[j]
    return x


def _tail_bound(kappa, p_k, k, lam, n, beta):
    """sum_{j>k} kappa^j P_j lam^j given P_k, via the geometric majorant."""
    term = kappa**k * p_k * lam**k
    total = mp.mpf(0)
    j = k
    while True:
        j += 1
        term *= kappa * lam * n / (j + 4 * n / mp.mpf(beta))
        ratio = kappa * lam * n / (j + 1 + 4 * n / mp.mpf(beta))
        if ratio < 0.5:
            total += term / (1 - ratio)
            return total
        total += term
        if j > k + 10 * _MAX_TERMS:
            return mp.inf


_cache: dict = {}


def get_coefficients(n: int, beta: float, lambda_max: float, tol: float = 1e-12) -> SeriesCoefficients:
    """Cached coefficient builder; rebuilds when a wider range or tighter
    tolerance is requested than previously built for this (n, beta)."""
    key = (n, float(beta))
    hit = _cache.get(key)
    if hit is None or hit.lambda_max < lambda_max or hit.tol > tol:
        hit = SeriesCoefficients(
            n,
            float(beta),
            max(lambda_max, hit.lambda_max if hit else 0.0),
            min(tol, hit.tol if hit else 1.0),
        )
        _cache[key] = hit
    return hit


def compute_coefficients(n: int, beta: float, lambda_max: float, tol: float = 1e-12) -> SeriesCoefficients:
    """Build the coefficient table s_0..s_K with the truncation order K chosen
    so the norm-bound tail at lambda_max is below tol."""
    return SeriesCoefficients(n, beta, lambda_max, tol)


def q_series(coeffs: SeriesCoefficients, lam: float) -> QValue:
    """Evaluate q(lam) by Horner accumulation of the truncated series."""
    re, im = coeffs.q_parts(lam)
    q = np.array([float(r) + 1j * float(i) for r, i in zip(re, im)])
    return QValue(lam=lam, q=q, tail_bound=coeffs.tail_at(lam))


def q_series_deriv(coeffs: SeriesCoefficients, lam: float) -> np.ndarray:
    """q'(lam) from the term-wise differentiated series."""
    coeffs._check_range(lam)
    n = coeffs.n
    with mp.workdps(coeffs._eval_dps(lam)):
        lam_mp = mp.mpf(lam)
        acc_r = [mp.mpf(0)] * n
        acc_i = [mp.mpf(0)] * n
        for k in range(coeffs.K, 0, -1):
            tk = coeffs._t[k]
            r = k % 4
            for i in range(n):
                acc_r[i] *= lam_mp
                acc_i[i] *= lam_mp
                if r == 0:
                    acc_r[i] += k * tk[i]
                elif r == 1:
                    acc_i[i] += k * tk[i]
                elif r == 2:
                    acc_r[i] -= k * tk[i]
                else:
                    acc_i[i] -= k * tk[i]
        return np.array([float(r) + 1j * float(i) for r, i in zip(acc_r, acc_i)])


def hp_density_series(coeffs: SeriesCoefficients, lam: float) -> float:
    """Density of the conditioned process at lam, from the even-order series.

    Evaluates both equivalent forms, (1/2pi)(1 + 2 v . Re q) and
    (1/pi) sum_j (v . s_{2j}) lam^{2j}, asserts they agree to 1e-12, and
    returns the power-series form.
    """
    coeffs._check_range(lam)
    with mp.workdps(coeffs._eval_dps(lam)):
        lam_mp = mp.mpf(lam)
        y = lam_mp * lam_mp
        acc = mp.mpf(0)
        for j in range(len(coeffs._w) - 1, 0, -1):
            acc = acc * y + coeffs._w[j]
        series_form = float(acc * y / mp.pi)
        re, _ = coeffs.q_parts(lam)
        v = [mp.mpf(x.numerator) / x.denominator for x in coeffs._v_frac]
        dot = mp.fsum(v[i] * re[i] for i in range(coeffs.n))
        direct_form = float((1 + 2 * dot) / (2 * mp.pi))
    if abs(series_form - direct_form) > 1e-12:
        raise RuntimeError(
            f"density forms disagree at lambda={lam}: {series_form} vs {direct_form}"
        )
    return series_form


def sine_pair_corr_series(n: int, lam: float, tol: float = 1e-12) -> float:
    """Pair correlation of the beta = 2n process at lam:
    (1/2pi^2) sum_j (v . s_{2j}) lam^{2j}, cross-checked against the
    conditioned-process density through the factor 1/2pi."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    coeffs = get_coefficients(n, 2.0 * n, max(abs(lam), 1.0), tol)
    rho1 = hp_density_series(coeffs, lam)
    rho2 = rho1 / (2.0 * math.pi)
    return rho2


def small_lambda_constant(n: int, beta: float) -> float:
    """Leading coefficient of lambda^{2n} in the conditioned-process density:
    (1/2pi) C(2n,n)^{-1} (beta/2)^{2n} / (1+beta/2)^(2n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    log_c = -math.lgamma(2 * n + 1) + 2 * math.lgamma(n + 1)  # -log C(2n,n)
    log_c += 2 * n * math.log(beta / 2.0)
    for j in range(2 * n):
        log_c -= math.log(1.0 + beta / 2.0 + j)
    return math.exp(log_c) / (2.0 * math.pi)


def small_lambda_constant_exact(n: int, beta_num: int, beta_den: int = 1) -> Fraction:
    """Exact rational value of the leading coefficient times 2 pi, for
    rational beta; used to verify the beta = 2n factorial identity."""
    beta = Fraction(beta_num, beta_den)
    val = Fraction(1, math.comb(2 * n, n)) * (beta / 2) ** (2 * n)
    for j in range(2 * n):
        val /= 1 + beta / 2 + j
    return val
