"""Combinatorial matrices and vectors behind the integer-delta engines.

For delta = n the angular moments q_k = E[e^{ik alpha}] close into an
n-dimensional linear system governed by a tridiagonal matrix A (drift
coupling between adjacent moments), the diagonal matrix B (the mode index),
and three vectors: e = (1,0,...,0), f = (1,...,1), and the signed binomial
weights v that assemble the density from Re q.  Everything here is small
(n <= 64) and exactly representable, so identities are checked in exact
integer/rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

MAX_N = 64
MAX_N_EXACT = 30  # binomial entries of the involution stay exact well past this


@dataclass(frozen=True)
class SystemMatrices:
    """The size-n system (A, B, e, v, f); B is stored as its diagonal."""

    n: int
    A: np.ndarray
    b_diag: np.ndarray
    e: np.ndarray
    v: np.ndarray
    f: np.ndarray

    @property
    def B(self) -> np.ndarray:
        return np.diag(self.b_diag)


def _check_n(n: int, upper: int = MAX_N) -> None:
    if not 1 <= n <= upper:
        raise ValueError(f"n must lie in [1, {upper}], got {n}")


def _v_fractions(n: int) -> list[Fraction]:
    """v_k = (-1)^k C(2n, n+k) / C(2n, n), accumulated multiplicatively."""
    v = []
    cur = Fraction(1)
    for k in range(1, n + 1):
        cur *= Fraction(n - k + 1, n + k)
        v.append(-cur if k % 2 else cur)
    return v


def _a_entry(n: int, row: int, col: int) -> Fraction:
    """Entry of the tridiagonal A (1-based indices)."""
    k = row
    if col == k:
        return Fraction(-k * k)
    if col == k - 1:
        return Fraction(k * (k + n), 2)
    if col == k + 1 and col <= n:
        return Fraction(k * (k - n), 2)
    return Fraction(0)


def build_system(n: int) -> SystemMatrices:
    """Construct A, B, e, v, f of size n.

    A[k,k] = -k^2, A[k,k-1] = k(k+n)/2, A[k,k+1] = k(k-n)/2 (1-based);
    the superdiagonal vanishes in the last row, which is what closes the
    moment system at size n.
    """
    _check_n(n)
    A = np.zeros((n, n))
    for k in range(1, n + 1):
        A[k - 1, k - 1] = -float(k * k)
        if k >= 2:
            A[k - 1, k - 2] = 0.5 * k * (k + n)
        if k <= n - 1:
            A[k - 1, k] = 0.5 * k * (k - n)
    b_diag = np.arange(1, n + 1, dtype=float)
    e = np.zeros(n)
    e[0] = 1.0
    v = np.array([float(x) for x in _v_fractions(n)])
    f = np.ones(n)
    return SystemMatrices(n=n, A=A, b_diag=b_diag, e=e, v=v, f=f)


def eigenvalues_A(n: int) -> np.ndarray:
    """Closed-form spectrum k(k-1)/2 - n(n+1)/2, k = 1..n, increasing.

    All eigenvalues are negative; the largest is -n, which sets the decay
    rate of exp(x A).
    """
    _check_n(n)
    k = np.arange(1, n + 1)
    return k * (k - 1) / 2.0 - n * (n + 1) / 2.0


def involution_T(n: int) -> np.ndarray:
    """Lower-triangular T with T[a,b] = C(a,b) (-1)^b (1-based); T @ T = I."""
    _check_n(n, MAX_N_EXACT)
    T = np.zeros((n, n), dtype=np.int64)
    for a in range(1, n + 1):
        for b in range(1, a + 1):
            T[a - 1, b - 1] = math.comb(a, b) * (-1) ** b
    return T


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class IdentityReport:
    n: int
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.passed]


def identity_report(n: int) -> IdentityReport:
    """Verify the exact algebraic identities of the size-n system.

    Runs in exact rational/integer arithmetic throughout: Python integers
    do not overflow, so no floating fallback is needed at any supported n.
    Checks, in order: A f = -(n+1)/2 e; the expansion of A B^l f over the
    vectors B^(l-2j) f for 1 <= l <= 2n; the moment orthogonality
    v . B^(2j) f = 0 for j < n with the exact final value at j = n;
    v . f = -1/2; T T = I; and that T A T is upper bidiagonal with entries
    k(k-1)/2 - kn on the diagonal and k(n-k)/2 above it.
    """
    _check_n(n, MAX_N_EXACT)
    checks: list[IdentityCheck] = []
    v = _v_fractions(n)
    ks = list(range(1, n + 1))

    # A f = -(n+1)/2 e
    af = [sum(_a_entry(n, k, j) for j in ks) for k in ks]
    expected = [Fraction(-(n + 1), 2) if k == 1 else Fraction(0) for k in ks]
    bad = [k for k, (x, y) in enumerate(zip(af, expected), start=1) if x != y]
    checks.append(
        IdentityCheck(
            "A f = -(n+1)/2 e",
            not bad,
            "" if not bad else f"mismatch at rows {bad}",
        )
    )

    # A B^l f = sum_j (C(l, 2j+2) - n C(l, 2j+1)) B^(l-2j) f, 1 <= l <= 2n
    bad_l = []
    for ell in range(1, 2 * n + 1):
        lhs = [
            Fraction(k * (k + n), 2) * (k - 1) ** ell
            - Fraction(k ** (ell + 2))
            + Fraction(k * (k - n), 2) * (k + 1) ** ell
            for k in ks
        ]
        rhs = [Fraction(0) for _ in ks]
        for j in range(0, (ell - 1) // 2 + 1):
            coeff = Fraction(math.comb(ell, 2 * j + 2) - n * math.comb(ell, 2 * j + 1))
            for i, k in enumerate(ks):
                rhs[i] += coeff * k ** (ell - 2 * j)
        if lhs != rhs:
            bad_l.append(ell)
    checks.append(
        IdentityCheck(
            "A B^l f expansion (1 <= l <= 2n)",
            not bad_l,
            "" if not bad_l else f"mismatch at l = {bad_l}",
        )
    )

    # v . B^(2j) f = 0 for 1 <= j < n, and the exact value at j = n
    bad_j = [
        j
        for j in range(1, n)
        if sum(vk * Fraction(k ** (2 * j)) for vk, k in zip(v, ks)) != 0
    ]
    checks.append(
        IdentityCheck(
            "v . B^(2j) f = 0 for j < n",
            not bad_j,
            "" if not bad_j else f"nonzero at j = {bad_j}",
        )
    )
    top = sum(vk * Fraction(k ** (2 * n)) for vk, k in zip(v, ks))
    top_expected = Fraction((-1) ** n * math.factorial(2 * n), 2 * math.comb(2 * n, n))
    checks.append(
        IdentityCheck(
            "v . B^(2n) f = (-1)^n (2n)! / (2 C(2n,n))",
            top == top_expected,
            "" if top == top_expected else f"got {top}, expected {top_expected}",
        )
    )

    vf = sum(v)
    checks.append(
        IdentityCheck("v . f = -1/2", vf == Fraction(-1, 2), f"got {vf}" if vf != Fraction(-1, 2) else "")
    )

    # T T = I in exact integers
    T = [[math.comb(a, b) * (-1) ** b if b <= a else 0 for b in ks] for a in ks]
    tt_ok = all(
        sum(T[a][j] * T[j][b] for j in range(n)) == (1 if a == b else 0)
        for a in range(n)
        for b in range(n)
    )
    checks.append(IdentityCheck("T T = I", tt_ok))

    # T A T upper bidiagonal with the closed-form entries; 2A is an integer
    # matrix, so the product is computed exactly in integers and compared to
    # twice the expected entries.
    A2int = [[int(2 * _a_entry(n, r, c)) for c in ks] for r in ks]
    TA = [[sum(T[r][j] * A2int[j][c] for j in range(n)) for c in range(n)] for r in range(n)]
    TAT = [[sum(TA[r][j] * T[j][c] for j in range(n)) for c in range(n)] for r in range(n)]
    tat_ok = True
    tat_detail = ""
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if b == a:
                want = a * (a - 1) - 2 * a * n
            elif b == a + 1:
                want = a * (n - a)
            else:
                want = 0
            if TAT[a - 1][b - 1] != want:
                tat_ok = False
                tat_detail = f"entry ({a},{b}): got {Fraction(TAT[a - 1][b - 1], 2)}, expected {Fraction(want, 2)}"
                break
        if not tat_ok:
            break
    checks.append(IdentityCheck("T A T upper bidiagonal entries", tat_ok, tat_detail))

    # Closed-form spectrum vs a numerical eigensolver (the one float check).
    # A is badly nonnormal, so the float64 eigenvalues drift with n; the
    # gate is the Bauer-Fike a-posteriori bound eps * k2(V) * ||A||, floored
    # at 1e-9 where float64 genuinely attains it (n <= ~9).  The spectrum
    # itself is already certified exactly by the triangularization check.
    A_float = build_system(n).A
    gammas = eigenvalues_A(n)
    lam_num, vecs = np.linalg.eig(A_float)
    numeric = np.sort(lam_num.real)
    err = float(np.max(np.abs(numeric - gammas)))
    cond_v = float(np.linalg.cond(vecs))
    gate = max(1e-9 * float(np.min(np.abs(gammas))), 64 * np.finfo(float).eps * cond_v * float(np.linalg.norm(A_float, 2)))
    eig_ok = err < gate
    checks.append(
        IdentityCheck(
            "eigenvalues match k(k-1)/2 - n(n+1)/2",
            eig_ok,
            f"max abs error {err:.2e} vs conditioning gate {gate:.2e}",
        )
    )

    return IdentityReport(n=n, checks=checks)
