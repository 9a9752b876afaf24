"""Approximate cost curve for the complete-memory numbered model.

F-tilde replaces the reciprocal moments of the exact curve by reciprocals
of moments: E[1/ell] -> 1/E[ell] and E[tau_j/ell] -> (j/(n-j))/E[ell],
giving

    F~(m) = ( 2 m b(n) + sum_{j=1}^{m-1} (j+1)/2 * j/(n-j) ) / E[ell].

Its argmin is pinned by a bracket: for n >= 5,
3 b(n) - 3/2 <= m~_opt(n) < 3 b(n) + 1/2, so m~_opt is one of two integers.
The discrete step direction is decided by a sign criterion whose terms are
summed with compensated summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cost_model import binary_success_cost
from .occupancy import expected_len

__all__ = [
    "ApproxCurve",
    "BracketReport",
    "f_tilde",
    "m_opt_approx",
    "delta_sign_criterion",
    "sum_lemma_sign",
    "verify_bracket",
]


@dataclass(frozen=True)
class ApproxCurve:
    """F~(m) for m = 1..n with its argmin and the two-candidate bracket."""

    n: int
    values: np.ndarray      # values[m-1] = F~(m)
    m_opt_approx: int       # smallest argmin
    bracket_low: float      # 3 b(n) - 3/2
    bracket_high: float     # 3 b(n) + 1/2


@dataclass(frozen=True)
class BracketReport:
    """Bracket-membership sweep over n, with per-branch tallies."""

    n_min: int
    n_max: int
    violations: tuple[tuple[int, int, float, float], ...]  # (n, m~_opt, low, high)
    low_branch: int      # count of n with m~_opt = ceil(3 b(n) - 3/2)
    high_branch: int     # count of n with m~_opt = ceil(3 b(n) - 3/2) + 1
    low_witness: int | None
    high_witness: int | None

    @property
    def passed(self) -> bool:
        return not self.violations


def _check_nm(n: int, m: int) -> None:
    if n < 1 or not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")


def f_tilde(n: int, m: int) -> float:
    """Approximate per-search cost F~(m; n) for the numbered, complete-memory model."""
    _check_nm(n, m)
    numer = 2 * m * binary_success_cost(n) + math.fsum(
        (j + 1) / 2 * j / (n - j) for j in range(1, m)
    )
    return numer / expected_len(n, m)


def _curve(n: int) -> np.ndarray:
    """F~(m) for all m = 1..n in one vectorized pass."""
    j = np.arange(1.0, n)
    pile = np.concatenate(([0.0], np.cumsum((j + 1) / 2 * j / (n - j))))
    marr = np.arange(1.0, n + 1)
    # E[ell](m) = n * sum_{k=n-m+1}^{n} 1/k, accumulated from k = n downward
    e_len = n * np.cumsum(1.0 / np.arange(n, 0.0, -1.0))
    return (2 * binary_success_cost(n) * marr + pile) / e_len


def m_opt_approx(n: int) -> ApproxCurve:
    """Scan F~ over m = 1..n; smallest argmin plus the two-candidate bracket."""
    if n < 1:
        raise ValueError(f"need n >= 1, got n={n}")
    values = _curve(n)
    best = int(np.argmin(values))  # np.argmin returns the first minimum
    b_n = binary_success_cost(n)
    return ApproxCurve(
        n=n,
        values=values,
        m_opt_approx=best + 1,
        bracket_low=3 * b_n - 1.5,
        bracket_high=3 * b_n + 0.5,
    )


def delta_sign_criterion(n: int, m: int) -> float:
    """Sign-equivalent of F~(m) - F~(m+1):

    sum_{j=0}^{m-1} (m-j)/(n-j) * (4 b(n) - (m+j+1)),
    positive exactly when F~(m) > F~(m+1).  Compensated summation.
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    four_b = 4 * binary_success_cost(n)
    return math.fsum(
        (m - j) / (n - j) * (four_b - (m + j + 1)) for j in range(m)
    )


def sum_lemma_sign(a: int, b: float, c: float) -> float:
    """sum_{j=0}^{a} (a-j)(b-j)/(c-j); negative when b <= (a-2)/3 and
    positive when b > a/3 and c >= 5 a^2, which classifies the sign of
    the optimum's discrete step."""
    if a <= 1:
        raise ValueError(f"need a > 1, got a={a}")
    if c < max(a, b):
        raise ValueError(f"need c >= max(a, b), got a={a}, b={b}, c={c}")
    return math.fsum((a - j) * (b - j) / (c - j) for j in range(a + 1))


def verify_bracket(n_max: int, n_min: int = 5) -> BracketReport:
    """Check m~_opt(n) in {ceil(3b(n)-3/2), ceil(3b(n)-3/2)+1} for n in [n_min, n_max]."""
    if n_min < 5:
        raise ValueError(f"bracket holds for n >= 5, got n_min={n_min}")
    if n_max < n_min:
        raise ValueError(f"need n_max >= {n_min}, got {n_max}")
    violations = []
    low = high = 0
    low_witness = high_witness = None
    for n in range(n_min, n_max + 1):
        curve = m_opt_approx(n)
        lo_candidate = math.ceil(curve.bracket_low)
        if curve.m_opt_approx == lo_candidate:
            low += 1
            if low_witness is None:
                low_witness = n
        elif curve.m_opt_approx == lo_candidate + 1:
            high += 1
            if high_witness is None:
                high_witness = n
        else:
            violations.append((n, curve.m_opt_approx, curve.bracket_low, curve.bracket_high))
    return BracketReport(
        n_min=n_min,
        n_max=n_max,
        violations=tuple(violations),
        low_branch=low,
        high_branch=high,
        low_witness=low_witness,
        high_witness=high_witness,
    )
