"""Moments of the pile-filling stopping time and its repeat counters.

Draws are i.i.d. uniform over n objects; the process stops once m distinct
objects have been seen, after ell draws.  tau_j counts the draws made while
the pile held exactly j distinct objects that hit the pile again.  The
quantities consumed downstream are E[ell], Var(ell), E[1/ell], and
E[tau_j/ell].

E[1/ell] is computed by four independent routes that check one another:

* ``recip_len_closed_form``  alternating finite sum, extended precision
  (the sum cancels catastrophically, roughly m*log2(n) bits);
* ``recip_len_series``       truncated series over exact path counts,
  Stirling rows kept scaled by n**-ell;
* ``recip_len_quadrature``   adaptive quadrature of the integral
  representation over [0, 1/n];
* ``first_passage_dp``       forward absorbing dynamic program on the
  pile-size chain, with explicit residual-mass tracking.

E[tau_j/ell] uses a double series (geometric tail in k times the stopping
distribution), cross-checked against a single-integral reduction and a DP
companion accumulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy.integrate import quad as _quad

__all__ = [
    "PrecisionConfig",
    "ConvergenceError",
    "PrecisionLossError",
    "MethodTag",
    "OccupancyMoments",
    "stirling2",
    "path_count",
    "enumerate_paths",
    "stirling_prob_identity_check",
    "expected_len",
    "var_len",
    "recip_len_closed_form",
    "recip_len_series",
    "recip_len_quadrature",
    "tau_given_len",
    "tau_recip_len",
    "tau_recip_batch",
    "tau_recip_quadrature",
    "tau_mean",
    "first_passage_dp",
    "moments",
]

# extra series terms always taken past the first satisfied tail bound
_TERM_FLOOR = 50
# residual unabsorbed probability mass allowed in the DP
_DP_MASS_TOL = 1e-13


@dataclass(frozen=True)
class PrecisionConfig:
    """Numerical targets shared by every routine in this module."""

    tol: float = 1e-10            # relative truncation / agreement target
    max_terms: int = 10**6        # series / DP step budget
    quad_rel_err: float = 1e-12   # quadrature relative error target
    working_precision: int = 256  # mpmath precision in bits

    def __post_init__(self) -> None:
        if not (0.0 < self.tol < 1.0):
            raise ValueError(f"tol must be in (0, 1), got {self.tol}")
        if self.max_terms < 100:
            raise ValueError(f"max_terms too small: {self.max_terms}")
        if not (0.0 < self.quad_rel_err < 1.0):
            raise ValueError(f"quad_rel_err must be in (0, 1), got {self.quad_rel_err}")
        if self.working_precision < 53:
            raise ValueError(f"working_precision below double precision: {self.working_precision}")


_DEFAULT_CFG = PrecisionConfig()


class ConvergenceError(RuntimeError):
    """A truncated computation could not certify the requested tolerance."""

    def __init__(self, message: str, partial: float | None = None):
        super().__init__(message)
        self.partial = partial


class PrecisionLossError(RuntimeError):
    """Cancellation consumed the working precision; the result is untrusted."""


def _check_nm(n: int, m: int) -> None:
    if n < 1:
        raise ValueError(f"need n >= 1, got n={n}")
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")


# ---------------------------------------------------------------------------
# exact combinatorics


def stirling2(l: int, m: int) -> int:
    """Stirling number of the second kind {l, m}, exact integer.

    Out-of-range arguments count zero partitions: {l, m} = 0 for m > l or
    m = 0 < l; {0, 0} = 1.
    """
    if l < 0 or m < 0:
        raise ValueError(f"stirling2 needs l, m >= 0, got l={l}, m={m}")
    if m > l:
        return 0
    if m == 0:
        return 1 if l == 0 else 0
    # row recurrence {t, k} = k {t-1, k} + {t-1, k-1}, truncated at column m
    row = [1] + [0] * m  # row for t = 0
    for t in range(1, l + 1):
        for k in range(min(t, m), 0, -1):
            row[k] = k * row[k] + row[k - 1]
        row[0] = 0
    return row[m]


def path_count(n: int, m: int, l: int) -> int:
    """Number of length-l draw sequences over n objects whose m-th distinct
    object appears exactly at draw l: m! * C(n, m) * {l-1, m-1}."""
    _check_nm(n, m)
    if l < m:
        raise ValueError(f"no path of length l={l} can reach m={m} distinct objects")
    return math.factorial(m) * math.comb(n, m) * stirling2(l - 1, m - 1)


def enumerate_paths(n: int, m: int, l: int):
    """Yield every length-l draw sequence (tuples over range(n)) that first
    reaches m distinct objects at draw l.  Exponential; test sizes only."""
    _check_nm(n, m)
    if l < m:
        return
    import itertools

    for seq in itertools.product(range(n), repeat=l):
        seen: set[int] = set()
        stop_at = None
        for t, x in enumerate(seq, start=1):
            seen.add(x)
            if len(seen) == m:
                stop_at = t
                break
        if stop_at == l:
            yield seq


def stirling_prob_identity_check(n: int, m: int, l_max: int) -> float:
    """Relative residual of the truncated identity
    sum_{l=m}^{l_max} {l-1, m-1} / n**l = (n-m)! / n!  (exact arithmetic)."""
    _check_nm(n, m)
    if l_max < m:
        raise ValueError(f"l_max={l_max} below minimum length m={m}")
    # running scaled sum: S = sum {l-1, m-1} * n**(l_max - l), exact integers
    total = 0
    row = [1] + [0] * (m - 1)  # {t, k} row at t = 0, columns 0..m-1
    for l in range(1, l_max + 1):
        if l >= m:
            total = total + row[m - 1] * n ** (l_max - l)
        for k in range(min(l, m - 1), 0, -1):
            row[k] = k * row[k] + row[k - 1]
        row[0] = 0
    # residual relative to the exact limit (n-m)!/n! = 1/perm(n, m)
    residual = Fraction(total * math.perm(n, m) - n**l_max, n**l_max)
    return float(abs(residual))


# ---------------------------------------------------------------------------
# plain moments of ell


def expected_len(n: int, m: int) -> float:
    """E[ell] = n (H_n - H_{n-m}), summed directly over the shifted range."""
    _check_nm(n, m)
    return math.fsum(n / k for k in range(n - m + 1, n + 1))


def var_len(n: int, m: int) -> float:
    """Var(ell) = sum_{j=0}^{m-1} j n / (n - j)^2 (independent geometric stages)."""
    _check_nm(n, m)
    return math.fsum(j * n / (n - j) ** 2 for j in range(m))


def tau_mean(n: int, j: int) -> float:
    """Unconditional mean of the geometric repeat counter, E[tau_j] = j/(n-j)."""
    if not 1 <= j < n:
        raise ValueError(f"need 1 <= j < n, got j={j}, n={n}")
    return j / (n - j)


# ---------------------------------------------------------------------------
# E[1/ell]: four routes


def recip_len_closed_form(n: int, m: int, cfg: PrecisionConfig | None = None) -> float:
    """Alternating closed form for E[1/ell], evaluated in extended precision.

    E[1/ell] = m C(n,m) [ (-1)^{m+1}/n
                          + sum_{j=1}^{m-1} (-1)^{m-j} C(m-1,j) ln(1-j/n)/j ].
    The bracket is the j=0 limit term plus the log terms; the sum cancels to
    roughly m*log2(n) bits, so it is formed at cfg.working_precision and the
    accumulated roundoff is checked against cfg.tol.
    """
    cfg = cfg or _DEFAULT_CFG
    _check_nm(n, m)
    if m > n - 1:
        raise ValueError(f"closed form requires m <= n-1 (got m={m}, n={n}); use series or DP")
    if m == 1:
        return 1.0
    with mpmath.workprec(cfg.working_precision):
        acc = mpmath.mpf((-1) ** (m + 1)) / n
        peak = abs(acc)
        for j in range(1, m):
            term = (
                (-1) ** (m - j)
                * math.comb(m - 1, j)
                * mpmath.log(mpmath.mpf(n - j) / n)
                / j
            )
            acc += term
            peak = max(peak, abs(term))
        scale = mpmath.mpf(m * math.comb(n, m))
        value = scale * acc
        # interval-style bound: m terms of magnitude <= peak, each rounded
        roundoff = scale * peak * m * mpmath.mpf(2) ** (1 - cfg.working_precision)
        if value <= 0 or roundoff > cfg.tol * value:
            raise PrecisionLossError(
                f"closed form for (n={n}, m={m}) lost precision: "
                f"value={float(value):.3e}, roundoff bound={float(roundoff):.3e} "
                f"at {cfg.working_precision} bits"
            )
        return float(value)


def _stopping_probs(n: int, m: int, cfg: PrecisionConfig) -> np.ndarray:
    """P(ell = l) for l = m, m+1, ... until the certified geometric tail of
    the stopping distribution falls below cfg.tol (absolute, mass scale)."""
    if m == 1:
        return np.array([1.0])
    prefactor = float(math.perm(n, m))  # m! C(n,m); raises OverflowError if huge
    # scaled Stirling row: sc[k-1] = {l, k} / n**l for k = 1..m-1
    sc = np.zeros(m - 1)
    sc[0] = 1.0 / n  # row l = 1
    kvec = np.arange(1, m, dtype=float)
    for _ in range(2, m):  # advance to row l = m-1
        nxt = kvec * sc
        nxt[1:] += sc[:-1]
        sc = nxt / n
    probs = []
    prev = None
    total = 0.0
    for l in range(m, m + cfg.max_terms):
        w = prefactor * sc[m - 2] / n  # P(ell = l), row currently at l-1
        probs.append(w)
        total += w
        if prev is not None and w > 0.0:
            r = w / prev
            if r < 1.0 and w * r / (1.0 - r) < cfg.tol * total and l - m >= _TERM_FLOOR:
                return np.asarray(probs)
        if w == 0.0 and l - m >= _TERM_FLOOR:
            return np.asarray(probs)
        prev = w
        nxt = kvec * sc
        nxt[1:] += sc[:-1]
        sc = nxt / n
    raise ConvergenceError(
        f"stopping distribution for (n={n}, m={m}) not resolved in {cfg.max_terms} terms",
        partial=total,
    )


def recip_len_series(n: int, m: int, cfg: PrecisionConfig | None = None) -> float:
    """E[1/ell] = sum_{l>=m} m! C(n,m) {l-1, m-1} / (l n**l), truncated when
    the observed-ratio geometric tail bound drops below cfg.tol relative."""
    cfg = cfg or _DEFAULT_CFG
    _check_nm(n, m)
    if m == 1:
        return 1.0
    try:
        prefactor = float(math.perm(n, m))
    except OverflowError:
        raise ConvergenceError(
            f"series prefactor n!/(n-m)! exceeds float range for (n={n}, m={m}); use first_passage_dp"
        ) from None
    sc = np.zeros(m - 1)
    sc[0] = 1.0 / n
    kvec = np.arange(1, m, dtype=float)
    for _ in range(2, m):
        nxt = kvec * sc
        nxt[1:] += sc[:-1]
        sc = nxt / n
    total = 0.0
    prev = None
    for l in range(m, m + cfg.max_terms):
        term = prefactor * sc[m - 2] / (n * l)
        total += term
        if prev is not None and term > 0.0:
            r = term / prev
            if r < 1.0 and term * r / (1.0 - r) < cfg.tol * total and l - m >= _TERM_FLOOR:
                return total
        if term == 0.0 and l - m >= _TERM_FLOOR:
            return total
        prev = term
        nxt = kvec * sc
        nxt[1:] += sc[:-1]
        sc = nxt / n
    raise ConvergenceError(
        f"E[1/ell] series for (n={n}, m={m}) did not converge in {cfg.max_terms} terms",
        partial=total,
    )


def recip_len_quadrature(n: int, m: int, cfg: PrecisionConfig | None = None) -> float:
    """E[1/ell] = n!/(n-m)! * int_0^{1/n} x^{m-1} / prod_{i=1}^{m-1}(1-ix) dx,
    via adaptive quadrature; the integrand is evaluated in log space."""
    cfg = cfg or _DEFAULT_CFG
    _check_nm(n, m)
    log_pref = math.lgamma(n + 1) - math.lgamma(n - m + 1)
    ivec = np.arange(1, m, dtype=float)

    def integrand(x: float) -> float:
        if x <= 0.0:
            return math.exp(log_pref) if m == 1 else 0.0
        return math.exp(log_pref + (m - 1) * math.log(x) - np.log1p(-ivec * x).sum())

    value, abserr = _quad(integrand, 0.0, 1.0 / n, epsabs=0.0, epsrel=cfg.quad_rel_err, limit=200)
    if abserr > 50 * cfg.quad_rel_err * abs(value):
        raise ConvergenceError(
            f"quadrature for (n={n}, m={m}) achieved only {abserr:.2e} absolute error",
            partial=value,
        )
    return value


def first_passage_dp(
    n: int,
    m: int,
    j_mark: int | None = None,
    l_cap: int | None = None,
    cfg: PrecisionConfig | None = None,
) -> tuple[float, float | None]:
    """Forward absorbing DP on the pile-size chain.

    p(t+1, i) = p(t, i) i/n + p(t, i-1) (n-i+1)/n over unabsorbed states
    i < m; absorption from i = m-1 with rate (n-m+1)/n gives
    P(ell = L) = p(L-1, m-1) (n-m+1)/n.  Accumulates E[1/ell] and, when
    j_mark is given, E[tau_{j_mark}/ell] through a companion accumulator
    u(t, i) carrying E[tau * 1(state = i)] with self-loop increment
    p(t, j_mark) j_mark/n.

    Runs until the unabsorbed mass falls below 1e-13 (or l_cap steps, if
    given, failing when the residual is still above tolerance).
    """
    cfg = cfg or _DEFAULT_CFG
    _check_nm(n, m)
    if j_mark is not None and not 1 <= j_mark <= m - 1:
        raise ValueError(f"j_mark={j_mark} outside [1, m-1] for m={m}")
    p = np.zeros(m)
    p[0] = 1.0
    u = np.zeros(m) if j_mark is not None else None
    stay = np.arange(m, dtype=float) / n          # i/n for i = 0..m-1
    advance = (n - np.arange(m - 1, dtype=float)) / n  # (i -> i+1) rate, i = 0..m-2
    absorb = (n - m + 1) / n
    recip = 0.0
    tau_acc = 0.0 if j_mark is not None else None
    mass = 1.0
    limit = l_cap if l_cap is not None else cfg.max_terms
    for t in range(limit):
        length = t + 1
        flow = p[m - 1] * absorb
        recip += flow / length
        if u is not None:
            tau_acc += u[m - 1] * absorb / length
        mass -= flow
        if mass < _DP_MASS_TOL:
            return recip, tau_acc
        nxt = p * stay
        nxt[1:] += p[:-1] * advance
        if u is not None:
            unxt = u * stay
            unxt[1:] += u[:-1] * advance
            unxt[j_mark] += p[j_mark] * stay[j_mark]
            u = unxt
        p = nxt
    raise ConvergenceError(
        f"DP for (n={n}, m={m}) left residual mass {mass:.3e} above {_DP_MASS_TOL:.0e} "
        f"after {limit} steps",
        partial=recip,
    )


# ---------------------------------------------------------------------------
# repeat counters tau_j


def tau_given_len(n: int, m: int, j: int, l: int) -> float:
    """E[tau_j | ell = l], exact:
    {l-1, m-1}^{-1} sum_{k=1}^{l-m} j^k {l-k-1, m-1}."""
    _check_nm(n, m)
    if not 1 <= j <= m - 1:
        raise ValueError(f"need 1 <= j <= m-1, got j={j}, m={m}")
    if l < m:
        raise ValueError(f"no path of length l={l} for m={m}")
    denom = stirling2(l - 1, m - 1)
    num = sum(j**k * stirling2(l - k - 1, m - 1) for k in range(1, l - m + 1))
    return float(Fraction(num, denom))


def tau_recip_batch(n: int, m: int, cfg: PrecisionConfig | None = None) -> np.ndarray:
    """E[tau_j/ell] for every j = 1..m-1 in one pass.

    Double series: E[tau_j/ell] = sum_{k>=1} (j/n)^k A_k with
    A_k = sum_l P(ell = l)/(l + k); the k tail is truncated once the
    geometric bound (j/n)^k (j/n)/(1 - j/n) falls below cfg.tol relative.
    """
    cfg = cfg or _DEFAULT_CFG
    _check_nm(n, m)
    if m == 1:
        return np.zeros(0)
    probs = _stopping_probs(n, m, cfg)
    lengths = np.arange(m, m + probs.size, dtype=float)
    a_coeffs: list[float] = []

    def a(k: int) -> float:
        while len(a_coeffs) < k:
            a_coeffs.append(float(probs @ (1.0 / (lengths + (len(a_coeffs) + 1)))))
        return a_coeffs[k - 1]

    out = np.zeros(m - 1)
    for j in range(1, m):
        r = j / n
        partial = 0.0
        rk = 1.0
        for k in range(1, cfg.max_terms):
            rk *= r
            partial += rk * a(k)
            if rk * r / (1.0 - r) < cfg.tol * partial:
                break
        else:
            raise ConvergenceError(
                f"tau series for (n={n}, m={m}, j={j}) did not converge", partial=partial
            )
        out[j - 1] = partial
    return out


def tau_recip_len(n: int, m: int, j: int, cfg: PrecisionConfig | None = None) -> float:
    """E[tau_j/ell] by the truncated double series (see tau_recip_batch)."""
    _check_nm(n, m)
    if not 1 <= j <= m - 1:
        raise ValueError(f"need 1 <= j <= m-1, got j={j}, m={m}")
    return float(tau_recip_batch(n, m, cfg)[j - 1])


def tau_recip_quadrature(n: int, m: int, j: int, cfg: PrecisionConfig | None = None) -> float:
    """Single-integral reduction of the tau double series:
    E[tau_j/ell] = n!/(n-m)! * int_0^{1/n} j x^m / ((1-jx) prod_{i=1}^{m-1}(1-ix)) dx."""
    cfg = cfg or _DEFAULT_CFG
    _check_nm(n, m)
    if not 1 <= j <= m - 1:
        raise ValueError(f"need 1 <= j <= m-1, got j={j}, m={m}")
    log_pref = math.lgamma(n + 1) - math.lgamma(n - m + 1) + math.log(j)
    ivec = np.arange(1, m, dtype=float)

    def integrand(x: float) -> float:
        if x <= 0.0:
            return 0.0
        return math.exp(
            log_pref
            + m * math.log(x)
            - math.log1p(-j * x)
            - np.log1p(-ivec * x).sum()
        )

    value, abserr = _quad(integrand, 0.0, 1.0 / n, epsabs=0.0, epsrel=cfg.quad_rel_err, limit=200)
    if abserr > 50 * cfg.quad_rel_err * abs(value):
        raise ConvergenceError(
            f"tau quadrature for (n={n}, m={m}, j={j}) achieved only {abserr:.2e}",
            partial=value,
        )
    return value


# ---------------------------------------------------------------------------
# aggregated moments with cross-validation


@dataclass(frozen=True)
class MethodTag:
    """Which route produced a field and how far the cross-check strayed."""

    method: str
    est_error: float


@dataclass(frozen=True)
class OccupancyMoments:
    """All stopping-time moments needed by the cost curves at one (n, m)."""

    n: int
    m: int
    expected_len: float
    var_len: float
    recip_len: float
    tau_recip: np.ndarray  # E[tau_j/ell] for j = 1..m-1
    method_tags: dict[str, MethodTag] = field(default_factory=dict)

    def total_probability_residual(self) -> float:
        """|m E[1/ell] + sum_j E[tau_j/ell] - 1|; identically 0 in exact arithmetic."""
        return abs(self.m * self.recip_len + math.fsum(self.tau_recip.tolist()) - 1.0)


def _recip_with_error(n: int, m: int, cfg: PrecisionConfig) -> tuple[float, str, float]:
    """Preferred-route E[1/ell] plus an estimated error from a second route."""
    if m == 1:
        return 1.0, "exact", 0.0
    if m <= 30 and m < n:
        try:
            primary, name = recip_len_closed_form(n, m, cfg), "closed_form"
        except PrecisionLossError:
            primary, name = recip_len_series(n, m, cfg), "series"
        alt = recip_len_series(n, m, cfg) if name == "closed_form" else recip_len_quadrature(n, m, cfg)
    else:
        primary, name = recip_len_series(n, m, cfg), "series"
        alt = recip_len_quadrature(n, m, cfg) if m < n else first_passage_dp(n, m, cfg=cfg)[0]
    err = abs(primary - alt)
    if err > 100 * cfg.tol * abs(primary):
        referee = first_passage_dp(n, m, cfg=cfg)[0]
        if abs(primary - referee) > 100 * cfg.tol * abs(primary) and abs(alt - referee) > 100 * cfg.tol * abs(primary):
            raise ConvergenceError(
                f"E[1/ell] routes disagree at (n={n}, m={m}): "
                f"{name}={primary!r}, alt={alt!r}, dp={referee!r}"
            )
        if abs(alt - referee) < abs(primary - referee):
            primary, name = alt, "series"
        err = abs(primary - referee)
    return primary, name, err


def moments(n: int, m: int, cfg: PrecisionConfig | None = None) -> OccupancyMoments:
    """Compute every moment at (n, m), cross-validating each against an
    independent route and recording the disagreement as estimated error."""
    cfg = cfg or _DEFAULT_CFG
    _check_nm(n, m)
    recip, recip_method, recip_err = _recip_with_error(n, m, cfg)
    tau = tau_recip_batch(n, m, cfg)
    tau_err = 0.0
    for j in range(1, m):
        alt = tau_recip_quadrature(n, m, j, cfg)
        tau_err = max(tau_err, abs(tau[j - 1] - alt))
    tags = {
        "expected_len": MethodTag("exact_sum", 0.0),
        "var_len": MethodTag("exact_sum", 0.0),
        "recip_len": MethodTag(recip_method, recip_err),
        "tau_recip": MethodTag("series", tau_err),
    }
    result = OccupancyMoments(
        n=n,
        m=m,
        expected_len=expected_len(n, m),
        var_len=var_len(n, m),
        recip_len=recip,
        tau_recip=tau,
        method_tags=tags,
    )
    residual = result.total_probability_residual()
    if residual > max(1e-8, 1000 * cfg.tol):
        raise ConvergenceError(
            f"moments at (n={n}, m={m}) violate total probability by {residual:.3e}"
        )
    return result
