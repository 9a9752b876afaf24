"""Self-contained verification battery behind the ``verify`` command.

Two ingredients: the published reference dataset (the optimal-size
table rows and three published cost curves) and an ordered list of
checks comparing the library against the references and against its
own cross-method invariants.  Hard checks decide the exit code.
Witness and probe lines are reported but never fail the run; they
cover the conjectures and the places where the reference dataset is
internally inconsistent (see the KNOWN_BAD tables below, whose
corrected values are pinned by the regression tests).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from . import analytic, approx, montecarlo, occupancy
from .cost_model import Model, binary_success_cost

# -- published reference data ------------------------------------------------

# Optimal pile sizes for n = 1..35: approximate row and exact row.
TABLE_APPROX_ROW = (1, 2, 3, 4, 5, 6, 7, 8, 8, 8, 9, 9, 9, 9, 9, 10, 10, 10,
                    10, 11, 11, 11, 11, 11, 11, 12, 12, 12, 12, 12, 12, 12,
                    12, 13, 13)
TABLE_EXACT_ROW = (1, 2, 3, 4, 5, 6, 7, 8, 8, 8, 9, 9, 9, 10, 10, 10, 10, 10,
                   11, 11, 11, 11, 11, 12, 12, 12, 12, 12, 12, 12, 13, 13, 13,
                   13, 13)

# Exact-cost curve at n = 20, model m4.
CURVE20_EXACT = (
    (1, 7.22386658784), (2, 7.11746171245), (3, 6.99458276474),
    (4, 6.87412332227), (5, 6.76290728722), (6, 6.66429243642),
    (7, 6.58025242957), (8, 6.51148889616), (9, 6.45548860194),
    (10, 6.40141803534), (11, 6.42438638139), (12, 6.43856591688),
    (13, 6.47837320768), (14, 6.54701810181), (15, 6.6488346379),
    (16, 6.79004794699), (17, 6.98028331989), (18, 7.23614856613),
    (19, 7.591830101), (20, 8.14481872387),
)

# Approximate-cost curve at n = 20.
CURVE20_APPROX = (
    (1, 7.22386658784), (2, 7.06428026507), (3, 6.91930417664),
    (4, 6.7894603062), (5, 6.67533965227), (6, 6.57761715255),
    (7, 6.49707119509), (8, 6.43460959719), (9, 6.39130492667),
    (10, 6.36844369696), (11, 6.36759683884), (12, 6.39072405851),
    (13, 6.44033465613), (14, 6.51974771885), (15, 6.63353955542),
    (16, 6.78837608417), (17, 6.9947340548), (18, 7.27103874741),
    (19, 7.65624823248), (20, 8.26911778588),
)

# Approximate-cost curve at n = 100.
CURVE100_APPROX = (
    (1, 11.4495871952), (2, 11.3970767067), (3, 11.3477547413),
    (4, 11.3016446176), (5, 11.2587701967), (6, 11.2191559009),
    (7, 11.1828267338), (8, 11.1498083014), (9, 11.1201268339),
    (10, 11.0938092089), (11, 11.0708829756), (12, 11.0513763802),
    (13, 11.0353183926), (14, 11.0227387342), (15, 11.0136679079),
    (16, 11.0081372284), (17, 11.0061788557), (18, 11.0078258286),
    (19, 11.0131121019), (20, 11.0220725837), (21, 11.0347431766),
    (22, 11.0511608197), (23, 11.0713635342), (24, 11.0953904706),
    (25, 11.1232819595), (26, 11.1550795649), (27, 11.1908261408),
    (28, 11.2305658915), (29, 11.2743444354), (30, 11.3222088727),
    (31, 11.3742078578), (32, 11.4303916759), (33, 11.4908123251),
    (34, 11.5555236034), (35, 11.6245812024), (36, 11.6980428065),
    (37, 11.7759681999), (38, 11.8584193802), (39, 11.9454606816),
    (40, 12.0371589055), (41, 12.1335834622), (42, 12.2348065225),
    (43, 12.3409031815), (44, 12.451951635), (45, 12.5680333703),
    (46, 12.6892333721), (47, 12.8156403459), (48, 12.9473469604),
    (49, 13.0844501106), (50, 13.2270512038), (51, 13.3752564721),
    (52, 13.5291773131), (53, 13.6889306622), (54, 13.8546394014),
    (55, 14.0264328071), (56, 14.2044470442), (57, 14.3888257087),
    (58, 14.5797204296), (59, 14.7772915333), (60, 14.9817087827),
    (61, 15.1931521989), (62, 15.4118129785), (63, 15.6378945193),
    (64, 15.8716135725), (65, 16.1132015385), (66, 16.3629059311),
    (67, 16.6209920361), (68, 16.8877447977), (69, 17.1634709721),
    (70, 17.4485015962), (71, 17.7431948288), (72, 18.0479392373),
    (73, 18.3631576158), (74, 18.6893114469), (75, 19.0269061415),
    (76, 19.3764972321), (77, 19.7386977384), (78, 20.1141869897),
    (79, 20.5037212714), (80, 20.908146778), (81, 21.3284155152),
    (82, 21.7656050115), (83, 22.2209430181), (84, 22.6958388268),
    (85, 23.1919235055), (86, 23.7111023556), (87, 24.2556244417),
    (88, 24.8281764895), (89, 25.4320124265), (90, 26.0711365465),
    (91, 26.7505700282), (92, 27.4767521009), (93, 28.2581689204),
    (94, 29.1063896342), (95, 30.0378828994), (96, 31.0774683887),
    (97, 32.2656247026), (98, 33.6765518307), (99, 35.4751047256),
    (100, 38.2008348461),
)

# Cells where the published dataset contradicts itself.  The approx
# table row disagrees with the published approx curve formula at two
# cells (the published row repeats the exact row there); the computed
# argmin is given.  Anchors: all 120 published approx coordinates match
# the formula to 5e-11, and the published increase/decrease criterion
# sides with the computed row.
KNOWN_BAD_TABLE_APPROX = {8: 7, 11: 8}

# Published exact-curve coordinates at n = 20 that fail their own
# 1e-6 precision: m = 5..10 are progressively too low (up to 3.2e-2,
# the signature of a truncated series) and m = 20 is 2.3e-3 low.  The
# published optimum m_opt(20) = 11 agrees with the corrected curve,
# not with these coordinates, and a 4e6-trial simulation rejects the
# published m = 10 value by 154 standard errors.  Corrected values:
KNOWN_BAD_CURVE20_EXACT = {
    5: 6.762908405813018,
    6: 6.664312493743758,
    7: 6.580465842713281,
    8: 6.513018029896668,
    9: 6.463470162348217,
    10: 6.433358052037219,
    20: 8.147146153616118,
}

_SEED = 97


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool | None  # None for purely informational lines
    probe: bool  # probes and witnesses never fail the run
    detail: str
    seconds: float = 0.0

    @property
    def status(self) -> str:
        if self.probe:
            return "note" if self.passed in (True, None) else "warn"
        return "PASS" if self.passed else "FAIL"


def battery_passed(results) -> bool:
    return all(r.passed for r in results if not r.probe)


# -- grid helpers shared with the test suite ---------------------------------

@dataclass(frozen=True)
class GridReport:
    cells: int
    worst_rel_spread: float
    worst_cell: tuple[int, int]
    method_failures: tuple
    invariant_failures: tuple

    @property
    def passed(self) -> bool:
        return not self.method_failures and not self.invariant_failures


def occupancy_grid(n_max: int, rel_tol: float = 1e-9) -> GridReport:
    """Run the cross-method and invariant battery on 1 <= m <= n <= n_max.

    Four routes to the reciprocal-length moment must agree within
    rel_tol (the alternating closed form sits out at m = n, where its
    preconditions end); the total-probability, Jensen-chain,
    covariance, and running-average bounds must hold at every cell.
    """
    cells = 0
    worst = 0.0
    worst_cell = (1, 1)
    method_failures = []
    invariant_failures = []

    def bad(n, m, what):
        invariant_failures.append((n, m, what))

    for n in range(1, n_max + 1):
        prev_elen = None
        for m in range(1, n + 1):
            cells += 1
            series = occupancy.recip_len_series(n, m)
            quad = occupancy.recip_len_quadrature(n, m)
            dp, _ = occupancy.first_passage_dp(n, m)
            vals = [series, quad, dp]
            if m < n:
                vals.append(occupancy.recip_len_closed_form(n, m))
            spread = (max(vals) - min(vals)) / max(abs(v) for v in vals)
            if spread > worst:
                worst, worst_cell = spread, (n, m)
            if spread > rel_tol:
                method_failures.append((n, m, spread))

            recip = series
            elen = occupancy.expected_len(n, m)
            tau = occupancy.tau_recip_batch(n, m)

            total = m * recip + float(tau.sum())
            if abs(total - 1.0) > 1e-9:
                bad(n, m, f"total probability {total!r}")
            # Jensen chain, strict between the endpoints
            if m == 1:
                if recip != 1.0:
                    bad(n, m, "recip_len must be exactly 1 at m=1")
            elif not 1.0 / elen < recip < 1.0 / m:
                bad(n, m, "Jensen chain violated")
            lower = 0.0 if m == n else 1.0 / (n * (math.log(n) - math.log(n - m)))
            if lower > 1.0 / elen + 1e-15:
                bad(n, m, "lower bracket above 1/E[len]")
            for j in range(1, m):
                if not tau[j - 1] < (j / (n - j)) * recip:
                    bad(n, m, f"covariance bound violated at j={j}")
            if prev_elen is not None:
                if m * m < 2 * n and not recip < 1.0 / prev_elen:
                    bad(n, m, "running-average strict bound violated")
                slack = (m - 1) * (n - m) / (2.0 * n * n)
                if recip > 1.0 / prev_elen + slack + 1e-12:
                    bad(n, m, "running-average slack bound violated")
            prev_elen = elen
    return GridReport(cells, worst, worst_cell, tuple(method_failures),
                      tuple(invariant_failures))


def curve_deviation(reference, values, tol):
    """Split reference coordinates into within-tol and beyond-tol lists."""
    good, bad = [], []
    for (m, ref), val in zip(reference, values):
        err = abs(val - ref)
        (good if err <= tol else bad).append((m, ref, val, err))
    return good, bad


# -- the battery itself ------------------------------------------------------

def _timed(name, probe, fn):
    t0 = time.time()
    passed, detail = fn()
    return CheckResult(name, passed, probe, detail, time.time() - t0)


def run_battery(level: str = "quick", workers: int = 1):
    """Yield CheckResults in a stable order; raises on unknown level."""
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    full = level == "full"

    # 1. exact micro-values
    def micro():
        a = abs(occupancy.recip_len_series(2, 2) - (2 * math.log(2) - 1))
        b = abs(occupancy.tau_recip_len(2, 2, 1) - (3 - 4 * math.log(2)))
        c = occupancy.path_count(3, 2, 3)
        d = sum(1 for _ in occupancy.enumerate_paths(3, 2, 3))
        ok = a <= 1e-12 and b <= 1e-12 and c == 6 and d == 6
        return ok, f"recip diff {a:.1e}, tau diff {b:.1e}, path count {c} (enumerated {d})"
    yield _timed("micro-values", False, micro)

    # 2. approximate-optimum table row
    def approx_row():
        computed = [approx.m_opt_approx(n).m_opt_approx for n in range(1, 36)]
        unexpected = [
            (n, c, p) for n, (c, p) in enumerate(zip(computed, TABLE_APPROX_ROW), 1)
            if c != p and KNOWN_BAD_TABLE_APPROX.get(n) != c
        ]
        agree = sum(c == p for c, p in zip(computed, TABLE_APPROX_ROW))
        return not unexpected, (
            f"{agree}/35 match the published row; "
            f"{len(KNOWN_BAD_TABLE_APPROX)} witnessed cells, "
            f"{len(unexpected)} unexpected mismatches")
    yield _timed("table-approx-row", False, approx_row)

    def approx_row_witness():
        parts = []
        for n, corrected in sorted(KNOWN_BAD_TABLE_APPROX.items()):
            got = approx.m_opt_approx(n)
            lo = approx.f_tilde(n, corrected)
            hi = approx.f_tilde(n, TABLE_APPROX_ROW[n - 1])
            parts.append(
                f"n={n}: published {TABLE_APPROX_ROW[n - 1]}, computed "
                f"{got.m_opt_approx} (curve {lo:.6f} < {hi:.6f})")
        return None, "published row contradicts the published curve formula: " + "; ".join(parts)
    yield _timed("table-approx-row-witness", True, approx_row_witness)

    # 3. exact-optimum table row
    def exact_row():
        computed = [analytic.m_opt(n, Model.M4).m_opt for n in range(1, 36)]
        bad = [(n, c, p) for n, (c, p) in enumerate(zip(computed, TABLE_EXACT_ROW), 1) if c != p]
        return not bad, f"{35 - len(bad)}/35 match the published row"
    yield _timed("table-exact-row", False, exact_row)

    # 4. published approximate curves
    def curve20_approx():
        vals = [approx.f_tilde(20, m) for m, _ in CURVE20_APPROX]
        _, bad = curve_deviation(CURVE20_APPROX, vals, 1e-9)
        worst = max(abs(v - r) for (_, r), v in zip(CURVE20_APPROX, vals))
        return not bad, f"20/20 coordinates, worst |diff| {worst:.2e}"
    yield _timed("curve20-approx", False, curve20_approx)

    def curve100_approx():
        vals = [approx.f_tilde(100, m) for m, _ in CURVE100_APPROX]
        _, bad = curve_deviation(CURVE100_APPROX, vals, 1e-9)
        worst = max(abs(v - r) for (_, r), v in zip(CURVE100_APPROX, vals))
        argmin = approx.m_opt_approx(100).m_opt_approx
        ok = not bad and argmin == 17
        return ok, f"100/100 coordinates, worst |diff| {worst:.2e}, argmin {argmin}"
    yield _timed("curve100-approx", False, curve100_approx)

    # 5. published exact curve at n = 20
    def curve20_exact():
        breakdowns = {m: analytic.f_total(20, m, Model.M4) for m, _ in CURVE20_EXACT}
        vals = [breakdowns[m].f_total for m, _ in CURVE20_EXACT]
        good, bad = curve_deviation(CURVE20_EXACT, vals, 1e-6)
        unexpected = [b for b in bad if b[0] not in KNOWN_BAD_CURVE20_EXACT]
        worst_good = max((g[3] for g in good), default=0.0)
        return not unexpected, (
            f"{len(good)}/20 coordinates within 1e-6 (worst {worst_good:.2e}); "
            f"{len(bad)} witnessed deviations, {len(unexpected)} unexpected")
    yield _timed("curve20-exact", False, curve20_exact)

    def curve20_exact_witness():
        rows = []
        for m, ref in CURVE20_EXACT:
            if m in KNOWN_BAD_CURVE20_EXACT:
                val = analytic.f_total(20, m, Model.M4).f_total
                rows.append(f"m={m}: published {ref} is {val - ref:+.2e} low")
        return None, ("published coordinates inconsistent with the published "
                      "optimum at n=20: " + "; ".join(rows))
    yield _timed("curve20-exact-witness", True, curve20_exact_witness)

    # 6. simulation discriminates the inconsistent published cell
    def optimum_discrimination():
        trials = 10**7 if full else 10**6
        d = montecarlo.Distribution.uniform(20)
        r10 = montecarlo.estimate_f(20, 10, Model.M4, d, trials, _SEED, workers)
        r11 = montecarlo.estimate_f(20, 11, Model.M4, d, trials, _SEED, workers)
        f10 = analytic.f_total(20, 10, Model.M4).f_total
        f11 = analytic.f_total(20, 11, Model.M4).f_total
        se = math.hypot(r10.std_err, r11.std_err)
        gap_sigma = (r10.mean - r11.mean) / se
        ok = (abs(r10.mean - f10) <= 4 * r10.std_err
              and abs(r11.mean - f11) <= 4 * r11.std_err
              and gap_sigma > 4.0)
        return ok, (f"{trials} trials: F(10) - F(11) = {r10.mean - r11.mean:.5f} "
                    f"({gap_sigma:.0f} sigma), both within 4 std errs of analytic")
    yield _timed("optimum-discrimination-mc", False, optimum_discrimination)

    # 7. two-candidate bracket for the approximate optimum
    def bracket():
        rep = approx.verify_bracket(2000)
        return rep.passed, (
            f"n in [5, 2000]: {len(rep.violations)} violations; "
            f"lower branch {rep.low_branch}, upper branch {rep.high_branch}")
    yield _timed("approx-bracket", False, bracket)

    # 8. upper bound and the first-step comparison
    def upper_bound():
        bad = []
        for n in range(1, 41):
            rep = analytic.verify_upper_bound(n)
            if not rep.passed:
                bad.append(n)
        return not bad, f"m_opt(n) < 4 b(n) for n in [1, 40]; {len(bad)} violations"
    yield _timed("optimum-upper-bound", False, upper_bound)

    def first_step():
        bad = []
        for n in range(2, 51):
            for model in Model:
                rep = analytic.verify_first_step(n, model)
                if not rep.passed:
                    bad.append((n, model.name))
        return not bad, f"F(2) < F(1) for all models, n in [2, 50]; {len(bad)} violations"
    yield _timed("first-step-comparison", False, first_step)

    def f1_comparison():
        # the published comparison range is sound for m1/m3/m4; for m2 it
        # overreaches, so m2 is reported as a witness below instead
        bad = []
        for n in range(2, 31):
            for model in (Model.M1, Model.M3, Model.M4):
                rep = analytic.verify_f1_comparison(n, model)
                if not rep.passed:
                    bad.append((n, model.name))
        return not bad, (f"F(m) < F(1) on the claimed ranges, models m1/m3/m4, "
                         f"n in [2, 30]; {len(bad)} violations")
    yield _timed("f1-comparison", False, f1_comparison)

    def f1_comparison_witness():
        rep = analytic.verify_f1_comparison(3, Model.M2)
        worst = max(v for _, v in rep.values)
        return None, (
            "published comparison range overreaches for the memoryless "
            f"numbered model: at n=3 the claimed range allows m=3 yet "
            f"F(3)={worst:.10f} > F(1)={rep.f1:.10f}; the sound range there "
            "is m < 4 b(n) - 2 b_f(n)")
    yield _timed("f1-comparison-witness", True, f1_comparison_witness)

    # 9. occupancy cross-method grid
    def grid():
        n_max = 60 if full else 35
        rep = occupancy_grid(n_max)
        return rep.passed, (
            f"{rep.cells} cells to n={n_max}: worst method spread "
            f"{rep.worst_rel_spread:.2e} at {rep.worst_cell}, "
            f"{len(rep.method_failures)} method / "
            f"{len(rep.invariant_failures)} invariant failures")
    yield _timed("occupancy-grid", False, grid)

    # 10. simulation consistency and determinism
    def mc_consistency():
        if full:
            trials, grid_n = 10**7, (5, 10, 20, 35)
        else:
            trials, grid_n = 10**6, (10, 20)
        bad = []
        checked = 0
        for n in grid_n:
            d = montecarlo.Distribution.uniform(n)
            for m in {2, (n + 1) // 2, n}:
                fa = analytic.f_total(n, m, Model.M4).f_total
                r = montecarlo.estimate_f(n, m, Model.M4, d, trials, _SEED, workers)
                checked += 1
                if r.std_err == 0.0:
                    if abs(r.mean - fa) > 1e-9:
                        bad.append((n, m, "degenerate mean off"))
                    continue
                z = abs(r.mean - fa) / r.std_err
                if z > 4.0:
                    bad.append((n, m, f"z={z:.1f}"))
                occ = montecarlo.estimate_occupancy(n, m, d, trials, _SEED, workers)
                mom = occupancy.moments(n, m)
                pairs = [(occ.recip_len, mom.recip_len),
                         (occ.expected_len, mom.expected_len)]
                for j in (1, m - 1):
                    if 1 <= j <= m - 1:
                        pairs.append((occ.tau_recip[j - 1], mom.tau_recip[j - 1]))
                for est, ref in pairs:
                    if est.std_err == 0.0:
                        continue
                    z = abs(est.mean - ref) / est.std_err
                    if z > 4.0:
                        bad.append((n, m, f"{est.quantity} z={z:.1f}"))
        return not bad, f"{checked} cells at {trials} trials: {len(bad)} beyond 4 sigma {bad or ''}"
    yield _timed("mc-consistency", False, mc_consistency)

    def mc_determinism():
        d = montecarlo.Distribution.uniform(12)
        reports = [montecarlo.estimate_f(12, 6, Model.M4, d, 10**5, _SEED, w)
                   for w in (1, 2, 4)]
        ok = reports[0] == reports[1] == reports[2]
        return ok, f"workers 1/2/4 all return mean {reports[0].mean!r}"
    yield _timed("mc-determinism", False, mc_determinism)

    def degenerate():
        d = montecarlo.Distribution.uniform(20)
        r = montecarlo.estimate_f(20, 1, Model.M4, d, 100, _SEED)
        want = 2 * binary_success_cost(20)
        ok = r.mean == want and r.std_err == 0.0
        return ok, f"m=1 run: mean {r.mean:.11f}, std_err {r.std_err}"
    yield _timed("mc-degenerate-path", False, degenerate)

    # 11. empirical optimum (full level only: it is simulation-heavy)
    if full:
        def empirical():
            d = montecarlo.Distribution.uniform(20)
            rep = montecarlo.empirical_m_opt(20, Model.M4, d, 10**6, _SEED, workers)
            ok = rep.m_opt in (10, 11)
            return ok, f"empirical optimum at n=20: {rep.m_opt} (tie: {rep.tie})"
        yield _timed("mc-empirical-optimum", False, empirical)

    # 12. conjecture probes (never fail the run).  Two published remarks
    # are known to fail as stated: the model ordering transposes its
    # first two entries (the factor-consistent chain passes, see
    # model_ordering_by_factors) and the tau-shift inequality breaks
    # from n=12 up.  Those show as notes; anything else flags.
    def conjectures():
        n_hi = 20 if full else 12
        results = analytic.probe_conjectures((2, n_hi))
        failed = sorted({r.name for r in results if r.passed is False})
        known = [f for f in failed if f in ("model_ordering", "tau_shift")]
        unexpected = [f for f in failed if f not in known]
        status = f"{len(results)} probes to n={n_hi}"
        if known:
            status += "; known published-remark failures: " + ", ".join(known)
        if unexpected:
            status += "; unexpected outcomes: " + ", ".join(unexpected)
        return not unexpected, status
    yield _timed("conjecture-probes", True, conjectures)

    def skewed_probe():
        eps_list = (0.3, 0.1, 0.03, 0.01, 0.003, 0.001) if full else (0.3, 0.1, 0.03, 0.01)
        trials = {0.3: 2000, 0.1: 2000, 0.03: 1000, 0.01: 1000,
                  0.003: 800, 0.001: 500}
        path = []
        threshold = None
        for eps in eps_list:
            d = montecarlo.Distribution.skewed(20, 10, eps)
            rep = montecarlo.empirical_m_opt(20, Model.M4, d, trials[eps], _SEED, workers)
            path.append(f"eps={eps:g}: {rep.m_opt}")
            if rep.m_opt == 2 and threshold is None:
                threshold = eps
        msg = "skewed optimum vs eps: " + ", ".join(path)
        if threshold is not None:
            msg += f"; reaches 2 at eps={threshold:g}"
        return None, msg
    yield _timed("skewed-optimum-probe", True, skewed_probe)
