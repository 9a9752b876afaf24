"""Monte Carlo engine: distributions, path records, and estimator contracts."""

import math

import numpy as np
import pytest

from searchcleanup import analytic, montecarlo as mc, occupancy
from searchcleanup.cost_model import Model, binary_success_cost


def test_uniform_weights():
    d = mc.Distribution.uniform(8)
    assert d.kind == "uniform" and d.n == 8
    np.testing.assert_allclose(d.weights, np.full(8, 0.125), rtol=1e-15)
    assert d.cumulative[-1] == 1.0


def test_zipf_weights():
    d = mc.Distribution.zipf(5)
    assert d.weights[0] / d.weights[1] == pytest.approx(2.0, rel=1e-13)
    assert np.all(np.diff(d.weights) < 0)
    d2 = mc.Distribution.zipf(5, s=2.0)
    assert d2.weights[0] / d2.weights[1] == pytest.approx(4.0, rel=1e-13)
    with pytest.raises(ValueError):
        mc.Distribution.zipf(5, s=0.0)


def test_skewed_weights():
    d = mc.Distribution.skewed(10, 3, 0.01)
    assert d.weights[2] == pytest.approx(0.99, rel=1e-15)
    assert d.weights[0] == pytest.approx(0.01 / 9, rel=1e-13)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            mc.Distribution.skewed(10, 3, bad)
    with pytest.raises(ValueError):
        mc.Distribution.skewed(10, 11, 0.5)
    with pytest.raises(ValueError):
        mc.Distribution.skewed(1, 1, 0.5)


def test_custom_weights_normalize():
    d = mc.Distribution.custom([3.0, 1.0])
    np.testing.assert_allclose(d.weights, [0.75, 0.25], rtol=1e-15)
    with pytest.raises(ValueError):
        mc.Distribution.custom([1.0, 0.0])
    with pytest.raises(ValueError):
        mc.Distribution.custom([])


def test_parse_specs(tmp_path):
    assert mc.Distribution.parse("uniform", 6).kind == "uniform"
    assert mc.Distribution.parse("zipf", 6).weights[0] == pytest.approx(
        mc.Distribution.zipf(6).weights[0])
    d = mc.Distribution.parse("skewed:r=2,eps=0.25", 4)
    assert d.weights[1] == pytest.approx(0.75)
    path = tmp_path / "w.txt"
    path.write_text("1\n2\n3\n")
    d = mc.Distribution.parse(f"custom:{path}")
    assert d.n == 3 and d.weights[2] == pytest.approx(0.5)
    for bad in ("uniform:x=1", "zipf:q=2", "skewed:r=2", "skewed:eps=0.1",
                "skewed:r=2,eps=0.1,z=3", "custom:", "pareto", "zipf:s="):
        with pytest.raises(ValueError):
            mc.Distribution.parse(bad, 4)
    with pytest.raises(ValueError):
        mc.Distribution.parse("uniform")  # needs n
    with pytest.raises(ValueError):
        mc.Distribution.parse(f"custom:{path}", 5)  # wrong length


def test_simulate_path_invariants():
    rng = np.random.default_rng(11)
    d = mc.Distribution.zipf(8)
    for _ in range(300):
        rec = mc.simulate_path(8, 5, d, Model.M1, rng)
        rec.check()
        assert rec.len >= 5
        assert rec.total_cost > 0
        assert rec.cost_per_search == pytest.approx(rec.total_cost / rec.len)


def test_simulate_path_single_object_pile():
    rng = np.random.default_rng(3)
    d = mc.Distribution.uniform(8)
    rec = mc.simulate_path(8, 1, d, Model.M4, rng)
    assert rec.len == 1
    assert rec.search_pile_cost == 0.0
    assert rec.cost_per_search == pytest.approx(2 * binary_success_cost(8), rel=1e-15)


def test_degenerate_estimate_is_exact():
    d = mc.Distribution.uniform(20)
    report = mc.estimate_f(20, 1, Model.M4, d, 100, 1)
    assert report.mean == 2 * binary_success_cost(20)
    assert report.std_err == 0.0
    assert "%.12g" % report.mean == "7.22386658784"
    lo, hi = report.ci95()
    assert lo == hi == report.mean


def test_worker_count_never_changes_results():
    d = mc.Distribution.zipf(12)
    reports = [mc.estimate_f(12, 6, Model.M1, d, 30_000, 5, workers=w)
               for w in (1, 2, 3)]
    assert reports[0] == reports[1] == reports[2]


def test_seed_and_arguments_are_recorded():
    d = mc.Distribution.uniform(6)
    r1 = mc.estimate_f(6, 3, Model.M4, d, 5_000, 17)
    r2 = mc.estimate_f(6, 3, Model.M4, d, 5_000, 18)
    assert r1.seed == 17 and r1.trials == 5_000 and r1.quantity == "F"
    assert r1.mean != r2.mean


def test_estimate_tracks_analytic_value():
    d = mc.Distribution.uniform(10)
    report = mc.estimate_f(10, 5, Model.M4, d, 200_000, 29)
    exact = analytic.f_total(10, 5, Model.M4).f_total
    assert abs(report.mean - exact) <= 5 * report.std_err


def test_occupancy_estimates_close_pathwise():
    d = mc.Distribution.uniform(10)
    est = mc.estimate_occupancy(10, 4, d, 100_000, 13)
    assert abs(est.recip_len.mean - occupancy.recip_len_series(10, 4)) \
        <= 5 * est.recip_len.std_err
    assert abs(est.expected_len.mean - occupancy.expected_len(10, 4)) \
        <= 5 * est.expected_len.std_err
    tau_exact = occupancy.tau_recip_batch(10, 4)
    assert len(est.tau_recip) == 3
    for j in (1, 2, 3):
        rep = est.tau_recip[j - 1]
        assert abs(rep.mean - float(tau_exact[j - 1])) <= 5 * rep.std_err
    # m/len + sum_j tau_j/len = 1 on every path, so the sample means
    # close exactly
    closure = 4 * est.recip_len.mean + math.fsum(r.mean for r in est.tau_recip)
    assert closure == pytest.approx(1.0, abs=1e-12)


def test_empirical_optimum_uniform():
    d = mc.Distribution.uniform(20)
    result = mc.empirical_m_opt(20, Model.M4, d, 100_000, 7)
    assert result.m_opt in (10, 11)
    assert len(result.reports) == 20


def test_geometric_repeat_law():
    # while the pile holds j of n objects, each draw repeats with
    # probability j/n, so tau_j is geometric with mean j/(n - j)
    rng = np.random.default_rng(23)
    d = mc.Distribution.uniform(8)
    taus = np.array([mc.simulate_path(8, 5, d, Model.M4, rng).tau
                     for _ in range(20_000)])
    for j in (1, 2, 3, 4):
        mean = taus[:, j - 1].mean()
        want = j / (8 - j)
        sd = math.sqrt(want * (1 + want) / len(taus))
        assert abs(mean - want) <= 5 * sd, j
    # spot-check the k = 0 mass of tau_2: P(no repeat at size 2) = 6/8
    frac0 = float((taus[:, 1] == 0).mean())
    assert abs(frac0 - 0.75) <= 5 * math.sqrt(0.75 * 0.25 / len(taus))


def test_estimator_argument_validation():
    d = mc.Distribution.uniform(6)
    with pytest.raises(ValueError):
        mc.estimate_f(6, 7, Model.M4, d, 1_000, 0)
    with pytest.raises(ValueError):
        mc.estimate_f(5, 2, Model.M4, d, 1_000, 0)  # dist is over 6 objects
    with pytest.raises(ValueError):
        mc.estimate_f(6, 3, Model.M4, d, 50, 0)  # too few trials
    with pytest.raises(ValueError):
        mc.estimate_f(6, 3, Model.M4, d, 1_000, -1)
