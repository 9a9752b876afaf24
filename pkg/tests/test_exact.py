"""Exact cost curves: closed forms, an enumeration oracle, and optima."""

import math

import pytest

from searchcleanup import analytic, occupancy
from searchcleanup.cost_model import (
    Model,
    binary_success_cost,
    binary_fail_cost,
    cleanup_cost,
    list_search_cost,
    pile_search_cost,
    star_cost,
)

MODELS = list(Model)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
def test_small_closed_forms_match_pipeline(model):
    for n in range(2, 31, 3):
        for m in (1, 2):
            closed = analytic.f_small_closed_form(n, m, model)
            pipeline = analytic.f_total(n, m, model).f_total
            assert closed == pytest.approx(pipeline, rel=1e-12), (n, m, model)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
def test_enumeration_oracle(model):
    # exhaustive fill histories; disagreement must stay under the
    # certified tail bound of the truncated enumeration
    for n in (2, 3, 4):
        for m in range(1, n + 1):
            value, tail = analytic.f_total_by_enumeration(n, m, model, l_cap=18)
            exact = analytic.f_total(n, m, model).f_total
            assert abs(value - exact) <= tail + 1e-10, (n, m, model)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
def test_per_object_rate_identity(model):
    # F(m) = m E[1/len] s*(m) + sum_j E[tau_j/len] s_P(j): every search is
    # either one of the m shelf hits (amortized by s*) or a pile repeat
    for n in (5, 12, 20):
        for m in range(1, n + 1):
            mom = occupancy.moments(n, m)
            mixture = m * mom.recip_len * star_cost(model, n, m) + math.fsum(
                float(mom.tau_recip[j - 1]) * pile_search_cost(model, n, j)
                for j in range(1, m)
            )
            exact = analytic.f_total(n, m, model).f_total
            assert mixture == pytest.approx(exact, rel=1e-11), (n, m, model)


def test_breakdown_components():
    n, m = 15, 6
    mom = occupancy.moments(n, m)
    for model in MODELS:
        br = analytic.f_total(n, m, model)
        want_list = mom.recip_len * math.fsum(
            list_search_cost(model, n, j) for j in range(m))
        want_cleanup = mom.recip_len * cleanup_cost(model, n, m)
        want_pile = math.fsum(
            float(mom.tau_recip[j - 1]) * pile_search_cost(model, n, j)
            for j in range(1, m))
        assert br.f_list == pytest.approx(want_list, rel=1e-12)
        assert br.f_cleanup == pytest.approx(want_cleanup, rel=1e-12)
        assert br.f_pile == pytest.approx(want_pile, rel=1e-12)
        assert br.f_total == pytest.approx(
            want_list + want_cleanup + want_pile, rel=1e-12)


def test_optimum_spot_values():
    assert analytic.m_opt(1, Model.M4).m_opt == 1
    report = analytic.m_opt(10, Model.M4)
    assert report.m_opt == 8
    assert report.f_at_opt == pytest.approx(4.66299502767013, rel=1e-12)
    report = analytic.m_opt(20, Model.M4)
    assert report.m_opt == 11
    assert report.f_at_opt == pytest.approx(6.42438688731358, rel=1e-12)
    assert not report.tie_broken
    assert len(report.curve) == 20
    report = analytic.m_opt(35, Model.M4)
    assert report.m_opt == 13
    assert report.f_at_opt == pytest.approx(7.97162615611327, rel=1e-12)


def test_full_pile_optimum_for_complete_unnumbered():
    # with complete memory and shelves that close up, small populations
    # never benefit from cleaning before the pile holds everything
    for n in range(2, 9):
        assert analytic.m_opt(n, Model.M3).m_opt == n


def test_model_ordering_witness():
    # the numbered memoryless model wants the smallest pile by far;
    # ordering the optima by the two cost factors gives m2<=m1<=m4<=m3
    optima = {model: analytic.m_opt(14, model).m_opt for model in MODELS}
    assert optima[Model.M1] == 9
    assert optima[Model.M2] == 4
    assert optima[Model.M4] == 10
    assert optima[Model.M3] == 11
    for n in range(2, 26):
        ms = {model: analytic.m_opt(n, model).m_opt for model in MODELS}
        assert ms[Model.M2] <= ms[Model.M1] <= ms[Model.M4] <= ms[Model.M3], (n, ms)


def test_first_step_always_improves():
    for n in range(2, 51):
        for model in MODELS:
            witness = analytic.verify_first_step(n, model)
            assert witness.passed, (n, model, witness.f1, witness.f2)


@pytest.mark.parametrize("model", [Model.M1, Model.M3, Model.M4], ids=lambda m: m.name)
def test_f1_comparison_guaranteed_ranges(model):
    for n in range(2, 16):
        report = analytic.verify_f1_comparison(n, model)
        assert report.passed, (n, model, report.values)


def test_f1_comparison_m2_counterexample():
    # the guaranteed range claimed for numbered shelves is too wide for
    # the memoryless model: at n=3 it admits m=3, where cleanup is not
    # yet amortized over enough pile hits
    f3 = analytic.f_total(3, 3, Model.M2).f_total
    assert f3 == pytest.approx(3.35208156682219, rel=1e-12)
    assert f3 > analytic.f_total(3, 1, Model.M2).f_total == pytest.approx(10 / 3, rel=1e-13)
    report = analytic.verify_f1_comparison(3, Model.M2)
    assert not report.passed
    assert (3, pytest.approx(f3, rel=1e-12)) in [(m, v) for m, v in report.values]


def test_f1_comparison_m2_corrected_range():
    # shrinking the claimed range by the failed-search overhead
    # (m < 4 b(n) - 2 b_f(n)) makes it hold
    for n in range(2, 31):
        limit = 4 * binary_success_cost(n) - 2 * binary_fail_cost(n)
        f1 = analytic.f_small_closed_form(n, 1, Model.M2)
        for m in range(2, n + 1):
            if m >= limit:
                break
            assert analytic.f_total(n, m, Model.M2).f_total < f1, (n, m)


def test_upper_bound_small_range():
    for n in range(1, 21):
        report = analytic.verify_upper_bound(n)
        assert report.passed
        assert report.bound == pytest.approx(4 * binary_success_cost(n), rel=1e-15)


def test_probe_machinery():
    results = analytic.probe_conjectures((2, 10))
    names = {r.name for r in results}
    assert {"model_ordering", "model_ordering_by_factors", "never_cleanup_m4",
            "m3_full_pile", "f_unimodal", "tau_shift"} <= names
    # probes carry a context and never raise; informational ones use None
    assert all(r.context.startswith("n=") for r in results)
    assert any(r.passed is None for r in results)
    by_factors = [r for r in results if r.name == "model_ordering_by_factors"]
    assert by_factors and all(r.passed for r in by_factors)


def test_argument_validation():
    with pytest.raises(ValueError):
        analytic.f_total(0, 1, Model.M4)
    with pytest.raises(ValueError):
        analytic.f_total(5, 6, Model.M4)
    with pytest.raises(ValueError):
        analytic.m_opt(0, Model.M4)
    with pytest.raises(ValueError):
        analytic.f_total_by_enumeration(5, 4, Model.M4, l_cap=3)
    with pytest.raises(ValueError):
        analytic.probe_conjectures((5, 4))
