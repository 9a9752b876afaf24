"""Approximate curve, its sign criterion, the bracket, and the table row."""

import math

import numpy as np
import pytest

from searchcleanup import analytic, approx
from searchcleanup.cost_model import Model, binary_success_cost
from searchcleanup.verify import (
    CURVE20_APPROX,
    CURVE100_APPROX,
    KNOWN_BAD_TABLE_APPROX,
    TABLE_APPROX_ROW,
)


def test_published_coordinate_spot_values():
    assert approx.f_tilde(20, 11) == pytest.approx(6.36759683884, abs=1e-9)
    assert approx.f_tilde(20, 20) == pytest.approx(8.26911778588, abs=1e-9)
    assert approx.f_tilde(100, 50) == pytest.approx(13.2270512038, abs=1e-9)
    assert approx.f_tilde(100, 17) == pytest.approx(11.0061788557, abs=1e-9)


def test_vectorized_curve_matches_scalar():
    for n in (1, 5, 20, 100):
        curve = approx.m_opt_approx(n)
        assert curve.values.shape == (n,)
        for m in range(1, n + 1):
            assert curve.values[m - 1] == pytest.approx(
                approx.f_tilde(n, m), rel=1e-12), (n, m)


def test_curve_reference_datasets():
    values20 = approx.m_opt_approx(20).values
    for m, ref in CURVE20_APPROX:
        assert values20[m - 1] == pytest.approx(ref, abs=1e-9), m
    curve100 = approx.m_opt_approx(100)
    for m, ref in CURVE100_APPROX:
        assert curve100.values[m - 1] == pytest.approx(ref, abs=1e-9), m
    assert curve100.m_opt_approx == 17


def test_single_object_curve():
    curve = approx.m_opt_approx(1)
    assert curve.m_opt_approx == 1
    assert curve.values[0] == pytest.approx(2 * binary_success_cost(1), rel=1e-15)


def test_sign_criterion_matches_differences():
    for n in (10, 20, 50, 100):
        values = approx.m_opt_approx(n).values
        for m in range(1, n):
            criterion = approx.delta_sign_criterion(n, m)
            diff = values[m - 1] - values[m]
            assert criterion * diff > 0 or (criterion == 0 and abs(diff) < 1e-12), (n, m)


def test_sum_lemma_sign_classification():
    for a in range(2, 41, 3):
        c = 5.0 * a * a
        assert approx.sum_lemma_sign(a, (a - 2) / 3.0, c) <= 0.0
        assert approx.sum_lemma_sign(a, (a - 2) / 3.0 - 1.0, c) < 0.0
        assert approx.sum_lemma_sign(a, a / 3.0 + 1e-9, c) > 0.0
        assert approx.sum_lemma_sign(a, a / 3.0 + 2.0, c) > 0.0


def test_bracket_membership():
    report = approx.verify_bracket(300)
    assert report.passed
    assert report.low_branch + report.high_branch == 300 - 5 + 1
    assert report.low_witness is not None and report.high_witness is not None
    for n in (report.low_witness, report.high_witness):
        curve = approx.m_opt_approx(n)
        assert curve.bracket_low - 1 < curve.m_opt_approx < curve.bracket_high + 1


def test_bracket_bounds_formula():
    curve = approx.m_opt_approx(50)
    b = binary_success_cost(50)
    assert curve.bracket_low == pytest.approx(3 * b - 1.5, rel=1e-15)
    assert curve.bracket_high == pytest.approx(3 * b + 0.5, rel=1e-15)


def test_table_row_against_published_values():
    # the published row disagrees with its own defining formula at n = 8
    # and n = 11 (the argmin there is one lower); everywhere else the
    # computed row must match it exactly
    corrected = dict(KNOWN_BAD_TABLE_APPROX)
    assert corrected == {8: 7, 11: 8}
    for n, published in enumerate(TABLE_APPROX_ROW, start=1):
        computed = approx.m_opt_approx(n).m_opt_approx
        if n in corrected:
            assert computed == corrected[n], n
            assert computed == published - 1, n
        else:
            assert computed == published, n


def test_published_cells_contradict_their_own_curve():
    # at the two witnessed cells the curve value at (published - 1) is
    # strictly below the value at the published argmin
    assert approx.f_tilde(8, 7) < approx.f_tilde(8, 8)
    assert approx.f_tilde(11, 8) < approx.f_tilde(11, 9)
    assert approx.f_tilde(8, 7) == pytest.approx(4.05804814354485, rel=1e-12)
    assert approx.f_tilde(11, 8) == pytest.approx(4.81810237215741, rel=1e-12)


def test_approx_argmin_never_exceeds_exact():
    for n in range(1, 21):
        approx_opt = approx.m_opt_approx(n).m_opt_approx
        exact_opt = analytic.m_opt(n, Model.M4).m_opt
        assert approx_opt <= exact_opt, n


def test_argument_validation():
    with pytest.raises(ValueError):
        approx.f_tilde(0, 1)
    with pytest.raises(ValueError):
        approx.f_tilde(5, 6)
    with pytest.raises(ValueError):
        approx.delta_sign_criterion(5, 5)
    with pytest.raises(ValueError):
        approx.verify_bracket(100, n_min=4)
    with pytest.raises(ValueError):
        approx.sum_lemma_sign(1, 1.0, 100.0)
