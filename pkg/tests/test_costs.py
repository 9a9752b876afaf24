"""Cost primitives: spot values, exact identities, and order relations."""

import math

import pytest
from hypothesis import given, strategies as st

from searchcleanup.cost_model import (
    Model,
    binary_success_cost,
    binary_fail_cost,
    sequential_cost,
    list_search_cost,
    pile_search_cost,
    cleanup_cost,
    star_cost,
)

MODELS = list(Model)


def test_spot_values():
    assert binary_success_cost(1) == 1.0
    assert binary_success_cost(3) == pytest.approx(5.0 / 3.0, rel=1e-15)
    assert binary_success_cost(7) == pytest.approx(17.0 / 7.0, rel=1e-15)
    assert binary_fail_cost(1) == 1.0
    assert binary_fail_cost(7) == 3.0
    assert sequential_cost(1) == 1.0
    assert sequential_cost(9) == 5.0


def test_full_tree_sizes_are_exact():
    # at j = 2^r - 1 the tree is full and log2(j + 1) = r exactly
    for r in range(1, 41):
        j = 2**r - 1
        assert binary_fail_cost(j) == float(r)
        assert binary_success_cost(j) == (1.0 + 1.0 / j) * r - 1.0


@given(st.integers(min_value=1, max_value=10**6))
def test_success_cost_below_fail_cost(j):
    # b(j) - b_f(j) = log2(j+1)/j - 1 <= 0, equality only at j = 1
    if j == 1:
        assert binary_success_cost(j) == binary_fail_cost(j)
    else:
        assert binary_success_cost(j) < binary_fail_cost(j)


@given(st.integers(min_value=1, max_value=10**6))
def test_costs_increase_with_size(j):
    assert binary_success_cost(j + 1) > binary_success_cost(j)
    assert binary_fail_cost(j + 1) > binary_fail_cost(j)
    assert sequential_cost(j + 1) > sequential_cost(j)


@pytest.mark.parametrize("fn", [binary_success_cost, binary_fail_cost, sequential_cost])
def test_primitive_domain(fn):
    with pytest.raises(ValueError):
        fn(0)
    with pytest.raises(ValueError):
        fn(-3)


def test_list_search_cost():
    n = 12
    for j in range(n):
        assert list_search_cost(Model.M2, n, j) == binary_success_cost(n)
        assert list_search_cost(Model.M4, n, j) == binary_success_cost(n)
        assert list_search_cost(Model.M1, n, j) == binary_success_cost(n - j)
        assert list_search_cost(Model.M3, n, j) == binary_success_cost(n - j)
    # unnumbered cost shrinks as the pile grows
    costs = [list_search_cost(Model.M1, n, j) for j in range(n)]
    assert all(a > b for a, b in zip(costs, costs[1:]))
    assert costs[-1] == 1.0
    with pytest.raises(ValueError):
        list_search_cost(Model.M1, n, n)
    with pytest.raises(ValueError):
        list_search_cost(Model.M1, n, -1)


def test_pile_search_cost():
    n = 12
    for j in range(1, n):
        scan = sequential_cost(j)
        assert pile_search_cost(Model.M3, n, j) == scan
        assert pile_search_cost(Model.M4, n, j) == scan
        assert pile_search_cost(Model.M1, n, j) == binary_fail_cost(n - j) + scan
        assert pile_search_cost(Model.M2, n, j) == binary_fail_cost(n) + scan
        # more memory and fewer shelf slots never make a pile search dearer
        assert (pile_search_cost(Model.M4, n, j)
                <= pile_search_cost(Model.M1, n, j)
                <= pile_search_cost(Model.M2, n, j))
    # full pile: nothing is left on unnumbered shelves to search first
    assert pile_search_cost(Model.M1, n, n) == sequential_cost(n)
    with pytest.raises(ValueError):
        pile_search_cost(Model.M1, n, 0)


def test_cleanup_cost():
    n = 9
    for m in range(1, n + 1):
        assert cleanup_cost(Model.M2, n, m) == m * binary_success_cost(n)
        assert cleanup_cost(Model.M4, n, m) == m * binary_success_cost(n)
        want = math.fsum(binary_fail_cost(n - j) for j in range(1, m + 1) if n - j > 0)
        assert cleanup_cost(Model.M1, n, m) == pytest.approx(want, rel=1e-15)
        assert cleanup_cost(Model.M3, n, m) == cleanup_cost(Model.M1, n, m)
    with pytest.raises(ValueError):
        cleanup_cost(Model.M4, n, 0)
    with pytest.raises(ValueError):
        cleanup_cost(Model.M4, n, n + 1)


@pytest.mark.parametrize("n", [1, 2, 5, 17, 64, 200])
def test_star_cost_constant_for_numbered_shelves(n):
    # list search and reinsertion both cost b(n), so the per-object rate
    # is 2 b(n) no matter when the cleanup happens
    want = 2 * binary_success_cost(n)
    for m in range(1, n + 1):
        assert star_cost(Model.M2, n, m) == pytest.approx(want, rel=1e-14)
        assert star_cost(Model.M4, n, m) == pytest.approx(want, rel=1e-14)


def test_star_cost_unnumbered_single():
    n = 10
    want = binary_success_cost(n) + binary_fail_cost(n - 1)
    assert star_cost(Model.M1, n, 1) == pytest.approx(want, rel=1e-15)


def test_model_properties():
    assert Model.M1.memory == "none" and not Model.M1.numbered
    assert Model.M2.memory == "none" and Model.M2.numbered
    assert Model.M3.has_memory and Model.M3.shelves == "unnumbered"
    assert Model.M4.has_memory and Model.M4.numbered
    assert Model.from_name("m3") is Model.M3
    assert Model.from_name("M4") is Model.M4
    with pytest.raises(ValueError, match="unknown model"):
        Model.from_name("m5")
