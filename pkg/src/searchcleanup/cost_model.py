"""Cost primitives for the search-with-cleanup process.

n objects live on sorted shelves; used objects accumulate in an unsorted
pile of size j.  A search hits the shelves (binary search) or the pile
(sequential scan), depending on the model's memory; cleanup returns all m
piled objects to the shelves.  Every cost here is an expected comparison
count, a pure function of (model, n, j).
"""

from __future__ import annotations

import math
from enum import Enum

__all__ = [
    "Model",
    "binary_success_cost",
    "binary_fail_cost",
    "sequential_cost",
    "list_search_cost",
    "pile_search_cost",
    "cleanup_cost",
    "star_cost",
]


class Model(Enum):
    """Memory/shelf model.

    ``memory`` says whether the searcher knows which objects are in the
    pile (``complete``) or must try the shelves first (``none``).
    ``shelves`` says whether shelf slots are labeled (``numbered``, so a
    shelf search always scans all n slots) or close up when an object
    leaves (``unnumbered``, so a shelf search scans only what is there).
    """

    M1 = ("none", "unnumbered")
    M2 = ("none", "numbered")
    M3 = ("complete", "unnumbered")
    M4 = ("complete", "numbered")

    @property
    def memory(self) -> str:
        return self.value[0]

    @property
    def shelves(self) -> str:
        return self.value[1]

    @property
    def has_memory(self) -> bool:
        return self.value[0] == "complete"

    @property
    def numbered(self) -> bool:
        return self.value[1] == "numbered"

    @classmethod
    def from_name(cls, name: str) -> "Model":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown model {name!r}; expected one of m1, m2, m3, m4") from None


def binary_success_cost(j: int) -> float:
    """Average cost b(j) of a successful binary search over j sorted objects.

    b(j) = (1 + 1/j) * log2(j + 1) - 1.
    """
    if j < 1:
        raise ValueError(f"binary_success_cost requires j >= 1, got {j}")
    return (1.0 + 1.0 / j) * math.log2(j + 1) - 1.0


def binary_fail_cost(j: int) -> float:
    """Average cost b_f(j) = log2(j + 1) of a failed binary search over j objects."""
    if j < 1:
        raise ValueError(f"binary_fail_cost requires j >= 1, got {j}")
    return math.log2(j + 1)


def sequential_cost(j: int) -> float:
    """Average cost (j + 1) / 2 of scanning an unsorted pile of j objects."""
    if j < 1:
        raise ValueError(f"sequential_cost requires j >= 1, got {j}")
    return (j + 1) / 2


def _fail_cost_or_zero(j: int) -> float:
    # a failed search of an empty shelf list costs nothing
    return 0.0 if j == 0 else binary_fail_cost(j)


def _check_n_j(n: int, j: int, j_min: int, j_max: int) -> None:
    if n < 1:
        raise ValueError(f"need n >= 1, got n={n}")
    if not j_min <= j <= j_max:
        raise ValueError(f"pile size j={j} outside [{j_min}, {j_max}] for n={n}")


def list_search_cost(model: Model, n: int, j: int) -> float:
    """Cost of a successful shelf search when the pile holds j objects.

    Numbered shelves keep all n slots, so the search always costs b(n);
    unnumbered shelves hold only the n - j remaining objects.
    """
    _check_n_j(n, j, 0, n - 1)
    if model.numbered:
        return binary_success_cost(n)
    return binary_success_cost(n - j)


def pile_search_cost(model: Model, n: int, j: int) -> float:
    """Cost of finding an object in a pile of size j.

    Without memory the searcher first fails a shelf search, then scans the
    pile; with complete memory the scan starts immediately.
    """
    _check_n_j(n, j, 1, n)
    scan = sequential_cost(j)
    if model is Model.M1:
        return _fail_cost_or_zero(n - j) + scan
    if model is Model.M2:
        return binary_fail_cost(n) + scan
    return scan


def cleanup_cost(model: Model, n: int, m: int) -> float:
    """Total cost C_m of returning a full pile of m objects to the shelves.

    Numbered shelves reinsert each object by a successful search pattern,
    m * b(n); unnumbered shelves reinsert by failed searches into the
    growing list, sum of b_f(n - j) for j = 1..m.
    """
    _check_n_j(n, m, 1, n)
    if model.numbered:
        return m * binary_success_cost(n)
    return math.fsum(_fail_cost_or_zero(n - j) for j in range(1, m + 1))


def star_cost(model: Model, n: int, m: int) -> float:
    """Per-new-object cost s*(m): amortized shelf search plus cleanup share.

    s*(m) = (sum_{j=0}^{m-1} list_search_cost(j) + C_m) / m; identically
    2 b(n) for numbered shelves.
    """
    _check_n_j(n, m, 1, n)
    list_total = math.fsum(list_search_cost(model, n, j) for j in range(m))
    return (list_total + cleanup_cost(model, n, m)) / m
