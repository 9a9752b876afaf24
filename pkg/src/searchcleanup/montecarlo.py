"""Seeded Monte Carlo simulation of the search-with-cleanup process.

The simulator draws requests from a positive distribution over the n
objects, pays the averaged list cost on a miss and the averaged pile
cost on a hit, stops once the pile holds m distinct objects, and adds
one cleanup charge.  The per-search cost of a path is its total cost
divided by its length, so for the uniform distribution the sample mean
is an unbiased estimator of the analytic cost and serves as an
end-to-end oracle.  For any other distribution simulation is the only
engine available.

Reproducibility contract: a fixed (seed, trials) pair gives a
bit-identical report for every worker count.  Trials are cut into
fixed-size chunks, each chunk draws from its own counter-based stream
spawned deterministically from the seed, the same vectorized kernel
reduces each chunk to (count, mean, M2) partials, and partials are
merged in chunk order regardless of how chunks were scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cost_model import Model, cleanup_cost, list_search_cost, pile_search_cost

# Fixed trial chunk.  Changing this changes which uniforms feed which
# path, so it is part of the determinism contract, not a tuning knob.
CHUNK = 32768


@dataclass(frozen=True, eq=False)
class Distribution:
    """Request distribution over n objects.

    ``weights`` always stores the normalized probabilities, so the
    samplers never branch on ``kind``.  Every weight must be strictly
    positive; a zero weight would make the stopping time infinite with
    positive probability.
    """

    kind: str
    n: int
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if self.n < 1 or w.shape != (self.n,):
            raise ValueError("weights must be a length-n vector")
        if not np.all(w > 0.0):
            raise ValueError("all weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        cum = np.cumsum(w)
        cum[-1] = 1.0  # guard inverse-CDF lookups against rounding
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_cum", cum)

    @property
    def cumulative(self) -> np.ndarray:
        """Cumulative weights with the last entry pinned to exactly 1."""
        return self._cum

    @staticmethod
    def uniform(n: int) -> "Distribution":
        return Distribution("uniform", n, np.full(n, 1.0 / n))

    @staticmethod
    def zipf(n: int, s: float = 1.0) -> "Distribution":
        """Weights proportional to rank**-s, s > 0."""
        if s <= 0.0:
            raise ValueError("zipf exponent must be positive")
        w = np.arange(1, n + 1, dtype=float) ** -s
        return Distribution("zipf", n, w / w.sum())

    @staticmethod
    def skewed(n: int, r: int, epsilon: float) -> "Distribution":
        """One heavy object: weight 1-epsilon on object r (1-based),
        epsilon shared evenly by the rest."""
        if n < 2:
            raise ValueError("skewed distribution needs n >= 2")
        if not 1 <= r <= n:
            raise ValueError("heavy index r must lie in [1, n]")
        if not 0.0 < epsilon < 1.0:
            # either endpoint zeroes a weight
            raise ValueError("epsilon must lie strictly between 0 and 1")
        w = np.full(n, epsilon / (n - 1))
        w[r - 1] = 1.0 - epsilon
        return Distribution("skewed", n, w)

    @staticmethod
    def custom(weights) -> "Distribution":
        w = np.asarray(list(weights), dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("custom weights must be a non-empty vector")
        if not np.all(w > 0.0):
            raise ValueError("all weights must be strictly positive")
        return Distribution("custom", int(w.size), w / w.sum())

    @staticmethod
    def parse(spec: str, n: int | None = None) -> "Distribution":
        """Build a distribution from a CLI spec string.

        Accepted forms: ``uniform``, ``zipf`` or ``zipf:s=<x>``,
        ``skewed:r=<i>,eps=<x>``, ``custom:<path>`` (one positive
        weight per line, normalized on load).
        """
        kind, _, rest = spec.partition(":")
        kind = kind.strip().lower()
        if kind == "uniform":
            if rest:
                raise ValueError("uniform takes no parameters")
            return Distribution.uniform(_require_n(n, kind))
        if kind == "custom":
            if not rest:
                raise ValueError("custom needs a file path, e.g. custom:weights.txt")
            with open(rest) as fh:
                w = [float(line) for line in fh if line.strip()]
            dist = Distribution.custom(w)
            if n is not None and dist.n != n:
                raise ValueError(f"custom file has {dist.n} weights, expected n={n}")
            return dist
        params = {}
        if rest:
            for item in rest.split(","):
                key, _, val = item.partition("=")
                if not val:
                    raise ValueError(f"malformed parameter {item!r}")
                params[key.strip()] = val.strip()
        if kind == "zipf":
            s = float(params.pop("s", 1.0))
            _reject_extras(kind, params)
            return Distribution.zipf(_require_n(n, kind), s)
        if kind == "skewed":
            try:
                r = int(params.pop("r"))
                eps = float(params.pop("eps"))
            except KeyError as exc:
                raise ValueError("skewed needs r=<i>,eps=<x>") from exc
            _reject_extras(kind, params)
            return Distribution.skewed(_require_n(n, kind), r, eps)
        raise ValueError(f"unknown distribution {kind!r}")


def _require_n(n: int | None, kind: str) -> int:
    if n is None:
        raise ValueError(f"{kind} distribution needs n")
    return n


def _reject_extras(kind: str, params: dict) -> None:
    if params:
        raise ValueError(f"unknown {kind} parameters: {', '.join(sorted(params))}")


@dataclass(frozen=True, eq=False)
class PathRecord:
    """One simulated path.

    ``tau[j-1]`` counts the draws that hit the pile while it held
    exactly j objects; ``t_mark[j-1]`` is the 1-based draw index at
    which the pile reached size j.
    """

    n: int
    m: int
    len: int
    search_list_cost: float
    search_pile_cost: float
    cleanup_cost: float
    tau: np.ndarray = field(repr=False)
    t_mark: np.ndarray = field(repr=False)

    @property
    def total_cost(self) -> float:
        return self.search_list_cost + self.search_pile_cost + self.cleanup_cost

    @property
    def cost_per_search(self) -> float:
        return self.total_cost / self.len

    def check(self) -> None:
        """Raise ValueError if a structural invariant fails."""
        if self.tau.shape != (self.m - 1,) or self.t_mark.shape != (self.m,):
            raise ValueError("counter vectors have the wrong shape")
        if int(self.tau.sum()) != self.len - self.m:
            raise ValueError("repeat counts do not add up to len - m")
        if self.t_mark[0] != 1 or self.t_mark[-1] != self.len:
            raise ValueError("growth marks must start at 1 and end at len")
        if np.any(np.diff(self.t_mark) < 1):
            raise ValueError("growth marks must be strictly increasing")


@dataclass(frozen=True)
class EstimateReport:
    """Sample-mean estimate of one quantity with its standard error."""

    quantity: str  # "F", "recip_len", "expected_len", or "tau_recip_<j>"
    mean: float
    std_err: float
    trials: int
    seed: int

    def ci95(self) -> tuple[float, float]:
        half = 1.96 * self.std_err
        return (self.mean - half, self.mean + half)


@dataclass(frozen=True)
class OccupancyEstimates:
    """Empirical occupancy moments from one simulation run.

    ``tau_recip[j-1]`` estimates the expected tau_j / len ratio.
    """

    recip_len: EstimateReport
    expected_len: EstimateReport
    tau_recip: tuple[EstimateReport, ...]


@dataclass(frozen=True)
class EmpiricalOptimum:
    """Argmin of simulated per-search cost over pile sizes 1..n."""

    m_opt: int
    tie: bool  # another size sits within one combined std_err of the best
    reports: tuple[EstimateReport, ...]


def _check_args(n: int, m: int, dist: Distribution, trials: int, seed: int) -> None:
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if dist.n != n:
        raise ValueError(f"distribution is over {dist.n} objects, expected {n}")
    if trials < 100:
        raise ValueError("trials must be at least 100")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")


def simulate_path(n: int, m: int, dist: Distribution, model: Model,
                  rng: np.random.Generator) -> PathRecord:
    """Simulate one path and return its full record.

    This is the scalar reference implementation; the estimators below
    use a vectorized kernel that must agree with it path for path.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if dist.n != n:
        raise ValueError(f"distribution is over {dist.n} objects, expected {n}")
    cum = dist.cumulative
    in_pile = np.zeros(n, dtype=bool)
    tau = np.zeros(m - 1, dtype=np.int64)
    t_mark = np.zeros(m, dtype=np.int64)
    list_cost = 0.0
    pile_cost = 0.0
    j = 0
    t = 0
    while j < m:
        t += 1
        x = int(np.searchsorted(cum, rng.random(), side="right"))
        if in_pile[x]:
            tau[j - 1] += 1
            pile_cost += pile_search_cost(model, n, j)
        else:
            list_cost += list_search_cost(model, n, j)
            in_pile[x] = True
            t_mark[j] = t
            j += 1
    return PathRecord(n, m, t, list_cost, pile_cost,
                      cleanup_cost(model, n, m), tau, t_mark)


def _simulate_chunk(task):
    """Reduce one chunk of paths to (count, mean vector, M2 vector).

    Column layout: mode "f" has the single column (S + C) / len; mode
    "occ" has [1/len, len, tau_1/len, ..., tau_{m-1}/len].  Means and
    second moments are computed about the first path's values, so a
    degenerate constant column (m = 1) yields an exactly zero M2.
    """
    mode, n, m, model, dist, child, size = task
    rng = np.random.Generator(np.random.Philox(child))
    cum = dist.cumulative
    track_cost = mode == "f"

    in_pile = np.zeros((size, n), dtype=bool)
    j = np.zeros(size, dtype=np.int64)
    lens = np.zeros(size, dtype=np.int64)
    if track_cost:
        list_by_j = np.array([list_search_cost(model, n, i) for i in range(m)])
        pile_by_j = np.zeros(m)
        for i in range(1, m):
            pile_by_j[i] = pile_search_cost(model, n, i)
        cost = np.full(size, cleanup_cost(model, n, m))
    else:
        tau = np.zeros((size, m - 1), dtype=np.int32)

    active = np.arange(size)
    while active.size:
        u = rng.random(active.size)
        x = np.searchsorted(cum, u, side="right")
        hit = in_pile[active, x]
        lens[active] += 1
        if track_cost:
            cost[active] += np.where(hit, pile_by_j[j[active]], list_by_j[j[active]])
        else:
            rep = active[hit]
            if rep.size:
                tau[rep, j[rep] - 1] += 1
        new = active[~hit]
        in_pile[new, x[~hit]] = True
        j[new] += 1
        active = active[j[active] < m]

    if track_cost:
        vals = (cost / lens)[:, None]
    else:
        vals = np.empty((size, m + 1))
        vals[:, 0] = 1.0 / lens
        vals[:, 1] = lens
        vals[:, 2:] = tau / lens[:, None]

    shifted = vals - vals[0]
    s1 = shifted.sum(axis=0)
    mean = vals[0] + s1 / size
    m2 = np.square(shifted).sum(axis=0) - np.square(s1) / size
    return size, mean, np.maximum(m2, 0.0)


def _merge(a, b):
    """Combine two (count, mean, M2) partials; associative and exact on
    constant data."""
    ka, mean_a, m2a = a
    kb, mean_b, m2b = b
    k = ka + kb
    delta = mean_b - mean_a
    mean = mean_a + delta * (kb / k)
    m2 = m2a + m2b + np.square(delta) * (ka * (kb / k))
    return k, mean, m2


def _accumulate(mode: str, n: int, m: int, model: Model, dist: Distribution,
                trials: int, base: np.random.SeedSequence, workers: int):
    sizes = [CHUNK] * (trials // CHUNK)
    if trials % CHUNK:
        sizes.append(trials % CHUNK)
    children = base.spawn(len(sizes))
    tasks = [(mode, n, m, model, dist, child, size)
             for child, size in zip(children, sizes)]
    if workers <= 1 or len(tasks) == 1:
        parts = map(_simulate_chunk, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        parts = pool.map(_simulate_chunk, tasks)
    acc = None
    for part in parts:  # map preserves chunk order for any worker count
        acc = part if acc is None else _merge(acc, part)
    if workers > 1 and len(tasks) > 1:
        pool.shutdown()
    return acc


def _report(quantity: str, acc, col: int, trials: int, seed: int) -> EstimateReport:
    k, mean, m2 = acc
    std_err = math.sqrt(m2[col] / (k - 1) / k)
    return EstimateReport(quantity, float(mean[col]), std_err, trials, seed)


def estimate_f(n: int, m: int, model: Model, dist: Distribution,
               trials: int, seed: int, workers: int = 1) -> EstimateReport:
    """Estimate the expected per-search cost by plain Monte Carlo.

    Deterministic for fixed (seed, trials) at any worker count.  The
    stream is keyed by (seed, n, m), so sweeps over m with one seed use
    independent draws per pile size.
    """
    _check_args(n, m, dist, trials, seed)
    base = np.random.SeedSequence((seed, n, m))
    acc = _accumulate("f", n, m, model, dist, trials, base, workers)
    return _report("F", acc, 0, trials, seed)


def estimate_occupancy(n: int, m: int, dist: Distribution, trials: int,
                       seed: int, workers: int = 1) -> OccupancyEstimates:
    """Estimate 1/len, len, and each tau_j/len mean from one run."""
    _check_args(n, m, dist, trials, seed)
    base = np.random.SeedSequence((seed, n, m))
    acc = _accumulate("occ", n, m, None, dist, trials, base, workers)
    tau = tuple(_report(f"tau_recip_{j}", acc, j + 1, trials, seed)
                for j in range(1, m))
    return OccupancyEstimates(
        recip_len=_report("recip_len", acc, 0, trials, seed),
        expected_len=_report("expected_len", acc, 1, trials, seed),
        tau_recip=tau,
    )


def empirical_m_opt(n: int, model: Model, dist: Distribution,
                    trials_per_m: int, seed: int,
                    workers: int = 1) -> EmpiricalOptimum:
    """Sweep pile sizes 1..n and return the empirical cost minimizer.

    Ties: the smallest minimizing size wins, and ``tie`` is set when
    any other size's mean lies within one combined standard error of
    the winner's.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    reports = tuple(estimate_f(n, m, model, dist, trials_per_m, seed, workers)
                    for m in range(1, n + 1))
    means = np.array([r.mean for r in reports])
    best = int(np.argmin(means))
    tie = False
    for i, rep in enumerate(reports):
        if i == best:
            continue
        sigma = math.hypot(rep.std_err, reports[best].std_err)
        if rep.mean - means[best] <= sigma:
            tie = True
            break
    return EmpiricalOptimum(best + 1, tie, reports)
