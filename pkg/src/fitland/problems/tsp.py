"""Symmetric TSP instances, exhaustive tour census and a 2-opt problem view."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from ..core import ExplicitProblem, FitnessHistogram
from ..errors import BudgetExceeded, InconsistentMultiplicity

DEFAULT_CITY_CEILING = 13

# the system TBB is too old for numba and only produces a warning
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@dataclass(frozen=True)
class TspInstance:
    n: int
    dist: tuple

    def __post_init__(self):
        d = tuple(tuple(int(x) for x in row) for row in self.dist)
        if len(d) != self.n or any(len(r) != self.n for r in d):
            raise ValueError("distance matrix must be n x n")
        for a in range(self.n):
            if d[a][a] != 0:
                raise ValueError("diagonal must be zero")
            for b in range(a + 1, self.n):
                if d[a][b] != d[b][a] or d[a][b] <= 0:
                    raise ValueError(f"distance ({a}, {b}) must be symmetric and positive")
        object.__setattr__(self, "dist", d)

    def d(self, a: int, b: int) -> int:
        """Distance between cities numbered from 1."""
        return self.dist[a - 1][b - 1]

    def array(self) -> np.ndarray:
        return np.array(self.dist, dtype=np.int64)

    def tour_length(self, tour) -> int:
        return sum(self.dist[a][b] for a, b in zip(tour, tour[1:] + tour[:1]))


def footnote_distances(n: int = 12, d: int = 20, quadruples: Optional[int] = 6) -> list[int]:
    """Sorted distance sequence: the lowest ``quadruples`` values four times, the rest thrice.

    With ``quadruples=None`` the split is solved from the pair count.
    """
    pairs = n * (n - 1) // 2
    if quadruples is None:
        quadruples = pairs - 3 * d
    if not 0 <= quadruples <= d or 4 * quadruples + 3 * (d - quadruples) != pairs:
        raise InconsistentMultiplicity(
            f"{pairs} city pairs cannot take {d} distances with {quadruples} of them used four times")
    return [v for v in range(1, d + 1) for _ in range(4 if v <= quadruples else 3)]


def make_footnote_tsp(n: int = 12, d: int = 20, quadruples: Optional[int] = 6) -> TspInstance:
    """Pairs <1,2>, <1,3>, ..., <n-1,n> get the non-decreasing distance sequence in order."""
    seq = footnote_distances(n, d, quadruples)
    dist = [[0] * n for _ in range(n)]
    for (a, b), value in zip(itertools.combinations(range(n), 2), seq):
        dist[a][b] = dist[b][a] = value
    return TspInstance(n, tuple(tuple(r) for r in dist))


def load_tsp(path) -> TspInstance:
    """Plain text: ``n`` on the first line, then ``n`` rows of ``n`` integers."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty file")
    n = int(tokens[0])
    values = [int(t) for t in tokens[1:]]
    if len(values) != n * n:
        raise ValueError(f"{path}: expected {n * n} distances, found {len(values)}")
    return TspInstance(n, tuple(tuple(values[i * n:(i + 1) * n]) for i in range(n)))


@numba.njit(cache=True)
def _walk_from(dist, second, hist):
    # all directed cycles 0 -> second -> ... -> 0, iterative DFS
    n = dist.shape[0]
    path = np.zeros(n, np.int64)
    nxt = np.zeros(n + 1, np.int64)
    acc = np.zeros(n, np.int64)
    used = np.zeros(n, np.bool_)
    path[1] = second
    used[0] = True
    used[second] = True
    acc[1] = dist[0, second]
    if n == 2:
        hist[acc[1] + dist[second, 0]] += 1
        return
    depth = 2
    nxt[2] = 1
    while depth >= 2:
        if depth == n:
            hist[acc[n - 1] + dist[path[n - 1], 0]] += 1
            depth -= 1
            used[path[depth]] = False
            continue
        c = nxt[depth]
        while c < n and used[c]:
            c += 1
        if c == n:
            depth -= 1
            if depth >= 2:
                used[path[depth]] = False
            continue
        nxt[depth] = c + 1
        path[depth] = c
        used[c] = True
        acc[depth] = acc[depth - 1] + dist[path[depth - 1], c]
        depth += 1
        nxt[depth] = 1


@numba.njit(cache=True)
def _census_serial(dist, width):
    n = dist.shape[0]
    rows = np.zeros((n, width), np.int64)
    for second in range(1, n):
        _walk_from(dist, second, rows[second])
    return rows


@numba.njit(cache=True, parallel=True)
def _census_parallel(dist, width):
    n = dist.shape[0]
    rows = np.zeros((n, width), np.int64)
    for second in numba.prange(1, n):
        _walk_from(dist, second, rows[second])
    return rows


def tour_length_counts(instance: TspInstance, parallel: bool = True,
                       ceiling: int = DEFAULT_CITY_CEILING) -> dict[int, int]:
    """``{route length: number of directed Hamiltonian cycles}`` by full enumeration.

    The search is split by the city visited after city 1; per-prefix rows
    are summed in a fixed order, so parallel and serial runs agree exactly.
    """
    if instance.n > ceiling:
        raise BudgetExceeded(f"{instance.n} cities exceed the census ceiling of {ceiling}")
    if instance.n < 3:
        raise ValueError("need at least 3 cities")
    dist = instance.array()
    width = int(dist.max()) * instance.n + 1
    rows = (_census_parallel if parallel else _census_serial)(dist, width)
    total = rows.sum(axis=0)
    return {int(v): int(c) for v, c in enumerate(total) if c}


def tsp_census(instance: TspInstance, parallel: bool = True,
               ceiling: int = DEFAULT_CITY_CEILING) -> FitnessHistogram:
    """Histogram of route lengths over all ``(n-1)!`` feasible successor assignments."""
    counts = tour_length_counts(instance, parallel, ceiling)
    return FitnessHistogram.from_counts({-length: c for length, c in counts.items()}, sense="min")


class TspProblem(ExplicitProblem):
    """Tours as city tuples starting at city 0; neighbours by 2-opt segment reversal.

    Reversing the whole tail would only flip direction, so it is excluded;
    every other reversal replaces exactly two edges.
    """

    sense = "min"

    def __init__(self, instance: TspInstance):
        self.instance = instance

    @property
    def size(self) -> int:
        return math.factorial(self.instance.n - 1)

    def fitness(self, s):
        return self.instance.tour_length(s)

    def neighbours(self, s):
        n = len(s)
        out = []
        for i in range(1, n - 1):
            for j in range(i + 1, n):
                if i == 1 and j == n - 1:
                    continue
                out.append(s[:i] + s[i:j + 1][::-1] + s[j + 1:])
        return out

    def enumerate(self):
        rest = range(1, self.instance.n)
        return ((0,) + p for p in itertools.permutations(rest))

    def random_solution(self, rng):
        return (0,) + tuple(int(c) + 1 for c in rng.permutation(self.instance.n - 1))
