"""Explicit graph landscapes: the four-level toy, complete and skewed controls."""
from __future__ import annotations

from typing import Mapping, Sequence

from ..core import ExplicitProblem


class GraphProblem(ExplicitProblem):
    """Solutions ``0..n-1`` with given fitness labels and adjacency lists.

    The adjacency may be directed; ``neighbours(s)`` returns ``adjacency[s]``
    sorted.
    """

    def __init__(self, fitness: Sequence, adjacency: Mapping[int, Sequence[int]], sense: str = "max"):
        self.labels = tuple(fitness)
        self.sense = sense
        n = len(self.labels)
        adj = {s: tuple(sorted(set(adjacency.get(s, ())))) for s in range(n)}
        for s, nbrs in adj.items():
            if s in nbrs:
                raise ValueError(f"solution {s} lists itself as a neighbour")
            if any(not 0 <= t < n for t in nbrs):
                raise ValueError(f"solution {s} has an unknown neighbour")
        self.adjacency = adj

    @classmethod
    def from_edges(cls, fitness: Sequence, edges, sense: str = "max") -> "GraphProblem":
        """Undirected graph from an edge list."""
        adj: dict[int, list[int]] = {}
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        return cls(fitness, adj, sense)

    @property
    def size(self) -> int:
        return len(self.labels)

    def fitness(self, s):
        return self.labels[s]

    def neighbours(self, s):
        return self.adjacency[s]

    def enumerate(self):
        return iter(range(len(self.labels)))

    def random_solution(self, rng):
        return int(rng.integers(len(self.labels)))

    def edges(self) -> list[tuple[int, int]]:
        return sorted({tuple(sorted((a, b))) for a, nbrs in self.adjacency.items() for b in nbrs})


# Hand-built so that the published aggregates hold: counts 6/10/4/2 at
# fitness 1..4, every edge spans a difference of at most 1, and the union of
# the fitness-3 neighbourhoods has 15 members, two of them at fitness 4.
# The same wiring also makes every level unskewed and NSF.
#   A1..A6 -> 0..5 (fitness 1), B1..B10 -> 6..15 (fitness 2),
#   C1..C4 -> 16..19 (fitness 3), D1, D2 -> 20, 21 (fitness 4).
TOY_FITNESS = (1,) * 6 + (2,) * 10 + (3,) * 4 + (4,) * 2
_A = dict(enumerate(range(0, 6), start=1))
_B = dict(enumerate(range(6, 16), start=1))
_C = dict(enumerate(range(16, 20), start=1))
_D = {1: 20, 2: 21}
TOY_EDGES = (
    # C-B: every B hangs off some C
    (_C[1], _B[1]), (_C[1], _B[2]), (_C[1], _B[3]),
    (_C[2], _B[4]), (_C[2], _B[5]),
    (_C[3], _B[6]), (_C[3], _B[7]),
    (_C[4], _B[8]), (_C[4], _B[9]), (_C[4], _B[10]),
    # C-C chain touches C1..C3 only
    (_C[1], _C[2]), (_C[2], _C[3]),
    # C-D and D-D
    (_C[1], _D[1]), (_C[4], _D[2]), (_D[1], _D[2]),
    # A-B, B-B, A-A
    (_A[1], _B[1]), (_A[2], _B[2]), (_A[3], _B[3]),
    (_A[4], _B[4]), (_A[5], _B[5]), (_A[6], _B[6]),
    (_B[7], _B[8]),
    (_A[1], _A[2]),
)


def make_toy_fig3() -> GraphProblem:
    """The 22-solution, four-level toy landscape."""
    return GraphProblem.from_edges(TOY_FITNESS, TOY_EDGES)


def make_complete(fitness: Sequence, sense: str = "max") -> GraphProblem:
    """Every solution is a neighbour of every other one."""
    n = len(fitness)
    return GraphProblem(fitness, {s: [t for t in range(n) if t != s] for s in range(n)}, sense)


def make_path(fitness: Sequence, sense: str = "max") -> GraphProblem:
    return GraphProblem.from_edges(fitness, [(i, i + 1) for i in range(len(fitness) - 1)], sense)


def make_skewed(fitness: Sequence, sense: str = "max") -> GraphProblem:
    """Directed control where every non-optimal solution sees only better ones.

    Optimal solutions see every other solution, so each level keeps a
    nonempty neighbourhood. Every hill climb on this problem ends at the
    optimum; best-improvement gets there in one move.
    """
    n = len(fitness)
    sign = 1 if sense == "max" else -1
    adj = {s: [t for t in range(n) if sign * fitness[t] > sign * fitness[s]] for s in range(n)}
    for s in range(n):
        if not adj[s]:
            adj[s] = [t for t in range(n) if t != s]
    return GraphProblem(fitness, adj, sense)


class PermutedProblem(ExplicitProblem):
    """``f_phi(s) = f(phi(s))`` for a bijection ``phi`` on the solutions."""

    def __init__(self, base: ExplicitProblem, phi: Mapping):
        self.base = base
        self.phi = dict(phi)
        self.sense = base.sense

    @property
    def size(self):
        return self.base.size

    def fitness(self, s):
        return self.base.fitness(self.phi[s])

    def neighbours(self, s):
        return self.base.neighbours(s)

    def enumerate(self):
        return self.base.enumerate()


class ValueRelabelledProblem(ExplicitProblem):
    """Applies a map to fitness values rather than to solutions."""

    def __init__(self, base: ExplicitProblem, sigma: Mapping):
        self.base = base
        self.sigma = dict(sigma)
        self.sense = base.sense

    @property
    def size(self):
        return self.base.size

    def fitness(self, s):
        value = self.base.fitness(s)
        return self.sigma.get(value, value)

    def neighbours(self, s):
        return self.base.neighbours(s)

    def enumerate(self):
        return self.base.enumerate()
