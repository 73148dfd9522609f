"""Random MAX-3SAT instances with the single-flip neighbourhood."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from ..core import ExplicitProblem


@dataclass(frozen=True)
class SatInstance(ExplicitProblem):
    """Clauses are tuples of nonzero literals over variables ``1..n``.

    A solution is a tuple of ``n`` booleans; fitness counts satisfied clauses.
    """

    n: int
    clauses: tuple
    sense = "max"

    def __post_init__(self):
        for clause in self.clauses:
            vs = [abs(lit) for lit in clause]
            if len(vs) != 3 or len(set(vs)) != 3 or not all(1 <= v <= self.n for v in vs):
                raise ValueError(f"clause {clause} must use 3 distinct variables in 1..{self.n}")

    @property
    def size(self) -> int:
        return 2 ** self.n

    @property
    def m(self) -> int:
        return len(self.clauses)

    def fitness(self, s):
        return sum(any(s[abs(lit) - 1] == (lit > 0) for lit in clause) for clause in self.clauses)

    def neighbours(self, s):
        return [s[:i] + (not s[i],) + s[i + 1:] for i in range(self.n)]

    def enumerate(self):
        for bits in range(2 ** self.n):
            yield tuple(bool(bits >> (self.n - 1 - i) & 1) for i in range(self.n))

    def random_solution(self, rng):
        return tuple(bool(b) for b in rng.integers(0, 2, size=self.n))

    def occurrences(self) -> list[int]:
        """Number of clauses mentioning each variable, indexed from 0."""
        counts = [0] * self.n
        for clause in self.clauses:
            for lit in clause:
                counts[abs(lit) - 1] += 1
        return counts


def make_random_3sat(n: int, m: int, seed: int) -> SatInstance:
    """Each clause: 3 distinct variables drawn uniformly, each negated with probability 1/2."""
    if n < 3:
        raise ValueError("need at least 3 variables")
    rng = random.Random(seed)
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        clauses.append(tuple(v if rng.getrandbits(1) else -v for v in vs))
    return SatInstance(n, tuple(clauses))


def flip_overlap_fraction(instance: SatInstance) -> Fraction:
    """Mean over variables of the share of clauses a single flip can touch."""
    if instance.m == 0:
        return Fraction(0)
    return Fraction(sum(instance.occurrences()), instance.n * instance.m)


def expected_overlap(n: int) -> Fraction:
    """Chance that a fixed variable is among 3 drawn without replacement from ``n``."""
    return 1 - Fraction(comb(n - 1, 3), comb(n, 3))


def expected_overlap_with_replacement(n: int) -> Fraction:
    return 1 - Fraction(n - 1, n) ** 3
