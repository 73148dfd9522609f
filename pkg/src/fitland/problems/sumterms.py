"""Sum-of-terms problem and its convolution census."""
from __future__ import annotations

import itertools
import warnings

from ..core import ExplicitProblem, FitnessHistogram, default_budget


class SumOfTermsProblem(ExplicitProblem):
    """``k`` terms, each taking a value in ``1..m``; fitness is their sum.

    A move changes one term by +1 or -1, staying inside ``1..m``.
    """

    sense = "max"

    def __init__(self, k: int, m: int):
        if k < 1 or m < 1:
            raise ValueError("need k >= 1 and m >= 1")
        self.k = k
        self.m = m

    @property
    def size(self) -> int:
        return self.m ** self.k

    def fitness(self, s):
        return sum(s)

    def neighbours(self, s):
        out = []
        for i, t in enumerate(s):
            for step in (-1, 1):
                if 1 <= t + step <= self.m:
                    out.append(s[:i] + (t + step,) + s[i + 1:])
        return out

    def enumerate(self):
        return itertools.product(range(1, self.m + 1), repeat=self.k)

    def random_solution(self, rng):
        return tuple(int(x) for x in rng.integers(1, self.m + 1, size=self.k))

    def __repr__(self):
        return f"SumOfTermsProblem(k={self.k}, m={self.m})"


def make_sum_of_terms(k: int, m: int) -> SumOfTermsProblem:
    problem = SumOfTermsProblem(k, m)
    if problem.size > default_budget():
        warnings.warn(f"{problem.size} solutions exceed the enumeration budget", stacklevel=2)
    return problem


def convolution_census(k: int, m: int) -> FitnessHistogram:
    """Exact counts of each sum, from the k-th power of ``x + x^2 + ... + x^m``."""
    if k < 1 or m < 1:
        raise ValueError("need k >= 1 and m >= 1")
    term = [0] + [1] * m
    poly = [1]
    for _ in range(k):
        out = [0] * (len(poly) + len(term) - 1)
        for i, a in enumerate(poly):
            if a:
                for j, b in enumerate(term):
                    out[i + j] += a * b
        poly = out
    return FitnessHistogram.from_counts({v: c for v, c in enumerate(poly) if c})
