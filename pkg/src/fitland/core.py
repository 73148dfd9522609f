"""Domain types and exact landscape statistics.

Everything here works on a canonical integer fitness grid where a higher
level is always better. Minimisation problems are reflected onto the grid
and :class:`FitnessGrid` maps levels back to original units.

Counts and proportions are :class:`fractions.Fraction` throughout, so every
statistic is exact and reproducible.
"""
from __future__ import annotations

import math
import os
from abc import ABC, abstractmethod
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Hashable, Iterable, Iterator, Mapping, Optional, Sequence

from .errors import (
    BudgetExceeded,
    EmptyLevel,
    LandscapeError,
    LevelOutOfRange,
    UnbinnableFitness,
)

DEFAULT_BUDGET = 10**8
BUDGET_ENV = "FITLAND_BUDGET"

_SENSES = {"max": "max", "maximize": "max", "min": "min", "minimize": "min"}


def default_budget() -> int:
    """Enumeration ceiling, overridable through ``FITLAND_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    return int(float(raw)) if raw else DEFAULT_BUDGET


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# Grid and histogram
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitnessGrid:
    """Integer fitness axis ``v_min..v_max`` with a map to original units.

    A level ``v`` corresponds to ``origin_offset + step * v`` for
    maximisation and ``origin_offset - step * v`` for minimisation, so a
    larger level is a better solution in both cases.
    """

    sense: str
    v_min: int
    v_max: int
    origin_offset: Fraction = Fraction(0)
    step: Fraction = Fraction(1)

    def __post_init__(self):
        if self.sense not in _SENSES:
            raise ValueError(f"unknown optimisation sense {self.sense!r}")
        object.__setattr__(self, "sense", _SENSES[self.sense])
        object.__setattr__(self, "origin_offset", as_fraction(self.origin_offset))
        object.__setattr__(self, "step", as_fraction(self.step))
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if self.v_min > self.v_max:
            raise ValueError(f"v_min={self.v_min} exceeds v_max={self.v_max}")

    @property
    def sign(self) -> int:
        return 1 if self.sense == "max" else -1

    @property
    def levels(self) -> range:
        return range(self.v_min, self.v_max + 1)

    def __len__(self) -> int:
        return self.v_max - self.v_min + 1

    def __contains__(self, v) -> bool:
        return isinstance(v, int) and self.v_min <= v <= self.v_max

    def to_original(self, v: int) -> Fraction:
        return self.origin_offset + self.sign * self.step * v

    def to_level(self, value) -> int:
        """Exact inverse of :meth:`to_original`; raises if off-grid."""
        q = self.sign * (as_fraction(value) - self.origin_offset) / self.step
        if q.denominator != 1:
            raise LevelOutOfRange(f"{value} does not fall on a grid level")
        return int(q)

    def with_bounds(self, v_min: int, v_max: int) -> "FitnessGrid":
        return FitnessGrid(self.sense, v_min, v_max, self.origin_offset, self.step)


@dataclass(frozen=True)
class Binning:
    """Fixed-width bins in original units, used for non-integral fitness."""

    width: Fraction

    def __post_init__(self):
        object.__setattr__(self, "width", as_fraction(self.width))
        if self.width <= 0:
            raise ValueError("bin width must be positive")

    def level(self, value, sense: str) -> int:
        sign = 1 if _SENSES[sense] == "max" else -1
        return math.floor(sign * as_fraction(value) / self.width)


def level_of(value, sense: str, binning: Optional[Binning] = None) -> int:
    """Canonical grid level of an original-units fitness value."""
    if binning is not None:
        return binning.level(value, sense)
    q = as_fraction(value)
    if q.denominator != 1:
        raise UnbinnableFitness(f"fitness {value!r} is not integral and no binning was given")
    return int(q) if _SENSES[sense] == "max" else -int(q)


def grid_for(sense: str, v_min: int, v_max: int, binning: Optional[Binning] = None) -> FitnessGrid:
    step = binning.width if binning is not None else Fraction(1)
    return FitnessGrid(sense, v_min, v_max, Fraction(0), step)


@dataclass(frozen=True)
class FitnessHistogram:
    """Solution counts per grid level (``ct_v``) and their total ``|S|``."""

    grid: FitnessGrid
    counts: tuple
    total: Fraction = field(init=False)

    def __post_init__(self):
        counts = tuple(as_fraction(c) for c in self.counts)
        if len(counts) != len(self.grid):
            raise ValueError("counts length does not match the grid")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if counts[0] <= 0 or counts[-1] <= 0:
            raise ValueError("grid is not tight: extreme levels must be occupied")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", sum(counts, Fraction(0)))

    @classmethod
    def from_counts(cls, counts: Mapping[int, object], sense: str = "max",
                    binning: Optional[Binning] = None, grid: Optional[FitnessGrid] = None):
        """Build from ``{level: count}``; zero-count extremes are trimmed."""
        occupied = {v: as_fraction(c) for v, c in counts.items() if c}
        if not occupied:
            raise ValueError("histogram needs at least one solution")
        lo, hi = min(occupied), max(occupied)
        if grid is None:
            grid = grid_for(sense, lo, hi, binning)
        else:
            grid = grid.with_bounds(lo, hi)
        return cls(grid, tuple(occupied.get(v, Fraction(0)) for v in range(lo, hi + 1)))

    @property
    def v_min(self) -> int:
        return self.grid.v_min

    @property
    def v_max(self) -> int:
        return self.grid.v_max

    @property
    def levels(self) -> range:
        return self.grid.levels

    def count(self, v: int) -> Fraction:
        """``ct_v``; zero outside the grid."""
        if self.v_min <= v <= self.v_max:
            return self.counts[v - self.v_min]
        return Fraction(0)

    def occupied(self) -> list[int]:
        return [v for v, c in zip(self.levels, self.counts) if c > 0]

    def better_count(self, v: int) -> Fraction:
        return sum((self.count(w) for w in range(v + 1, self.v_max + 1)), Fraction(0))

    def as_dict(self) -> dict[int, Fraction]:
        return {v: c for v, c in zip(self.levels, self.counts) if c > 0}

    def original_counts(self) -> dict[Fraction, Fraction]:
        return {self.grid.to_original(v): c for v, c in self.as_dict().items()}

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.counts)


# ---------------------------------------------------------------------------
# Aggregate landscape
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AggregateLandscape:
    """Histogram plus the fitness transition matrix.

    ``nf[v][w]`` is the number of distinct solutions in ``Nf(v)``, the union
    of neighbourhoods of all level-``v`` solutions, that sit at level ``w``.
    Rows and columns are indexed relative to ``hist.v_min``.
    """

    hist: FitnessHistogram
    nf: tuple
    integer_realizable: bool = False

    def __post_init__(self):
        n = len(self.hist.grid)
        rows = tuple(tuple(as_fraction(x) for x in row) for row in self.nf)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("nf must be a square matrix over the grid")
        counts = self.hist.counts
        for i, row in enumerate(rows):
            if any(x < 0 for x in row):
                raise ValueError("nf entries must be nonnegative")
            for j, x in enumerate(row):
                if x and counts[j] == 0:
                    raise ValueError(f"nf has mass at empty level {self.hist.v_min + j}")
                if self.integer_realizable and (x.denominator != 1 or x > counts[j]):
                    raise ValueError("integer-realizable nf must be integral and bounded by counts")
            size = sum(row, Fraction(0))
            if counts[i] > 0 and size == 0:
                raise ValueError(f"occupied level {self.hist.v_min + i} has no neighbours")
            if counts[i] == 0 and size != 0:
                raise ValueError(f"empty level {self.hist.v_min + i} cannot have neighbours")
        object.__setattr__(self, "nf", rows)

    @classmethod
    def from_rows(cls, hist: FitnessHistogram, rows: Mapping[int, Mapping[int, object]],
                  integer_realizable: bool = False) -> "AggregateLandscape":
        lo = hist.v_min
        n = len(hist.grid)
        matrix = [[Fraction(0)] * n for _ in range(n)]
        for v, row in rows.items():
            for w, x in row.items():
                if w not in hist.grid or v not in hist.grid:
                    raise LevelOutOfRange(f"nf entry ({v}, {w}) outside the grid")
                matrix[v - lo][w - lo] = as_fraction(x)
        return cls(hist, tuple(tuple(r) for r in matrix), integer_realizable)

    def entry(self, v: int, w: int) -> Fraction:
        g = self.hist.grid
        if v in g and w in g:
            return self.nf[v - g.v_min][w - g.v_min]
        return Fraction(0)

    def nf_size(self, v: int) -> Fraction:
        """``|Nf(v)|``."""
        if v not in self.hist.grid:
            return Fraction(0)
        return sum(self.nf[v - self.hist.v_min], Fraction(0))

    def row(self, v: int) -> dict[int, Fraction]:
        return {w: x for w, x in zip(self.hist.levels, self.nf[v - self.hist.v_min]) if x}


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------


class ExplicitProblem(ABC):
    """A finite, enumerable problem with a neighbourhood.

    Solutions are opaque hashable values with a total order. ``enumerate``
    must yield each solution exactly once, always in the same order.
    """

    sense: str = "max"

    @property
    @abstractmethod
    def size(self) -> int:
        ...

    @abstractmethod
    def fitness(self, s) -> object:
        ...

    @abstractmethod
    def neighbours(self, s) -> Sequence:
        ...

    @abstractmethod
    def enumerate(self) -> Iterator:
        ...

    def random_solution(self, rng):
        """Uniform solution. Subclasses with large spaces should override."""
        i = int(rng.integers(self.size))
        return next(islice(self.enumerate(), i, None))


def _check_budget(n: int, budget: Optional[int], what: str = "solutions"):
    limit = default_budget() if budget is None else budget
    if n > limit:
        raise BudgetExceeded(f"{n} {what} exceeds the enumeration budget of {limit}")


def _chunks(items: Sequence, parts: int) -> list[Sequence]:
    step = -(-len(items) // parts)
    return [items[i:i + step] for i in range(0, len(items), step)]


def _fitness_counter(problem: ExplicitProblem, solutions: Sequence) -> Counter:
    return Counter(problem.fitness(s) for s in solutions)


def _neighbour_unions(problem: ExplicitProblem, solutions: Sequence) -> dict:
    unions: dict = {}
    for s in solutions:
        unions.setdefault(problem.fitness(s), set()).update(problem.neighbours(s))
    return unions


def _map_chunks(func, problem, solutions, workers: int) -> list:
    if workers <= 1 or len(solutions) < 2:
        return [func(problem, solutions)]
    parts = _chunks(solutions, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, [problem] * len(parts), parts))


def _materialize(problem: ExplicitProblem, budget: Optional[int]) -> list:
    _check_budget(problem.size, budget)
    limit = default_budget() if budget is None else budget
    solutions = list(islice(problem.enumerate(), limit + 1))
    if len(solutions) > limit:
        raise BudgetExceeded(f"enumeration produced more than {limit} solutions")
    return solutions


def _histogram_from_values(values: Counter, sense: str, binning: Optional[Binning]) -> FitnessHistogram:
    counts: Counter = Counter()
    for value, c in values.items():
        counts[level_of(value, sense, binning)] += c
    return FitnessHistogram.from_counts(counts, sense=sense, binning=binning)


def build_histogram(problem: ExplicitProblem, binning: Optional[Binning] = None,
                    budget: Optional[int] = None, workers: int = 1) -> FitnessHistogram:
    """Exact ``ct_v`` for every level by full enumeration.

    Work is split into contiguous chunks of the enumeration order; the
    per-chunk counters are merged by addition, so the result does not
    depend on ``workers``.
    """
    solutions = _materialize(problem, budget)
    values: Counter = Counter()
    for part in _map_chunks(_fitness_counter, problem, solutions, workers):
        values.update(part)
    return _histogram_from_values(values, problem.sense, binning)


def build_aggregate(problem: ExplicitProblem, binning: Optional[Binning] = None,
                    budget: Optional[int] = None, workers: int = 1) -> AggregateLandscape:
    """Histogram and ``nf`` matrix with set semantics for ``Nf(v)``.

    The budget also bounds the neighbour evaluations, estimated from the
    first solution's neighbourhood size.
    """
    first = next(iter(problem.enumerate()), None)
    if first is not None:
        # checked before enumerating so oversized problems fail fast
        _check_budget(problem.size * max(1, len(problem.neighbours(first))),
                      budget, "neighbour evaluations")
    solutions = _materialize(problem, budget)
    values: Counter = Counter()
    for part in _map_chunks(_fitness_counter, problem, solutions, workers):
        values.update(part)
    hist = _histogram_from_values(values, problem.sense, binning)

    unions: dict = {}
    for part in _map_chunks(_neighbour_unions, problem, solutions, workers):
        for value, members in part.items():
            unions.setdefault(level_of(value, problem.sense, binning), set()).update(members)

    rows: dict[int, Counter] = {}
    cache: dict = {}
    for v, members in unions.items():
        row = rows.setdefault(v, Counter())
        for s in members:
            if s not in cache:
                cache[s] = level_of(problem.fitness(s), problem.sense, binning)
            row[cache[s]] += 1
    return AggregateLandscape.from_rows(hist, rows, integer_realizable=True)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def _require_level(hist: FitnessHistogram, v: int):
    if v not in hist.grid:
        raise LevelOutOfRange(f"level {v} outside [{hist.v_min}, {hist.v_max}]")


def _require_occupied(hist: FitnessHistogram, v: int):
    _require_level(hist, v)
    if hist.count(v) == 0:
        raise EmptyLevel(f"no solutions at level {v}")


def global_proportions(hist: FitnessHistogram, v: int) -> tuple[Fraction, Fraction]:
    """``(p_v, p⁺_v)``: share of solutions at ``v`` and strictly above it."""
    _require_level(hist, v)
    return hist.count(v) / hist.total, hist.better_count(v) / hist.total


def pn_plus(agg: AggregateLandscape, v: int) -> Fraction:
    """Share of ``Nf(v)`` strictly better than ``v``."""
    _require_occupied(agg.hist, v)
    better = sum((agg.entry(v, w) for w in range(v + 1, agg.hist.v_max + 1)), Fraction(0))
    return better / agg.nf_size(v)


def ct_delta(hist: FitnessHistogram, v: int, delta: int) -> Fraction:
    return hist.count(v + delta) + hist.count(v - delta)


def p_delta(hist: FitnessHistogram, v: int, delta: int) -> Fraction:
    return ct_delta(hist, v, delta) / hist.total


def p_plus_delta(hist: FitnessHistogram, v: int, delta: int) -> Optional[Fraction]:
    """Better-side share of solutions ``delta`` away from ``v``; None if there are none."""
    both = ct_delta(hist, v, delta)
    if both == 0:
        return None
    return hist.count(v + delta) / both


def ctn_delta(agg: AggregateLandscape, v: int, delta: int) -> Fraction:
    return agg.entry(v, v + delta) + agg.entry(v, v - delta)


def pn_delta(agg: AggregateLandscape, v: int, delta: int) -> Fraction:
    return ctn_delta(agg, v, delta) / agg.nf_size(v)


def pn_plus_delta(agg: AggregateLandscape, v: int, delta: int) -> Optional[Fraction]:
    both = ctn_delta(agg, v, delta)
    if both == 0:
        return None
    return agg.entry(v, v + delta) / both


@dataclass(frozen=True)
class DeltaTerm:
    delta: int
    ctn: Fraction
    ctn_plus: Fraction
    pn: Fraction
    pn_plus: Optional[Fraction]
    p: Fraction
    p_plus: Optional[Fraction]


@dataclass(frozen=True)
class DeltaProfile:
    """Per-difference statistics around level ``v`` for ``delta`` in 1..delta_cap."""

    v: int
    v_ge: int
    delta_cap: int
    terms: tuple

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, delta: int) -> DeltaTerm:
        if not 1 <= delta <= self.delta_cap:
            raise KeyError(delta)
        return self.terms[delta - 1]


def delta_profile(agg: AggregateLandscape, v: int, v_ge: int) -> DeltaProfile:
    hist = agg.hist
    _require_occupied(hist, v)
    if v_ge > hist.v_max:
        raise LevelOutOfRange(f"v_ge={v_ge} above v_max={hist.v_max}")
    cap = hist.v_max - v_ge
    terms = []
    for d in range(1, cap + 1):
        terms.append(DeltaTerm(
            delta=d,
            ctn=ctn_delta(agg, v, d),
            ctn_plus=agg.entry(v, v + d),
            pn=pn_delta(agg, v, d),
            pn_plus=pn_plus_delta(agg, v, d),
            p=p_delta(hist, v, d),
            p_plus=p_plus_delta(hist, v, d),
        ))
    return DeltaProfile(v, v_ge, cap, tuple(terms))


def max_delta(hist: FitnessHistogram) -> int:
    return hist.v_max - hist.v_min


def decomposed_p_plus(hist: FitnessHistogram, v: int) -> Fraction:
    """``Σ_δ p_{v,δ}·p⁺_{v,δ}`` over every difference the grid admits."""
    total = Fraction(0)
    for d in range(1, max_delta(hist) + 1):
        pp = p_plus_delta(hist, v, d)
        if pp is not None:
            total += p_delta(hist, v, d) * pp
    return total


def decomposed_pn_plus(agg: AggregateLandscape, v: int) -> Fraction:
    """``Σ_δ pn_{v,δ}·p⁺_{v,δ}``; equals ``pn⁺_v`` on unskewed landscapes."""
    hist = agg.hist
    total = Fraction(0)
    for d in range(1, max_delta(hist) + 1):
        pp = p_plus_delta(hist, v, d)
        if pp is not None:
            total += pn_delta(agg, v, d) * pp
    return total


def merge_histograms(parts: Iterable[FitnessHistogram]) -> FitnessHistogram:
    """Sum histograms that share sense and level mapping."""
    parts = list(parts)
    if not parts:
        raise LandscapeError("nothing to merge")
    g = parts[0].grid
    merged: Counter = Counter()
    for h in parts:
        if (h.grid.sense, h.grid.origin_offset, h.grid.step) != (g.sense, g.origin_offset, g.step):
            raise LandscapeError("cannot merge histograms on different grids")
        for v, c in h.as_dict().items():
            merged[v] += c
    return FitnessHistogram.from_counts(merged, grid=g)


def solution_levels(problem: ExplicitProblem, binning: Optional[Binning] = None,
                    budget: Optional[int] = None) -> dict[Hashable, int]:
    """Level of every solution, in enumeration order."""
    solutions = _materialize(problem, budget)
    return {s: level_of(problem.fitness(s), problem.sense, binning) for s in solutions}
