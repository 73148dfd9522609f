"""Hill climbing and random sampling, with Monte Carlo improvement estimates.

Three sampling measures are distinguished for "a neighbour of a level-v
solution":

``neighbour``
    uniform level-v solution, then a uniform member of its neighbourhood
    (what a running local search actually does);
``union``
    uniform member of the union of all level-v neighbourhoods, whose
    exact expectation is ``pn⁺_v``;
``random``
    uniform solution of the whole space, whose expectation is ``p⁺_v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import Binning, ExplicitProblem, _materialize, level_of
from .errors import EmptyLevel

PIVOTS = ("first-improvement", "best-improvement", "random-neighbour")
MODES = ("neighbour", "union", "random")


class LandscapeIndex:
    """Enumerated solutions with their levels and neighbour lists, for sampling."""

    def __init__(self, problem: ExplicitProblem, binning: Optional[Binning] = None,
                 budget: Optional[int] = None):
        self.problem = problem
        self.solutions = _materialize(problem, budget)
        self.position = {s: i for i, s in enumerate(self.solutions)}
        self.levels = np.array([level_of(problem.fitness(s), problem.sense, binning)
                                for s in self.solutions], dtype=np.int64)
        self.neighbours = [np.array([self.position[t] for t in problem.neighbours(s)], dtype=np.int64)
                           for s in self.solutions]

    def at_level(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.levels == v)

    def union(self, v: int) -> np.ndarray:
        members = [self.neighbours[i] for i in self.at_level(v)]
        if not members:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(members))

    def exact(self, v: int, mode: str) -> Fraction:
        """Exact success probability of the given sampling measure at level ``v``."""
        if mode == "random":
            return Fraction(int((self.levels > v).sum()), len(self.solutions))
        starts = self.at_level(v)
        if len(starts) == 0:
            raise EmptyLevel(f"no solutions at level {v}")
        if mode == "union":
            u = self.union(v)
            return Fraction(int((self.levels[u] > v).sum()), len(u))
        total = Fraction(0)
        for i in starts:
            nb = self.neighbours[i]
            if len(nb):
                total += Fraction(int((self.levels[nb] > v).sum()), len(nb))
        return total / len(starts)


@dataclass(frozen=True)
class Estimate:
    mode: str
    level: int
    trials: int
    successes: int

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.trials)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "level": self.level, "trials": self.trials,
                "successes": self.successes, "p_hat": self.p_hat, "stderr": self.stderr}


def estimate_improvement(problem: ExplicitProblem, v: int, mode: str = "random",
                         trials: int = 10_000, seed: int = 0,
                         index: Optional[LandscapeIndex] = None) -> Estimate:
    """Monte Carlo frequency of drawing a solution strictly better than level ``v``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    index = index or LandscapeIndex(problem)
    rng = np.random.default_rng(seed)
    starts = index.at_level(v)
    if len(starts) == 0:
        raise EmptyLevel(f"no solutions at level {v}")
    if mode == "random":
        picks = rng.integers(len(index.solutions), size=trials)
    elif mode == "union":
        pool = index.union(v)
        if len(pool) == 0:
            raise EmptyLevel(f"level {v} has no neighbours")
        picks = pool[rng.integers(len(pool), size=trials)]
    else:
        sizes = np.array([len(index.neighbours[i]) for i in starts])
        if (sizes == 0).any():
            raise EmptyLevel(f"some level-{v} solutions have no neighbours")
        who = rng.integers(len(starts), size=trials)
        slot = (rng.random(trials) * sizes[who]).astype(np.int64)
        picks = np.array([index.neighbours[starts[w]][k] for w, k in zip(who, slot)], dtype=np.int64)
    successes = int((index.levels[picks] > v).sum())
    return Estimate(mode, v, trials, successes)


# ---------------------------------------------------------------------------
# Search runners
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    pivot: str = "first-improvement"
    budget: int = 1000
    seed: int = 0
    start: object = None  # None for a uniform random start

    def __post_init__(self):
        if self.pivot not in PIVOTS:
            raise ValueError(f"pivot must be one of {PIVOTS}")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


@dataclass
class Trace:
    fitness: list
    evaluations: int
    status: str  # "local-optimum" or "budget"
    solution: object = None


def _score(problem, value):
    return value if problem.sense == "max" else -value


def _better(problem, a, b) -> bool:
    return _score(problem, a) > _score(problem, b)


def hill_climb(problem: ExplicitProblem, config: SearchConfig,
               rng: Optional[np.random.Generator] = None, start=None) -> Trace:
    """Climb until no neighbour improves or the evaluation budget runs out.

    ``fitness`` holds the start value followed by each accepted move, in
    original units. Best-improvement breaks ties toward the smallest
    solution.
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    s = start if start is not None else config.start
    if s is None:
        s = problem.random_solution(rng)
    f = problem.fitness(s)
    evals = 1
    trace = [f]
    while True:
        nbrs = list(problem.neighbours(s))
        if config.pivot == "random-neighbour":
            nbrs = [nbrs[i] for i in rng.permutation(len(nbrs))]
        elif config.pivot == "best-improvement":
            nbrs = sorted(nbrs)
        move = None
        for t in nbrs:
            if evals >= config.budget:
                return Trace(trace, evals, "budget", s)
            ft = problem.fitness(t)
            evals += 1
            if config.pivot == "best-improvement":
                if _better(problem, ft, f) and (move is None or _better(problem, ft, move[1])):
                    move = (t, ft)
            elif _better(problem, ft, f):
                move = (t, ft)
                break
        if move is None:
            return Trace(trace, evals, "local-optimum", s)
        s, f = move
        trace.append(f)


def restarting_climb(problem: ExplicitProblem, config: SearchConfig,
                     rng: np.random.Generator) -> tuple[object, int, list]:
    """Hill climb with uniform random restarts at local optima; returns best fitness, evals, traces."""
    remaining = config.budget
    best = None
    traces = []
    start = config.start
    while remaining > 0:
        run = hill_climb(problem, SearchConfig(config.pivot, remaining, config.seed), rng, start)
        start = None
        traces.append(run)
        remaining -= run.evaluations
        top = max(run.fitness, key=lambda x: _score(problem, x))
        if best is None or _better(problem, top, best):
            best = top
    return best, config.budget - remaining, traces


def random_search(problem: ExplicitProblem, budget: int, rng: np.random.Generator):
    best = None
    for _ in range(budget):
        f = problem.fitness(problem.random_solution(rng))
        if best is None or _better(problem, f, best):
            best = f
    return best


@dataclass
class ComparisonReport:
    runs: int
    budget: int
    pivot: str
    hill_climb_best: list
    random_best: list
    hill_climb_evals: list
    levels: list = field(default_factory=list)
    traces: list = field(default_factory=list)

    @staticmethod
    def _mean(xs):
        return float(np.mean([float(x) for x in xs]))

    @property
    def hill_climb_mean(self) -> float:
        return self._mean(self.hill_climb_best)

    @property
    def random_mean(self) -> float:
        return self._mean(self.random_best)

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "budget": self.budget,
            "pivot": self.pivot,
            "hill_climb": {"mean_best": self.hill_climb_mean,
                           "best": [_plain(x) for x in self.hill_climb_best],
                           "evaluations": self.hill_climb_evals},
            "random_search": {"mean_best": self.random_mean,
                              "best": [_plain(x) for x in self.random_best]},
            "levels": self.levels,
        }

    def trace_rows(self) -> list[list]:
        """``run, step, fitness, evals`` rows for every accepted point of every climb."""
        rows = []
        for run, traces in enumerate(self.traces):
            step = evals = 0
            for tr in traces:
                for f in tr.fitness:
                    rows.append([run, step, _plain(f), evals])
                    step += 1
                evals += tr.evaluations
        return rows


def _plain(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def level_estimates(problem: ExplicitProblem, levels: Sequence[int], trials: int, seed: int,
                    index: Optional[LandscapeIndex] = None) -> list[dict]:
    """Neighbour and random estimates per level next to the exact values."""
    index = index or LandscapeIndex(problem)
    out = []
    for k, v in enumerate(levels):
        row = {"level": v}
        for j, mode in enumerate(("neighbour", "random")):
            est = estimate_improvement(problem, v, mode, trials, seed + 2 * k + j, index)
            row[mode] = est.to_dict()
            row[f"{mode}_exact"] = float(index.exact(v, mode))
        row["pn_plus"] = float(index.exact(v, "union"))
        row["p_plus"] = row["random_exact"]
        out.append(row)
    return out


def head_to_head(problem: ExplicitProblem, config: SearchConfig, runs: int,
                 levels: Sequence[int] = (), trials: int = 10_000) -> ComparisonReport:
    """Restarting hill climb against random sampling at an equal evaluation budget.

    Run ``r`` gives both methods generators seeded identically from
    ``(config.seed, r)``, so with a budget of 1 they draw the same sample.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    hc, rs, evals, traces = [], [], [], []
    for r in range(runs):
        best, used, tr = restarting_climb(problem, config, np.random.default_rng([config.seed, r]))
        hc.append(best)
        evals.append(used)
        traces.append(tr)
        rs.append(random_search(problem, config.budget, np.random.default_rng([config.seed, r])))
    report = ComparisonReport(runs, config.budget, config.pivot, hc, rs, evals, traces=traces)
    if levels:
        report.levels = level_estimates(problem, levels, trials, config.seed)
    return report
