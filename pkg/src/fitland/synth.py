"""Synthetic aggregate landscapes for exercising the main theorem.

Positive controls satisfy strict cardinality-monotonicity, NSF and an
exactly unskewed neighbourhood by construction. Negative controls break
one premise at a time. Landscapes are rational-valued ``nf`` matrices with
each occupied row normalised to total mass 1; they are not realised as
concrete solution graphs.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .core import (
    AggregateLandscape,
    FitnessHistogram,
    ct_delta,
    p_delta,
    p_plus_delta,
)
from .errors import InfeasibleProfile
from .properties import (
    check_cardinality_monotonic,
    check_nsf,
    delta_range,
    verify_theorem1,
    Verdict,
)

VIOLATIONS = ("none", "break-NSF", "break-CM", "break-unskewed")


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic landscape.

    The neighbour/solution gap profile over differences ``1..D`` is
    ``decay**(d-1) - shift * mean``, where ``mean`` is the average of the
    decay terms. ``shift`` in ``[0, 1]`` keeps the total nonnegative; values
    above ``decay**(D-1) / mean`` make the profile change sign.
    """

    levels: int = 8
    mode: int = 0
    seed: int = 0
    decay: Fraction = Fraction(1, 2)
    shift: Fraction = Fraction(3, 4)
    violation: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "decay", Fraction(self.decay))
        object.__setattr__(self, "shift", Fraction(self.shift))
        if self.levels < 3:
            raise ValueError("need at least 3 levels")
        if not 0 <= self.mode < self.levels - 1:
            raise ValueError("mode must sit below the top level")
        if not 0 < self.decay <= 1:
            raise ValueError("decay must lie in (0, 1]")
        if not 0 <= self.shift <= 1:
            raise ValueError("shift must lie in [0, 1]")
        if self.violation not in VIOLATIONS:
            raise ValueError(f"violation must be one of {VIOLATIONS}")


def gap_profile(spec: SynthSpec, width: int) -> list[Fraction]:
    """Gap shape over differences ``1..width`` before per-level scaling."""
    if width == 0:
        return []
    base = [spec.decay ** (d - 1) for d in range(1, width + 1)]
    if spec.violation == "break-NSF":
        # mirrored: zero at d=1, growing toward large differences
        return [b - base[-1] for b in reversed(base)]
    if width == 1:
        return [Fraction(1)]
    mean = sum(base) / width
    shift = spec.shift
    if mean == base[-1]:
        shift = Fraction(0)
    return [b - shift * mean for b in base]


def generate_cm_histogram(spec: SynthSpec) -> FitnessHistogram:
    """Every level occupied; counts strictly fall from the mode to the top.

    Below the mode, counts are arbitrary but never exceed the mode count.
    ``break-CM`` instead leaves a dip just under the top level followed by
    a rise at the top.
    """
    rng = random.Random(spec.seed)
    top = spec.levels - 1
    counts = [0] * spec.levels
    counts[top] = rng.randint(1, 4)
    for v in range(top - 1, spec.mode - 1, -1):
        counts[v] = counts[v + 1] + rng.randint(1, 6)
    for v in range(spec.mode):
        counts[v] = rng.randint(1, counts[spec.mode])
    if spec.violation == "break-CM" and top - spec.mode >= 2:
        peak = counts[spec.mode]
        for v in range(spec.mode + 1, top):
            counts[v] = rng.randint(1, 2)
        counts[top] = rng.randint(max(3, peak // 2), peak - 1) if peak > 3 else 3
        if counts[top] >= peak:
            counts[spec.mode] = counts[top] + 1
    return FitnessHistogram.from_counts(dict(enumerate(counts)))


def _row(hist: FitnessHistogram, v: int, profile: list[Fraction], rng: random.Random,
         skew: bool) -> dict[int, Fraction]:
    deltas = range(1, len(profile) + 1)
    valid = [d for d in deltas if ct_delta(hist, v, d) > 0]
    gaps = {d: profile[d - 1] for d in valid}
    if len(valid) < len(profile):
        # forced zero gaps follow, so keep the truncated profile nonnegative
        gaps = {d: max(g, Fraction(0)) for d, g in gaps.items()}
    p = {d: p_delta(hist, v, d) for d in valid}
    limits = [p[d] / -g for d, g in gaps.items() if g < 0]
    total_gap = sum(gaps.values(), Fraction(0))
    if total_gap > 0:
        limits.append((1 - sum(p.values(), Fraction(0))) / total_gap)
    scale = min(limits) if limits else Fraction(1)
    scale *= Fraction(rng.randint(1, 8), 8)
    pn = {d: p[d] + scale * gaps[d] for d in valid}

    row: dict[int, Fraction] = {}
    for d, mass in pn.items():
        if mass == 0:
            continue
        share = p_plus_delta(hist, v, d)
        if skew and hist.count(v + d) > 0:
            share = Fraction(1)
        if share:
            row[v + d] = mass * share
        if share != 1:
            row[v - d] = mass * (1 - share)
    rest = 1 - sum(pn.values(), Fraction(0))
    if rest:
        row[v] = rest
    return row


def generate_nsf_unskewed(hist: FitnessHistogram, spec: SynthSpec) -> AggregateLandscape:
    """Neighbour rows whose gaps follow the SynthSpec profile, split in the global better/worse ratio.

    The profile is scaled per level so that every ``pn_{v,d}`` stays in
    ``[0, 1]`` with the leftover mass placed at difference 0. ``break-unskewed``
    sends all delta mass to the better side where one exists.
    """
    if any(c == 0 for c in hist.counts):
        raise ValueError("every level must be occupied")
    if spec.violation != "break-CM" and not check_cardinality_monotonic(hist, strict=True).holds:
        raise ValueError("histogram must be strictly cardinality-monotonic")
    rng = random.Random(spec.seed * 7919 + 1)
    profile = gap_profile(spec, len(delta_range(hist)))
    rows = {v: _row(hist, v, profile, rng, spec.violation == "break-unskewed")
            for v in hist.occupied()}
    agg = AggregateLandscape.from_rows(hist, rows)
    if spec.violation in ("none", "break-CM", "break-unskewed") and profile:
        nsf = check_nsf(agg)
        if not nsf.holds and nsf.witness.relation.startswith("(b)"):
            raise InfeasibleProfile(f"gap at d=1 vanished at level {nsf.witness.v}")
    return agg


def uniform_neighbourhood(hist: FitnessHistogram) -> AggregateLandscape:
    """Neighbour fitness independent of the solution: every row equals the global distribution."""
    dist = {w: c / hist.total for w, c in hist.as_dict().items()}
    return AggregateLandscape.from_rows(hist, {v: dist for v in hist.occupied()})


def generate(spec: SynthSpec) -> AggregateLandscape:
    return generate_nsf_unskewed(generate_cm_histogram(spec), spec)


def random_spec(seed: int, violation: str = "none", levels: Optional[int] = None) -> SynthSpec:
    """Spread of shapes for suites: level count, mode, decay and shift all vary with the seed."""
    rng = random.Random(seed)
    L = levels if levels is not None else rng.randint(3, 12)
    if violation == "break-CM":
        L = max(L, 5)
        mode = rng.randint(0, max(0, (L - 5) // 2))
    else:
        mode = rng.randint(0, (L - 2) // 2)
    return SynthSpec(
        levels=L,
        mode=mode,
        seed=seed,
        decay=rng.choice([Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1)]),
        shift=Fraction(1) if violation == "break-CM" else rng.choice(
            [Fraction(0), Fraction(1, 2), Fraction(3, 4), Fraction(1)]),
        violation=violation,
    )


@dataclass
class SuiteResult:
    violation: str
    landscapes: int
    premises_held: int
    conclusion_failed: int
    counterexamples: list

    def to_dict(self) -> dict:
        return {
            "violation": self.violation,
            "landscapes": self.landscapes,
            "premises_held": self.premises_held,
            "conclusion_failed": self.conclusion_failed,
            "counterexamples": len(self.counterexamples),
        }


def suite_landscapes(seeds: int, violation: str = "none", levels: Optional[int] = None,
                     first_seed: int = 0, max_retries: int = 10):
    """Yield ``(spec, landscape)`` for each seed, reseeding infeasible draws."""
    for seed in range(first_seed, first_seed + seeds):
        spec = random_spec(seed, violation, levels)
        for _ in range(max_retries):
            try:
                agg = generate(spec)
            except InfeasibleProfile:
                spec = replace(spec, seed=spec.seed + 1_000_003)
                continue
            yield spec, agg
            break
        else:
            raise InfeasibleProfile(f"seed {seed}: no feasible landscape after {max_retries} tries")


def run_suite(seeds: int, violation: str = "none", levels: Optional[int] = None,
              first_seed: int = 0, max_retries: int = 10) -> SuiteResult:
    """Generate ``seeds`` landscapes and verify the theorem on each.

    A counterexample is a landscape whose premises hold but whose strict
    conclusion or decomposition check fails.
    """
    premises = failed = 0
    counterexamples = []
    for spec, agg in suite_landscapes(seeds, violation, levels, first_seed, max_retries):
        report = verify_theorem1(agg)
        if report.verdict is not Verdict.NOT_APPLICABLE:
            premises += 1
        if report.details["conclusion"] == "fails":
            failed += 1
        if report.verdict is Verdict.FAILS:
            counterexamples.append((spec, agg, report))
    return SuiteResult(violation, seeds, premises, failed, counterexamples)
