"""Decision procedures for landscape properties.

Every check returns a :class:`PropertyReport`. A failing verdict always
carries a :class:`Witness` holding the first violated comparison as exact
rationals; passing and not-applicable verdicts never do.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .core import (
    AggregateLandscape,
    FitnessHistogram,
    ctn_delta,
    decomposed_pn_plus,
    global_proportions,
    max_delta,
    p_delta,
    p_plus_delta,
    pn_delta,
    pn_plus,
    pn_plus_delta,
    _require_occupied,
)
from .errors import GridMismatch

GOOD_ENOUGH_RULE = "v_ge = v_mode + ceil((v_max - v_mode) / 2), rounded toward the optimum"


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class Witness:
    v: int
    delta: Optional[int]
    lhs: Fraction
    rhs: Fraction
    relation: str

    def to_dict(self) -> dict:
        return {"v": self.v, "delta": self.delta, "lhs": _jsonable(self.lhs),
                "rhs": _jsonable(self.rhs), "relation": self.relation}


@dataclass
class PropertyReport:
    property: str
    verdict: Verdict
    witness: Optional[Witness] = None
    v_mode: Optional[int] = None
    v_ge: Optional[int] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.verdict is Verdict.FAILS) != (self.witness is not None):
            raise ValueError("a witness is required exactly when the verdict is 'fails'")

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "verdict": self.verdict.value,
            "witness": self.witness.to_dict() if self.witness else None,
            "v_mode": self.v_mode,
            "v_ge": self.v_ge,
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (Witness, PropertyReport)):
        return x.to_dict()
    return x


def _report(name, witness, **kw) -> PropertyReport:
    verdict = Verdict.FAILS if witness is not None else Verdict.HOLDS
    return PropertyReport(name, verdict, witness, **kw)


# ---------------------------------------------------------------------------
# Histogram-level quantities
# ---------------------------------------------------------------------------


def modal_fitness(hist: FitnessHistogram) -> int:
    """Best level among those with the largest count."""
    top = max(hist.counts)
    return max(v for v in hist.levels if hist.count(v) == top)


def good_enough(hist: FitnessHistogram) -> int:
    """Level halfway from the mode to the optimum, rounded toward the optimum."""
    mode = modal_fitness(hist)
    return mode + -(-(hist.v_max - mode) // 2)


def delta_range(hist: FitnessHistogram, v_ge: Optional[int] = None) -> range:
    if v_ge is None:
        v_ge = good_enough(hist)
    return range(1, hist.v_max - v_ge + 1)


def check_cardinality_monotonic(hist: FitnessHistogram, strict: bool = False) -> PropertyReport:
    """Counts must not grow (strict: must shrink) from the mode up to the optimum."""
    mode = modal_fitness(hist)
    name = f"CardinalityMonotonic({'strict' if strict else 'nonstrict'})"
    witness = None
    for v in range(mode, hist.v_max):
        lo, hi = hist.count(v), hist.count(v + 1)
        if hi > lo or (strict and hi == lo):
            rel = "ct[v+1] < ct[v]" if strict else "ct[v+1] <= ct[v]"
            witness = Witness(v, 1, lo, hi, rel)
            break
    return _report(name, witness, v_mode=mode, v_ge=good_enough(hist))


def crossover(agg: AggregateLandscape, v: int, v_ge: Optional[int] = None) -> Optional[int]:
    """Largest x such that the neighbour/solution gap is positive for every delta <= x."""
    x = None
    for d in delta_range(agg.hist, v_ge):
        if pn_delta(agg, v, d) - p_delta(agg.hist, v, d) > 0:
            x = d
        else:
            break
    return x


# ---------------------------------------------------------------------------
# Neighbourhood properties
# ---------------------------------------------------------------------------


def check_unskewed(agg: AggregateLandscape, tolerance=0) -> PropertyReport:
    """Better-side share of delta-distant neighbours must match the global share."""
    tol = Fraction(tolerance)
    hist = agg.hist
    witness = None
    for v in hist.occupied():
        for d in range(1, max_delta(hist) + 1):
            if ctn_delta(agg, v, d) == 0:
                continue
            pn_p = pn_plus_delta(agg, v, d)
            p_p = p_plus_delta(hist, v, d)
            if abs(pn_p - p_p) > tol:
                witness = Witness(v, d, pn_p, p_p, f"|pn+[v,d] - p+[v,d]| <= {tol}")
                break
        if witness:
            break
    return _report("Unskewed", witness, v_mode=modal_fitness(hist), v_ge=good_enough(hist),
                   details={"tolerance": tol})


def _gaps(agg, v, deltas):
    return [pn_delta(agg, v, d) - p_delta(agg.hist, v, d) for d in deltas]


def check_nsf(agg: AggregateLandscape, v_ge: Optional[int] = None) -> PropertyReport:
    """Neighbours' similar fitness over every occupied level.

    Clauses: (a) the gap ``pn_{v,d} - p_{v,d}`` is non-increasing over the
    difference range; (b) the gap at ``d = 1`` is positive; (c) the gaps
    sum to a nonnegative value. Clause (b) is tested first at each level,
    so a profile that never starts positive is reported as such.
    """
    hist = agg.hist
    if v_ge is None:
        v_ge = good_enough(hist)
    deltas = delta_range(hist, v_ge)
    witness = None
    for v in hist.occupied():
        pn1, p1 = pn_delta(agg, v, 1), p_delta(hist, v, 1)
        if not pn1 > p1:
            witness = Witness(v, 1, pn1, p1, "(b) pn[v,1] > p[v,1]")
            break
        gaps = _gaps(agg, v, deltas)
        for d, (prev, cur) in enumerate(zip(gaps, gaps[1:]), start=2):
            if cur > prev:
                witness = Witness(v, d, cur, prev, "(a) gap[d] <= gap[d-1]")
                break
        if witness:
            break
        total = sum(gaps, Fraction(0))
        if total < 0:
            witness = Witness(v, None, total, Fraction(0), "(c) sum of gaps >= 0")
            break
    return _report("NSF", witness, v_mode=modal_fitness(hist), v_ge=v_ge,
                   details={"delta_range": [deltas.start, deltas.stop - 1] if deltas else []})


def check_effective_at(agg: AggregateLandscape, v: int) -> PropertyReport:
    """Strict improvement of neighbour sampling over random sampling at ``v``."""
    _require_occupied(agg.hist, v)
    nplus = pn_plus(agg, v)
    _, pplus = global_proportions(agg.hist, v)
    witness = None if nplus > pplus else Witness(v, None, nplus, pplus, "pn+[v] > p+[v]")
    return _report(f"EffectiveAt({v})", witness, v_mode=modal_fitness(agg.hist),
                   v_ge=good_enough(agg.hist), details={"pn_plus": nplus, "p_plus": pplus})


def _first_ineffective(agg, levels):
    for v in levels:
        if agg.hist.count(v) == 0:
            continue
        nplus = pn_plus(agg, v)
        pplus = global_proportions(agg.hist, v)[1]
        if not nplus > pplus:
            return Witness(v, None, nplus, pplus, "pn+[v] > p+[v]")
    return None


def effective_from(agg: AggregateLandscape) -> Optional[int]:
    """Smallest level from which search is effective on every occupied level below the optimum."""
    hist = agg.hist
    best = None
    for v in range(hist.v_max - 1, hist.v_min - 1, -1):
        if hist.count(v) == 0:
            continue
        if pn_plus(agg, v) > global_proportions(hist, v)[1]:
            best = v
        else:
            break
    return best


def check_effective_landscape(agg: AggregateLandscape) -> PropertyReport:
    hist = agg.hist
    v_ge = good_enough(hist)
    levels = range(v_ge, hist.v_max)
    witness = _first_ineffective(agg, levels)
    skipped = [v for v in levels if hist.count(v) == 0]
    return _report("EffectiveLandscape", witness, v_mode=modal_fitness(hist), v_ge=v_ge,
                   details={"v_star": effective_from(agg), "skipped_empty_levels": skipped,
                            "v_ge_rule": GOOD_ENOUGH_RULE})


# ---------------------------------------------------------------------------
# Lemma and theorem
# ---------------------------------------------------------------------------


def _lemma_witness(hist: FitnessHistogram, levels, deltas) -> Optional[Witness]:
    for v in levels:
        values = [p_plus_delta(hist, v, d) for d in deltas]
        for d, (a, b) in enumerate(zip(values, values[1:]), start=1):
            if a is not None and b is not None and b > a:
                return Witness(v, d + 1, b, a, "p+[v,d+1] <= p+[v,d]")
        for d, pp in zip(deltas, values):
            if d > hist.v_max - v and pp is not None and pp != 0:
                return Witness(v, d, pp, Fraction(0), "p+[v,d] = 0 beyond the optimum")
    return None


def check_lemma1(hist: FitnessHistogram) -> PropertyReport:
    """Better-side share ``p⁺_{v,d}`` must not grow with ``d`` for ``v > v_ge``.

    The inclusive range ``v >= v_ge`` is evaluated too and reported in details.
    """
    v_ge = good_enough(hist)
    deltas = list(delta_range(hist, v_ge))
    witness = _lemma_witness(hist, range(v_ge + 1, hist.v_max + 1), deltas)
    inclusive = _lemma_witness(hist, range(v_ge, hist.v_max + 1), deltas)
    return _report("Lemma1", witness, v_mode=modal_fitness(hist), v_ge=v_ge,
                   details={"inclusive_range": "holds" if inclusive is None else inclusive})


def verify_theorem1(agg: AggregateLandscape) -> PropertyReport:
    """Check the premises and the strict conclusion of the main theorem.

    Premises are strict cardinality-monotonicity, NSF and an exactly
    unskewed neighbourhood. The conclusion ``pn⁺_v > p⁺_v`` is checked on
    ``v_ge <= v < v_max`` and, separately, on ``v > v_ge``. When the
    neighbourhood is unskewed, ``pn⁺_v`` must also equal its
    delta-decomposition exactly.
    """
    hist = agg.hist
    v_ge = good_enough(hist)
    mode = modal_fitness(hist)
    premises = {
        "cardinality_monotonic_strict": check_cardinality_monotonic(hist, strict=True),
        "nsf": check_nsf(agg, v_ge),
        "unskewed": check_unskewed(agg, 0),
    }
    premises_hold = all(r.holds for r in premises.values())
    conclusion = _first_ineffective(agg, range(v_ge, hist.v_max))
    strict_range = _first_ineffective(agg, range(v_ge + 1, hist.v_max))

    decomposition = None
    if premises["unskewed"].holds:
        for v in range(v_ge, hist.v_max + 1):
            if hist.count(v) == 0:
                continue
            direct, split = pn_plus(agg, v), decomposed_pn_plus(agg, v)
            if direct != split:
                decomposition = Witness(v, None, direct, split, "pn+[v] = sum_d pn[v,d] * p+[v,d]")
                break

    details = {
        "premises": {k: r.verdict for k, r in premises.items()},
        "premise_witnesses": {k: r.witness for k, r in premises.items() if r.witness},
        "conclusion": "holds" if conclusion is None else "fails",
        "conclusion_v_gt_v_ge": "holds" if strict_range is None else "fails",
        "decomposition": ("not-checked" if not premises["unskewed"].holds
                          else "holds" if decomposition is None else "fails"),
        "crossover": {v: crossover(agg, v, v_ge) for v in range(v_ge, hist.v_max)
                      if hist.count(v) > 0},
        "v_ge_rule": GOOD_ENOUGH_RULE,
    }
    if conclusion is not None:
        details["conclusion_witness"] = conclusion
    if not premises_hold:
        return PropertyReport("Theorem1", Verdict.NOT_APPLICABLE, None, mode, v_ge, details)
    witness = conclusion or decomposition
    return _report("Theorem1", witness, v_mode=mode, v_ge=v_ge, details=details)


def check_permutation_closure(hist_before: FitnessHistogram,
                              hist_after: FitnessHistogram) -> PropertyReport:
    """Level-by-level count equality, plus agreement of both CM verdicts."""
    gb, ga = hist_before.grid, hist_after.grid
    if (gb.sense, gb.origin_offset, gb.step) != (ga.sense, ga.origin_offset, ga.step):
        raise GridMismatch("histograms use different level mappings")
    witness = None
    lo = min(hist_before.v_min, hist_after.v_min)
    hi = max(hist_before.v_max, hist_after.v_max)
    for v in range(lo, hi + 1):
        a, b = hist_before.count(v), hist_after.count(v)
        if a != b:
            witness = Witness(v, None, a, b, "ct_before[v] = ct_after[v]")
            break
    details = {}
    for strict in (False, True):
        key = "cm_strict" if strict else "cm_nonstrict"
        before = check_cardinality_monotonic(hist_before, strict).verdict
        after = check_cardinality_monotonic(hist_after, strict).verdict
        details[key] = {"before": before, "after": after, "agree": before == after}
    return _report("PermutationClosure", witness, v_mode=modal_fitness(hist_before),
                   v_ge=good_enough(hist_before), details=details)


def analyze(agg_or_hist, tolerance=0) -> list[PropertyReport]:
    """Fixed-order battery of reports used by the command line."""
    hist = agg_or_hist.hist if isinstance(agg_or_hist, AggregateLandscape) else agg_or_hist
    reports = [
        check_cardinality_monotonic(hist, strict=False),
        check_cardinality_monotonic(hist, strict=True),
        check_lemma1(hist),
    ]
    mode, v_ge = modal_fitness(hist), good_enough(hist)
    if not isinstance(agg_or_hist, AggregateLandscape):
        for name in ("Unskewed", "NSF", "EffectiveLandscape", "Theorem1"):
            reports.append(PropertyReport(name, Verdict.NOT_APPLICABLE, None, mode, v_ge,
                                          {"reason": "no neighbourhood matrix"}))
        return reports
    agg = agg_or_hist
    reports.append(check_unskewed(agg, tolerance))
    reports.append(check_nsf(agg, v_ge))
    for v in range(v_ge, hist.v_max):
        if hist.count(v) > 0:
            reports.append(check_effective_at(agg, v))
    reports.append(check_effective_landscape(agg))
    reports.append(verify_theorem1(agg))
    return reports
