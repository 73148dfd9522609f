"""Built-in problems and the ``kind:key=value,...`` spec grammar."""
from __future__ import annotations

from .graph import (
    GraphProblem,
    PermutedProblem,
    ValueRelabelledProblem,
    make_complete,
    make_path,
    make_skewed,
    make_toy_fig3,
)
from .sat import SatInstance, flip_overlap_fraction, make_random_3sat
from .sumterms import SumOfTermsProblem, convolution_census, make_sum_of_terms
from .tsp import TspInstance, TspProblem, load_tsp, make_footnote_tsp, tsp_census


class SpecError(ValueError):
    """Unparseable problem spec string."""


def _params(body: str) -> dict[str, str]:
    out = {}
    for part in filter(None, body.split(",")):
        key, sep, value = part.partition("=")
        if not sep or not key:
            raise SpecError(f"expected key=value, got {part!r}")
        out[key.strip()] = value.strip()
    return out


def _int(params, key, default=None):
    if key not in params:
        if default is None:
            raise SpecError(f"missing parameter {key!r}")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise SpecError(f"{key} must be an integer, got {params[key]!r}") from None


def parse_problem(spec: str):
    """Build a problem from specs such as ``sumterms:k=5,m=5``, ``tsp:footnote``,
    ``tsp:file=dist.txt``, ``sat:n=100,m=430,seed=1`` or ``toy:fig3``.

    TSP specs return a :class:`TspProblem`.
    """
    kind, _, body = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "sumterms":
        p = _params(body)
        return SumOfTermsProblem(_int(p, "k"), _int(p, "m"))
    if kind == "tsp":
        if body.strip() == "footnote":
            return TspProblem(make_footnote_tsp())
        p = _params(body)
        if "file" in p:
            return TspProblem(load_tsp(p["file"]))
        if "n" in p:
            q = p.get("quadruples")
            return TspProblem(make_footnote_tsp(_int(p, "n"), _int(p, "d"), int(q) if q else None))
        raise SpecError(f"unknown tsp spec {body!r}")
    if kind == "sat":
        p = _params(body)
        return make_random_3sat(_int(p, "n"), _int(p, "m"), _int(p, "seed", 0))
    if kind == "toy":
        if body.strip() != "fig3":
            raise SpecError(f"unknown toy landscape {body!r}")
        return make_toy_fig3()
    raise SpecError(f"unknown problem kind {kind!r}")


__all__ = [
    "GraphProblem", "PermutedProblem", "ValueRelabelledProblem", "SatInstance", "SpecError",
    "SumOfTermsProblem", "TspInstance", "TspProblem", "convolution_census", "flip_overlap_fraction",
    "load_tsp", "make_complete", "make_footnote_tsp", "make_path", "make_random_3sat",
    "make_skewed", "make_sum_of_terms", "make_toy_fig3", "parse_problem", "tsp_census",
]
