"""JSON landscape interchange and histogram CSV."""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Optional, Union

from .core import AggregateLandscape, FitnessGrid, FitnessHistogram, global_proportions
from .errors import LandscapeError


def rational_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise LandscapeError(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise LandscapeError(f"not a rational: {x!r}") from exc
    raise LandscapeError(f"not a rational: {x!r}")


def plain_number(x) -> Union[int, float]:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else float(x)


def landscape_to_dict(obj: Union[FitnessHistogram, AggregateLandscape]) -> dict:
    if isinstance(obj, AggregateLandscape):
        hist, agg = obj.hist, obj
    else:
        hist, agg = obj, None
    grid = hist.grid
    out = {
        "sense": grid.sense,
        "levels": [rational_str(grid.to_original(v)) for v in grid.levels],
        "counts": [rational_str(c) for c in hist.counts],
    }
    if agg is not None:
        out["nf"] = [[rational_str(x) for x in row] for row in agg.nf]
        out["integer_realizable"] = agg.integer_realizable
    else:
        out["integer_realizable"] = hist.is_integral()
    return out


def _grid_from_levels(sense: str, levels: list[Fraction]) -> FitnessGrid:
    if not levels:
        raise LandscapeError("landscape has no levels")
    sign = 1 if sense == "max" else -1
    if len(levels) == 1:
        step = Fraction(1)
    else:
        step = sign * (levels[1] - levels[0])
        if step <= 0:
            raise LandscapeError("levels must run from worst to best")
        for a, b in zip(levels, levels[1:]):
            if sign * (b - a) != step:
                raise LandscapeError("levels must be evenly spaced")
    start = sign * levels[0] / step
    if start.denominator == 1:
        v_min = int(start)
        origin = Fraction(0)
    else:
        v_min = 0
        origin = levels[0]
    return FitnessGrid(sense, v_min, v_min + len(levels) - 1, origin, step)


def landscape_from_dict(data: dict) -> Union[FitnessHistogram, AggregateLandscape]:
    """Inverse of :func:`landscape_to_dict`; returns an aggregate when ``nf`` is present."""
    try:
        sense = data["sense"]
        levels = [parse_rational(x) for x in data["levels"]]
        counts = [parse_rational(x) for x in data["counts"]]
    except (KeyError, TypeError) as exc:
        raise LandscapeError(f"malformed landscape: {exc}") from exc
    if sense not in ("max", "min"):
        raise LandscapeError(f"sense must be 'max' or 'min', got {sense!r}")
    if len(levels) != len(counts):
        raise LandscapeError("levels and counts differ in length")
    grid = _grid_from_levels(sense, levels)
    try:
        hist = FitnessHistogram(grid, tuple(counts))
        if data.get("nf") is None:
            return hist
        nf = tuple(tuple(parse_rational(x) for x in row) for row in data["nf"])
        return AggregateLandscape(hist, nf, bool(data.get("integer_realizable", False)))
    except LandscapeError:
        raise
    except (ValueError, TypeError) as exc:
        raise LandscapeError(f"malformed landscape: {exc}") from exc


def dump_landscape(obj, path=None) -> str:
    text = json.dumps(landscape_to_dict(obj), indent=1)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def load_landscape(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LandscapeError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise LandscapeError(f"{path}: expected a JSON object")
    return landscape_from_dict(data)


CSV_HEADER = ["fitness", "count", "proportion", "cum_better"]


def histogram_rows(hist: FitnessHistogram) -> list[list]:
    """Rows best-first: original fitness, count, p_v, p⁺_v."""
    rows = []
    for v in reversed(hist.levels):
        p, p_plus = global_proportions(hist, v)
        rows.append([plain_number(hist.grid.to_original(v)), plain_number(hist.count(v)),
                     float(p), float(p_plus)])
    return rows


def histogram_csv(hist: FitnessHistogram, path: Optional[str] = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(histogram_rows(hist))
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
