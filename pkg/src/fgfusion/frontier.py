"""Front post-processing: normalization, dominance filtering, the
box-sum hypervolume over curve-fitted representatives, an exact 2-D
hypervolume for comparison, and retrieval quality metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "normalize_objectives",
    "pareto_front",
    "ExpFit",
    "fit_exp_decay",
    "select_representatives",
    "hypervolume_paper",
    "hypervolume_exact2d",
    "fitted_front_hypervolume",
    "retrieval_metrics",
]

Point = Tuple[float, float]


def normalize_objectives(
    f1: Sequence[float],
    f2: Sequence[float],
    bounds: Optional[Dict[str, Tuple[float, float]]] = None,
) -> List[Point]:
    """Map objective pairs into the unit square with (0, 0) as the ideal.

    g1 is min-max normalized f1; g2 is 1 minus min-max normalized f2, so
    both coordinates are minimized after the transform.  A coordinate
    with zero spread maps to 0.  Pass ``bounds`` (keys "f1", "f2", each a
    (lo, hi) tuple) to normalize several fronts onto one shared scale.
    """
    a1 = np.asarray(f1, dtype=float)
    a2 = np.asarray(f2, dtype=float)
    if a1.shape != a2.shape or a1.ndim != 1:
        raise ConfigError("f1 and f2 must be 1-D sequences of equal length")
    if len(a1) == 0:
        return []

    def span(values, key):
        if bounds is not None and key in bounds:
            lo, hi = float(bounds[key][0]), float(bounds[key][1])
        else:
            lo, hi = float(values.min()), float(values.max())
        if hi < lo:
            raise ConfigError(f"bounds for {key} are inverted: ({lo}, {hi})")
        return lo, hi

    lo1, hi1 = span(a1, "f1")
    lo2, hi2 = span(a2, "f2")
    g1 = np.zeros_like(a1) if hi1 == lo1 else (a1 - lo1) / (hi1 - lo1)
    g2 = np.zeros_like(a2) if hi2 == lo2 else 1.0 - (a2 - lo2) / (hi2 - lo2)
    return [(float(u), float(v)) for u, v in zip(g1, g2)]


def pareto_front(points: Iterable[Point]) -> List[Point]:
    """Non-dominated subset under minimization of both coordinates.

    Exact duplicates of a non-dominated point are all kept.  Output is
    sorted by the first coordinate, then the second.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        return []
    distinct = sorted(set(pts), key=lambda p: (p[0], p[1]))
    keep = set()
    best = math.inf
    i = 0
    while i < len(distinct):
        level = distinct[i][0]
        # distinct is second-coordinate ascending within a level
        if distinct[i][1] < best:
            keep.add(distinct[i])
            best = distinct[i][1]
        while i < len(distinct) and distinct[i][0] == level:
            i += 1
    return sorted([p for p in pts if p in keep], key=lambda p: (p[0], p[1]))


@dataclass(frozen=True)
class ExpFit:
    """Fitted y = a1 * exp(-x / t1) + y0."""

    a1: float
    t1: float
    y0: float
    converged: bool
    n_iter: int

    def curve(self, x: float) -> float:
        return self.a1 * math.exp(-x / self.t1) + self.y0


def fit_exp_decay(x: Sequence[float], y: Sequence[float]) -> ExpFit:
    """Least-squares fit of a three-parameter exponential decay.

    Damped Gauss-Newton (Levenberg style) from a data-driven start:
    a1 = range of y, y0 = min y, t1 = half the x range.  The fit is
    flagged non-converged rather than raising when 200 iterations do
    not settle.
    """
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise ConfigError("x and y must be 1-D sequences of equal length")
    if len(xv) < 3:
        raise ConfigError(f"need at least 3 points to fit 3 parameters, got {len(xv)}")

    x_range = float(xv.max() - xv.min())
    a1 = float(yv.max() - yv.min()) or 1.0
    y0 = float(yv.min())
    t1 = x_range / 2.0 if x_range > 0 else 1.0
    params = np.array([a1, t1, y0])

    def residuals(p):
        return p[0] * np.exp(-xv / p[1]) + p[2] - yv

    lam = 1e-3
    r = residuals(params)
    sse = float(r @ r)
    converged = False
    it = 0
    for it in range(1, 201):
        e = np.exp(-xv / params[1])
        jac = np.column_stack([e, params[0] * e * xv / params[1] ** 2, np.ones_like(xv)])
        g = jac.T @ r
        h = jac.T @ jac
        try:
            delta = np.linalg.solve(h + lam * np.eye(3), -g)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = params + delta
        trial[1] = max(trial[1], 1e-12)
        r_trial = residuals(trial)
        sse_trial = float(r_trial @ r_trial)
        if sse_trial < sse:
            step = float(np.max(np.abs(delta)))
            improved = sse - sse_trial
            params, r, sse = trial, r_trial, sse_trial
            lam = max(lam / 10.0, 1e-12)
            if step < 1e-10 or improved < 1e-10 * max(sse, 1.0):
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e12:
                break
    return ExpFit(
        a1=float(params[0]),
        t1=float(params[1]),
        y0=float(params[2]),
        converged=converged,
        n_iter=it,
    )


def select_representatives(points: Sequence[Point], fit: ExpFit, count: int = 5) -> List[Point]:
    """The ``count`` points closest to the fitted curve, sorted by g1.

    Closeness is vertical distance |g2 - curve(g1)|; ties prefer the
    smaller g1.  With ``count`` or fewer points all of them come back.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    ranked = sorted(pts, key=lambda p: (abs(p[1] - fit.curve(p[0])), p[0]))
    return sorted(ranked[:count], key=lambda p: (p[0], p[1]))


def _check_under_reference(points: Sequence[Point], reference: Point):
    for i, (u, v) in enumerate(points):
        if u > reference[0] or v > reference[1]:
            raise ConfigError(
                f"point {i} = ({u}, {v}) lies beyond the reference {reference}"
            )


def hypervolume_paper(points: Sequence[Point], reference: Point = (1.0, 1.0)) -> float:
    """Sum of per-point boxes to the reference over at most 5 representatives.

    With more than 5 points an exponential-decay curve is fitted and the
    5 points nearest the curve stand in for the front.  Boxes are summed
    without overlap correction, so duplicated points count twice; points
    on the reference boundary contribute zero area; points beyond the
    reference are an error.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        raise ConfigError("hypervolume of an empty front is undefined")
    _check_under_reference(pts, reference)
    if len(pts) > 5:
        fit = fit_exp_decay([p[0] for p in pts], [p[1] for p in pts])
        pts = select_representatives(pts, fit)
    return float(
        sum((reference[0] - u) * (reference[1] - v) for u, v in pts)
    )


def hypervolume_exact2d(points: Sequence[Point], reference: Point = (1.0, 1.0)) -> float:
    """Exact area dominated by the front, up to the reference point.

    Minimization in both coordinates; dominated and duplicate points do
    not change the result.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        raise ConfigError("hypervolume of an empty front is undefined")
    _check_under_reference(pts, reference)
    front = pareto_front(pts)
    area = 0.0
    prev_v = reference[1]
    for u, v in front:  # g1 ascending, g2 strictly descending
        if v >= prev_v:
            continue
        area += (reference[0] - u) * (prev_v - v)
        prev_v = v
    return float(area)


def fitted_front_hypervolume(
    f1: Sequence[float],
    f2: Sequence[float],
    reference: Point = (1.0, 1.0),
    representatives: int = 5,
) -> float:
    """Exact hypervolume of a run's front after curve-fitted down-selection.

    The comparison pipeline used when scoring one algorithm's front
    against another's: the raw (f1, f2) points are min-max normalized
    over themselves, reduced to the non-dominated set, thinned to the
    ``representatives`` points nearest a fitted exponential decay when
    enough points exist to fit one, and scored with the exact 2-D
    hypervolume.  Fronts too small for the curve fit are scored whole.
    """
    g = pareto_front(normalize_objectives(f1, f2))
    if not g:
        raise ConfigError("hypervolume of an empty front is undefined")
    if len(g) >= max(representatives, 3):
        fit = fit_exp_decay([p[0] for p in g], [p[1] for p in g])
        g = pareto_front(select_representatives(g, fit, count=representatives))
    return hypervolume_exact2d(g, reference=reference)


def retrieval_metrics(
    retrieved_ids: Iterable[str],
    relevant_ids: Iterable[str],
    all_retrieved: int,
) -> Dict[str, float]:
    """Recall, precision, and F1 for a retrieval pass.

    ``all_retrieved`` is the total number of items the query returned
    (the precision denominator); recall divides by the number of known
    relevant items.  Either denominator at zero is an error.  F1 is 0
    when both recall and precision are 0.
    """
    retrieved = set(retrieved_ids)
    relevant = set(relevant_ids)
    if len(relevant) == 0:
        raise DataError("no relevant items: recall is undefined")
    if all_retrieved <= 0:
        raise DataError("no retrieved items: precision is undefined")
    hits = len(retrieved & relevant)
    recall = hits / len(relevant)
    precision = hits / all_retrieved
    if recall + precision == 0.0:
        f1 = 0.0
    else:
        f1 = 2.0 * recall * precision / (recall + precision)
    return {"recall": recall, "precision": precision, "f1": f1}
