"""Open polygonal curves in 3-space and their Monte Carlo invariants.

Projecting a curve set along a direction ``xi`` gives a linkoid diagram. An
invariant of curves is the average of the diagram invariant over all
directions on the unit sphere; here that integral is estimated by sampling.
Virtual closure happens on the diagram side for every projection: closing
the curves in space and then projecting gives the same diagram as
projecting and then closing, so no arcs are ever embedded in 3-space.

Reproducibility: direction ``k`` is drawn from ``numpy.random.default_rng([seed,
k])`` and its ``j``-th replacement (after an irregular projection) from
``default_rng([seed, k, j])``. Results therefore do not depend on thread count
or evaluation order.

Example:
    >>> curves = PolyCurveSet.from_lists([[(0, 0, 0), (1, 0, 0)]])
    >>> str(measure(curves, Involution.parse("(1 2)"), "jones", 10, seed=1).value)
    '1'
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .closure import reduce_virtual, virtual_closure
from .diagram import PlanarDiagram, to_gauss
from .errors import (
    IrregularProjection,
    MultiComponent,
    ParseError,
    SamplingFailure,
    SizeMismatch,
    TooLarge,
    UnsupportedSelector,
)
from .geometry import diagram_from_polylines
from .invariants import affine_index, arrow_normalized, genus_bound, jones, odd_writhe
from .involution import Involution, burnside_count, enumerate_hn
from .polynomial import RealPoly, as_terms, real_mean

__all__ = [
    "PolyCurveSet",
    "MeasureEstimate",
    "WeightedEntry",
    "WeightedSpectrum",
    "CURVE_INVARIANTS",
    "DEFAULT_REL_EPS",
    "DEFAULT_EPS_ANGLE",
    "MAX_WEIGHTED_STRANDS",
    "RETRY_FACTOR",
    "projection_frame",
    "project",
    "sample_directions",
    "measure",
    "weighted_spectrum",
    "spectral_measure",
    "load_curves",
    "parse_curves",
]

DEFAULT_REL_EPS = 1e-9
"""Distance tolerance as a fraction of the curve-set diameter."""
DEFAULT_EPS_ANGLE = 1e-6
"""Smallest admissible crossing angle in radians."""
MAX_WEIGHTED_STRANDS = 4
RETRY_FACTOR = 50
"""Irregular directions are resampled up to ``RETRY_FACTOR * N`` times in total."""

ONE_COMPONENT_ONLY = frozenset({"affine", "odd_writhe"})


@dataclass(frozen=True, eq=False)
class PolyCurveSet:
    """A collection of open polygonal curves.

    Curve ``i`` runs from the endpoint labelled ``labels[i][0]`` to the one
    labelled ``labels[i][1]``.

    Attributes:
        curves: One ``(m_i, 3)`` float array per curve, ``m_i >= 2``.
        labels: ``(foot, head)`` per curve; together they form ``1..2n``.
    """

    curves: tuple[np.ndarray, ...]
    labels: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        curves = tuple(np.array(c, dtype=float).reshape(-1, 3) for c in self.curves)
        if not curves:
            raise ValueError("a curve set needs at least one curve")
        for ci, c in enumerate(curves):
            if len(c) < 2:
                raise ValueError(f"curve {ci} has fewer than 2 points")
            if not np.all(np.isfinite(c)):
                raise ValueError(f"curve {ci} has non-finite coordinates")
            steps = np.linalg.norm(np.diff(c, axis=0), axis=1)
            if np.any(steps == 0):
                raise ValueError(f"curve {ci} repeats a point")
        labels = tuple(tuple(int(x) for x in p) for p in self.labels) or tuple(
            (2 * i + 1, 2 * i + 2) for i in range(len(curves))
        )
        if len(labels) != len(curves):
            raise ValueError(f"{len(curves)} curves but {len(labels)} label pairs")
        if sorted(x for p in labels for x in p) != list(range(1, 2 * len(curves) + 1)):
            raise ValueError(f"labels must form 1..{2 * len(curves)}")
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_lists(
        cls, curves: Sequence[Sequence[Sequence[float]]], labels: Sequence[Sequence[int]] = ()
    ) -> PolyCurveSet:
        return cls(tuple(np.asarray(c, dtype=float) for c in curves), tuple(tuple(p) for p in labels))

    @property
    def n(self) -> int:
        return len(self.curves)

    @property
    def tau(self) -> Involution:
        return Involution.from_pairs(self.labels)

    @property
    def diameter(self) -> float:
        pts = np.concatenate(self.curves)
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(np.linalg.norm(span)) or 1.0

    def endpoint(self, label: int) -> np.ndarray:
        for ci, (foot, head) in enumerate(self.labels):
            if label == foot:
                return self.curves[ci][0]
            if label == head:
                return self.curves[ci][-1]
        raise KeyError(label)

    def closure_weight(self, sigma: Involution) -> float:
        """Mean endpoint distance ``(1/2n) * sum_i |i - sigma(i)|``."""
        if sigma.size != 2 * self.n:
            raise SizeMismatch(f"sigma acts on {sigma.size} labels, curves have {2 * self.n} endpoints")
        total = math.fsum(
            float(np.linalg.norm(self.endpoint(i) - self.endpoint(sigma(i)))) for i in range(1, sigma.size + 1)
        )
        return total / sigma.size

    def rotated(self, matrix: np.ndarray) -> PolyCurveSet:
        """Copy with every point multiplied by ``matrix``."""
        m = np.asarray(matrix, dtype=float)
        return PolyCurveSet(tuple(c @ m.T for c in self.curves), self.labels)

    def to_json(self) -> dict[str, Any]:
        return {"curves": [c.tolist() for c in self.curves], "labels": [list(p) for p in self.labels]}


# ---------------------------------------------------------------------------
# projection
# ---------------------------------------------------------------------------


def projection_frame(xi: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis ``(e, f)`` of the plane normal to ``xi``.

    ``e`` is ``xi`` crossed with the coordinate axis least aligned with
    ``xi`` (lowest index on ties) and ``f = xi x e``, so ``(e, f, xi)`` is
    right-handed and the projection is seen from the tip of ``xi``.
    """
    v = np.asarray(xi, dtype=float)
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(v)))] = 1.0
    e = np.cross(v, helper)
    e /= np.linalg.norm(e)
    f = np.cross(v, e)
    return e, f


def _point_keys(c: PolyCurveSet, tol: float) -> list[list[tuple[int, int]]]:
    """Identity keys per point; endpoints that coincide in space share a key."""
    keys = [[(ci, j) for j in range(len(pts))] for ci, pts in enumerate(c.curves)]
    ends = [(ci, j) for ci, pts in enumerate(c.curves) for j in (0, len(pts) - 1)]
    for a in range(len(ends)):
        for b in range(a + 1, len(ends)):
            (ca, ja), (cb, jb) = ends[a], ends[b]
            if np.linalg.norm(c.curves[ca][ja] - c.curves[cb][jb]) <= tol:
                keys[cb][jb] = keys[ca][ja]
    return keys


def project(
    c: PolyCurveSet,
    xi: Sequence[float],
    eps: float | None = None,
    eps_angle: float = DEFAULT_EPS_ANGLE,
) -> PlanarDiagram:
    """Linkoid diagram of the projection of ``c`` along ``xi``.

    Points further along ``xi`` pass over. Endpoints that coincide in space
    are treated as joined, so a closed polygon given as one curve with equal
    first and last points projects cleanly.

    Args:
        c: Curve set.
        xi: Unit vector (norm within ``1e-12`` of 1).
        eps: Distance tolerance; defaults to ``1e-9`` times the diameter.
        eps_angle: Smallest admissible crossing angle in radians.

    Raises:
        ValueError: If ``xi`` is not a unit vector.
        IrregularProjection: If the projection is not generic.
    """
    v = np.asarray(xi, dtype=float)
    if v.shape != (3,) or abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
        raise ValueError("projection direction must be a unit 3-vector")
    if eps is None:
        eps = DEFAULT_REL_EPS * c.diameter
    e, f = projection_frame(v)
    basis = np.stack([e, f], axis=1)
    planar = [pts @ basis for pts in c.curves]
    heights = [pts @ v for pts in c.curves]

    def depth(ci: int, j: int, s: float) -> float:
        h = heights[ci]
        return float(h[j] + s * (h[j + 1] - h[j]))

    return diagram_from_polylines(planar, depth, c.labels, eps, eps_angle, point_keys=_point_keys(c, eps))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _direction(seed: int, *stream: int) -> np.ndarray:
    rng = np.random.default_rng([seed, *stream])
    while True:
        v = rng.standard_normal(3)
        norm = float(np.linalg.norm(v))
        if norm > 1e-12:
            return v / norm


def sample_directions(N: int, seed: int) -> list[np.ndarray]:
    """``N`` independent uniform directions on the unit sphere.

    Raises:
        ValueError: If ``N < 1``.
    """
    if N < 1:
        raise ValueError("the number of directions must be at least 1")
    return [_direction(seed, k) for k in range(N)]


CURVE_INVARIANTS: dict[str, Callable[[PlanarDiagram, Involution], Any]] = {
    "jones": lambda d, s: jones(to_gauss(d), s),
    "arrow": lambda d, s: arrow_normalized(to_gauss(d), s),
    "affine": lambda d, s: affine_index(to_gauss(d), s),
    "odd_writhe": lambda d, s: odd_writhe(to_gauss(d), s),
    "height_bound": lambda d, s: reduce_virtual(virtual_closure(d, s)).virtual_count,
    "genus_bound": lambda d, s: genus_bound(reduce_virtual(virtual_closure(d, s))),
}
"""Per-projection invariants evaluated exactly on ``(diagram, sigma)``."""


def _invariant(name: str) -> Callable[[PlanarDiagram, Involution], Any]:
    try:
        return CURVE_INVARIANTS[name]
    except KeyError:
        raise UnsupportedSelector(f"unknown invariant {name!r}; choose from {sorted(CURVE_INVARIANTS)}") from None


@dataclass(frozen=True)
class _Projection:
    index: int
    xi: np.ndarray
    diagram: PlanarDiagram
    rejected: int


def _regular_projection(
    c: PolyCurveSet, seed: int, k: int, budget: int, eps: float | None, eps_angle: float
) -> _Projection:
    xi = _direction(seed, k)
    for attempt in range(budget + 1):
        if attempt:
            xi = _direction(seed, k, attempt)
        try:
            return _Projection(k, xi, project(c, xi, eps, eps_angle), attempt)
        except IrregularProjection:
            continue
    raise SamplingFailure(f"direction {k}: no regular projection in {budget} resamples")


def _projections(c: PolyCurveSet, N: int, seed: int, eps, eps_angle, threads: int) -> list[_Projection]:
    if N < 1:
        raise ValueError("the number of directions must be at least 1")
    budget = RETRY_FACTOR * N

    def one(k: int) -> _Projection:
        return _regular_projection(c, seed, k, budget, eps, eps_angle)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(one, range(N)))
    else:
        out = [one(k) for k in range(N)]
    rejected = sum(p.rejected for p in out)
    if rejected > budget:
        raise SamplingFailure(f"{rejected} irregular directions exceed the budget of {budget}")
    return out


@dataclass(frozen=True)
class MeasureEstimate:
    """Monte Carlo estimate of a sphere-averaged invariant.

    Attributes:
        value: Coefficient-wise mean; its ``stderr`` map holds the sample
            standard deviation over ``sqrt(N)`` for every coefficient.
        samples: Number of regular directions used (``N``).
        seed: Seed of the direction stream.
        rejected: Irregular directions that were resampled.
        invariant: Selector name.
        sigma: Closure permutation, or ``None`` for a spectral measure.
        per_direction: Exact value per direction, kept when requested.
    """

    value: RealPoly
    samples: int
    seed: int
    rejected: int
    invariant: str
    sigma: Involution | None = None
    per_direction: tuple[tuple[tuple[float, float, float], str], ...] | None = field(default=None, compare=False)

    @property
    def stderr(self) -> dict:
        return dict(self.value.stderr)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "invariant": self.invariant,
            "sigma": str(self.sigma) if self.sigma is not None else None,
            "samples": self.samples,
            "seed": self.seed,
            "rejected": self.rejected,
            **self.value.to_json(),
        }
        if self.per_direction is not None:
            out["per_direction"] = [{"xi": list(xi), "value": v} for xi, v in self.per_direction]
        return out


def _check_one_component(c: PolyCurveSet, sigma: Involution, name: str) -> None:
    if sigma.size != 2 * c.n:
        raise SizeMismatch(f"sigma acts on {sigma.size} labels, curves have {2 * c.n} endpoints")
    if name in ONE_COMPONENT_ONLY and burnside_count(c.tau, sigma) != 1:
        raise MultiComponent(f"{name} needs a one-component closure; {sigma} gives {burnside_count(c.tau, sigma)}")


def _dump(projections: list[_Projection], values: list[Any]) -> tuple:
    return tuple((tuple(float(x) for x in p.xi), str(v)) for p, v in zip(projections, values))


def measure(
    c: PolyCurveSet,
    sigma: Involution,
    invariant: str,
    N: int,
    seed: int = 0,
    eps: float | None = None,
    eps_angle: float = DEFAULT_EPS_ANGLE,
    threads: int = 1,
    keep_samples: bool = False,
) -> MeasureEstimate:
    """Estimate the sphere average of ``invariant`` of the ``sigma``-closure.

    Every direction is projected, the diagram is closed with ``sigma`` and the
    invariant is evaluated exactly; only the final mean is floating point.

    Raises:
        UnsupportedSelector: For an unknown invariant.
        MultiComponent: For ``affine`` or ``odd_writhe`` when the closure has
            several components.
        SamplingFailure: When irregular directions exhaust the retry budget.
    """
    fn = _invariant(invariant)
    _check_one_component(c, sigma, invariant)
    projections = _projections(c, N, seed, eps, eps_angle, threads)
    values = [fn(p.diagram, sigma) for p in projections]
    return MeasureEstimate(
        value=real_mean([as_terms(v) for v in values]),
        samples=N,
        seed=seed,
        rejected=sum(p.rejected for p in projections),
        invariant=invariant,
        sigma=sigma,
        per_direction=_dump(projections, values) if keep_samples else None,
    )


@dataclass(frozen=True)
class WeightedEntry:
    """One closure permutation in a weighted spectrum.

    ``estimate`` is ``None`` when the invariant is undefined for ``sigma``
    (``affine`` or ``odd_writhe`` of a multi-component closure).
    """

    sigma: Involution
    weight: float
    estimate: MeasureEstimate | None

    def to_json(self) -> dict[str, Any]:
        return {
            "sigma": str(self.sigma),
            "weight": self.weight,
            "estimate": self.estimate.to_json() if self.estimate is not None else "n/a",
        }


@dataclass(frozen=True)
class WeightedSpectrum:
    """Estimates for every ``sigma`` from one shared set of directions."""

    entries: tuple[WeightedEntry, ...]
    w_min: float

    def ratio(self, entry: WeightedEntry) -> float:
        """``w_min / w_sigma``, with a zero-distance closure taking all weight."""
        if self.w_min == 0.0:
            return 1.0 if entry.weight == 0.0 else 0.0
        return self.w_min / entry.weight

    def to_json(self) -> dict[str, Any]:
        return {"w_min": self.w_min, "entries": [e.to_json() for e in self.entries]}


def _weighted_values(
    c: PolyCurveSet, invariant: str, N: int, seed: int, eps, eps_angle, threads: int
) -> tuple[list[Involution], list[float], list[_Projection], list[list[Any] | None]]:
    fn = _invariant(invariant)
    if c.n > MAX_WEIGHTED_STRANDS:
        raise TooLarge(f"weighted spectrum over H_{c.n} is beyond the guard (n <= {MAX_WEIGHTED_STRANDS})")
    sigmas = enumerate_hn(c.n)
    weights = [c.closure_weight(s) for s in sigmas]
    projections = _projections(c, N, seed, eps, eps_angle, threads)
    columns: list[list[Any] | None] = []
    for s in sigmas:
        if invariant in ONE_COMPONENT_ONLY and burnside_count(c.tau, s) != 1:
            columns.append(None)
        else:
            columns.append([fn(p.diagram, s) for p in projections])
    return sigmas, weights, projections, columns


def weighted_spectrum(
    c: PolyCurveSet,
    invariant: str,
    N: int,
    seed: int = 0,
    eps: float | None = None,
    eps_angle: float = DEFAULT_EPS_ANGLE,
    threads: int = 1,
) -> WeightedSpectrum:
    """Estimate the invariant for every ``sigma`` with its closure weight.

    The weight of ``sigma`` is the mean distance between paired endpoints.
    All closures share the same sampled projections.

    Raises:
        TooLarge: For more than four curves.
    """
    sigmas, weights, projections, columns = _weighted_values(c, invariant, N, seed, eps, eps_angle, threads)
    rejected = sum(p.rejected for p in projections)
    entries = []
    for s, w, col in zip(sigmas, weights, columns):
        est = None
        if col is not None:
            est = MeasureEstimate(real_mean([as_terms(v) for v in col]), N, seed, rejected, invariant, s)
        entries.append(WeightedEntry(s, w, est))
    return WeightedSpectrum(tuple(entries), min(weights))


def spectral_measure(
    c: PolyCurveSet,
    invariant: str,
    N: int,
    seed: int = 0,
    eps: float | None = None,
    eps_angle: float = DEFAULT_EPS_ANGLE,
    threads: int = 1,
) -> MeasureEstimate:
    """Weighted sum over ``sigma`` of the estimates, with weights ``w_min / w_sigma``.

    When some closure pairs only coincident endpoints (``w_min = 0``), those
    closures get weight 1 and all others weight 0, which is the limit of the
    ratio as the gap closes. The sum is formed per direction before
    averaging, so the standard error accounts for the shared directions.

    Raises:
        MultiComponent: If a closure with non-zero weight has several
            components and the invariant needs one.
        TooLarge: For more than four curves.
    """
    sigmas, weights, projections, columns = _weighted_values(c, invariant, N, seed, eps, eps_angle, threads)
    spectrum = WeightedSpectrum(tuple(WeightedEntry(s, w, None) for s, w in zip(sigmas, weights)), min(weights))
    ratios = [spectrum.ratio(e) for e in spectrum.entries]
    for s, r, col in zip(sigmas, ratios, columns):
        if col is None and r != 0.0:
            raise MultiComponent(f"{invariant} is undefined for the multi-component closure {s}")
    samples = []
    var = None
    for k in range(len(projections)):
        combined: dict = {}
        for r, col in zip(ratios, columns):
            if col is None or r == 0.0:
                continue
            terms, v, _ = as_terms(col[k])
            var = var or v
            for key, coef in terms.items():
                combined[key] = combined.get(key, 0.0) + r * float(coef)
        samples.append((combined, var, False))
    return MeasureEstimate(
        real_mean(samples), N, seed, sum(p.rejected for p in projections), invariant, None
    )


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------


def parse_curves(text: str, fmt: str = "json") -> PolyCurveSet:
    """Read a curve set from JSON or CSV text.

    JSON: ``{"curves": [[[x, y, z], ...], ...], "labels": [[1, 2], ...]}``
    (labels optional). CSV: a header ``curve,x,y,z`` then one point per row;
    curves are numbered from 0 in order of first appearance and get labels
    ``(2i + 1, 2i + 2)``.

    Raises:
        ParseError: On malformed input.
    """
    try:
        if fmt == "json":
            data = json.loads(text)
            if not isinstance(data, dict) or "curves" not in data:
                raise ParseError("curves", "missing 'curves'")
            return PolyCurveSet.from_lists(data["curves"], data.get("labels", ()))
        if fmt == "csv":
            rows = list(csv.DictReader(io.StringIO(text)))
            grouped: dict[str, list[list[float]]] = {}
            for row in rows:
                grouped.setdefault(row["curve"].strip(), []).append([float(row[a]) for a in ("x", "y", "z")])
            return PolyCurveSet.from_lists(list(grouped.values()))
    except ParseError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError("curves", str(exc)) from exc
    raise ParseError("format", f"unknown curve format {fmt!r}")


def load_curves(path: str) -> PolyCurveSet:
    """Read a curve file; ``.csv`` files use the CSV format, all else JSON."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    return parse_curves(text, "csv" if path.lower().endswith(".csv") else "json")
