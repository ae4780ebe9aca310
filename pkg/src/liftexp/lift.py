"""Empirical lift expectations of random convex bodies.

For a weighted sample of bodies ``X_i`` the lift expectation has support
function ``(u0, u) -> sum_i w_i (u0 + h_{X_i}(u))_+``.  Along one direction
``u`` this is a piecewise-linear stop-loss curve in ``u0``; every quantity
below (slices, trimmed regions, AVaR, Lorenz polygons, max-sequences) is
computed from such curves by sorting and partial sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._num import coerce, total
from .bodies import BODY_TYPES, ConvexBody, as_vector, interval_endpoints
from .errors import ValidationError

WEIGHT_TOL = 1e-9
COLLINEAR_TOL = 1e-12


@dataclass(frozen=True)
class BodySample:
    """Finite weighted sample of convex bodies of a common dimension."""

    bodies: tuple
    weights: tuple

    def __post_init__(self):
        bodies = tuple(self.bodies)
        if not bodies:
            raise ValidationError("a body sample needs at least one body")
        for b in bodies:
            if not isinstance(b, BODY_TYPES):
                raise ValidationError(f"not a convex body: {b!r}")
        if len({b.dim for b in bodies}) != 1:
            raise ValidationError("sample bodies have mixed dimensions")
        weights = tuple(coerce(w, "weight") for w in self.weights)
        if len(weights) != len(bodies):
            raise ValidationError(f"{len(bodies)} bodies but {len(weights)} weights")
        if any(w <= 0 for w in weights):
            raise ValidationError("weights must be positive")
        if abs(float(total(weights)) - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"weights sum to {float(total(weights))!r}, not 1")
        object.__setattr__(self, "bodies", bodies)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, bodies: Iterable[ConvexBody], exact: bool = False) -> "BodySample":
        bodies = tuple(bodies)
        n = len(bodies)
        w = Fraction(1, n) if exact else 1.0 / max(n, 1)
        return cls(bodies, (w,) * n)

    @classmethod
    def weighted(cls, bodies: Iterable[ConvexBody], weights: Iterable) -> "BodySample":
        """Build a sample from positive (not necessarily normalized) weights."""
        weights = [coerce(w, "weight") for w in weights]
        s = total(weights)
        if s <= 0:
            raise ValidationError("weights must be positive")
        return cls(tuple(bodies), tuple(w / s for w in weights))

    @property
    def dim(self) -> int:
        return self.bodies[0].dim

    def __len__(self) -> int:
        return len(self.bodies)

    def supports(self, u) -> list:
        u = as_vector(u, dim=self.dim)
        return [b.support(u) for b in self.bodies]


def canonical_atoms(values: Sequence, weights: Sequence, tol: float = 0.0):
    """Sort values ascending and merge equal ones (within ``tol``), summing weights.

    Values closer than ``tol * max(1, |v|)`` to the first value of their run
    are merged and represented by that first value.
    """
    pairs = sorted(zip(values, weights), key=lambda p: p[0])
    out_v, out_w = [], []
    run_w: list = []
    for v, w in pairs:
        if out_v and v - out_v[-1] <= tol * max(1.0, abs(float(out_v[-1]))):
            run_w.append(w)
            continue
        if run_w:
            out_w.append(total(run_w))
        out_v.append(v)
        run_w = [w]
    out_w.append(total(run_w))
    return out_v, out_w


@dataclass(frozen=True, eq=False)
class StopLossCurve:
    """Exact curve ``L(t) = sum_k weights_k (t - breakpoints_k)_+``.

    ``breakpoints`` are the distinct values ``-h_i(u)`` in increasing order,
    ``weights`` the merged probabilities at each of them and ``mean`` the
    expected support value.  Past the last breakpoint ``L(t) = t + mean``.
    """

    breakpoints: tuple
    weights: tuple
    mean: float

    @classmethod
    def from_values(cls, values: Sequence, weights: Sequence) -> "StopLossCurve":
        mean = total(w * v for v, w in zip(values, weights))
        bps, ws = canonical_atoms([-v for v in values], weights)
        return cls(tuple(bps), tuple(ws), mean)

    @property
    def slopes(self) -> tuple:
        """Slope of ``L`` right after each breakpoint (cumulative weights)."""
        out, acc = [], 0
        for w in self.weights:
            acc = acc + w
            out.append(min(acc, 1))
        return tuple(out)

    @property
    def values(self) -> tuple:
        """Distinct support values in increasing order with their probabilities."""
        return tuple(-b for b in reversed(self.breakpoints)), tuple(reversed(self.weights))

    def __call__(self, t):
        bps = self.breakpoints
        if t <= bps[0]:
            return 0.0 if isinstance(t, float) else 0
        if t >= bps[-1]:
            return t + self.mean
        return total(w * (t - b) for b, w in zip(bps, self.weights) if b < t)

    def infimal_projection(self, alpha):
        """``min_t L(t) - alpha * t`` by scanning the slope sequence.

        The minimum sits at the first breakpoint where the cumulative slope
        reaches ``alpha``.
        """
        slopes = self.slopes
        k = len(slopes) - 1
        for i, s in enumerate(slopes):
            if s >= alpha:
                k = i
                break
        t = self.breakpoints[k]
        return self(t) - alpha * t


def _sample_dir(sample: BodySample, u):
    return as_vector(u, dim=sample.dim)


def stop_loss_curve(sample: BodySample, u) -> StopLossCurve:
    u = _sample_dir(sample, u)
    return StopLossCurve.from_values([b.support(u) for b in sample.bodies], sample.weights)


def lift_support(sample: BodySample, u0, u):
    """Support function of the lift expectation at ``(u0, u)``."""
    return stop_loss_curve(sample, u)(coerce(u0, "u0"))


def lift_support_grid(sample: BodySample, u0s: Sequence, directions: Sequence) -> list[list]:
    """``lift_support`` on a product grid; rows follow ``directions``, columns ``u0s``."""
    rows = []
    for u in directions:
        curve = stop_loss_curve(sample, u)
        rows.append([curve(coerce(t, "u0")) for t in u0s])
    return rows


def expectation_support(sample: BodySample, u):
    """Support function of the selection expectation ``E X``."""
    u = _sample_dir(sample, u)
    return total(w * b.support(u) for b, w in zip(sample.bodies, sample.weights))


def _check_alpha(alpha):
    alpha = coerce(alpha, "alpha")
    if not 0 < alpha <= 1:
        raise ValidationError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def slice_support(sample: BodySample, alpha, u):
    """Support function of the section ``{x : (alpha, x) in lift expectation}``."""
    alpha = _check_alpha(alpha)
    return stop_loss_curve(sample, u).infimal_projection(alpha)


def trimmed_region_support(sample: BodySample, alpha, u):
    """Support function of the trimmed region ``alpha^{-1}`` times the alpha-section."""
    alpha = _check_alpha(alpha)
    return stop_loss_curve(sample, u).infimal_projection(alpha) / alpha


def is_outlier(sample: BodySample, alpha, candidate: ConvexBody, directions, tol=1e-12) -> bool:
    directions = list(directions)
    if not directions:
        raise ValidationError("outlier test needs at least one direction")
    if candidate.dim != sample.dim:
        raise ValidationError("candidate and sample dimensions differ")
    return outlier_witness(sample, alpha, candidate, directions, tol) is not None


def outlier_witness(sample: BodySample, alpha, candidate: ConvexBody, directions, tol=1e-12):
    """First direction where ``candidate`` sticks out of the trimmed region, else None."""
    alpha = _check_alpha(alpha)
    for u in directions:
        u = _sample_dir(sample, u)
        if candidate.support(u) > trimmed_region_support(sample, alpha, u) + tol:
            return u
    return None


# --- one-dimensional samples: Lorenz polygons, AVaR, Gini -----------------


@dataclass(frozen=True)
class Polygon2D:
    """Convex polygon, vertices in counterclockwise order, closed implicitly."""

    vertices: tuple

    def support(self, u0, u):
        return max(u0 * x + u * y for x, y in self.vertices)

    def area(self):
        v = self.vertices
        n = len(v)
        twice = total(v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1] for i in range(n))
        return twice / 2

    def is_convex(self, tol: float = COLLINEAR_TOL) -> bool:
        v = self.vertices
        n = len(v)
        if n < 3:
            return True
        for i in range(n):
            a, b, c = v[i - 1], v[i], v[(i + 1) % n]
            if _cross(a, b, c) < -tol:
                return False
        return True


def _cross(a, b, c):
    return (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])


def _merge_collinear(points: list, tol: float) -> list:
    pts = []
    for p in points:
        if pts and p[0] == pts[-1][0] and p[1] == pts[-1][1]:
            continue
        pts.append(p)
    if len(pts) > 1 and pts[-1] == pts[0]:
        pts.pop()
    changed = True
    while changed and len(pts) > 2:
        changed = False
        for i in range(len(pts)):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            e1 = math.hypot(float(b[0] - a[0]), float(b[1] - a[1]))
            e2 = math.hypot(float(c[0] - b[0]), float(c[1] - b[1]))
            if abs(float(_cross(a, b, c))) <= tol * e1 * e2 and i != 0:
                del pts[i]
                changed = True
                break
    return pts


def interval_endpoints_of(sample: BodySample) -> list[tuple]:
    if sample.dim != 1:
        raise ValidationError("expected a one-dimensional sample of intervals")
    return [interval_endpoints(b) for b in sample.bodies]


def polygon_1d(sample: BodySample) -> Polygon2D:
    """Lift expectation of a random interval as an exact polygon.

    The lower chain is the generalized Lorenz curve of the left endpoints
    (sorted ascending), the upper chain the upper Lorenz curve of the right
    endpoints (sorted descending).  Both run from ``(0, 0)`` to abscissa 1.
    """
    ends = interval_endpoints_of(sample)
    w = sample.weights
    lower = sorted(zip((lo for lo, _ in ends), w), key=lambda p: p[0])
    upper = sorted(zip((hi for _, hi in ends), w), key=lambda p: p[0], reverse=True)

    def chain(pairs):
        pts = [(0, 0)]
        acc_w, acc_y = [], []
        for v, wt in pairs:
            acc_w.append(wt)
            acc_y.append(wt * v)
            pts.append((total(acc_w), total(acc_y)))
        return pts

    low, up = chain(lower), chain(upper)
    # abscissa 1 exactly at the right edge, whatever the rounding of the weights
    low[-1] = (1, low[-1][1])
    up[-1] = (1, up[-1][1])
    ccw = low + up[::-1][:-1]
    return Polygon2D(tuple(_merge_collinear(ccw, COLLINEAR_TOL)))


def avar_interval(sample: BodySample, alpha) -> tuple:
    """Rescaled alpha-section ``[lower tail mean of lo, upper tail mean of hi]``."""
    interval_endpoints_of(sample)
    return (
        -trimmed_region_support(sample, alpha, (-1,)),
        trimmed_region_support(sample, alpha, (1,)),
    )


@dataclass(frozen=True)
class GiniArea:
    area: float
    gmd_upper: float


def gini_area(sample: BodySample) -> GiniArea:
    """Area of the lift polygon; ``gmd_upper = 2 * area``.

    For a sample of points ``2 * area`` is the Gini mean difference
    ``E|xi - xi'|``; for intervals it bounds the mean difference of every
    random variable selected from the intervals.
    """
    area = polygon_1d(sample).area()
    return GiniArea(area, 2 * area)


def hoeffding_support(sample: BodySample, n: int, u):
    """``E max`` of ``n`` i.i.d. copies of ``h_X(u)``: support of ``E conv(X_1..X_n)``."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    values, probs = stop_loss_curve(sample, u).values
    terms, cdf_prev, acc = [], 0, []
    for j, (v, p) in enumerate(zip(values, probs)):
        acc.append(p)
        cdf = 1 if j == len(values) - 1 else total(acc)
        terms.append(v * (cdf**n - cdf_prev**n))
        cdf_prev = cdf
    return total(terms)


def hoeffding_sequence(sample: BodySample, n_max: int, u) -> list:
    return [hoeffding_support(sample, n, u) for n in range(1, n_max + 1)]
