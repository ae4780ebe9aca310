"""Convex bodies with closed-form support functions.

Every body is an immutable value object.  Higher layers only ever call
:func:`support` and :func:`support_point`, so a body type is fully described
by those two queries.  Directions need not be unit vectors.

Coordinates keep their numeric type: bodies built from ``int`` or
``fractions.Fraction`` coordinates give exact support values (except for
balls and ellipsoids, which need a square root).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple, Union

import numpy as np

from ._num import coerce, dot, norm, total
from .errors import ValidationError

Vector = Tuple  # tuple of int | float | Fraction

PSD_TOL = 1e-9
TIE_RTOL = 1e-12


def as_vector(u, dim: int | None = None, what: str = "direction") -> Vector:
    """Coerce a scalar, sequence or array to a coordinate tuple."""
    if isinstance(u, np.ndarray):
        u = u.tolist()
    if isinstance(u, (int, float, Fraction, np.floating, np.integer, str)):
        u = (u,)
    try:
        coords = tuple(coerce(c, what) for c in u)
    except TypeError as exc:
        raise ValidationError(f"{what} must be a vector, got {u!r}") from exc
    if not coords:
        raise ValidationError(f"{what} must have dimension >= 1")
    if dim is not None and len(coords) != dim:
        raise ValidationError(f"{what} has dimension {len(coords)}, expected {dim}")
    return coords


def _lexmin(points):
    return min(points, key=lambda p: tuple(float(c) for c in p))


def _near_max(values, best) -> list[int]:
    slack = TIE_RTOL * max(1.0, abs(float(best)))
    return [i for i, v in enumerate(values) if float(best - v) <= slack]


@dataclass(frozen=True)
class Singleton:
    point: Vector

    def __post_init__(self):
        object.__setattr__(self, "point", as_vector(self.point, what="point"))

    @property
    def dim(self) -> int:
        return len(self.point)

    def support(self, u):
        return dot(self.point, u)

    def support_point(self, u) -> Vector:
        return self.point


@dataclass(frozen=True)
class Segment:
    a: Vector
    b: Vector

    def __post_init__(self):
        a = as_vector(self.a, what="segment end")
        b = as_vector(self.b, dim=len(a), what="segment end")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return len(self.a)

    def support(self, u):
        return max(dot(self.a, u), dot(self.b, u))

    def support_point(self, u) -> Vector:
        ha, hb = dot(self.a, u), dot(self.b, u)
        idx = _near_max([ha, hb], max(ha, hb))
        return _lexmin([(self.a, self.b)[i] for i in idx])


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` on the real line (a 1-d body)."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = coerce(self.lo, "lo"), coerce(self.hi, "hi")
        if lo > hi:
            raise ValidationError(f"interval with lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return 1

    def support(self, u):
        (t,) = u
        return self.hi * t if t >= 0 else self.lo * t

    def support_point(self, u) -> Vector:
        (t,) = u
        return (self.hi,) if t > 0 else (self.lo,)


@dataclass(frozen=True)
class Polytope:
    """Convex hull of a finite vertex list (V-representation only)."""

    vertices: Tuple[Vector, ...]

    def __post_init__(self):
        verts = tuple(as_vector(v, what="vertex") for v in self.vertices)
        if not verts:
            raise ValidationError("polytope needs at least one vertex")
        d = len(verts[0])
        if any(len(v) != d for v in verts):
            raise ValidationError("polytope vertices have mixed dimensions")
        object.__setattr__(self, "vertices", verts)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def support(self, u):
        return max(dot(v, u) for v in self.vertices)

    def support_point(self, u) -> Vector:
        values = [dot(v, u) for v in self.vertices]
        idx = _near_max(values, max(values))
        return _lexmin([self.vertices[i] for i in idx])


@dataclass(frozen=True)
class Ball:
    center: Vector
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, what="center"))
        r = coerce(self.radius, "radius")
        if r < 0:
            raise ValidationError(f"negative radius {r}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return len(self.center)

    def support(self, u):
        return dot(self.center, u) + self.radius * norm(u)

    def support_point(self, u) -> Vector:
        n = norm(u)
        return tuple(c + self.radius * x / n for c, x in zip(self.center, u))


@dataclass(frozen=True)
class Ellipsoid:
    """``{x : <Q^{-1} x, x> <= 1}`` with support ``sqrt(<Qu, u>)``; Q may be singular."""

    shape: Tuple[Vector, ...]

    def __post_init__(self):
        rows = tuple(as_vector(r, what="shape row") for r in self.shape)
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise ValidationError("ellipsoid shape must be a square matrix")
        q = np.array([[float(c) for c in r] for r in rows])
        if not np.allclose(q, q.T, rtol=0.0, atol=PSD_TOL * max(1.0, np.abs(q).max())):
            raise ValidationError("ellipsoid shape matrix is not symmetric")
        if np.linalg.eigvalsh(q).min() < -PSD_TOL:
            raise ValidationError("ellipsoid shape matrix is not positive semidefinite")
        object.__setattr__(self, "shape", rows)

    @property
    def dim(self) -> int:
        return len(self.shape)

    def _qu(self, u):
        return tuple(dot(r, u) for r in self.shape)

    def support(self, u):
        return math.sqrt(max(0.0, float(dot(self._qu(u), u))))

    def support_point(self, u) -> Vector:
        qu = self._qu(u)
        quad = float(dot(qu, u))
        if quad <= 0:
            raise ValidationError("degenerate direction: <Qu,u> = 0 for this ellipsoid")
        s = math.sqrt(quad)
        return tuple(c / s for c in qu)


@dataclass(frozen=True)
class ScaledL1Ball:
    """Unit l1-ball stretched by ``scales`` along the coordinate axes."""

    scales: Vector

    def __post_init__(self):
        s = as_vector(self.scales, what="scales")
        if any(c <= 0 for c in s):
            raise ValidationError("l1-ball scales must be positive")
        object.__setattr__(self, "scales", s)

    @property
    def dim(self) -> int:
        return len(self.scales)

    def support(self, u):
        return max(abs(s * x) for s, x in zip(self.scales, u))

    def support_point(self, u) -> Vector:
        values = [abs(s * x) for s, x in zip(self.scales, u)]
        idx = _near_max(values, max(values))
        zero = 0 * self.scales[0]
        candidates = []
        for i in idx:
            p = [zero] * self.dim
            p[i] = self.scales[i] if u[i] >= 0 else -self.scales[i]
            candidates.append(tuple(p))
        return _lexmin(candidates)


@dataclass(frozen=True)
class MinkowskiCombo:
    """Nonnegative Minkowski combination ``sum_k scale_k * body_k``."""

    terms: Tuple[Tuple[float, "ConvexBody"], ...]

    def __post_init__(self):
        terms = []
        for scale, body in self.terms:
            scale = coerce(scale, "scale")
            if scale < 0:
                raise ValidationError(f"negative Minkowski scale {scale}")
            if not isinstance(body, BODY_TYPES):
                raise ValidationError(f"not a convex body: {body!r}")
            terms.append((scale, body))
        if not terms:
            raise ValidationError("Minkowski combination needs at least one term")
        if len({b.dim for _, b in terms}) != 1:
            raise ValidationError("Minkowski terms have mixed dimensions")
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def dim(self) -> int:
        return self.terms[0][1].dim

    def support(self, u):
        return total(s * b.support(u) for s, b in self.terms)

    def support_point(self, u) -> Vector:
        point = None
        for s, b in self.terms:
            if s == 0:
                continue
            p = tuple(s * c for c in b.support_point(u))
            point = p if point is None else tuple(x + y for x, y in zip(point, p))
        if point is None:
            return tuple(0 * c for c in u)
        return point


ConvexBody = Union[
    Singleton, Segment, Interval, Polytope, Ball, Ellipsoid, ScaledL1Ball, MinkowskiCombo
]
BODY_TYPES = (Singleton, Segment, Interval, Polytope, Ball, Ellipsoid, ScaledL1Ball, MinkowskiCombo)


def support(body: ConvexBody, u) -> float:
    """Support function ``h_body(u) = sup{<x, u> : x in body}``."""
    return body.support(as_vector(u, dim=body.dim))


def support_point(body: ConvexBody, u) -> Vector:
    """A maximizer of ``<x, u>`` over the body.

    Ties on a face are broken by returning the lexicographically smallest
    maximizing vertex.
    """
    u = as_vector(u, dim=body.dim)
    if all(c == 0 for c in u):
        raise ValidationError("support point undefined for the zero direction")
    return body.support_point(u)


def minkowski_sum(*bodies: ConvexBody) -> MinkowskiCombo:
    return MinkowskiCombo(tuple((1, b) for b in bodies))


def interval_endpoints(body: ConvexBody) -> tuple:
    """``(lo, hi)`` of a one-dimensional body that is an interval or point."""
    if isinstance(body, Interval):
        return body.lo, body.hi
    if body.dim == 1 and isinstance(body, (Singleton, Segment, Polytope, Ball, MinkowskiCombo)):
        return -body.support((-1,)), body.support((1,))
    raise ValidationError(f"expected a one-dimensional interval body, got {type(body).__name__}")


# --- JSON (one body per line) -------------------------------------------

def body_from_dict(obj: dict) -> ConvexBody:
    try:
        kind = obj["type"]
        if kind == "singleton":
            return Singleton(obj["point"])
        if kind == "segment":
            return Segment(obj["a"], obj["b"])
        if kind == "interval":
            return Interval(obj["lo"], obj["hi"])
        if kind == "polytope":
            return Polytope(obj["vertices"])
        if kind == "ball":
            return Ball(obj["center"], obj["radius"])
        if kind == "ellipsoid":
            return Ellipsoid(obj["shape"])
        if kind == "l1ball":
            return ScaledL1Ball(obj["scales"])
        if kind == "minkowski":
            return MinkowskiCombo(tuple((s, body_from_dict(b)) for s, b in obj["terms"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed body record {obj!r}") from exc
    raise ValidationError(f"unknown body type {obj.get('type')!r}")


def _num_out(x):
    return x if isinstance(x, (int, float)) else str(x)


def body_to_dict(body: ConvexBody) -> dict:
    vec = lambda v: [_num_out(c) for c in v]  # noqa: E731
    if isinstance(body, Singleton):
        return {"type": "singleton", "point": vec(body.point)}
    if isinstance(body, Segment):
        return {"type": "segment", "a": vec(body.a), "b": vec(body.b)}
    if isinstance(body, Interval):
        return {"type": "interval", "lo": _num_out(body.lo), "hi": _num_out(body.hi)}
    if isinstance(body, Polytope):
        return {"type": "polytope", "vertices": [vec(v) for v in body.vertices]}
    if isinstance(body, Ball):
        return {"type": "ball", "center": vec(body.center), "radius": _num_out(body.radius)}
    if isinstance(body, Ellipsoid):
        return {"type": "ellipsoid", "shape": [vec(r) for r in body.shape]}
    if isinstance(body, ScaledL1Ball):
        return {"type": "l1ball", "scales": vec(body.scales)}
    return {
        "type": "minkowski",
        "terms": [[_num_out(s), body_to_dict(b)] for s, b in body.terms],
    }
