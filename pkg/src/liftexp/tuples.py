"""Lift expectations of n-tuples of random convex bodies, zonoids and lift zonoids.

A tuple lift expectation lives in ``R^{nd+1}``; it is only ever evaluated
through its support function, never built as a polytope.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from ._num import coerce, dot, positive_part, total
from .bodies import BODY_TYPES, Segment, as_vector
from .errors import ValidationError
from .lift import WEIGHT_TOL, BodySample, StopLossCurve, interval_endpoints_of

DISTINGUISH_TOL = 1e-9


@dataclass(frozen=True)
class CoupledTupleSample:
    """Observations ``(X_1, ..., X_n)`` drawn jointly, with probabilities."""

    observations: tuple
    weights: tuple

    def __post_init__(self):
        obs = tuple(tuple(o) for o in self.observations)
        if not obs:
            raise ValidationError("a tuple sample needs at least one observation")
        n = len(obs[0])
        if n == 0 or any(len(o) != n for o in obs):
            raise ValidationError("every observation must have the same number of slots")
        for o in obs:
            for b in o:
                if not isinstance(b, BODY_TYPES):
                    raise ValidationError(f"not a convex body: {b!r}")
        for j in range(n):
            if len({o[j].dim for o in obs}) != 1:
                raise ValidationError(f"slot {j} has mixed dimensions")
        # reuse the weight checks of BodySample
        BodySample(tuple(o[0] for o in obs), self.weights)
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "weights", tuple(coerce(w) for w in self.weights))

    @classmethod
    def self_tuple(cls, sample: BodySample, n: int) -> "CoupledTupleSample":
        """``(X, ..., X)``: the same realization in all ``n`` slots."""
        if n < 1:
            raise ValidationError("n must be at least 1")
        return cls(tuple((b,) * n for b in sample.bodies), sample.weights)

    @property
    def arity(self) -> int:
        return len(self.observations[0])

    @property
    def slot_dims(self) -> tuple:
        return tuple(b.dim for b in self.observations[0])

    def marginal(self, j: int) -> BodySample:
        return BodySample(tuple(o[j] for o in self.observations), self.weights)


def _slot_dirs(sample: CoupledTupleSample, us):
    us = list(us)
    if len(us) != sample.arity:
        raise ValidationError(f"expected {sample.arity} slot directions, got {len(us)}")
    return [as_vector(u, dim=d) for u, d in zip(us, sample.slot_dims)]


def tuple_curve(sample: CoupledTupleSample, us) -> StopLossCurve:
    """Stop-loss curve in ``u0`` of ``sum_j h_{X_j}(u_j)``."""
    us = _slot_dirs(sample, us)
    values = [total(b.support(u) for b, u in zip(o, us)) for o in sample.observations]
    return StopLossCurve.from_values(values, sample.weights)


def tuple_lift_support(sample: CoupledTupleSample, u0, us):
    """``sum_i w_i (u0 + sum_j h_{X_ij}(u_j))_+``."""
    return tuple_curve(sample, us)(coerce(u0, "u0"))


def self_tuple_distinguishes(
    a: BodySample,
    b: BodySample,
    n: int,
    u0s: Sequence,
    slot_directions: Sequence,
    tol: float = DISTINGUISH_TOL,
) -> bool:
    """Probe whether the n-fold self-tuple lift expectations of ``a`` and ``b`` differ.

    The grid is ``u0s`` times the n-fold product of ``slot_directions``.
    Both samples must contain the origin, which is checked as nonnegative
    support on every slot direction.
    """
    return self_tuple_witness(a, b, n, u0s, slot_directions, tol) is not None


def self_tuple_witness(a, b, n, u0s, slot_directions, tol=DISTINGUISH_TOL):
    if a.dim != b.dim:
        raise ValidationError("samples have different dimensions")
    dirs = [as_vector(u, dim=a.dim) for u in slot_directions]
    if not dirs:
        raise ValidationError("need at least one slot direction")
    for name, s in (("first", a), ("second", b)):
        for u in dirs:
            if any(v < 0 for v in s.supports(u)):
                raise ValidationError(
                    f"{name} sample has a body not containing the origin (negative support at {u})"
                )
    ta, tb = CoupledTupleSample.self_tuple(a, n), CoupledTupleSample.self_tuple(b, n)
    u0s = [coerce(t, "u0") for t in u0s]
    for us in itertools.product(dirs, repeat=n):
        ca, cb = tuple_curve(ta, us), tuple_curve(tb, us)
        for t in u0s:
            if abs(ca(t) - cb(t)) > tol:
                return t, us
    return None


# --- zonoids of random vectors --------------------------------------------


@dataclass(frozen=True)
class VectorSample:
    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(as_vector(p, what="point") for p in self.points)
        if not pts:
            raise ValidationError("a vector sample needs at least one point")
        if len({len(p) for p in pts}) != 1:
            raise ValidationError("points have mixed dimensions")
        ws = tuple(coerce(w, "weight") for w in self.weights)
        if len(ws) != len(pts) or any(w <= 0 for w in ws):
            raise ValidationError("need one positive weight per point")
        if abs(float(total(ws)) - 1.0) > WEIGHT_TOL:
            raise ValidationError("weights must sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", ws)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def segments(self) -> BodySample:
        """The random segment ``[0, xi]`` whose selection expectation is the zonoid."""
        zero = tuple(0 for _ in range(self.dim))
        return BodySample(tuple(Segment(zero, p) for p in self.points), self.weights)


def zonoid_support(sample: VectorSample, u):
    """``E <xi, u>_+``."""
    u = as_vector(u, dim=sample.dim)
    return total(w * positive_part(dot(x, u)) for x, w in zip(sample.points, sample.weights))


def lift_zonoid_support(sample: VectorSample, u0, u):
    """``E (u0 + <xi, u>)_+``."""
    u = as_vector(u, dim=sample.dim)
    u0 = coerce(u0, "u0")
    return total(w * positive_part(u0 + dot(x, u)) for x, w in zip(sample.points, sample.weights))


@dataclass(frozen=True)
class CascosProjections:
    """Coordinate-plane projections of the lift of ``([xi, eta], [xi, eta])`` in R^3.

    Each projection is a support evaluator of two arguments; the remaining
    coordinate of the R^3 direction is zero.  ``lift_zonoid`` evaluates the
    lift zonoid of the endpoint vector ``(xi, eta)`` at ``(u0, u, v)``.
    """

    lift_first: Callable  # (u0, u) -> value, plane of coordinates 0 and 1
    lift_second: Callable  # (u0, v), plane of coordinates 0 and 2
    slots: Callable  # (u, v), plane of coordinates 1 and 2
    lift_zonoid: Callable  # (u0, u, v)
    endpoint_zonoid: Callable  # (u, v) -> E <(xi, eta), (u, v)>_+


def cascos_projections(sample: BodySample) -> CascosProjections:
    ends = interval_endpoints_of(sample)
    pair = CoupledTupleSample.self_tuple(sample, 2)
    vec = VectorSample(tuple(ends), sample.weights)
    return CascosProjections(
        lift_first=lambda u0, u: tuple_lift_support(pair, u0, ((u,), (0,))),
        lift_second=lambda u0, v: tuple_lift_support(pair, u0, ((0,), (v,))),
        slots=lambda u, v: tuple_lift_support(pair, 0, ((u,), (v,))),
        lift_zonoid=lambda u0, u, v: lift_zonoid_support(vec, u0, (u, v)),
        endpoint_zonoid=lambda u, v: zonoid_support(vec, (u, v)),
    )


def cascos_gap(sample: BodySample, directions: Sequence) -> list:
    """``slots(u, v) - endpoint_zonoid(u, v)`` over planar directions."""
    proj = cascos_projections(sample)
    return [proj.slots(u, v) - proj.endpoint_zonoid(u, v) for u, v in directions]
