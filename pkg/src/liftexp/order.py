"""Orderings of random convex bodies through their lift expectations.

Inclusion of lift expectations is the directionwise increasing convex
order of the support values.  For empirical samples both stop-loss curves
are piecewise linear, so dominance is decided exactly at the union of
their breakpoints plus a comparison of the asymptotes (the means).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._num import coerce
from .bodies import MinkowskiCombo, as_vector
from .errors import ValidationError
from .lift import BodySample, canonical_atoms, lift_support, stop_loss_curve

EXACT_TOL = 1e-12


@dataclass(frozen=True)
class DirectionGrid:
    """Deterministic finite set of directions.

    ``angles``: ``count`` equally spaced directions ``(cos, sin)`` on the
    circle (d=2), or their first coordinates ``(cos,)`` when d=1.
    ``seeded``: ``count`` pseudo-uniform points on the sphere from a
    fixed-seed generator (any d).
    """

    dim: int
    kind: str
    count: int
    seed: Optional[int] = None
    vectors: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError("a direction grid needs at least one direction")
        if self.kind == "angles":
            if self.dim not in (1, 2):
                raise ValidationError("angle grids exist only for d=1 and d=2")
            th = [2 * math.pi * k / self.count for k in range(self.count)]
            if self.dim == 2:
                vecs = tuple((math.cos(t), math.sin(t)) for t in th)
            else:
                vecs = tuple((math.cos(t),) for t in th)
        elif self.kind == "seeded":
            rng = np.random.default_rng(self.seed)
            raw = rng.standard_normal((self.count, self.dim))
            raw /= np.linalg.norm(raw, axis=1, keepdims=True)
            vecs = tuple(tuple(float(c) for c in row) for row in raw)
        else:
            raise ValidationError(f"unknown grid kind {self.kind!r}")
        if any(all(c == 0 for c in v) for v in vecs):
            raise ValidationError("grid produced a zero direction")
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def angles(cls, count: int, dim: int = 2) -> "DirectionGrid":
        return cls(dim, "angles", count)

    @classmethod
    def seeded(cls, dim: int, count: int, seed: int = 0) -> "DirectionGrid":
        return cls(dim, "seeded", count, seed)

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)


def _check_dims(a: BodySample, b: BodySample):
    if a.dim != b.dim:
        raise ValidationError(f"samples have dimensions {a.dim} and {b.dim}")


def icx_witness(a: BodySample, b: BodySample, u, tol: float = EXACT_TOL):
    """A ``t`` with ``L_a(t) > L_b(t) + tol``; ``inf`` if only the asymptote fails; None if dominated."""
    _check_dims(a, b)
    la, lb = stop_loss_curve(a, u), stop_loss_curve(b, u)
    for t in sorted(set(la.breakpoints) | set(lb.breakpoints)):
        if la(t) > lb(t) + tol:
            return t
    if la.mean > lb.mean + tol:
        return math.inf
    return None


def icx_dominates(a: BodySample, b: BodySample, u, tol: float = EXACT_TOL) -> bool:
    """True iff ``h_a(u)`` is below ``h_b(u)`` in the increasing convex order."""
    return icx_witness(a, b, u, tol) is None


def _grid_vectors(grid, dim: int):
    vecs = list(grid)
    for v in vecs:
        if len(v) != dim:
            raise ValidationError(f"grid direction {v} does not match dimension {dim}")
    return vecs


def inclusion_witness(a: BodySample, b: BodySample, grid, tol: float = EXACT_TOL):
    """First ``(u, t)`` on the grid violating lift inclusion of ``a`` in ``b``, else None."""
    _check_dims(a, b)
    for u in _grid_vectors(grid, a.dim):
        t = icx_witness(a, b, u, tol)
        if t is not None:
            return u, t
    return None


def lift_included(a: BodySample, b: BodySample, grid, tol: float = EXACT_TOL) -> bool:
    return inclusion_witness(a, b, grid, tol) is None


def mix_samples(a: BodySample, b: BodySample, t) -> BodySample:
    """Coupled mixture ``t X + (1 - t) Y`` over the common sample points."""
    t = coerce(t, "t")
    if not 0 <= t <= 1:
        raise ValidationError(f"t must lie in [0, 1], got {t}")
    _check_dims(a, b)
    if len(a) != len(b):
        raise ValidationError("coupled samples must have the same length")
    if any(abs(wa - wb) > EXACT_TOL for wa, wb in zip(a.weights, b.weights)):
        raise ValidationError("coupled samples must carry identical weights")
    bodies = tuple(MinkowskiCombo(((t, x), (1 - t, y))) for x, y in zip(a.bodies, b.bodies))
    return BodySample(bodies, a.weights)


def convexity_gap(a: BodySample, b: BodySample, t, u0, u):
    """``t L_a + (1-t) L_b - L_mix`` at ``(u0, u)``; nonnegative by convexity."""
    mixed = mix_samples(a, b, t)
    t = coerce(t, "t")
    return t * lift_support(a, u0, u) + (1 - t) * lift_support(b, u0, u) - lift_support(mixed, u0, u)


def same_lift(a: BodySample, b: BodySample, grid, tol: float = 1e-9) -> bool:
    """Compare canonical stop-loss curves direction by direction."""
    return same_lift_witness(a, b, grid, tol) is None


def same_lift_witness(a: BodySample, b: BodySample, grid, tol: float = 1e-9):
    _check_dims(a, b)
    for u in _grid_vectors(grid, a.dim):
        u = as_vector(u)
        va, wa = canonical_atoms(a.supports(u), a.weights, tol)
        vb, wb = canonical_atoms(b.supports(u), b.weights, tol)
        if len(va) != len(vb):
            return u
        for x, y in zip(va, vb):
            if abs(x - y) > tol * max(1.0, abs(float(x))):
                return u
        if any(abs(x - y) > tol for x, y in zip(wa, wb)):
            return u
    return None
