"""Recovering a discrete random convex body from the laws of ``h_X(u)``.

The lift expectation only reveals, for each direction separately, the
distribution of the support value.  This module builds that per-direction
information (a :class:`MarginalOracle`) and tries to undo it:

* :func:`reconstruct_distinct_probs` follows atoms across directions by
  their probabilities, which works when realizations have pairwise distinct
  probabilities;
* :func:`reconstruct_continuation` follows branches around the circle by
  continuity (d=2, strictly convex realizations with distinct support
  points);
* :func:`reconstruct_comonotonic` builds the quantile coupling, which is
  the right answer when the signed support values are comonotonic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._num import coerce, is_exact, total
from .bodies import as_vector
from .errors import ReconstructionError, ValidationError
from .lift import BodySample, canonical_atoms

MERGE_TOL = 1e-9
SLOPE_TOL = 1e-7


@dataclass(frozen=True)
class FiniteSupportDist:
    """Law of a real random variable with finitely many values, sorted and merged."""

    atoms: tuple  # ((value, prob), ...)

    def __post_init__(self):
        atoms = tuple((coerce(v, "value"), coerce(p, "prob")) for v, p in self.atoms)
        if not atoms:
            raise ValidationError("a distribution needs at least one atom")
        if any(p <= 0 for _, p in atoms):
            raise ValidationError("atom probabilities must be positive")
        if any(b[0] <= a[0] for a, b in zip(atoms, atoms[1:])):
            raise ValidationError("atom values must be strictly increasing")
        if abs(float(total(p for _, p in atoms)) - 1.0) > MERGE_TOL:
            raise ValidationError("atom probabilities do not sum to 1")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_values(cls, values, probs, tol: float = MERGE_TOL) -> "FiniteSupportDist":
        vs, ps = canonical_atoms(list(values), list(probs), tol)
        return cls(tuple(zip(vs, ps)))

    @property
    def values(self) -> tuple:
        return tuple(v for v, _ in self.atoms)

    @property
    def probs(self) -> tuple:
        return tuple(p for _, p in self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class MarginalOracle:
    directions: tuple
    dists: tuple

    def __post_init__(self):
        dirs = tuple(as_vector(u) for u in self.directions)
        if not dirs:
            raise ValidationError("an oracle needs at least one direction")
        if len({len(u) for u in dirs}) != 1:
            raise ValidationError("oracle directions have mixed dimensions")
        if len(dirs) != len(self.dists):
            raise ValidationError("one distribution per direction is required")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "dists", tuple(self.dists))

    @property
    def dim(self) -> int:
        return len(self.directions[0])

    def angles(self) -> list[float]:
        if self.dim == 1:
            return [0.0 if u[0] > 0 else math.pi for u in self.directions]
        if self.dim == 2:
            return [math.atan2(float(u[1]), float(u[0])) % (2 * math.pi) for u in self.directions]
        raise ValidationError("angles are only defined for d <= 2")


@dataclass(frozen=True)
class ReconstructionResult:
    """Recovered realizations: support values along the oracle path and probabilities."""

    realizations: tuple  # ((support_values, prob), ...)
    diagnostics: tuple = ()

    @property
    def probs(self) -> tuple:
        return tuple(p for _, p in self.realizations)

    def as_multiset(self, digits: int = 9) -> list:
        """Order-free canonical form, handy for comparing two results."""
        return sorted(
            (tuple(round(float(v), digits) for v in vals), round(float(p), digits))
            for vals, p in self.realizations
        )


def is_comonotonic_endpoints(pairs: Sequence, weights: Optional[Sequence] = None) -> bool:
    """True iff no two observations ``(lo, hi)`` are discordant."""
    pairs = [(coerce(lo, "lo"), coerce(hi, "hi")) for lo, hi in pairs]
    if any(lo > hi for lo, hi in pairs):
        raise ValidationError("interval with lo > hi")
    if weights is not None:
        if len(weights) != len(pairs):
            raise ValidationError("one weight per observation is required")
        if any(coerce(w, "weight") <= 0 for w in weights):
            raise ValidationError("weights must be positive")
    return is_comonotonic_rows(pairs)


def is_comonotonic_rows(rows: Sequence[Sequence], signs: Optional[Sequence] = None) -> bool:
    """True iff the rows (observations) admit one ordering that sorts every signed column.

    Lexicographic order extends the componentwise order, so it suffices to
    sort rows lexicographically and check each column is nondecreasing.
    """
    if not rows:
        return True
    width = len(rows[0])
    if signs is None:
        signs = (1,) * width
    if len(signs) != width or any(s not in (1, -1) for s in signs):
        raise ValidationError("signs must be a +1/-1 vector with one entry per column")
    signed = sorted(tuple(s * x for s, x in zip(signs, r)) for r in rows)
    return all(
        signed[i][c] <= signed[i + 1][c] for i in range(len(signed) - 1) for c in range(width)
    )


def marginal_oracle(sample: BodySample, path: Sequence, tol: float = MERGE_TOL) -> MarginalOracle:
    """Per-direction laws of ``h_X(u)`` along ``path``; what the lift expectation reveals."""
    path = [as_vector(u, dim=sample.dim) for u in path]
    dists = tuple(FiniteSupportDist.from_values(sample.supports(u), sample.weights, tol) for u in path)
    return MarginalOracle(tuple(path), dists)


def _prob_tol(oracle: MarginalOracle, tol: float):
    if all(is_exact(p) for d in oracle.dists for p in d.probs):
        return 0
    return tol


def _partitions(probs: Sequence, targets: Sequence, ptol, limit: int = 4096):
    """Assignments realization -> atom whose probabilities add up to each atom's."""
    n, m = len(probs), len(targets)
    order = sorted(range(n), key=lambda i: -probs[i])
    slack = ptol * (n + 1)
    remaining = list(targets)
    assign = [None] * n
    found = []

    def rec(pos):
        if len(found) >= limit:
            return
        if pos == n:
            if all(abs(r) <= slack for r in remaining):
                found.append(tuple(assign))
            return
        i = order[pos]
        for a in range(m):
            if remaining[a] - probs[i] >= -slack:
                remaining[a] -= probs[i]
                assign[i] = a
                rec(pos + 1)
                remaining[a] += probs[i]
        assign[i] = None

    rec(0)
    return found


def reconstruct_distinct_probs(oracle: MarginalOracle, tol: float = MERGE_TOL) -> ReconstructionResult:
    """Trace realizations through the oracle using their (distinct) probabilities.

    The realization count is the largest atom count over the path.  At a
    direction with that many atoms and pairwise distinct probabilities every
    atom is one realization.  Elsewhere each atom collects the realizations
    whose probabilities add up to its own; when several groupings fit, the
    one closest to the previous direction's values wins.
    """
    ptol = _prob_tol(oracle, tol)
    dists = oracle.dists
    m = len(dists)
    n_real = max(len(d) for d in dists)
    ref = None
    for k, d in enumerate(dists):
        if len(d) == n_real:
            ps = sorted(d.probs)
            if all(b - a > ptol for a, b in zip(ps, ps[1:])):
                ref = k
                break
    if ref is None:
        raise ReconstructionError("probabilities not separating, use continuation")

    probs = list(dists[ref].probs)
    values = [[None] * m for _ in range(n_real)]
    diagnostics = []
    prev = None
    for k in [(ref + j) % m for j in range(m)]:
        atoms = dists[k].atoms
        target = [q for _, q in atoms]
        if abs(float(total(target)) - float(total(probs))) > max(ptol, 1e-12) * (n_real + 1):
            raise ReconstructionError(f"oracle inconsistent at direction {k}: total probability differs")
        if len(atoms) == n_real:
            choice = []
            for i, p in enumerate(probs):
                hits = [a for a, q in enumerate(target) if abs(q - p) <= ptol]
                if len(hits) != 1:
                    raise ReconstructionError(
                        f"oracle inconsistent at direction {k}: probability {p} has {len(hits)} matches"
                    )
                choice.append(hits[0])
            if len(set(choice)) != n_real:
                raise ReconstructionError(f"oracle inconsistent at direction {k}")
        else:
            options = _partitions(probs, target, ptol)
            if not options:
                raise ReconstructionError(
                    f"oracle inconsistent at direction {k}: atom probabilities do not split"
                )
            choice = options[0]
            if len(options) > 1:
                if prev is None:
                    raise ReconstructionError(f"ambiguous grouping at direction {k}")

                def cost(opt):
                    return sum(float(atoms[a][0] - values[i][prev]) ** 2 for i, a in enumerate(opt))

                choice = min(options, key=cost)
                diagnostics.append(
                    f"direction {k}: {len(options)} groupings fit the probabilities; "
                    "picked the one continuing the previous direction"
                )
        for i, a in enumerate(choice):
            values[i][k] = atoms[a][0]
        prev = k

    result = ReconstructionResult(
        tuple((tuple(values[i]), probs[i]) for i in range(n_real)), tuple(diagnostics)
    )
    _require_support_functions(oracle, result)
    return result


def _circle_step(oracle: MarginalOracle) -> float:
    if oracle.dim != 2:
        raise ValidationError("continuation needs a two-dimensional oracle")
    m = len(oracle.directions)
    if m < 8:
        raise ValidationError("continuation needs a path of at least 8 directions")
    th = oracle.angles()
    step = 2 * math.pi / m
    for k, t in enumerate(th):
        off = (t - th[0] - k * step) % (2 * math.pi)
        if min(off, 2 * math.pi - off) > 1e-9:
            raise ValidationError("continuation needs equally spaced counterclockwise angles")
    return step


def _extrapolate(hist: list) -> float:
    if len(hist) >= 3:
        return 3 * hist[-1] - 3 * hist[-2] + hist[-3]
    if len(hist) == 2:
        return 2 * hist[-1] - hist[-2]
    return hist[-1]


def _backward_slope(hist: list, step: float) -> float:
    if len(hist) >= 3:
        return (3 * hist[-1] - 4 * hist[-2] + hist[-3]) / (2 * step)
    return (hist[-1] - hist[-2]) / step


def _match_branches(pred, probs, atoms, ptol):
    n, na = len(pred), len(atoms)
    vals = [float(v) for v, _ in atoms]
    if na == n:
        cost = np.array([[(p - v) ** 2 for v in vals] for p in pred])
        bad = np.array([[abs(pi - q) > ptol for _, q in atoms] for pi in probs])
        big = 1e6 * (1.0 + cost.max())
        rows, cols = linear_sum_assignment(np.where(bad, cost + big, cost))
        choice = [0] * n
        for r, c in zip(rows, cols):
            if bad[r, c]:
                return None
            choice[r] = int(c)
        return choice

    def feasible(choice):
        for a in range(na):
            got = total(probs[i] for i in range(n) if choice[i] == a)
            if got == 0 or abs(got - atoms[a][1]) > ptol * (n + 1):
                return False
        return True

    greedy = [min(range(na), key=lambda a: abs(pred[i] - vals[a])) for i in range(n)]
    if feasible(greedy):
        return greedy
    if na**n > 200_000:
        return None
    best, best_cost = None, math.inf
    for choice in itertools.product(range(na), repeat=n):
        c = sum((pred[i] - vals[a]) ** 2 for i, a in enumerate(choice))
        if c < best_cost and feasible(choice):
            best, best_cost = list(choice), c
    return best


def reconstruct_continuation(
    oracle: MarginalOracle, tol: float = MERGE_TOL, slope_tol: float = SLOPE_TOL
) -> ReconstructionResult:
    """Follow support-function branches around the circle.

    Branches start at the direction where the atom values are most spread
    out and are continued by quadratic extrapolation from the last three
    angles.  Where two branches meet in one atom, their one-sided angular
    derivatives must differ; equal derivatives mean two realizations share a
    support point there, which this method cannot resolve.
    """
    step = _circle_step(oracle)
    ptol = _prob_tol(oracle, tol)
    dists = oracle.dists
    m = len(dists)
    n_real = max(len(d) for d in dists)

    def spread(d):
        v = d.values
        return min((float(b - a) for a, b in zip(v, v[1:])), default=math.inf)

    start = max((k for k in range(m) if len(dists[k]) == n_real), key=lambda k: (spread(dists[k]), -k))
    probs = list(dists[start].probs)
    start_vals = [float(v) for v in dists[start].values]
    hist = [[v] for v in start_vals]
    values = [[None] * m for _ in range(n_real)]
    for i, (v, _) in enumerate(dists[start].atoms):
        values[i][start] = v
    diagnostics = []
    last_order = sorted(range(n_real), key=lambda i: start_vals[i])

    for j in range(1, m + 1):
        k = (start + j) % m
        atoms = dists[k].atoms
        pred = [_extrapolate(h) for h in hist]
        choice = _match_branches(pred, probs, atoms, ptol)
        if choice is None:
            raise ReconstructionError(
                f"unresolvable crossing at angle index {k}: no branch assignment fits the atoms"
            )
        if j == m:
            if choice != list(range(n_real)):
                raise ReconstructionError("branches failed to close around the circle")
            break
        groups: dict = {}
        for i, a in enumerate(choice):
            groups.setdefault(a, []).append(i)
        for a, members in groups.items():
            if len(members) >= 3:
                raise ReconstructionError(
                    f"unresolvable crossing at angle index {k}: branches {members} meet in one value"
                )
            if len(members) == 2:
                i, i2 = members
                shared = float(atoms[a][0])
                s1 = _backward_slope(hist[i] + [shared], step)
                s2 = _backward_slope(hist[i2] + [shared], step)
                if abs(s1 - s2) < slope_tol:
                    raise ReconstructionError(
                        f"gradient tie at angle index {k} between branches {i} and {i2}: "
                        "realizations may share a support point"
                    )
                diagnostics.append(
                    f"crossing at angle index {k} between branches {i} and {i2} "
                    f"(slopes {s1:.6g} vs {s2:.6g})"
                )
        for i, a in enumerate(choice):
            v = atoms[a][0]
            values[i][k] = v
            hist[i].append(float(v))
            if len(hist[i]) > 3:
                del hist[i][0]
        order = sorted(range(n_real), key=lambda i: (hist[i][-1], i))
        if order != last_order:
            strict = [
                (i, i2)
                for i, i2 in itertools.combinations(range(n_real), 2)
                if (hist[i][-1] - hist[i2][-1]) * (hist[i][-2] - hist[i2][-2]) < 0
            ]
            for i, i2 in strict:
                diagnostics.append(f"branches {i} and {i2} swap order between angle indices {(k - 1) % m} and {k}")
        last_order = order

    result = ReconstructionResult(
        tuple((tuple(values[i]), probs[i]) for i in range(n_real)), tuple(diagnostics)
    )
    _require_support_functions(oracle, result)
    return result


def reconstruct_comonotonic(
    oracle: MarginalOracle, signs: Optional[Sequence] = None, tol: float = MERGE_TOL
) -> ReconstructionResult:
    """Quantile coupling of the signed marginals ``g(u) h_X(u)``.

    If the vector of signed support values is comonotonic, this coupling is
    the only one with the given marginals, so it is the law of X.  ``signs``
    defaults to +1 in every direction.
    """
    ptol = _prob_tol(oracle, tol)
    m = len(oracle.dists)
    if signs is None:
        signs = (1,) * m
    if len(signs) != m or any(s not in (1, -1) for s in signs):
        raise ValidationError("signs must be a +1/-1 vector with one entry per direction")

    cdfs = []
    for g, d in zip(signs, oracle.dists):
        atoms = sorted(((g * v, p) for v, p in d.atoms), key=lambda a: a[0])
        acc, levels = [], []
        for _, p in atoms:
            acc.append(p)
            levels.append(total(acc))
        levels[-1] = 1
        cdfs.append((atoms, levels))
    all_levels = sorted({lv for _, levels in cdfs for lv in levels})
    cuts = []
    for lv in all_levels:
        if not cuts or lv - cuts[-1] > ptol:
            cuts.append(lv)
    cuts[-1] = 1

    realizations = []
    lo = 0
    for hi in cuts:
        row = []
        for g, (atoms, levels) in zip(signs, cdfs):
            idx = next(i for i, lv in enumerate(levels) if lv >= hi - ptol)
            row.append(g * atoms[idx][0])
        realizations.append((tuple(row), hi - lo))
        lo = hi
    result = ReconstructionResult(tuple(realizations))
    _require_support_functions(oracle, result)
    return result


def reconstruct(oracle: MarginalOracle, mode: str = "distinct", **kw) -> ReconstructionResult:
    if mode == "distinct":
        return reconstruct_distinct_probs(oracle, **kw)
    if mode == "continuation":
        return reconstruct_continuation(oracle, **kw)
    if mode == "comonotonic":
        return reconstruct_comonotonic(oracle, **kw)
    raise ValidationError(f"unknown reconstruction mode {mode!r}")


# --- sanity check on recovered support values ------------------------------


def subadditivity_violations(directions, values, rel_tol: float = 1e-8, max_pairs: int = 5000) -> list:
    """Direction pairs where the recovered values contradict sublinearity.

    For a pair ``(u_i, u_j)`` whose sum is zero or parallel to another path
    direction ``u_k`` the homogeneous extension must satisfy
    ``h(u_i + u_j) <= h(u_i) + h(u_j)``.  Returns ``(i, j, k_or_None, excess)``.
    """
    dirs = np.array([[float(c) for c in u] for u in directions])
    norms = np.linalg.norm(dirs, axis=1)
    unit = dirs / norms[:, None]
    h = np.array([float(v) for v in values]) / norms
    m = len(h)
    scale = max(1.0, float(np.abs(h).max()))
    if m * (m - 1) // 2 <= max_pairs:
        pairs = np.array(list(itertools.combinations(range(m), 2)), dtype=int).reshape(-1, 2)
    else:
        rng = np.random.default_rng(0)
        pairs = rng.integers(0, m, size=(max_pairs, 2))
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    out = []
    for chunk in np.array_split(pairs, max(1, len(pairs) // 500)):
        w = unit[chunk[:, 0]] + unit[chunk[:, 1]]
        wn = np.linalg.norm(w, axis=1)
        rhs = h[chunk[:, 0]] + h[chunk[:, 1]]
        zero = wn < 1e-12
        safe = np.where(zero, 1.0, wn)
        cos = (w / safe[:, None]) @ unit.T
        k = cos.argmax(axis=1)
        parallel = cos[np.arange(len(k)), k] >= 1 - 1e-14
        lhs = np.where(zero, 0.0, wn * h[k])
        excess = lhs - rhs
        bad = (zero | parallel) & (excess > rel_tol * scale)
        for r in np.nonzero(bad)[0]:
            out.append((int(chunk[r, 0]), int(chunk[r, 1]), None if zero[r] else int(k[r]), float(excess[r])))
    return out


def _require_support_functions(oracle: MarginalOracle, result: ReconstructionResult):
    probs = [p for _, p in result.realizations]
    if abs(float(total(probs)) - 1.0) > MERGE_TOL:
        raise ReconstructionError("recovered probabilities do not sum to 1")
    for idx, (vals, _) in enumerate(result.realizations):
        bad = subadditivity_violations(oracle.directions, vals)
        if bad:
            i, j, _, excess = bad[0]
            raise ReconstructionError(
                f"realization {idx} is not a support function: directions {i} and {j} "
                f"violate subadditivity by {excess:.3g}"
            )
