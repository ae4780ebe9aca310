"""Readers and writers: interval CSV, binned income codes, body JSON-lines,
polygon CSV/SVG, marginal-oracle and reconstruction CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from ._num import coerce
from .bodies import Interval, body_from_dict
from .errors import ValidationError
from .identify import FiniteSupportDist, MarginalOracle, ReconstructionResult
from .lift import BodySample, Polygon2D
from .tuples import CoupledTupleSample


def fmt(x) -> str:
    """17 significant digits, locale independent."""
    return format(float(x), ".17g")


def _open_text(src) -> TextIO:
    if isinstance(src, (str, Path)):
        return open(src, newline="", encoding="utf-8")
    return src


def _weights_or_uniform(raw: list, n: int) -> list:
    if all(w is None for w in raw):
        return [1.0 / n] * n
    if any(w is None for w in raw):
        raise ValidationError("weight column is partially filled")
    return raw


# --- interval CSV -----------------------------------------------------------


def read_intervals(src) -> BodySample:
    """``lo,hi[,weight]`` rows; weights are normalized to sum to one."""
    with _open_text(src) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"lo", "hi"} <= set(reader.fieldnames):
            raise ValidationError("interval CSV needs a 'lo,hi' header")
        bodies, weights = [], []
        for line, row in enumerate(reader, start=2):
            try:
                bodies.append(Interval(coerce(row["lo"]), coerce(row["hi"])))
                w = row.get("weight")
                weights.append(coerce(w) if w not in (None, "") else None)
            except ValidationError as exc:
                raise ValidationError(f"line {line}: {exc}") from exc
    if not bodies:
        raise ValidationError("interval CSV has no rows")
    return BodySample.weighted(bodies, _weights_or_uniform(weights, len(bodies)))


def write_intervals(sample: BodySample, out: TextIO) -> None:
    out.write("lo,hi,weight\n")
    for b, w in zip(sample.bodies, sample.weights):
        out.write(f"{fmt(b.lo)},{fmt(b.hi)},{fmt(w)}\n")


# --- binned income codes ----------------------------------------------------


@dataclass(frozen=True)
class BinnedCodeScheme:
    """Code ``i`` stands for ``[a_i, a_i + width]`` with ``a_1 = origin``, ``a_i = b_{i-1} + 1``."""

    width: float = 2499
    origin: float = 0
    max_code: int = 40

    def __post_init__(self):
        if self.width <= 0:
            raise ValidationError("bin width must be positive")
        if self.max_code < 1:
            raise ValidationError("max_code must be at least 1")

    def bounds(self, code: int) -> tuple:
        if not 1 <= code <= self.max_code:
            raise ValidationError(f"code {code} outside 1..{self.max_code}")
        lo = self.origin + (code - 1) * (self.width + 1)
        return lo, lo + self.width


@dataclass
class IngestReport:
    sample: BodySample
    rejected: list = field(default_factory=list)  # (line, raw value, reason)

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


def ingest_codes(src, scheme: BinnedCodeScheme = BinnedCodeScheme()) -> IngestReport:
    """Read a CSV with a ``code`` column into a uniform-weight interval sample."""
    with _open_text(src) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "code" not in reader.fieldnames:
            raise ValidationError("code CSV needs a 'code' column")
        bodies, rejected = [], []
        for line, row in enumerate(reader, start=2):
            raw = (row.get("code") or "").strip()
            try:
                code = int(raw)
            except ValueError:
                rejected.append((line, raw, "not an integer"))
                continue
            if not 1 <= code <= scheme.max_code:
                rejected.append((line, raw, f"outside 1..{scheme.max_code}"))
                continue
            bodies.append(Interval(*scheme.bounds(code)))
    if not bodies:
        raise ValidationError(f"no usable codes ({len(rejected)} rejected)")
    return IngestReport(BodySample.uniform(bodies), rejected)


def synthesize_codes(n: int, seed: int = 0, scheme: BinnedCodeScheme = BinnedCodeScheme()) -> list:
    """Codes of lognormal incomes; incomes past the last bin get ``max_code + 1``."""
    rng = np.random.default_rng(seed)
    incomes = rng.lognormal(mean=10.0, sigma=0.8, size=n)
    step = scheme.width + 1
    codes = np.floor((incomes - scheme.origin) / step).astype(int) + 1
    codes = np.clip(codes, 1, scheme.max_code + 1)
    return [int(c) for c in codes]


def write_codes(codes: Iterable[int], out: TextIO) -> None:
    out.write("code\n")
    for c in codes:
        out.write(f"{c}\n")


# --- body JSON-lines --------------------------------------------------------


def _jsonl_records(src):
    with _open_text(src) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"line {line_no}: invalid JSON ({exc.msg})") from exc


def read_bodies(src) -> BodySample:
    """One body per line, optional positive ``weight`` (normalized afterwards)."""
    bodies, weights = [], []
    for line_no, rec in _jsonl_records(src):
        try:
            bodies.append(body_from_dict(rec))
            weights.append(coerce(rec["weight"], "weight") if "weight" in rec else None)
        except ValidationError as exc:
            raise ValidationError(f"line {line_no}: {exc}") from exc
    if not bodies:
        raise ValidationError("no bodies in input")
    return BodySample.weighted(bodies, _weights_or_uniform(weights, len(bodies)))


def read_tuples(src) -> CoupledTupleSample:
    """Group body lines by their ``obs`` key, in order of first appearance."""
    groups: dict = {}
    weights: dict = {}
    for line_no, rec in _jsonl_records(src):
        if "obs" not in rec:
            raise ValidationError(f"line {line_no}: missing 'obs' key")
        key = rec["obs"]
        try:
            groups.setdefault(key, []).append(body_from_dict(rec))
            if "weight" in rec:
                weights[key] = coerce(rec["weight"], "weight")
        except ValidationError as exc:
            raise ValidationError(f"line {line_no}: {exc}") from exc
    if not groups:
        raise ValidationError("no observations in input")
    keys = list(groups)
    raw = _weights_or_uniform([weights.get(k) for k in keys], len(keys))
    s = math.fsum(float(w) for w in raw)
    return CoupledTupleSample(tuple(tuple(groups[k]) for k in keys), tuple(w / s for w in raw))


def load_sample(path, scheme: BinnedCodeScheme = BinnedCodeScheme()):
    """Dispatch on file type; returns ``(sample, rejected_rows)``."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"no such file: {path}")
    if path.suffix in (".jsonl", ".ndjson", ".json"):
        return read_bodies(path), []
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    header = [h.strip() for h in header]
    if "code" in header:
        report = ingest_codes(path, scheme)
        return report.sample, report.rejected
    return read_intervals(path), []


# --- polygon output ---------------------------------------------------------


def write_polygon_csv(poly: Polygon2D, out: TextIO) -> None:
    out.write("x,y\n")
    for x, y in poly.vertices:
        out.write(f"{fmt(x)},{fmt(y)}\n")


def read_polygon_csv(src) -> Polygon2D:
    with _open_text(src) as fh:
        reader = csv.DictReader(fh)
        return Polygon2D(tuple((float(r["x"]), float(r["y"])) for r in reader))


def polygon_svg(poly: Polygon2D, margin: float = 0.05) -> str:
    """Single closed path; y axis flipped so that larger values point up."""
    xs = [float(x) for x, _ in poly.vertices]
    ys = [float(y) for _, y in poly.vertices]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    w, h = (x1 - x0) or 1.0, (y1 - y0) or 1.0
    mx, my = w * margin, h * margin
    view = f"{fmt(x0 - mx)} {fmt(-(y1 + my))} {fmt(w + 2 * mx)} {fmt(h + 2 * my)}"
    d = " ".join(
        f"{'M' if i == 0 else 'L'}{fmt(x)},{fmt(0.0 - y)}" for i, (x, y) in enumerate(zip(xs, ys))
    )
    stroke = fmt(max(w, h) / 400)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}" '
        'preserveAspectRatio="none">\n'
        f'  <path d="{d} Z" fill="#cfe0f3" stroke="#1f4e79" stroke-width="{stroke}" '
        'vector-effect="non-scaling-stroke"/>\n</svg>\n'
    )


# --- identification CSV -----------------------------------------------------


def write_oracle_csv(oracle: MarginalOracle, out: TextIO) -> None:
    out.write("direction_index,angle,value,prob\n")
    for k, (theta, dist) in enumerate(zip(oracle.angles(), oracle.dists)):
        for v, p in dist.atoms:
            out.write(f"{k},{fmt(theta)},{fmt(v)},{fmt(p)}\n")


def read_oracle_csv(src, dim: int = 2) -> MarginalOracle:
    """Rebuild an oracle; directions are ``(cos, sin)`` of the angle (``(cos,)`` for d=1)."""
    rows: dict = {}
    angles: dict = {}
    with _open_text(src) as fh:
        reader = csv.DictReader(fh)
        need = {"direction_index", "angle", "value", "prob"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise ValidationError("oracle CSV needs direction_index,angle,value,prob")
        for r in reader:
            k = int(r["direction_index"])
            angles[k] = float(r["angle"])
            rows.setdefault(k, []).append((coerce(r["value"]), coerce(r["prob"])))
    if not rows:
        raise ValidationError("oracle CSV has no rows")
    keys = sorted(rows)
    if keys != list(range(len(keys))):
        raise ValidationError("direction indices must be 0..m-1")
    if dim == 1:
        dirs = [(1.0,) if math.cos(angles[k]) > 0 else (-1.0,) for k in keys]
    elif dim == 2:
        dirs = [(math.cos(angles[k]), math.sin(angles[k])) for k in keys]
    else:
        raise ValidationError("oracle CSV supports d=1 and d=2")
    dists = [FiniteSupportDist(tuple(sorted(rows[k]))) for k in keys]
    return MarginalOracle(tuple(dirs), tuple(dists))


def write_reconstruction_csv(result: ReconstructionResult, out: TextIO) -> None:
    out.write("realization_index,direction_index,value,prob\n")
    for i, (vals, p) in enumerate(result.realizations):
        for k, v in enumerate(vals):
            out.write(f"{i},{k},{fmt(v)},{fmt(p)}\n")


def diagnostics_block(result: ReconstructionResult) -> str:
    lines = ["# diagnostics"] + [f"# {d}" for d in result.diagnostics]
    return "\n".join(lines) + "\n"


def to_text(writer, *args) -> str:
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue()
