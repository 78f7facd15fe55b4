"""Closed subsets of the real line and deterministic dense enumerations.

A target set is a finite union of closed pieces (points, intervals, rays,
arithmetic lattices).  Each non-point piece is infinite, and the enumerator
emits a fixed sequence of distinct members whose closure is the whole set.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "Point",
    "Interval",
    "RayUp",
    "RayDown",
    "Lattice",
    "SpectrumSpec",
    "DenseSequence",
    "SpectrumSpecError",
    "CoveringRadius",
    "dense_enumerate",
    "distance_to_set",
    "covering_radius",
    "covering_radius_points",
    "parse_spectrum_spec",
    "render_spectrum_spec",
]


class SpectrumSpecError(ValueError):
    """Raised for invalid piece definitions or DSL text."""


def canonical_key(x: float) -> float:
    """Round to 15 significant digits; used for duplicate detection."""
    return float(f"{x:.15g}") + 0.0  # +0.0 folds -0.0 into 0.0


@dataclass(frozen=True)
class Point:
    a: float

    def distance(self, x):
        return np.abs(np.asarray(x, dtype=float) - self.a)

    def enumerate(self) -> Iterator[float]:
        yield self.a

    def render(self) -> str:
        return f"point {self.a!r}"


def _dyadic_offsets() -> Iterator[float]:
    # (2j-1)/2^level for level = 1, 2, ... and j = 1..2^(level-1), left to right
    level = 1
    while True:
        denom = 2.0**level
        for j in range(1, 2 ** (level - 1) + 1):
            yield (2 * j - 1) / denom
        level += 1


def _cell_offset(t: int) -> float:
    """t-th value of a unit cell's stream: 0, then dyadic midpoints by level."""
    if t == 0:
        return 0.0
    level = t.bit_length()
    j = t - 2 ** (level - 1) + 1
    return (2 * j - 1) / 2.0**level


def _ray_offsets() -> Iterator[float]:
    # Diagonal interleave of the unit cells [k, k+1]: each diagonal first
    # pushes the integer frontier outward, then back-fills dyadic midpoints
    # of the earlier cells.  Dense in [0, inf) and unbounded.
    s = 0
    while True:
        for k in range(s, -1, -1):
            yield k + _cell_offset(s - k)
        s += 1


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise SpectrumSpecError(
                f"interval needs a < b (got {self.a}, {self.b}); use a point for a degenerate interval"
            )

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(np.maximum(self.a - x, x - self.b), 0.0)

    def enumerate(self) -> Iterator[float]:
        yield self.a
        yield self.b
        width = self.b - self.a
        for off in _dyadic_offsets():
            yield self.a + width * off

    def render(self) -> str:
        return f"interval {self.a!r} {self.b!r}"


@dataclass(frozen=True)
class RayUp:
    a: float

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(self.a - x, 0.0)

    def enumerate(self) -> Iterator[float]:
        for off in _ray_offsets():
            yield self.a + off

    def render(self) -> str:
        return f"rayup {self.a!r}"


@dataclass(frozen=True)
class RayDown:
    b: float

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(x - self.b, 0.0)

    def enumerate(self) -> Iterator[float]:
        for off in _ray_offsets():
            yield self.b - off

    def render(self) -> str:
        return f"raydown {self.b!r}"


@dataclass(frozen=True)
class Lattice:
    """Arithmetic progression {c + k*d : k = 0, 1, 2, ...} with d > 0."""

    c: float
    d: float

    def __post_init__(self):
        if not self.d > 0:
            raise SpectrumSpecError(f"lattice step must be positive, got {self.d}")

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        k = np.round((x - self.c) / self.d)
        k = np.maximum(k, 0.0)
        down = np.abs(x - (self.c + k * self.d))
        up = np.abs(x - (self.c + (k + 1) * self.d))
        return np.minimum(down, up)

    def enumerate(self) -> Iterator[float]:
        k = 0
        while True:
            yield self.c + k * self.d
            k += 1

    def render(self) -> str:
        return f"lattice {self.c!r} {self.d!r}"


PIECE_TYPES = (Point, Interval, RayUp, RayDown, Lattice)


@dataclass(frozen=True)
class SpectrumSpec:
    """Finite union of closed pieces on the real line."""

    pieces: tuple

    def __post_init__(self):
        if not self.pieces:
            raise SpectrumSpecError("spectrum needs at least one piece")
        object.__setattr__(self, "pieces", tuple(self.pieces))
        for p in self.pieces:
            if not isinstance(p, PIECE_TYPES):
                raise SpectrumSpecError(f"not a spectrum piece: {p!r}")

    def is_infinite(self) -> bool:
        return any(not isinstance(p, Point) for p in self.pieces)

    def render(self) -> str:
        return "\n".join(p.render() for p in self.pieces) + "\n"


@dataclass(frozen=True)
class DenseSequence:
    """Prefix of the deterministic dense enumeration of a spectrum."""

    spec: SpectrumSpec
    terms: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.terms)

    def array(self) -> np.ndarray:
        return np.asarray(self.terms, dtype=float)


def distance_to_set(spec: SpectrumSpec, x):
    """Exact distance from x (scalar or array) to the union of pieces."""
    x = np.asarray(x, dtype=float)
    d = None
    for p in spec.pieces:
        pd = p.distance(x)
        d = pd if d is None else np.minimum(d, pd)
    return float(d) if d.ndim == 0 else d


def dense_enumerate(spec: SpectrumSpec, n_terms: int) -> DenseSequence:
    """First n_terms of the dense enumeration.

    Pieces are interleaved round-robin; exhausted pieces are skipped, and a
    candidate equal to an earlier term (to 15 significant digits) is dropped
    while its piece advances.
    """
    if n_terms < 1:
        raise ValueError(f"n_terms must be positive, got {n_terms}")
    if not spec.is_infinite():
        raise SpectrumSpecError(
            "finite set: every piece is a single point, no infinite dense sequence exists"
        )
    iters: list[Iterator[float] | None] = [p.enumerate() for p in spec.pieces]
    seen: set[float] = set()
    terms: list[float] = []
    while len(terms) < n_terms:
        for idx, it in enumerate(iters):
            if it is None:
                continue
            while True:
                try:
                    cand = next(it)
                except StopIteration:
                    iters[idx] = None
                    break
                key = canonical_key(cand)
                if key not in seen:
                    seen.add(key)
                    terms.append(cand)
                    break
            if len(terms) == n_terms:
                break
    return DenseSequence(spec=spec, terms=tuple(terms))


@dataclass(frozen=True)
class CoveringRadius:
    value: float
    empty_window: bool


def covering_radius_points(
    spec: SpectrumSpec,
    points,
    window: tuple[float, float],
    grid_step: float,
) -> CoveringRadius:
    """Worst distance from the windowed part of the set to the given points.

    The window is sampled on a uniform grid; samples farther than grid_step
    from the set are discarded.  An empty sample set yields value 0 with the
    empty_window flag raised.
    """
    w_lo, w_hi = window
    if not w_lo < w_hi:
        raise ValueError(f"window needs lo < hi, got {window}")
    if not grid_step > 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise ValueError("need at least one point")
    count = int(round((w_hi - w_lo) / grid_step)) + 1
    if count > 20_000_000:
        raise ValueError(
            f"grid_step {grid_step} yields {count} samples over {window}; refusing"
        )
    xs = np.linspace(w_lo, w_hi, count)
    xs = xs[distance_to_set(spec, xs) <= grid_step]
    if xs.size == 0:
        return CoveringRadius(0.0, True)
    # max over samples of the distance to the nearest point, chunked to
    # bound the broadcast size
    worst = 0.0
    for start in range(0, xs.size, 4096):
        block = xs[start : start + 4096]
        dmin = np.min(np.abs(block[:, None] - points[None, :]), axis=1)
        worst = max(worst, float(np.max(dmin)))
    return CoveringRadius(worst, False)


def covering_radius(
    seq: DenseSequence, window: tuple[float, float], grid_step: float
) -> CoveringRadius:
    return covering_radius_points(seq.spec, seq.array(), window, grid_step)


_PIECE_PARSERS = {
    "point": (1, lambda v: Point(v[0])),
    "interval": (2, lambda v: Interval(v[0], v[1])),
    "rayup": (1, lambda v: RayUp(v[0])),
    "raydown": (1, lambda v: RayDown(v[0])),
    "lattice": (2, lambda v: Lattice(v[0], v[1])),
}


def parse_spectrum_spec(text: str) -> SpectrumSpec:
    """Parse the piece DSL: one piece per line, or '+'/';' separated inline.

    Keywords: point a | interval a b | rayup a | raydown b | lattice c d.
    """
    chunks = re.split(r"[;\n]|\s\+\s", text)
    pieces = []
    for lineno, raw in enumerate(chunks, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0].lower()
        if kind not in _PIECE_PARSERS:
            raise SpectrumSpecError(f"piece {lineno}: unknown kind {fields[0]!r}")
        arity, build = _PIECE_PARSERS[kind]
        if len(fields) != arity + 1:
            raise SpectrumSpecError(
                f"piece {lineno}: {kind} takes {arity} number(s), got {len(fields) - 1}"
            )
        try:
            values = [float(f) for f in fields[1:]]
        except ValueError:
            raise SpectrumSpecError(f"piece {lineno}: non-numeric argument in {raw!r}")
        if not all(math.isfinite(v) for v in values):
            raise SpectrumSpecError(f"piece {lineno}: arguments must be finite")
        pieces.append(build(values))
    if not pieces:
        raise SpectrumSpecError("no pieces found in spectrum text")
    return SpectrumSpec(tuple(pieces))


def render_spectrum_spec(spec: SpectrumSpec) -> str:
    return spec.render()
