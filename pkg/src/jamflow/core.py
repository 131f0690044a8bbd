"""Lattice configurations, finite words, and exact pattern statistics.

A configuration assigns 0..M particles to each site of a 1-D lattice.  Two
finite stand-ins for the bi-infinite lattice are supported:

* ``ring``   -- periodic boundary, indices taken mod L;
* ``padded`` -- a finite core continued by constant tails on both sides,
  each tail either all-empty (fill 0) or all-full (fill M).

All densities are exact rationals (``fractions.Fraction``); floats appear
only in the truncated sequence metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

RING = "ring"
PADDED = "padded"


class WindowSpec(NamedTuple):
    """Inclusive index window [start, end].

    On rings indices are taken mod L; on padded configurations they may
    extend into the constant fill regions.
    """

    start: int
    end: int

    def __len__(self):
        return self.end - self.start + 1


def as_cells(values) -> np.ndarray:
    cells = np.asarray(values, dtype=np.int64)
    if cells.ndim != 1:
        raise ValueError("cells must be one-dimensional")
    return cells


@dataclass(frozen=True, eq=False)
class Configuration:
    """Site occupancies on a finite lattice with a boundary convention."""

    cells: np.ndarray
    lanes: int = 1
    boundary: str = RING
    left_fill: int = 0
    right_fill: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cells", as_cells(self.cells))
        if len(self.cells) < 1:
            raise ValueError("configuration must have at least one site")
        if self.lanes < 1:
            raise ValueError("lanes must be a positive integer")
        if self.cells.min() < 0 or self.cells.max() > self.lanes:
            raise ValueError("cell values must lie in [0, lanes]")
        if self.boundary not in (RING, PADDED):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.boundary == PADDED:
            for fill in (self.left_fill, self.right_fill):
                if fill not in (0, self.lanes):
                    raise ValueError("padded fills must be 0 or lanes (all-empty / all-full tails)")

    def __len__(self):
        return len(self.cells)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.lanes == other.lanes
            and self.boundary == other.boundary
            and (self.boundary == RING or (self.left_fill, self.right_fill) == (other.left_fill, other.right_fill))
            and np.array_equal(self.cells, other.cells)
        )

    def __repr__(self):
        body = "".join(str(int(c)) for c in self.cells)
        if self.boundary == RING:
            return f"ring({body}, M={self.lanes})"
        return f"padded({self.left_fill}|{body}|{self.right_fill}, M={self.lanes})"

    def site(self, i: int) -> int:
        """Occupancy at lattice index i, resolved through the boundary."""
        n = len(self.cells)
        if self.boundary == RING:
            return int(self.cells[i % n])
        if i < 0:
            return self.left_fill
        if i >= n:
            return self.right_fill
        return int(self.cells[i])

    def extract(self, start: int, end: int) -> np.ndarray:
        """Occupancies on the inclusive window [start, end]."""
        if start > end:
            raise ValueError("window start exceeds end")
        n = len(self.cells)
        idx = np.arange(start, end + 1)
        if self.boundary == RING:
            return self.cells[idx % n]
        out = np.empty(len(idx), dtype=np.int64)
        left = idx < 0
        right = idx >= n
        mid = ~(left | right)
        out[left] = self.left_fill
        out[right] = self.right_fill
        out[mid] = self.cells[idx[mid]]
        return out

    def particle_total(self) -> int:
        return int(self.cells.sum())

    def density(self) -> Fraction:
        """Mean occupancy of the core, in [0, lanes]."""
        return Fraction(self.particle_total(), len(self.cells))

    def with_cells(self, cells) -> "Configuration":
        return Configuration(cells, self.lanes, self.boundary, self.left_fill, self.right_fill)


def ring(values, lanes: int = 1) -> Configuration:
    return Configuration(values, lanes=lanes, boundary=RING)


def padded(values, lanes: int = 1, left_fill: int = 0, right_fill: int = 0) -> Configuration:
    return Configuration(values, lanes=lanes, boundary=PADDED, left_fill=left_fill, right_fill=right_fill)


def dual(x: Configuration) -> Configuration:
    """Sitewise complement c -> lanes - c (holes and particles exchanged)."""
    return Configuration(
        x.lanes - x.cells,
        x.lanes,
        x.boundary,
        x.lanes - x.left_fill,
        x.lanes - x.right_fill,
    )


def _window_score(window: np.ndarray, pattern: np.ndarray) -> int:
    # Multiplicity of the pattern in one aligned window: min over symbols of
    # floor(b/a), with 0/0 == 1 and b/0 == 0 for b > 0.
    best = None
    for b, a in zip(window, pattern):
        if a == 0:
            q = 1 if b == 0 else 0
        else:
            q = int(b) // int(a)
        if best is None or q < best:
            best = q
        if best == 0:
            return 0
    return best


def pattern_density(text, pattern) -> Fraction:
    """Density of `pattern` in `text`: mean window multiplicity over all
    full windows, an exact rational in [0, M].

    For binary words this counts exact occurrences of the sub-word divided
    by the text length.
    """
    text = as_cells(text)
    pattern = as_cells(pattern)
    if len(pattern) > len(text):
        raise ValueError("pattern longer than text")
    total = 0
    for i in range(len(text) - len(pattern) + 1):
        total += _window_score(text[i : i + len(pattern)], pattern)
    return Fraction(total, len(text))


def ring_pattern_density(x: Configuration, pattern) -> Fraction:
    """Pattern density on a ring, counting wraparound windows at all L starts."""
    if x.boundary != RING:
        raise ValueError("ring_pattern_density requires a ring configuration")
    pattern = as_cells(pattern)
    n = len(x.cells)
    total = 0
    for s in range(n):
        window = x.cells[(s + np.arange(len(pattern))) % n]
        total += _window_score(window, pattern)
    return Fraction(total, n)


def window_density(x: Configuration, w: WindowSpec, pattern) -> Fraction:
    """Pattern density of the sub-word extracted on the window."""
    return pattern_density(x.extract(w.start, w.end), pattern)


def metric_distance(
    x: Configuration,
    y: Configuration,
    origin: int = 0,
    half_width: int = 32,
) -> tuple[float, float]:
    """Truncated sequence distance around `origin` plus a truncation bound.

    Returns (value, bound) where value = sum_{|i|<=W} (M+1)^-|i| |x_i - y_i|
    and the true (untruncated) distance lies in [value, value + bound].
    """
    if x.lanes != y.lanes:
        raise ValueError("mismatched lanes")
    m = x.lanes
    w = half_width
    xs = x.extract(origin - w, origin + w).astype(float)
    ys = y.extract(origin - w, origin + w).astype(float)
    offs = np.abs(np.arange(-w, w + 1, dtype=float))
    value = float(np.sum((m + 1.0) ** (-offs) * np.abs(xs - ys)))
    bound = 2.0 * m * (m + 1.0) ** (-w) / (1.0 - 1.0 / (m + 1.0))
    return value, bound
