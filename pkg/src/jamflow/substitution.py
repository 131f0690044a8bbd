"""Gap coding of single-lane configurations and the swap dynamics it induces.

A binary configuration is recoded gap-by-gap over the alphabet
{particle, gap-chunk(1), ..., gap-chunk(v)}: a run of n empty sites between
particles becomes floor(n/v) chunks of size v followed by the remainder
chunk (omitted when zero).  Under this coding the velocity-v map becomes a
one-symbol swap rule: (particle, chunk) -> (chunk, particle), applied
simultaneously; renormalizing the chunks after each swap step keeps the
coding canonical.

Symbols are stored as integers: ONE == -1 is a particle, k >= 1 is a chunk
of k empty sites.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PADDED, RING, Configuration

ONE = -1


def is_particle(sym: int) -> bool:
    return sym == ONE


@dataclass
class FastWord:
    """Symbol sequence over the gap alphabet.

    Ring words carry the lattice index of their first emitted site so the
    coding stays aligned with the configuration it came from.
    """

    symbols: np.ndarray
    v: int
    boundary: str = PADDED
    offset: int = 0

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int64)
        if self.v < 1:
            raise ValueError("v must be >= 1")
        bad = (self.symbols != ONE) & ((self.symbols < 1) | (self.symbols > self.v))
        if bad.any():
            raise ValueError("gap chunks must have sizes in [1, v]")
        if self.boundary not in (RING, PADDED):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        if not isinstance(other, FastWord):
            return NotImplemented
        return (
            self.v == other.v
            and self.boundary == other.boundary
            and (self.boundary == PADDED or self.offset == other.offset)
            and np.array_equal(self.symbols, other.symbols)
        )

    def __repr__(self):
        syms = " ".join("1" if s == ONE else f"0_{s}" for s in self.symbols)
        tag = f"@{self.offset}" if self.boundary == RING else ""
        return f"FastWord[v={self.v}]({syms}){tag}"

    def ones(self) -> int:
        return int(np.count_nonzero(self.symbols == ONE))

    def decoded_length(self) -> int:
        return int(np.where(self.symbols == ONE, 1, self.symbols).sum())


def _chunks_tail_anchored(run: int, v: int) -> list[int]:
    # remainder at the far end away from the anchoring particle
    out = [run % v] if run % v else []
    out.extend([v] * (run // v))
    return out


def _chunks_gap(run: int, v: int) -> list[int]:
    # interior gap: full chunks first, remainder next to the following particle
    out = [v] * (run // v)
    if run % v:
        out.append(run % v)
    return out


def encode(x: Configuration, v: int) -> FastWord:
    """Gap-by-gap recoding of a binary configuration.

    Rings are anchored at their first particle (the offset records where);
    padded cores must sit between all-empty tails, whose truncated runs are
    chunked with the remainder at the outer edge.
    """
    if x.lanes != 1:
        raise ValueError("encode requires a single-lane configuration")
    cells = x.cells
    ones = np.flatnonzero(cells)
    if x.boundary == RING:
        if len(ones) == 0:
            raise ValueError("no gap anchor: ring has no particles")
        n = len(cells)
        symbols: list[int] = []
        for idx, p in enumerate(ones):
            symbols.append(ONE)
            nxt = ones[(idx + 1) % len(ones)]
            gap = (nxt - p - 1) % n if len(ones) > 1 else n - 1
            symbols.extend(_chunks_gap(int(gap), v))
        return FastWord(np.array(symbols, dtype=np.int64), v, RING, offset=int(ones[0]))
    if x.left_fill != 0 or x.right_fill != 0:
        raise ValueError("encode supports padded cores with all-empty tails")
    symbols = []
    if len(ones) == 0:
        symbols.extend(_chunks_tail_anchored(len(cells), v))
        return FastWord(np.array(symbols, dtype=np.int64), v, PADDED)
    symbols.extend(_chunks_tail_anchored(int(ones[0]), v))
    for idx, p in enumerate(ones):
        symbols.append(ONE)
        if idx + 1 < len(ones):
            symbols.extend(_chunks_gap(int(ones[idx + 1] - p - 1), v))
    symbols.extend(_chunks_gap(int(len(cells) - ones[-1] - 1), v))
    return FastWord(np.array(symbols, dtype=np.int64), v, PADDED)


def decode(y: FastWord) -> Configuration:
    """Expand symbols back to sites: a particle emits 1, a chunk of size k
    emits k empty sites."""
    sites: list[int] = []
    for s in y.symbols:
        if s == ONE:
            sites.append(1)
        else:
            sites.extend([0] * int(s))
    cells = np.array(sites, dtype=np.int64)
    if y.boundary == RING:
        n = len(cells)
        return Configuration(np.roll(cells, y.offset % n), 1, RING)
    return Configuration(cells, 1, PADDED, 0, 0)


def normalize(y: FastWord) -> FastWord:
    """Re-encode the decoded configuration; idempotent canonical form."""
    return encode(decode(y), y.v)


def step_substitution(y: FastWord) -> FastWord:
    """Swap every adjacent (particle, chunk) pair simultaneously.

    On rings the pair wrapping the seam also swaps, which advances the
    emission offset past the chunk that moved behind the wrapped particle.
    """
    syms = y.symbols
    n = len(syms)
    out = syms.copy()
    offset = y.offset
    if n >= 2:
        limit = n if y.boundary == RING else n - 1
        for j in range(limit):
            k = (j + 1) % n
            if syms[j] == ONE and syms[k] != ONE:
                out[j], out[k] = syms[k], syms[j]
                if k == 0:  # seam swap: emission now starts at the moved particle
                    offset = y.offset + int(syms[k]) - 1
    return FastWord(out, y.v, y.boundary, offset)


def step_tilde(y: FastWord) -> FastWord:
    """One coded step: swap, then renormalize chunk sizes."""
    return normalize(step_substitution(y))


def ind(sym: int, v: int) -> int:
    """Balance weight of a symbol: -v for a particle, k for a size-k chunk."""
    return -v if sym == ONE else int(sym)


def fast_minimal_index(y: FastWord, i: int) -> int | None:
    """Start index of the minimal balanced interval ending at symbol i.

    Walking left from i, suffix weights stay strictly negative until a
    symbol neutralizes them; that symbol starts the interval.  Returns 0
    when every proper suffix is negative (the whole word is minimal) and
    None when no negative suffix exists at all (e.g. i == 0, or y[i] is a
    chunk)."""
    syms = y.symbols
    if i < 0 or i >= len(syms):
        raise IndexError("index outside the word")
    if i == 0:
        return None
    s = 0
    for j in range(i, 0, -1):
        s += ind(int(syms[j]), y.v)
        if s >= 0:
            return None if j == i else j
    return 0


def fast_lifetime(y: FastWord) -> int:
    """Steps until the particle cluster at the end of a minimal word shrinks
    to a single particle: the particle count minus one."""
    syms = y.symbols
    if len(syms) == 0 or syms[-1] != ONE or fast_minimal_index(y, len(syms) - 1) != 0:
        raise ValueError("not a minimal fast word")
    return y.ones() - 1


def minimal_fast_catalog(v: int, max_ones: int) -> list[FastWord]:
    """All minimal padded words with at most `max_ones` particles: words
    ending in a particle all of whose proper suffixes carry strictly
    negative balance weight."""
    out: list[FastWord] = []

    def grow(rev: list[int], s: int, ones: int):
        if len(rev) >= 2:
            out.append(FastWord(np.array(rev[::-1], dtype=np.int64), v, PADDED))
        if s >= 0:
            return  # extending would expose a nonnegative proper suffix
        if ones < max_ones:
            grow(rev + [ONE], s - v, ones + 1)
        for k in range(1, v + 1):
            grow(rev + [k], s + k, ones)

    grow([ONE], -v, 1)
    return out
