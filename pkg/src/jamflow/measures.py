"""Product measures, reproducible sampling, and exact cylinder pushforwards.

Sampling uses SplitMix64, a fixed and documented 64-bit generator, so the
same seed yields the same configuration on every platform:

    z = seed + (n + 1) * 0x9E3779B97F4A7C15   (wrapping, n = draw index)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    u = z ^ (z >> 31)

A draw occupies its slot when (u >> 11) < floor(p * 2**53); the acceptance
probability matches p exactly whenever p has a denominator dividing 2**53
and is within 2**-53 otherwise.  Ensemble runs derive per-sample seeds as
seed + sample_index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .core import RING, Configuration, WindowSpec, as_cells

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

ENUMERATION_BUDGET = 24


def splitmix64(seed: int, count: int, start: int = 0) -> np.ndarray:
    """The `count` SplitMix64 outputs at draw indices start..start+count-1."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class SampleSpec:
    p: Fraction
    lanes: int = 1
    length: int = 100
    seed: int = 0

    def __post_init__(self):
        p = Fraction(self.p)
        object.__setattr__(self, "p", p)
        if p < 0 or p > 1:
            raise ValueError("p must lie in [0, 1]")
        if self.lanes < 1 or self.length < 1:
            raise ValueError("lanes and length must be positive")


def bernoulli_config(spec: SampleSpec) -> Configuration:
    """Ring whose sites are sums of `lanes` independent Bernoulli(p) draws
    (per-site law Binomial(lanes, p), mean p * lanes)."""
    threshold = np.uint64((spec.p.numerator * (1 << 53)) // spec.p.denominator)
    draws = splitmix64(spec.seed, spec.length * spec.lanes)
    hits = (draws >> np.uint64(11)) < threshold
    cells = hits.reshape(spec.length, spec.lanes).sum(axis=1).astype(np.int64)
    return Configuration(cells, spec.lanes, RING)


def exact_count_ring(length: int, lanes: int, particles: int, seed: int) -> Configuration:
    """Ring with exactly `particles` particles placed uniformly among the
    length*lanes lane-slots via a seeded Fisher-Yates shuffle."""
    slots = length * lanes
    if not 0 <= particles <= slots:
        raise ValueError("particle count outside [0, length*lanes]")
    perm = np.arange(slots)
    draws = splitmix64(seed, slots)
    for i in range(slots - 1, 0, -1):
        j = int(draws[slots - 1 - i] % np.uint64(i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    chosen = perm[:particles]
    cells = np.bincount(chosen % length, minlength=length).astype(np.int64)
    return Configuration(cells, lanes, RING)


def product_weight(word, p: Fraction, lanes: int = 1) -> Fraction:
    """Probability of the word under the per-site Binomial(lanes, p) product
    law, as an exact rational."""
    p = Fraction(p)
    q = 1 - p
    weight = Fraction(1)
    for a in as_cells(word):
        a = int(a)
        if not 0 <= a <= lanes:
            raise ValueError("symbol outside [0, lanes]")
        weight *= comb(lanes, a) * p**a * q ** (lanes - a)
    return weight


def _image_window(bits: np.ndarray, v: int) -> np.ndarray:
    """One pushforward step on enumerated binary windows.

    bits has shape (n_words, width); the image is computable on the central
    width-2v sites (dependence radius v per step).  A site counts as
    occupied in the image when its particle is blocked or when a particle
    within distance v sees only empty sites up to it (the receiving rule of
    the cylinder accounting; for v = 1 this is exactly the flow map)."""
    width = bits.shape[1]
    out = np.zeros((bits.shape[0], width - 2 * v), dtype=np.int8)
    for i in range(v, width - v):
        stay = bits[:, i] & bits[:, i + 1]
        land = np.zeros(bits.shape[0], dtype=np.int8)
        for j in range(1, v + 1):
            src = i - j
            run = np.ones(bits.shape[0], dtype=np.int8)
            for t in range(1, j + 1):
                run &= 1 - bits[:, src + t]
            land |= bits[:, src] & run
        out[:, i - v] = stay | land
    return out


def _enumerate_bits(width: int) -> np.ndarray:
    codes = np.arange(1 << width, dtype=np.int64)
    return ((codes[:, None] >> np.arange(width)[None, :]) & 1).astype(np.int8)


def pushforward(v: int, target, p: Fraction) -> Fraction:
    """Exact probability that one map step produces `target` on its window,
    starting from the Bernoulli(p) product measure (single lane)."""
    return pushforward_iterated(v, target, p, 1)


def pushforward_iterated(v: int, target, p: Fraction, t: int) -> Fraction:
    """Exact probability of `target` after t map steps from the product
    measure, by enumeration over the dependence window widened by t*v per
    side."""
    target = as_cells(target)
    if target.min(initial=0) < 0 or target.max(initial=0) > 1:
        raise ValueError("target word must be binary")
    if t < 0:
        raise ValueError("t must be >= 0")
    p = Fraction(p)
    width = len(target) + 2 * v * t
    if width > ENUMERATION_BUDGET:
        raise ValueError("enumeration budget: window of %d sites exceeds %d" % (width, ENUMERATION_BUDGET))
    if t == 0:
        return product_weight(target, p, 1)
    bits = _enumerate_bits(width)
    ones = bits.sum(axis=1)
    imgs = bits
    for _ in range(t):
        imgs = _image_window(imgs, v)
    match = np.all(imgs == target[None, :].astype(np.int8), axis=1)
    counts = np.bincount(ones[match], minlength=width + 1)
    q = 1 - p
    return sum(
        int(c) * p**k * q ** (width - k) for k, c in enumerate(counts) if c
    ) or Fraction(0)


@dataclass
class CylinderWeights:
    """Exact probabilities of the binary words on a window."""

    window: WindowSpec
    weights: dict[tuple[int, ...], Fraction]

    def __post_init__(self):
        total = sum(self.weights.values(), Fraction(0))
        if total != 1:
            raise ValueError("cylinder weights must sum to 1")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("cylinder weights must be nonnegative")
        width = len(self.window)
        if any(len(word) != width for word in self.weights):
            raise ValueError("word lengths must match the window")


def product_cylinder(window: WindowSpec, p: Fraction) -> CylinderWeights:
    p = Fraction(p)
    width = len(window)
    weights = {}
    for bits in _enumerate_bits(width):
        word = tuple(int(b) for b in bits)
        weights[word] = product_weight(word, p, 1)
    return CylinderWeights(window, weights)


def translation_invariance_check(weights: CylinderWeights, v: int) -> bool:
    """Push the window measure through one map step and test whether the
    image cylinder probabilities are shift-invariant across the interior
    offsets of the window."""
    width = len(weights.window)
    inner = width - 2 * v
    if inner < 2:
        raise ValueError("window too narrow to compare shifted cylinders")
    words = np.array(list(weights.weights.keys()), dtype=np.int8)
    wvals = list(weights.weights.values())
    imgs = _image_window(words, v)
    for ell in range(1, inner):
        n_offsets = inner - ell + 1
        if n_offsets < 2:
            break
        dists = []
        for off in range(n_offsets):
            acc: dict[tuple[int, ...], Fraction] = {}
            for row, wt in zip(imgs, wvals):
                key = tuple(int(b) for b in row[off : off + ell])
                acc[key] = acc.get(key, Fraction(0)) + wt
            dists.append({k: w for k, w in acc.items() if w != 0})
        for other in dists[1:]:
            if other != dists[0]:
                return False
    return True
