"""Jammed clusters, minimal balanced words, exact life-times, and
attractor-distance diagnostics.

A cluster's life-time (steps until it shrinks to a single particle) is read
off from the shortest interval ending at the cluster whose particle and hole
counts balance: the life-time is the particle count of that interval minus
one.  The length-reducing contraction ``gamma_step`` certifies this by
conjugating one flow step with a one-site trim on each side.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _kernels
from .core import PADDED, RING, Configuration, as_cells, dual
from .dynamics import INFINITE, velocity_field
from .substitution import FastWord, normalize, step_substitution

CLEAN = "clean"


class ClusterSpan(NamedTuple):
    """Maximal span of below-capacity sites, closed by the first site moving
    at full velocity.  `size` counts the particles on the span."""

    start: int
    end: int
    size: int


class MinimalWordRecord(NamedTuple):
    k: int
    n: int
    ones: int
    predicted_lifetime: int


def _below_capacity(x: Configuration, v: int) -> np.ndarray:
    vel = velocity_field(x, v)
    below = np.zeros(len(x.cells), dtype=bool)
    occupied = x.cells > 0
    below[occupied] = vel[occupied] < v * x.cells[occupied]
    if v > 1:
        below[~occupied] = True  # empty sites have ratio 1 < v by the 0/0 convention
    return below


def find_jammed_clusters(x: Configuration, v: int = 1) -> list[ClusterSpan]:
    """Maximal spans where occupied sites move below v per particle, each
    reported together with its closing full-velocity site.

    For v = 1 on one lane these are exactly the maximal runs of two or more
    consecutive particles.  A span that wraps a ring is reported with
    end >= L (unreduced indices).
    """
    below = _below_capacity(x, v)
    n = len(below)
    if not below.any():
        return []
    spans: list[ClusterSpan] = []
    if x.boundary == RING:
        if below.all():
            size = int(x.cells.sum())
            return [ClusterSpan(0, n - 1, size)]
        doubled = np.concatenate([below, below])
        i = int(np.argmin(below))  # a site not below capacity
        j = i
        while j < i + n:
            if doubled[j]:
                start = j
                while doubled[j]:
                    j += 1
                end = j  # closing full-velocity site
                size = int(sum(x.site(t) for t in range(start, end + 1)))
                spans.append(ClusterSpan(start % n, start % n + (end - start), size))
            else:
                j += 1
        return sorted(spans)
    j = 0
    while j < n:
        if below[j]:
            start = j
            while j < n and below[j]:
                j += 1
            end = j if j < n else n - 1  # clip at the core edge
            size = int(x.cells[start : end + 1].sum())
            spans.append(ClusterSpan(start, end, size))
        else:
            j += 1
    return spans


def minimal_index(x: Configuration, n: int) -> int | None:
    """Largest k < n such that x[k..n] holds equally many particles and
    holes (single lane).  Returns an unreduced index (may be negative on
    rings or reach into a padded tail); None when no balanced interval is
    resolvable."""
    if x.lanes != 1:
        raise ValueError("minimal_index requires a single-lane configuration")
    length = len(x.cells)
    diff = 0
    if x.boundary == RING:
        for back in range(length):
            j = n - back
            diff += 1 - 2 * x.site(j)
            if diff == 0 and back > 0:
                return j
        return None
    # padded: walk down through the core, then close the balance inside the
    # constant left tail (each tail site moves the balance by a fixed step)
    for j in range(n, -1, -1):
        diff += 1 - 2 * x.site(j)
        if diff == 0 and j < n:
            return j
    if x.left_fill == 0 and diff < 0:
        return diff  # |diff| tail sites close the balance at index -|diff|
    if x.left_fill == 1 and diff > 0:
        return -diff
    return None


def predict_lifetime(x: Configuration, cluster: ClusterSpan) -> int:
    """Exact steps until the cluster shrinks to one particle: half the
    length of its minimal balanced interval, minus one half."""
    idx = minimal_index(x, cluster.end)
    if idx is None:
        raise ValueError("unbounded minimal word")
    return (cluster.end - idx - 1) // 2


def gamma_step(word) -> np.ndarray:
    """Length-reducing conjugate of the slow step on a binary word: apply
    the update on interior positions only, trimming one site per side."""
    a = as_cells(word)
    if len(a) < 3:
        raise ValueError("gamma_step needs a word of length >= 3")
    if a.min() < 0 or a.max() > 1:
        raise ValueError("gamma_step acts on binary words")
    left = a[:-2]
    mid = a[1:-1]
    right = a[2:]
    return mid + np.minimum(left, 1 - mid) - np.minimum(mid, 1 - right)


def gamma_step_fast(y: FastWord) -> FastWord:
    """Coded-word contraction: swap step, trim one symbol per side, then
    renormalize the chunk coding.  Shrinks the length by 2 + xi where xi
    counts chunks merged by renormalization."""
    if len(y.symbols) < 2:
        raise ValueError("gamma_step_fast needs at least two symbols")
    if y.boundary != PADDED:
        raise ValueError("gamma_step_fast acts on padded words")
    swapped = step_substitution(y)
    trimmed = FastWord(swapped.symbols[1:-1], y.v, PADDED)
    return normalize(trimmed)


def minimal_words(x: Configuration) -> list[MinimalWordRecord]:
    """One record per cluster end whose balanced interval closes; records
    are pairwise disjoint or nested, never partially overlapping."""
    records = []
    for span in find_jammed_clusters(x, v=1):
        idx = minimal_index(x, span.end)
        if idx is None:
            continue
        ones = int(sum(x.site(i) for i in range(idx, span.end + 1)))
        records.append(MinimalWordRecord(idx, span.end, ones, ones - 1))
    return records


def is_free(x: Configuration, v) -> bool:
    """True when every particle moves at the full velocity v."""
    vel = velocity_field(x, v)
    if v == INFINITE:
        raise ValueError("free membership is defined for finite v")
    return bool(np.array_equal(vel, v * x.cells))


def is_dual_free(x: Configuration, v) -> bool:
    return is_free(dual(x), v)


def free_violation_radius(x: Configuration, origin: int = 0, v: int = 1):
    """Distance from the origin within which the configuration is locally
    neither free nor dual-free.

    Computed as max(r_free, r_dual) where r_free is the nearest site whose
    particle moves below full speed and r_dual the dual counterpart; CLEAN
    when either violation type is absent in the resolvable range (the
    window around the origin then matches a configuration on the free or
    dual-free attractor)."""
    if x.lanes == 1 and v == 1 and x.boundary == RING:
        r_free, r_dual = _kernels.violation_radius(x.cells, origin % len(x.cells))
        if r_free < 0 or r_dual < 0:
            return CLEAN
        return max(int(r_free), int(r_dual))
    vel = velocity_field(x, v)
    dual_vel = velocity_field(dual(x), v)
    free_bad = vel != v * x.cells
    dual_bad = dual_vel != v * dual(x).cells
    n = len(x.cells)
    idx = np.arange(n)
    if x.boundary == RING:
        d = np.abs(idx - origin % n)
        d = np.minimum(d, n - d)
    else:
        d = np.abs(idx - origin)
    if not free_bad.any() or not dual_bad.any():
        return CLEAN
    return max(int(d[free_bad].min()), int(d[dual_bad].min()))


def simulated_lifetime(x: Configuration, anchor_site: int, v: int = 1, max_steps: int | None = None) -> int:
    """Brute-force life-time of the cluster holding the particle at
    anchor_site: run the flow until the maximal chain of consecutive
    particles with head gaps below v (the below-capacity cluster) shrinks
    to a single particle.

    Particles never cross, so the chain is tracked by particle order and
    re-anchored to its rear each step; the rear can only leave the chain
    when the chain is already down to two particles, which the size check
    catches.  The padded core is widened on the right so escaping lead
    particles stay representable."""
    from .dynamics import FlowParams, step

    if x.boundary != PADDED or x.left_fill != 0:
        raise ValueError("simulated_lifetime runs on padded cores with an empty left tail")
    if x.cells[anchor_site] != 1:
        raise ValueError("anchor_site is not a particle")
    total = x.particle_total()
    margin = v * (total + 2) + 2
    cells = np.concatenate([x.cells, np.zeros(margin, dtype=np.int64)])
    cfg = Configuration(cells, 1, PADDED, 0, 0)
    r = int(np.count_nonzero(x.cells[:anchor_site]))
    if max_steps is None:
        max_steps = total * (len(cells) + 1)
    params = FlowParams(v, 1)
    for t in range(max_steps + 1):
        pos = np.flatnonzero(cfg.cells)
        j = r
        while j - 1 >= 0 and pos[j] - pos[j - 1] - 1 < v:
            j -= 1
        k = r
        while k + 1 < len(pos) and pos[k + 1] - pos[k] - 1 < v:
            k += 1
        if k - j + 1 <= 1:
            return t
        r = j
        cfg = step(cfg, params)
    raise RuntimeError("cluster did not dissolve within max_steps")


def minimal_word_catalog(n: int) -> list[np.ndarray]:
    """All binary words of length 2n that end in a particle and whose only
    balanced suffix interval is the whole word (ballot-style generation)."""
    out: list[np.ndarray] = []
    target = 2 * n

    def grow(rev: list[int], s: int):
        if len(rev) == target:
            if s == 0:
                out.append(np.array(rev[::-1], dtype=np.int64))
            return
        for sym in (0, 1):
            ns = s + 1 - 2 * sym
            if len(rev) + 1 < target and ns >= 0:
                continue  # a proper suffix must stay particle-heavy
            if len(rev) + 1 == target and ns != 0:
                continue
            grow(rev + [sym], ns)

    if n >= 1:
        grow([1], -1)
    return out


def regular_membership(x: Configuration, r: Fraction, psi: tuple[float, float]):
    """Check |density(window) - r| <= c * (n+m)^-alpha over all windows
    [-n, m] anchored at index 0.

    psi is the pair (c, alpha).  Returns (ok, worst) with worst either None
    or the (n, m) window of largest excess."""
    c, alpha = psi
    if c <= 0 or alpha <= 0:
        raise ValueError("decay spec needs c > 0 and alpha > 0")
    if x.boundary == RING:
        n_max = m_max = len(x.cells) - 1
        excess, n, m = _kernels.regular_worst(
            x.cells.astype(np.int64), float(r), float(c), float(alpha), n_max, m_max
        )
    else:
        margin = len(x.cells)
        ext = x.extract(-margin, len(x.cells) - 1 + margin)
        excess, n, m = _kernels.regular_worst_np(
            np.roll(ext, -margin), float(r), float(c), float(alpha), margin, len(x.cells) - 1 + margin
        )
    if excess > 0:
        return False, (int(n), int(m))
    return True, None
