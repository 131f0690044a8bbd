"""Hot inner loops: ring update maps, velocity fields, violation scans.

Every kernel has two interchangeable implementations with identical
signatures and bit-identical outputs:

* a numba ``@njit`` version (default when numba imports cleanly), and
* a pure-numpy fallback.

Set ``JAMFLOW_NO_NUMBA=1`` in the environment to force the numpy path.
``BACKEND`` records which one is active; both are importable directly from
``IMPLS`` for cross-checking and benchmarking.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("JAMFLOW_NO_NUMBA", "") not in ("", "0")

try:  # pragma: no cover - exercised indirectly via backend selection
    if _FORCE_NUMPY:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------


def multilane_step_ring_np(cells: np.ndarray, m: int) -> np.ndarray:
    left = np.roll(cells, 1)
    right = np.roll(cells, -1)
    return cells + np.minimum(left, m - cells) - np.minimum(cells, m - right)


def fast_step_ring_np(cells: np.ndarray, v: int) -> np.ndarray:
    n = len(cells)
    pos = np.flatnonzero(cells)
    if len(pos) == 0 or len(pos) == n:
        return cells.copy()
    nxt = np.roll(pos, -1).astype(np.int64)
    nxt[-1] += n
    gaps = nxt - pos - 1
    moved = (pos + np.minimum(gaps, v)) % n
    out = np.zeros(n, dtype=np.int64)
    out[moved] = 1
    return out


def superfast_step_ring_np(cells: np.ndarray) -> np.ndarray:
    n = len(cells)
    pos = np.flatnonzero(cells)
    nxt = np.roll(pos, -1).astype(np.int64)
    nxt[-1] += n
    out = np.zeros(n, dtype=np.int64)
    out[(nxt - 1) % n] = 1
    return out


def fast_velocity_ring_np(cells: np.ndarray, v: int) -> np.ndarray:
    """Per-site realized displacement for the single-lane map, max speed v."""
    n = len(cells)
    out = np.zeros(n, dtype=np.int64)
    pos = np.flatnonzero(cells)
    if len(pos) == 0 or len(pos) == n:
        return out
    nxt = np.roll(pos, -1).astype(np.int64)
    nxt[-1] += n
    out[pos] = np.minimum(nxt - pos - 1, v)
    return out


def violation_radius_np(cells: np.ndarray, origin: int) -> tuple[int, int]:
    """Nearest ring distances from origin to a blocked particle pair (1,1)
    and to a hole pair (0,0); -1 where no such pair exists."""
    n = len(cells)
    nxt = np.roll(cells, -1)

    def nearest(mask: np.ndarray) -> int:
        idx = np.flatnonzero(mask)
        if len(idx) == 0:
            return -1
        d = np.abs(idx - origin)
        return int(np.minimum(d, n - d).min())

    r_free = nearest((cells == 1) & (nxt == 1))
    r_dual = nearest((cells == 0) & (nxt == 0))
    return r_free, r_dual


def regular_worst_np(cells: np.ndarray, r: float, c: float, alpha: float, n_max: int, m_max: int):
    """Worst excess of |window mean - r| over the decay bound c*(n+m)^-alpha
    for ring windows [-n, m] anchored at index 0.  Returns (excess, n, m);
    excess <= 0 means every window satisfies the bound."""
    length = len(cells)
    doubled = np.concatenate([cells, cells]).astype(np.float64)
    prefix = np.concatenate([[0.0], np.cumsum(doubled)])
    worst = (-np.inf, 0, 0)
    ms = np.arange(0, m_max + 1)
    for n in range(0, n_max + 1):
        start = (-n) % length
        sizes = n + ms + 1
        sums = prefix[start + n + ms + 1] - prefix[start]
        dev = np.abs(sums / sizes - r)
        with np.errstate(divide="ignore"):
            psi = np.where(n + ms > 0, c * np.power(np.maximum(n + ms, 1), -alpha), np.inf)
        excess = dev - psi
        k = int(np.argmax(excess))
        if excess[k] > worst[0]:
            worst = (float(excess[k]), n, int(ms[k]))
    return worst


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def multilane_step_ring_nb(cells, m):  # pragma: no cover - compiled
        n = len(cells)
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            left = cells[(i - 1) % n]
            right = cells[(i + 1) % n]
            c = cells[i]
            out[i] = c + min(left, m - c) - min(c, m - right)
        return out

    @njit(cache=True, nogil=True)
    def fast_step_ring_nb(cells, v):  # pragma: no cover - compiled
        n = len(cells)
        out = np.zeros(n, dtype=np.int64)
        for i in range(n):
            if cells[i] == 1:
                h = 0
                while h < v and cells[(i + h + 1) % n] == 0:
                    h += 1
                out[(i + h) % n] = 1
        return out

    @njit(cache=True, nogil=True)
    def superfast_step_ring_nb(cells):  # pragma: no cover - compiled
        n = len(cells)
        out = np.zeros(n, dtype=np.int64)
        for i in range(n):
            if cells[i] == 1:
                h = 0
                while h < n and cells[(i + h + 1) % n] == 0:
                    h += 1
                out[(i + h) % n] = 1
        return out

    @njit(cache=True, nogil=True)
    def fast_velocity_ring_nb(cells, v):  # pragma: no cover - compiled
        n = len(cells)
        out = np.zeros(n, dtype=np.int64)
        for i in range(n):
            if cells[i] == 1:
                h = 0
                while h < v and cells[(i + h + 1) % n] == 0:
                    h += 1
                out[i] = h
        return out

    @njit(cache=True, nogil=True)
    def violation_radius_nb(cells, origin):  # pragma: no cover - compiled
        n = len(cells)
        r_free = -1
        r_dual = -1
        for i in range(n):
            c = cells[i]
            nx = cells[(i + 1) % n]
            d = abs(i - origin)
            if n - d < d:
                d = n - d
            if c == 1 and nx == 1 and (r_free < 0 or d < r_free):
                r_free = d
            if c == 0 and nx == 0 and (r_dual < 0 or d < r_dual):
                r_dual = d
        return r_free, r_dual

    @njit(cache=True, nogil=True)
    def regular_worst_nb(cells, r, c, alpha, n_max, m_max):  # pragma: no cover
        length = len(cells)
        worst = -np.inf
        worst_n = 0
        worst_m = 0
        for n in range(n_max + 1):
            total = 0.0
            for j in range(n):
                total += cells[(-n + j) % length]
            for m in range(m_max + 1):
                total += cells[m % length]
                if n + m == 0:
                    continue
                dev = abs(total / (n + m + 1) - r)
                excess = dev - c * (n + m) ** (-alpha)
                if excess > worst:
                    worst = excess
                    worst_n = n
                    worst_m = m
        return worst, worst_n, worst_m


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_NUMPY_IMPLS = {
    "multilane_step_ring": multilane_step_ring_np,
    "fast_step_ring": fast_step_ring_np,
    "superfast_step_ring": superfast_step_ring_np,
    "fast_velocity_ring": fast_velocity_ring_np,
    "violation_radius": violation_radius_np,
    "regular_worst": regular_worst_np,
}

if HAVE_NUMBA:
    _NUMBA_IMPLS = {
        "multilane_step_ring": multilane_step_ring_nb,
        "fast_step_ring": fast_step_ring_nb,
        "superfast_step_ring": superfast_step_ring_nb,
        "fast_velocity_ring": fast_velocity_ring_nb,
        "violation_radius": violation_radius_nb,
        "regular_worst": regular_worst_nb,
    }
    IMPLS = {"numpy": _NUMPY_IMPLS, "numba": _NUMBA_IMPLS}
    BACKEND = "numba"
else:
    IMPLS = {"numpy": _NUMPY_IMPLS}
    BACKEND = "numpy"

_active = IMPLS[BACKEND]

multilane_step_ring = _active["multilane_step_ring"]
fast_step_ring = _active["fast_step_ring"]
superfast_step_ring = _active["superfast_step_ring"]
fast_velocity_ring = _active["fast_velocity_ring"]
violation_radius = _active["violation_radius"]
regular_worst = _active["regular_worst"]
