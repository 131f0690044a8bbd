"""Update maps for all parameter regimes, local velocities, and fluxes.

The map family is indexed by a maximal velocity v (possibly infinite) and a
lane count M.  Every map applies simultaneously at all sites: all moves are
computed from the pre-step state.  On rings the particle count is conserved
exactly; in padded mode particles may enter from an all-full tail or leave
into an all-empty one (open-boundary gain/loss, documented per operation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .core import PADDED, RING, Configuration, WindowSpec, dual

FORWARD = "forward"
BACKWARD = "backward"

INFINITE = math.inf


@dataclass(frozen=True)
class FlowParams:
    """Map parameters: maximal velocity v (int >= 1 or INFINITE), lane count,
    and movement direction."""

    v: float = 1
    lanes: int = 1
    direction: str = FORWARD

    def __post_init__(self):
        if self.v != INFINITE and (int(self.v) != self.v or self.v < 1):
            raise ValueError("v must be a positive integer or INFINITE")
        if self.lanes < 1:
            raise ValueError("lanes must be >= 1")
        if self.direction not in (FORWARD, BACKWARD):
            raise ValueError("direction must be forward or backward")


@dataclass(frozen=True)
class FluxReport:
    rho: Fraction
    flux_measured: Fraction
    flux_predicted: Fraction
    transient_steps: int


def _mirror(x: Configuration) -> Configuration:
    return Configuration(x.cells[::-1].copy(), x.lanes, x.boundary, x.right_fill, x.left_fill)


def _embed(x: Configuration, pad: int) -> np.ndarray:
    left = np.full(pad, x.left_fill, dtype=np.int64)
    right = np.full(pad, x.right_fill, dtype=np.int64)
    return np.concatenate([left, x.cells, right])


def step_multilane(x: Configuration) -> Configuration:
    """One step of the velocity-1 M-lane map:
    x_i + min(x_{i-1}, M - x_i) - min(x_i, M - x_{i+1})."""
    m = x.lanes
    if x.boundary == RING:
        return x.with_cells(_kernels.multilane_step_ring(x.cells, m))
    emb = _embed(x, 1)
    new = _kernels.multilane_step_ring_np(emb, m)  # formula is local; ring roll
    # on the embedded array only wraps at the two outermost pad cells, which
    # are discarded by the crop below
    return x.with_cells(new[1:-1])


def _fast_step_line(cells: np.ndarray, v: int) -> np.ndarray:
    # non-wrapping variant: particles with no particle ahead run freely
    pos = np.flatnonzero(cells)
    out = np.zeros(len(cells), dtype=np.int64)
    if len(pos) == 0:
        return out
    gaps = np.empty(len(pos), dtype=np.int64)
    gaps[:-1] = pos[1:] - pos[:-1] - 1
    gaps[-1] = v  # free run beyond the embedded range
    moved = pos + np.minimum(gaps, v)
    moved = moved[moved < len(cells)]
    out[moved] = 1
    return out


def step_fast(x: Configuration, v: int, direction: str = FORWARD) -> Configuration:
    """One step of the single-lane map with maximal velocity v: every
    particle advances by min(v, headway), simultaneously."""
    if x.lanes != 1:
        raise ValueError("step_fast requires a single-lane configuration")
    if v < 1:
        raise ValueError("v must be >= 1")
    if direction == BACKWARD:
        return _mirror(step_fast(_mirror(x), v, FORWARD))
    if x.boundary == RING:
        return x.with_cells(_kernels.fast_step_ring(x.cells, v))
    pad = v + 1
    new = _fast_step_line(_embed(x, pad), v)
    return x.with_cells(new[pad : pad + len(x.cells)])


def step_smart(x: Configuration, m: int) -> Configuration:
    """Anticipating-drivers variant: the dual of the backward fast map of the
    dual configuration."""
    return dual(step_fast(dual(x), m, BACKWARD))


def step_superfast(x: Configuration) -> Configuration:
    """Unbounded-velocity step: every particle jumps its whole headway,
    landing just behind the next particle's pre-step position."""
    if x.lanes != 1:
        raise ValueError("step_superfast requires a single-lane configuration")
    if x.boundary == RING:
        total = x.particle_total()
        if total == 0 or total == len(x.cells):
            raise ValueError("superfast undefined on an all-empty or all-full ring")
        return x.with_cells(_kernels.superfast_step_ring(x.cells))
    if x.left_fill != 0 or x.right_fill != 1:
        raise ValueError("padded superfast needs an all-empty left tail and all-full right tail")
    pad = len(x.cells) + 1
    emb = _embed(x, pad)
    pos = np.flatnonzero(emb)
    out = np.zeros(len(emb), dtype=np.int64)
    # each particle lands just behind the next one; consecutive fill particles
    # map onto themselves, and the unmatched final fill particle is cropped
    out[pos[1:] - 1] = 1
    return x.with_cells(out[pad : pad + len(x.cells)])


def _lane_count_factor(total: int, m: int) -> int:
    # smallest k with k*total divisible by m
    return m // math.gcd(total % m if total % m else m, m)


def step_general(x: Configuration, v: int, anchor: int = 0) -> Configuration:
    """General-map step: split into M aligned binary lanes by the cyclic
    staircase rule, advance each lane with the fast map, and merge sitewise.

    On rings whose particle count is not divisible by M, the staircase is
    only consistent on an unrolled cover; the step unrolls, advances, and
    folds back.  The result does not depend on the anchor.
    """
    from .sawtooth import redirect_arrays  # local import to avoid a cycle

    m = x.lanes
    if m == 1:
        return step_fast(x, v)
    if x.boundary == RING:
        total = x.particle_total()
        k = _lane_count_factor(total, m)
        cells = np.tile(x.cells, k)
        lanes = redirect_arrays(cells, m, anchor, ring_cut=True)
        stepped = [_kernels.fast_step_ring(lane, v) for lane in lanes]
        merged = np.sum(stepped, axis=0)
        folded = merged[: len(x.cells)]
        if k > 1 and not np.array_equal(merged, np.tile(folded, k)):
            raise AssertionError("unrolled step lost periodicity")
        return x.with_cells(folded)
    # padded: two-sided staircase, per-lane padded fast step
    lanes = redirect_arrays(x.cells, m, anchor, ring_cut=False)
    lane_cfgs = [
        Configuration(lane, 1, PADDED, min(x.left_fill, 1), min(x.right_fill, 1))
        for lane in lanes
    ]
    stepped = [step_fast(cfg, v).cells for cfg in lane_cfgs]
    return x.with_cells(np.sum(stepped, axis=0))


def step(x: Configuration, params: FlowParams) -> Configuration:
    if params.lanes != x.lanes:
        raise ValueError("FlowParams.lanes does not match the configuration")
    if params.direction == BACKWARD:
        fwd = FlowParams(params.v, params.lanes, FORWARD)
        return _mirror(step(_mirror(x), fwd))
    if params.v == INFINITE:
        return step_superfast(x)
    v = int(params.v)
    if x.lanes == 1:
        return step_fast(x, v)
    if v == 1:
        return step_multilane(x)
    return step_general(x, v)


def evolve(x: Configuration, params: FlowParams, t: int) -> Configuration:
    """t-fold composition of the step map."""
    if t < 0:
        raise ValueError("t must be >= 0")
    for _ in range(t):
        x = step(x, params)
    return x


def velocity_field(x: Configuration, v) -> np.ndarray:
    """Total distance the particles at each site cover on the next step."""
    m = x.lanes
    if v == INFINITE:
        if x.boundary != RING:
            raise ValueError("superfast velocity field implemented for rings")
        return _kernels.fast_velocity_ring(x.cells, len(x.cells))
    v = int(v)
    if m == 1:
        if x.boundary == RING:
            return _kernels.fast_velocity_ring(x.cells, v)
        pad = v + 1
        emb = _embed(x, pad)
        out = np.zeros(len(emb), dtype=np.int64)
        pos = np.flatnonzero(emb)
        if len(pos):
            gaps = np.empty(len(pos), dtype=np.int64)
            gaps[:-1] = pos[1:] - pos[:-1] - 1
            gaps[-1] = v
            out[pos] = np.minimum(gaps, v)
        return out[pad : pad + len(x.cells)]
    if v == 1:
        if x.boundary == RING:
            right = np.roll(x.cells, -1)
        else:
            right = np.concatenate([x.cells[1:], [x.right_fill]])
        return np.minimum(x.cells, m - right)
    # multi-lane, v > 1: sum of per-lane displacements under the staircase split
    from .sawtooth import redirect_arrays

    if x.boundary == RING:
        total = x.particle_total()
        k = _lane_count_factor(total, m)
        cells = np.tile(x.cells, k)
        lanes = redirect_arrays(cells, m, 0, ring_cut=True)
        vel = np.sum([_kernels.fast_velocity_ring(lane, v) for lane in lanes], axis=0)
        return vel[: len(x.cells)]
    lanes = redirect_arrays(x.cells, m, 0, ring_cut=False)
    vels = []
    for lane in lanes:
        cfg = Configuration(lane, 1, PADDED, min(x.left_fill, 1), min(x.right_fill, 1))
        vels.append(velocity_field(cfg, v))
    return np.sum(vels, axis=0)


def local_velocity(x: Configuration, i: int, v) -> int:
    """Summed per-particle displacement realized at site i on the next step."""
    if x.boundary == RING:
        return int(velocity_field(x, v)[i % len(x.cells)])
    if 0 <= i < len(x.cells):
        return int(velocity_field(x, v)[i])
    # fill sites: all-empty tail has velocity 0; all-full tail is blocked
    # except at the boundary, which callers resolve by widening the core
    fill = x.left_fill if i < 0 else x.right_fill
    if fill == 0:
        return 0
    raise ValueError("local velocity inside an all-full tail is not resolvable")


def flux_window(x: Configuration, w: WindowSpec, v) -> Fraction:
    """Mean local velocity over the window (particles crossing per site per step)."""
    vel = velocity_field(x, v)
    n = len(x.cells)
    idx = np.arange(w.start, w.end + 1)
    if x.boundary == RING:
        values = vel[idx % n]
    else:
        inside = (idx >= 0) & (idx < n)
        values = np.zeros(len(idx), dtype=np.int64)
        values[inside] = vel[idx[inside]]
        if x.left_fill or x.right_fill:
            for j, i in enumerate(idx):
                if not inside[j]:
                    values[j] = local_velocity(x, int(i), v)
    return Fraction(int(values.sum()), len(idx))


def full_ring_flux(x: Configuration, v) -> Fraction:
    return flux_window(x, WindowSpec(0, len(x.cells) - 1), v)


def flux_pattern_sum(x: Configuration, v: int) -> Fraction:
    """Flux as a sum of pattern densities: sum over i <= v of the density of
    the word (1, 0 x i) on the ring.  Equals the mean local velocity."""
    from .core import ring_pattern_density

    if x.boundary != RING or x.lanes != 1:
        raise ValueError("flux_pattern_sum requires a binary ring")
    total = Fraction(0)
    for i in range(1, v + 1):
        pattern = np.zeros(i + 1, dtype=np.int64)
        pattern[0] = 1
        total += ring_pattern_density(x, pattern)
    return total


def fundamental_flux(rho: Fraction, v: int, m: int) -> Fraction:
    """Piecewise limit flux: v*rho below the critical density m/(v+1), else
    m - rho."""
    rho = Fraction(rho)
    if rho < 0 or rho > m:
        raise ValueError("density outside [0, M]")
    if rho <= Fraction(m, v + 1):
        return v * rho
    return m - rho


def run_to_flux(x: Configuration, v: int, t_max: int) -> FluxReport:
    """Evolve a ring until its flux settles at the predicted limit value
    (two consecutive matches), up to t_max steps."""
    if x.boundary != RING:
        raise ValueError("flux reports are measured on rings")
    m = x.lanes
    rho = x.density()
    predicted = fundamental_flux(rho, v, m)
    params = FlowParams(v, m)
    matches = 0
    transient = t_max
    for t in range(t_max + 1):
        flux = full_ring_flux(x, v)
        if flux == predicted:
            if matches == 0:
                transient = t
            matches += 1
            if matches >= 2:
                break
        else:
            matches = 0
            transient = t_max
        if t < t_max:
            x = step(x, params)
    return FluxReport(rho, flux, predicted, min(transient, t_max))
