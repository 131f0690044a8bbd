"""Passive tracer riding a single-lane flow.

Between flow steps the tracer jumps to the nearest particle in its chosen
direction; then the flow advances one step.  Displacement is signed along
increasing indices, so a tracer moving against the flow accumulates negative
distance.  On rings the tracer may lap; displacement counts the full
traversal, not the residue.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import RING, Configuration
from .dynamics import FlowParams, step

ALONG = "along"
AGAINST = "against"


@dataclass(frozen=True)
class TracerState:
    config: Configuration
    position: int
    direction: str = ALONG
    displacement: int = 0
    steps: int = 0

    def velocity(self) -> float:
        return self.displacement / self.steps if self.steps else 0.0

    def __post_init__(self):
        if self.direction not in (ALONG, AGAINST):
            raise ValueError("direction must be along or against")
        if self.config.lanes != 1:
            raise ValueError("tracer rides single-lane flows")


def tau(x: Configuration, i: int, direction: str = ALONG) -> tuple[int, int]:
    """Nearest occupied site strictly beyond i in the given direction.

    Returns (site, signed displacement); on rings the search wraps and the
    displacement counts the traversal distance."""
    pos = np.flatnonzero(x.cells)
    n = len(x.cells)
    if x.boundary == RING:
        if len(pos) == 0:
            raise ValueError("tracer stranded: no particles")
        i_mod = i % n
        if direction == ALONG:
            d = (pos - i_mod - 1) % n + 1
        else:
            d = (i_mod - pos - 1) % n + 1
        k = int(d.min())
        target = (i_mod + k) % n if direction == ALONG else (i_mod - k) % n
        return target, k if direction == ALONG else -k
    if direction == ALONG:
        ahead = pos[pos > i]
        if len(ahead):
            j = int(ahead[0])
            return j, j - i
        if x.right_fill == 1:
            j = max(len(x.cells), i + 1)
            return j, j - i
        raise ValueError("tracer stranded: no particle ahead")
    behind = pos[pos < i]
    if len(behind):
        j = int(behind[-1])
        return j, j - i
    if x.left_fill == 1:
        j = min(-1, i - 1)
        return j, j - i
    raise ValueError("tracer stranded: no particle behind")


def tracer_step(state: TracerState, v) -> TracerState:
    """Jump to the nearest particle, then advance the flow one step."""
    target, delta = tau(state.config, state.position, state.direction)
    params = FlowParams(v, 1)
    return TracerState(
        step(state.config, params),
        target,
        state.direction,
        state.displacement + delta,
        state.steps + 1,
    )


def tracer_run(
    x: Configuration,
    start: int,
    direction: str,
    v,
    t: int,
) -> tuple[list[TracerState], float]:
    """Run the tracer for t steps; returns the trajectory (one state per
    step, including the start) and the average velocity displacement/t."""
    if t < 1:
        raise ValueError("t must be >= 1")
    state = TracerState(x, start, direction)
    trajectory = [state]
    for _ in range(t):
        state = tracer_step(state, v)
        trajectory.append(state)
    return trajectory, state.displacement / t
