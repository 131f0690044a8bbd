"""Command-line experiment driver.

Subcommands: fundamental-diagram | lifetime | converge | tracer |
pushforward | redirect | simulate.  Options may also be supplied through a
plain-text config file of key=value lines ('#' starts a comment); explicit
flags override file values, and unknown keys are rejected.  All randomness
derives from --seed, so identical invocations produce byte-identical CSV.

Exit codes: 0 success, 1 computational error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from .clusters import (
    CLEAN,
    free_violation_radius,
    minimal_index,
    minimal_word_catalog,
    simulated_lifetime,
)
from .core import PADDED, RING, Configuration
from .dynamics import FlowParams, evolve, run_to_flux
from .measures import SampleSpec, bernoulli_config, exact_count_ring, pushforward_iterated
from .sawtooth import redirection_report
from .tracer import ALONG, tracer_run


class UsageError(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return _fmt(float(value))
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(c) for c in row))
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def _parse_boundary(text: str):
    if text == "ring":
        return (RING, 0, 0)
    if text.startswith("padded:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("padded boundary must look like padded:LF:RF")
        return (PADDED, int(parts[1]), int(parts[2]))
    raise UsageError(f"unknown boundary {text!r}")


def _parse_initial(text: str, lanes: int, boundary) -> Configuration:
    try:
        cells = [int(ch) for ch in text.strip()]
    except ValueError as exc:
        raise UsageError(f"initial configuration must be a digit string, got {text!r}") from exc
    kind, lf, rf = boundary
    return Configuration(cells, lanes, kind, lf, rf)


def _sampled_ring(length: int, lanes: int, density: float, seed: int) -> Configuration:
    particles = round(density * length)
    return exact_count_ring(length, lanes, particles, seed)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_fundamental_diagram(args) -> int:
    if args.length < 10:
        raise UsageError("--length must be at least 10")
    if args.density_grid < 1:
        raise UsageError("--density-grid must be positive")
    v_list = _parse_int_list(args.v)
    m_list = _parse_int_list(args.lanes)
    rows = []
    sample_index = 0
    for v in v_list:
        for m in m_list:
            for g in range(1, args.density_grid + 1):
                rho = Fraction(g * m, args.density_grid + 1)
                particles = round(rho * args.length)
                cfg = exact_count_ring(args.length, m, particles, args.seed + sample_index)
                sample_index += 1
                report = run_to_flux(cfg, v, 2 * args.length)
                rows.append(
                    (
                        v,
                        m,
                        args.length,
                        report.rho,
                        report.flux_measured,
                        report.flux_predicted,
                        report.transient_steps,
                    )
                )
    _write_csv(
        args.output,
        ["v", "M", "L", "density", "flux_measured", "flux_predicted", "transient_steps"],
        rows,
    )
    return 0


def cmd_lifetime(args) -> int:
    if args.n_max > 10:
        raise UsageError("--n-max beyond 10 exceeds the enumeration budget")
    rows = []
    all_match = True
    for n in range(1, args.n_max + 1):
        for word in minimal_word_catalog(n):
            cfg = Configuration(word, 1, PADDED, 0, 0)
            end = len(word) - 1
            idx = minimal_index(cfg, end)
            predicted = (end - idx - 1) // 2
            ones = int(word.sum())
            rear = int(np.flatnonzero(word)[ones - 1])
            # rear of the terminal particle run
            while rear - 1 >= 0 and word[rear - 1] == 1:
                rear -= 1
            simulated = simulated_lifetime(cfg, rear, v=1)
            match = predicted == simulated == ones - 1
            all_match &= match
            rows.append(("".join(str(int(c)) for c in word), predicted, simulated, str(match).lower()))
    _write_csv(args.output, ["word", "predicted", "simulated", "match"], rows)
    return 0 if all_match else 1


def cmd_converge(args) -> int:
    rows = []
    slopes = []
    p = Fraction(args.density).limit_denominator(10**6)
    for s in range(args.seeds):
        cfg = bernoulli_config(SampleSpec(p, 1, args.length, args.seed + s))
        params = FlowParams(1, 1)
        for t in range(args.steps + 1):
            if t % args.radius_every == 0 or t == args.steps:
                radius = free_violation_radius(cfg, origin=0, v=1)
                shown = radius if radius != CLEAN else "clean"
                rows.append((s, t, shown))
            if t < args.steps:
                cfg = evolve(cfg, params, 1)
        final = radius if radius != CLEAN else args.length // 2
        slopes.append(final / args.steps if args.steps else 0.0)
    median = float(np.median(slopes))
    rows.append(("median_slope", args.steps, median))
    _write_csv(args.output, ["seed", "t", "radius"], rows)
    return 0


def cmd_tracer(args) -> int:
    if args.initial:
        cfg = _parse_initial(args.initial, 1, (RING, 0, 0))
    else:
        cfg = _sampled_ring(args.length, 1, args.density, args.seed)
    cfg = evolve(cfg, FlowParams(args.v, 1), args.prewarm)
    trajectory, _velocity = tracer_run(cfg, args.start, args.direction, args.v, args.steps)
    rows = [
        (st.steps, st.position, st.displacement, st.displacement / st.steps if st.steps else 0.0)
        for st in trajectory
    ]
    _write_csv(args.output, ["step", "position", "displacement", "running_velocity"], rows)
    return 0


def cmd_pushforward(args) -> int:
    word = [int(ch) for ch in args.word]
    p = Fraction(args.p)
    value = pushforward_iterated(args.v, word, p, args.t)
    rows = [(args.v, args.word, args.p, args.t, float(value), f"{value.numerator}/{value.denominator}")]
    _write_csv(args.output, ["v", "word", "p", "t", "value", "value_exact"], rows)
    return 0


def cmd_redirect(args) -> int:
    if args.initial:
        boundary = _parse_boundary(args.boundary)
        cfg = _parse_initial(args.initial, args.lanes, boundary)
    else:
        cfg = _sampled_ring(args.length, args.lanes, args.density, args.seed)
    rows, predicted = redirection_report(cfg, args.v)
    _write_csv(args.output, ["site", "slot", "lane"], rows)
    print(f"predicted_flux={_fmt(predicted)} ({predicted.numerator}/{predicted.denominator})", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    boundary = _parse_boundary(args.boundary)
    if args.initial:
        cfg = _parse_initial(args.initial, args.lanes, boundary)
    else:
        if boundary[0] != RING:
            raise UsageError("sampling supports ring boundaries; pass --initial for padded runs")
        cfg = _sampled_ring(args.length, args.lanes, args.density, args.seed)
    cfg = evolve(cfg, FlowParams(args.v, args.lanes), args.steps)
    rows = [(i, int(c)) for i, c in enumerate(cfg.cells)]
    _write_csv(args.output, ["site", "value"], rows)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

_DEFAULTS = {
    "fundamental-diagram": dict(v="1,2,3", lanes="1,2,3", length=600, density_grid=25, seed=0, output="-"),
    "lifetime": dict(n_max=8, output="-"),
    "converge": dict(density=0.3, length=4096, steps=500, seeds=20, seed=0, radius_every=50, output="-"),
    "tracer": dict(
        v=2, length=3000, density=0.25, direction=ALONG, steps=2000, seed=0,
        start=0, prewarm=0, initial=None, output="-",
    ),
    "pushforward": dict(v=1, word="1", p="1/2", t=1, output="-"),
    "redirect": dict(
        v=1, lanes=2, length=64, density=0.5, seed=0, initial=None,
        boundary="ring", output="-",
    ),
    "simulate": dict(
        v=1, lanes=1, length=64, density=0.5, steps=0, seed=0, initial=None,
        boundary="ring", output="-",
    ),
}

_HANDLERS = {
    "fundamental-diagram": cmd_fundamental_diagram,
    "lifetime": cmd_lifetime,
    "converge": cmd_converge,
    "tracer": cmd_tracer,
    "pushforward": cmd_pushforward,
    "redirect": cmd_redirect,
    "simulate": cmd_simulate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jamflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(cmd, *specs):
        p = sub.add_parser(cmd)
        p.add_argument("--config", default=None)
        p.add_argument("--output", default=None)
        for flag, kwargs in specs:
            p.add_argument(flag, default=None, **kwargs)
        return p

    add(
        "fundamental-diagram",
        ("--v", dict(help="comma list of maximal velocities")),
        ("--lanes", dict(help="comma list of lane counts")),
        ("--length", dict(type=int)),
        ("--density-grid", dict(type=int, dest="density_grid")),
        ("--seed", dict(type=int)),
    )
    add("lifetime", ("--n-max", dict(type=int, dest="n_max")))
    add(
        "converge",
        ("--density", dict(type=float)),
        ("--length", dict(type=int)),
        ("--steps", dict(type=int)),
        ("--seeds", dict(type=int)),
        ("--seed", dict(type=int)),
        ("--radius-every", dict(type=int, dest="radius_every")),
    )
    add(
        "tracer",
        ("--v", dict(type=int)),
        ("--length", dict(type=int)),
        ("--density", dict(type=float)),
        ("--direction", dict(choices=["along", "against"])),
        ("--steps", dict(type=int)),
        ("--seed", dict(type=int)),
        ("--start", dict(type=int)),
        ("--prewarm", dict(type=int)),
        ("--initial", dict()),
    )
    add(
        "pushforward",
        ("--v", dict(type=int)),
        ("--word", dict()),
        ("--p", dict()),
        ("--t", dict(type=int)),
    )
    add(
        "redirect",
        ("--v", dict(type=int)),
        ("--lanes", dict(type=int)),
        ("--length", dict(type=int)),
        ("--density", dict(type=float)),
        ("--seed", dict(type=int)),
        ("--initial", dict()),
        ("--boundary", dict()),
    )
    add(
        "simulate",
        ("--v", dict(type=int)),
        ("--lanes", dict(type=int)),
        ("--length", dict(type=int)),
        ("--density", dict(type=float)),
        ("--steps", dict(type=int)),
        ("--seed", dict(type=int)),
        ("--initial", dict()),
        ("--boundary", dict()),
    )
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line without '=': {raw.strip()!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    defaults = dict(_DEFAULTS[args.command])
    if args.config:
        overrides = _read_config(args.config)
        unknown = set(overrides) - set(defaults)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for key, raw in overrides.items():
            current = defaults[key]
            if isinstance(current, bool):
                defaults[key] = raw.lower() in ("1", "true", "yes")
            elif isinstance(current, int):
                defaults[key] = int(raw)
            elif isinstance(current, float):
                defaults[key] = float(raw)
            else:
                defaults[key] = raw
    for key, fallback in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, fallback)
    return args


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args = _resolve(args)
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
