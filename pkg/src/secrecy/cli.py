"""Command-line front end.

Instance files are JSON documents::

    {
      "x_labels": ["0", "1"],          # optional, defaults to indices
      "z_labels": ["0", "1"],          # optional
      "source": [0.75, 0.25],
      "distortion": [[0, 1], [1, 0]]   # rows are source symbols
    }

Channel files hold ``{"channel": [[...], ...]}`` with rows indexed by the
auxiliary symbol and columns by the source symbol, each column summing to
one.

Exit codes: 0 success (or "inside" for ``check``), 1 negative verdict,
2 usage or validation error, 3 numerical failure.

Corner points are distributions at which the eavesdropper's *minimizing*
reconstructions tie at least as many times as the support size.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from .core import ProblemInstance, ValidationError, entropy
from .corners import enumerate_corner_points
from .lp import SolverError, in_region, solve_key_distortion_lp, tradeoff_curve
from .oracle import AuxChannel, oracle_max_distortion
from .scheme_sim import DEFAULT_DELTA, DEFAULT_EPS, SchemeConfig, run_monte_carlo

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

GAP_WARNING = 1e-2
AUTO_WEIGHT_TOL = 1e-12

_REAL_ARRAY = {"type": "array", "items": {"type": "number"}, "minItems": 1}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["source", "distortion"],
    "properties": {
        "x_labels": {"type": "array", "items": {"type": "string"}},
        "z_labels": {"type": "array", "items": {"type": "string"}},
        "source": _REAL_ARRAY,
        "distortion": {"type": "array", "items": _REAL_ARRAY, "minItems": 1},
    },
    "additionalProperties": False,
}

CHANNEL_SCHEMA = {
    "type": "object",
    "required": ["channel"],
    "properties": {
        "u_labels": {"type": "array", "items": {"type": "string"}},
        "channel": {"type": "array", "items": _REAL_ARRAY, "minItems": 1},
    },
    "additionalProperties": False,
}


class UsageError(Exception):
    """Bad arguments or unreadable input; maps to exit code 2."""


# ----------------------------------------------------------------------
# input


def _load_json(path: str, schema: dict) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc})") from exc
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"{path}: {exc.message}") from exc
    return doc


class LoadedInstance:
    def __init__(self, instance: ProblemInstance, x_labels: list[str], z_labels: list[str]):
        self.instance = instance
        self.x_labels = x_labels
        self.z_labels = z_labels


def load_instance(path: str) -> LoadedInstance:
    doc = _load_json(path, INSTANCE_SCHEMA)
    rows = doc["distortion"]
    if len({len(r) for r in rows}) != 1:
        raise UsageError(f"{path}: distortion rows have different lengths")
    instance = ProblemInstance(np.array(doc["source"], dtype=float), np.array(rows, dtype=float))
    nx, nz = instance.distortion.shape
    x_labels = doc.get("x_labels", [str(i) for i in range(nx)])
    z_labels = doc.get("z_labels", [str(i) for i in range(nz)])
    if len(x_labels) != nx or len(z_labels) != nz:
        raise UsageError(f"{path}: label lists do not match the distortion table shape")
    return LoadedInstance(instance, list(x_labels), list(z_labels))


def instance_to_dict(loaded: LoadedInstance) -> dict:
    return {
        "x_labels": loaded.x_labels,
        "z_labels": loaded.z_labels,
        "source": _reals(loaded.instance.source.probs),
        "distortion": _reals(loaded.instance.distortion.values),
    }


def load_channel(path: str) -> AuxChannel:
    doc = _load_json(path, CHANNEL_SCHEMA)
    rows = doc["channel"]
    if len({len(r) for r in rows}) != 1:
        raise UsageError(f"{path}: channel rows have different lengths")
    return AuxChannel(np.array(rows, dtype=float))


# ----------------------------------------------------------------------
# output


def _real(x) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _reals(a):
    """Nested lists of floats; ``json`` writes the shortest exact repr."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return _real(a)
    return [_reals(v) for v in a]


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to a sibling temp file, then rename over ``path``."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# commands


def corners_document(loaded: LoadedInstance) -> dict:
    corners = enumerate_corner_points(loaded.instance.distortion)
    return {
        "instance": instance_to_dict(loaded),
        "corners": [
            {
                "p": _reals(c.p.probs),
                "alpha": _real(c.alpha),
                "beta": _real(c.beta),
                "ties": list(c.ties),
                "tie_labels": [loaded.z_labels[z] for z in c.ties],
                "support": list(c.support),
            }
            for c in corners
        ],
    }


def cmd_corners(args) -> int:
    loaded = load_instance(args.instance)
    _emit(dumps(corners_document(loaded)), args.out)
    return EXIT_OK


def curve_rows(curve, grid: float | None) -> list[tuple[float, float, str]]:
    """Breakpoint rows, plus interpolated rows every ``grid`` up to saturation."""
    rows = [(r, d, "breakpoint") for r, d in curve.breakpoints]
    if grid is not None:
        if not grid > 0:
            raise UsageError("--grid must be positive")
        top = curve.saturation_rate
        count = int(math.floor(top / grid + 1e-9))
        if count > 100000:
            raise UsageError("--grid step is too fine")
        known = {r for r, _, _ in rows}
        for i in range(count + 1):
            r = i * grid
            if r not in known:
                rows.append((r, curve(r), "grid"))
        rows.sort(key=lambda t: (t[0], t[2] != "breakpoint"))
    return rows


def cmd_curve(args) -> int:
    loaded = load_instance(args.instance)
    inst = loaded.instance
    corners = enumerate_corner_points(inst.distortion)
    curve = tradeoff_curve(corners, inst.source)
    rows = curve_rows(curve, args.grid)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["R0", "D", "kind"])
    for r, d, kind in rows:
        writer.writerow([_fmt17(r), _fmt17(d), kind])
    csv_text = buf.getvalue()

    doc = {
        "instance": instance_to_dict(loaded),
        "saturation_rate": _real(curve.saturation_rate),
        "saturation_distortion": _real(curve.saturation_distortion),
        "source_entropy": _real(entropy(inst.source)),
        "breakpoints": [
            {
                "R0": _real(r),
                "D": _real(d),
                "mu": _reals(mu.mu),
                "corners": [_reals(c.p.probs) for c in corners],
            }
            for (r, d), mu in zip(curve.breakpoints, curve.decompositions)
        ],
        "rows": [{"R0": _real(r), "D": _real(d), "kind": k} for r, d, k in rows],
    }
    if args.csv:
        write_atomic(args.csv, csv_text)
    if args.json:
        write_atomic(args.json, dumps(doc))
    if not args.csv and not args.json:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_check(args) -> int:
    loaded = load_instance(args.instance)
    inst = loaded.instance
    corners = enumerate_corner_points(inst.distortion)
    d_star, _ = solve_key_distortion_lp(corners, inst.source, max(args.r0, 0.0))
    inside = in_region(inst, args.r0, args.r, args.d, corners=corners)
    sys.stdout.write(dumps({
        "R0": _real(args.r0),
        "R": _real(args.r),
        "D": _real(args.d),
        "rate_requirement": _real(entropy(inst.source)),
        "max_distortion": _real(d_star),
        "inside": inside,
    }))
    return EXIT_OK if inside else EXIT_NEGATIVE


def cmd_oracle(args) -> int:
    loaded = load_instance(args.instance)
    inst = loaded.instance
    if args.r0 < 0:
        raise UsageError("--r0 must be nonnegative")
    corners = enumerate_corner_points(inst.distortion)
    d_star, _ = solve_key_distortion_lp(corners, inst.source, args.r0)
    u_size = args.usize if args.usize is not None else len(corners)
    if u_size < 1 or args.restarts < 1:
        raise UsageError("--usize and --restarts must be at least 1")
    res = oracle_max_distortion(inst, args.r0, u_size=u_size, restarts=args.restarts, seed=args.seed)
    gap = d_star - res.d_lower
    sys.stdout.write(dumps({
        "R0": _real(args.r0),
        "u_size": u_size,
        "restarts": args.restarts,
        "seed": args.seed,
        "d_lower": _real(res.d_lower),
        "lp_distortion": _real(d_star),
        "gap": _real(gap),
        "evaluated": res.evaluated,
        "channel": _reals(res.best.cond) if res.best is not None else None,
        "key_rate": _real(res.point.key_rate) if res.point is not None else None,
    }))
    if not gap <= GAP_WARNING:
        print(f"warning: oracle gap {gap:.3g} exceeds {GAP_WARNING:g}", file=sys.stderr)
    return EXIT_OK


def auto_channel(instance: ProblemInstance, R0: float) -> AuxChannel:
    """Channel whose posteriors are the corner points of an optimal LP mixture.

    Each corner with positive weight ``mu_k`` becomes an auxiliary symbol,
    with ``p(u_k | x) = mu_k p_k(x) / p0(x)``.  Source symbols of zero mass
    get a uniform column so the table stays a channel.
    """
    corners = enumerate_corner_points(instance.distortion)
    p0 = instance.source.probs
    _, mix = solve_key_distortion_lp(corners, p0, R0)
    keep = np.flatnonzero(mix.mu > AUTO_WEIGHT_TOL)
    joint = np.array([mix.mu[k] * corners[k].p.probs for k in keep])
    cond = np.zeros_like(joint)
    pos = p0 > 0
    cond[:, pos] = joint[:, pos] / joint[:, pos].sum(axis=0)
    cond[:, ~pos] = 1.0 / len(keep)
    return AuxChannel(cond)


def cmd_simulate(args) -> int:
    loaded = load_instance(args.instance)
    inst = loaded.instance
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.channel and args.auto:
        raise UsageError("give either --channel or --auto, not both")
    if args.channel:
        channel = load_channel(args.channel)
        source = {"kind": "file", "path": args.channel}
    elif args.auto:
        if args.r0 is None or args.r0 < 0:
            raise UsageError("--auto needs a nonnegative --r0")
        channel = auto_channel(inst, args.r0)
        source = {"kind": "auto", "R0": _real(args.r0)}
    else:
        raise UsageError("one of --channel or --auto is required")
    config = SchemeConfig(
        instance=inst,
        channel=channel,
        n=args.n,
        eps=args.eps,
        seed=args.seed,
        delta=args.delta,
        binning=args.binning,
        encoder=args.encoder,
        avoid_collisions=not args.no_avoid,
    )
    report = run_monte_carlo(config, args.trials, exact_causal=args.exact_causal)
    doc = _jsonable(report.to_dict())
    doc["channel"] = {"table": _reals(channel.cond), **source}
    doc["instance"] = instance_to_dict(loaded)
    _emit(dumps(doc), args.out)
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _real(obj)
    return obj


# ----------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="secrecy", description="Key rate versus forced eavesdropper distortion.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("corners", help="list the corner distributions")
    p.add_argument("instance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_corners)

    p = sub.add_parser("curve", help="key rate / distortion tradeoff")
    p.add_argument("instance")
    p.add_argument("--grid", type=float, help="also emit interpolated rows at this spacing")
    p.add_argument("--csv", help="write CSV here instead of stdout")
    p.add_argument("--json", help="write the JSON document with decompositions here")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("check", help="region membership of (R0, R, D)")
    p.add_argument("instance")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", help="brute-force channel search")
    p.add_argument("instance")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--usize", type=int)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo run of the keyed cover-and-bin scheme")
    p.add_argument("instance")
    p.add_argument("--channel")
    p.add_argument("--auto", action="store_true")
    p.add_argument("--r0", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--binning", choices=("index", "hash"), default="index")
    p.add_argument("--encoder", choices=("likelihood", "typical"), default="likelihood")
    p.add_argument("--no-avoid", action="store_true", help="do not prefer decodable codewords")
    p.add_argument("--exact-causal", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
