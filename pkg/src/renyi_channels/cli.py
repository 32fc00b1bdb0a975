"""Command-line front end: ``renyi-channels <command> --channel '{...}' ...``."""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import verification
from .channel_info import cb_norm_solve, ea_capacity, renyi_channel_mi, sandwiched_channel_mi
from .channels import channel_from_spec
from .converse import (
    RenyiProfile,
    exponent_curve,
    simulate_superdense,
    strong_converse_exponent,
    success_prob_bound,
    thread_count,
    weak_converse_epsilon,
)
from .linalg import ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.6f}"


def _load_channel(args):
    if (args.channel is None) == (args.channel_file is None):
        raise ValidationError("give exactly one of --channel or --channel-file")
    if args.channel_file is not None:
        try:
            text = Path(args.channel_file).read_text()
        except OSError as exc:
            raise ValidationError(f"channel-file: cannot read {args.channel_file}: {exc.strerror}") from None
    else:
        text = args.channel
    return channel_from_spec(text)


def _alpha(value: float) -> float:
    if not (math.isfinite(value) and value > 1):
        raise ValidationError(f"alpha: must be a finite number > 1, got {value}")
    return value


def _rate(value: float) -> float:
    if not (math.isfinite(value) and value >= 0):
        raise ValidationError(f"rate: must be a finite number >= 0, got {value}")
    return value


def _uses(value: int) -> int:
    if value < 1:
        raise ValidationError(f"n: must be a positive integer, got {value}")
    return value


def _parse_tols(items):
    out = {}
    for item in items or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ValidationError(f"tol: expected name=value, got {item!r}")
        try:
            val = float(raw)
        except ValueError:
            raise ValidationError(f"tol: {key} must be a number, got {raw!r}") from None
        if not (math.isfinite(val) and val > 0):
            raise ValidationError(f"tol: {key} must be positive, got {raw!r}")
        out[key] = val
    return out


def _block(lines, out):
    for key, value in lines:
        print(f"{key}: {value}", file=out)


def cmd_capacity(args, out):
    n = _load_channel(args)
    rep = ea_capacity(n, restarts=args.restarts, seed=args.seed)
    print(f"{_fmt(rep.value)} bits", file=out)
    _block([("residual", f"{rep.residual:.6e}"), ("iterations", rep.iterations)], out)


def cmd_renyi_mi(args, out):
    n = _load_channel(args)
    alpha = _alpha(args.alpha)
    if args.family == "sandwiched":
        rep = sandwiched_channel_mi(n, alpha, seed=args.seed, restarts=args.restarts)
    else:
        rep = renyi_channel_mi(n, alpha, restarts=args.restarts, seed=args.seed)
    print(f"{_fmt(rep.value)} bits", file=out)
    lines = [("residual", f"{rep.residual:.6e}"), ("iterations", rep.iterations)]
    if rep.minmax_value is not None:
        lines.insert(0, ("minmax", _fmt(rep.minmax_value)))
    _block(lines, out)


def cmd_cb_norm(args, out):
    n = _load_channel(args)
    if not (math.isfinite(args.alpha) and args.alpha >= 1):
        raise ValidationError(f"alpha: CB norm needs a finite alpha >= 1, got {args.alpha}")
    value, _ = cb_norm_solve(n, args.alpha, restarts=args.restarts, seed=args.seed)
    print(_fmt(value), file=out)


def cmd_exponent(args, out):
    n = _load_channel(args)
    pt = strong_converse_exponent(n, _rate(args.rate), alpha_cap=_alpha(args.alpha_cap))
    print(f"E = {_fmt(pt.exponent)}", file=out)
    _block([("rate", _fmt(pt.rate)), ("alpha_star", _fmt(pt.alpha_star))], out)


def _rate_grid(args):
    if args.rates is not None:
        try:
            grid = [float(x) for x in args.rates.split(",") if x.strip()]
        except ValueError:
            raise ValidationError(f"rates: not a comma-separated list of numbers: {args.rates!r}") from None
    else:
        if args.steps < 2:
            raise ValidationError(f"steps: need at least 2 grid points, got {args.steps}")
        lo, hi = _rate(args.rate_min), _rate(args.rate_max)
        if hi < lo:
            raise ValidationError("rate-max: must not be below rate-min")
        grid = [lo + (hi - lo) * k / (args.steps - 1) for k in range(args.steps)]
    if not grid:
        raise ValidationError("rates: empty grid")
    for r in grid:
        _rate(r)
    return grid


def cmd_curve(args, out):
    n = _load_channel(args)
    grid = _rate_grid(args)
    points = exponent_curve(n, grid, alpha_cap=_alpha(args.alpha_cap))
    lines = ["R,E,alpha_star"]
    for p in points:
        vals = (p.rate, p.exponent, p.alpha_star)
        if not all(math.isfinite(v) for v in vals):
            raise ArithmeticError(f"non-finite curve value at R={p.rate!r}")
        lines.append(",".join(f"{v:.17g}" for v in vals))
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {len(points)} rows to {args.output}", file=out)
    else:
        out.write(text)


def cmd_epsilon_bound(args, out):
    n = _load_channel(args)
    uses, rate = _uses(args.n), _rate(args.rate)
    eps = weak_converse_epsilon(n, uses, rate)
    bound = success_prob_bound(n, uses, rate, alpha_cap=_alpha(args.alpha_cap))
    print(f"epsilon >= {_fmt(eps)}", file=out)
    _block([("strong-converse success bound", f"{bound:.6e}")], out)


def cmd_simulate(args, out):
    n = _load_channel(args)
    res = simulate_superdense(n, _uses(args.n), args.messages, profile=RenyiProfile(n))
    _block([("n", res.n), ("messages", res.messages), ("rate", _fmt(res.rate)),
            ("p_succ", f"{res.p_succ:.6e}"), ("bound", f"{res.bound:.6e}")], out)


def _run_check(check):
    return check()


def cmd_verify(args, out):
    tols = _parse_tols(args.tol)
    unknown = sorted(set(tols) - set(verification.QUICK_NAMES))
    if unknown:
        raise ValidationError(f"tol: unknown check {unknown[0]!r}; choose from {', '.join(verification.QUICK_NAMES)}")
    checks = verification.quick_battery(args.seed)
    threads = thread_count()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_check, checks))
    else:
        results = [c() for c in checks]
    failures = 0
    print(f"verify seed={args.seed}", file=out)
    for r in results:
        if r.name in tols:
            r = r.with_tol(tols[r.name])
        failures += not r.passed
        print(r.line(), file=out)
    print(f"{len(results) - failures}/{len(results)} checks passed", file=out)
    return EXIT_VERIFY if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="renyi-channels", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def channel_cmd(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--channel", help="channel spec as inline JSON")
        p.add_argument("--channel-file", help="path to a JSON channel spec")
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
        return p

    p = channel_cmd("capacity", cmd_capacity, "entanglement-assisted capacity")
    p.add_argument("--restarts", type=int, default=1)
    p = channel_cmd("renyi-mi", cmd_renyi_mi, "Renyi channel mutual information")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--family", choices=("sandwiched", "traditional"), default="sandwiched")
    p.add_argument("--restarts", type=int, default=1)
    p = channel_cmd("cb-norm", cmd_cb_norm, "completely bounded 1->alpha norm")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--restarts", type=int, default=1)
    p = channel_cmd("exponent", cmd_exponent, "strong-converse exponent at one rate")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--alpha-cap", type=float, default=1e4)
    p = channel_cmd("curve", cmd_curve, "exponent curve as CSV")
    p.add_argument("--rates", help="comma-separated ascending rates")
    p.add_argument("--rate-min", type=float, default=0.0)
    p.add_argument("--rate-max", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--alpha-cap", type=float, default=1e4)
    p.add_argument("--output", help="CSV path (default: stdout)")
    p = channel_cmd("epsilon-bound", cmd_epsilon_bound, "converse bounds on the error of an (n, R) code")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--alpha-cap", type=float, default=1e4)
    p = channel_cmd("simulate", cmd_simulate, "superdense coding over a Pauli channel")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--messages", type=int, default=4, help="messages per use (1-4)")
    p = sub.add_parser("verify", help="run the property-check battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a check tolerance")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        code = args.func(args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ArithmeticError, AssertionError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK if code is None else code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
