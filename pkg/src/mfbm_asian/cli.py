"""Command-line front end: ``price``, ``sweep`` and ``validate``.

Exit codes: 0 success, 1 validation run with a violated check, 2 invalid
parameter, 64 unknown flag or malformed command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import numpy as np

from . import validation
from .model import ModelParams, OptionContract
from .montecarlo import McConfig
from .pricing import price

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2
EXIT_USAGE = 64

SEED_ENV = "MFBM_ASIAN_SEED"

# flag dest -> (target, field, parser); target is "model" or "contract"
PARAMS = {
    "s0": ("model", "s0", float),
    "r": ("model", "r", float),
    "q": ("model", "q", float),
    "sigma": ("model", "sigma", float),
    "eps": ("model", "epsilon", float),
    "h": ("model", "hurst", float),
    "lambda": ("model", "lam", float),
    "mu_j": ("model", "mu_j", float),
    "sigma_j": ("model", "sigma_j", float),
    "k": ("contract", "strike", float),
    "t": ("contract", "maturity", float),
    "kind": ("contract", "kind", str),
    "avg": ("contract", "averaging", str),
    "m": ("contract", "power", int),
    "fidelity": ("contract", "fidelity", str),
}

DEFAULTS = {
    "s0": 100.0, "r": 0.05, "q": 0.0, "sigma": 0.2, "eps": 0.0, "h": 0.5,
    "lambda": 0.0, "mu_j": 0.0, "sigma_j": 0.0, "kind": "call", "avg": "geometric",
    "m": 1, "fidelity": "paper",
}

FIELD_NAMES = {"k": "strike", "t": "maturity"}

SWEEP_AXES = {
    "hurst": "h", "sigma_j": "sigma_j", "mu_j": "mu_j", "strike": "k", "maturity": "t",
}


class UsageError(Exception):
    pass


class ParamError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def fmt(x) -> str:
    """12 significant digits; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model and contract")
    g.add_argument("--s0", type=float, help="spot price (default 100)")
    g.add_argument("--k", type=float, help="strike (required)")
    g.add_argument("--t", type=float, help="maturity in years (required)")
    g.add_argument("--r", type=float, help="risk-free rate (default 0.05)")
    g.add_argument("--q", type=float, help="dividend yield (default 0)")
    g.add_argument("--sigma", type=float, help="Brownian volatility (default 0.2)")
    g.add_argument("--eps", type=float, help="fractional volatility (default 0)")
    g.add_argument("--h", type=float, help="Hurst exponent (default 0.5)")
    g.add_argument("--lambda", dest="lambda", type=float, help="jump intensity (default 0)")
    g.add_argument("--mu-j", dest="mu_j", type=float, help="mean jump log-size (default 0)")
    g.add_argument("--sigma-j", dest="sigma_j", type=float,
                   help="jump log-size std deviation (default 0)")
    g.add_argument("--kind", choices=("call", "put"), help="default call")
    g.add_argument("--avg", choices=("geometric", "arithmetic"), help="default geometric")
    g.add_argument("--m", type=int, help="payoff power (default 1)")
    g.add_argument("--fidelity", choices=("paper", "consistent"), help="default paper")
    g.add_argument("--config", help="file of key=value lines; flags take precedence")


def read_config(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ParamError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParamError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in PARAMS:
            raise ParamError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def resolve_params(args: argparse.Namespace) -> dict:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key in PARAMS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    for key in ("k", "t"):
        if key not in merged:
            raise ParamError(f"missing required parameter {FIELD_NAMES[key]} (--{key})")
    out = {}
    for key, (_, _, conv) in PARAMS.items():
        try:
            out[key] = conv(merged[key])
        except ValueError as exc:
            raise ParamError(f"invalid value for --{key}: {merged[key]!r}") from exc
    return out


def build(values: dict) -> tuple[ModelParams, OptionContract]:
    model_kw, contract_kw = {}, {}
    for key, (target, name, _) in PARAMS.items():
        (model_kw if target == "model" else contract_kw)[name] = values[key]
    try:
        return ModelParams(**model_kw), OptionContract(**contract_kw)
    except ValueError as exc:
        raise ParamError(str(exc)) from exc


def cmd_price(args, out) -> int:
    model, contract = build(resolve_params(args))
    res = price(model, contract)
    if args.format == "csv":
        header = ["price", "lower_bound", "upper_bound", "error_bound", "series_terms",
                  "truncation_bound", "warnings"]
        row = [fmt(res.price), fmt(res.lower_bound), fmt(res.upper_bound),
               fmt(res.error_bound), fmt(res.series_terms), fmt(res.truncation_bound),
               ";".join(res.warnings)]
        _write_csv(out, header, [row])
    else:
        out.write(json.dumps(res.as_dict()) + "\n")
    return EXIT_OK


def _write_csv(out, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    out.write(buf.getvalue())


def _axis_values(name, start, stop, count) -> np.ndarray:
    if count is None or count < 2:
        raise ParamError(f"{name}: count must be >= 2")
    if not start < stop:
        raise ParamError(f"{name}: start must be < stop")
    return np.linspace(start, stop, count)


def monotone_direction(values) -> str:
    d = np.diff(np.asarray(values, dtype=float))
    if np.all(d == 0):
        return "flat"
    if np.all(d >= 0):
        return "increasing"
    if np.all(d <= 0):
        return "decreasing"
    return "mixed"


def cmd_sweep(args, out) -> int:
    values = resolve_params_for_sweep(args)
    axis1 = _axis_values(args.axis, args.start, args.stop, args.count)
    axes = [(SWEEP_AXES[args.axis], axis1)]
    if args.axis2:
        if args.axis2 == args.axis:
            raise ParamError("axis2 must differ from axis")
        axes.append((SWEEP_AXES[args.axis2],
                     _axis_values(args.axis2, args.start2, args.stop2, args.count2)))

    header = ["axis_value"] + (["axis2_value"] if len(axes) == 2 else [])
    header += ["price", "lower_bound", "upper_bound", "error_bound", "series_terms"]
    rows, prices = [], []
    points = np.array(np.meshgrid(*[a for _, a in axes], indexing="ij")).reshape(len(axes), -1).T
    for point in points:
        v = dict(values)
        for (key, _), x in zip(axes, point):
            v[key] = float(x)
        model, contract = build(v)
        res = price(model, contract)
        prices.append(res.price)
        rows.append([fmt(x) for x in point] + [
            fmt(res.price), fmt(res.lower_bound), fmt(res.upper_bound),
            fmt(res.error_bound), fmt(res.series_terms)])
    _write_csv(out, header, rows)
    if len(axes) == 1:
        print(f"direction={monotone_direction(prices)}", file=sys.stderr)
    return EXIT_OK


def resolve_params_for_sweep(args) -> dict:
    # swept fields need no value of their own
    swept = {SWEEP_AXES[a] for a in (args.axis, args.axis2) if a}
    patched = argparse.Namespace(**vars(args))
    for key in swept:
        if getattr(patched, key, None) is None:
            setattr(patched, key, 1.0)
    return resolve_params(patched)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise ParamError(f"{SEED_ENV} must be an integer, got {env!r}") from exc


def cmd_validate(args, out) -> int:
    seed = _seed(args)
    if args.oracle == "conditional":
        cases = validation.conditional_cases(args.grid)
        checks = validation.run_conditional(cases, args.samples or 10**6, seed)
    else:
        cases = validation.path_cases(args.grid)
        config = McConfig(n_paths=args.samples or 10**5, n_steps=args.steps, seed=seed,
                          threads=args.threads)
        checks = validation.run_path(cases, config)
    header = ["case", "check", "analytic", "oracle_mean", "std_error", "z", "status", "detail"]
    rows = []
    for c in checks:
        status = ("pass" if c.passed else "FAIL") if c.gating else "info"
        rows.append([c.label, c.kind, fmt(c.analytic), fmt(c.oracle_mean), fmt(c.std_error),
                     f"{c.z:.3f}", status, c.detail])
    _write_csv(out, header, rows)
    ok = validation.all_passed(checks)
    failed = sum(1 for c in checks if c.gating and not c.passed)
    out.write(f"# {len(checks)} checks, {failed} gating failures\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mfbm-asian", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("price", help="price one contract")
    _add_param_flags(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    s = sub.add_parser("sweep", help="price along one or two parameter axes (CSV)")
    _add_param_flags(s)
    s.add_argument("--axis", choices=tuple(SWEEP_AXES), required=True)
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float, required=True)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--axis2", choices=tuple(SWEEP_AXES))
    s.add_argument("--start2", type=float)
    s.add_argument("--stop2", type=float)
    s.add_argument("--count2", type=int)
    s.add_argument("--out", help="write CSV here instead of stdout")

    v = sub.add_parser("validate", help="compare closed forms against an oracle")
    v.add_argument("--oracle", choices=("conditional", "path"), required=True)
    v.add_argument("--grid", choices=("small", "full"), default="small")
    v.add_argument("--seed", type=int, help=f"defaults to ${SEED_ENV}, then 0")
    v.add_argument("--samples", type=int, help="oracle samples per case")
    v.add_argument("--steps", type=int, default=256, help="time steps (path oracle)")
    v.add_argument("--threads", type=int, default=1)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        message = str(exc)
        print(message, file=sys.stderr)
        # bad values of known flags are parameter errors, anything else is usage
        return EXIT_USAGE if "unrecognized arguments" in message else EXIT_INVALID
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "price":
            return cmd_price(args, out)
        if args.command == "sweep":
            if args.out:
                with open(args.out, "w", encoding="utf-8", newline="") as fh:
                    return cmd_sweep(args, fh)
            return cmd_sweep(args, out)
        return cmd_validate(args, out)
    except (ParamError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
