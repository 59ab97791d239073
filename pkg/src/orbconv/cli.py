"""``orbconv`` command line.

Every subcommand prints JSON (default) or CSV and echoes the effective run
configuration.  Settings come from flags, then ``--config FILE`` (JSON), then
built-in defaults.  Exit codes: 0 success, 2 invalid arguments or a request
below a regularity threshold, 3 quadrature budget exhausted, 4 invariant
violation or failed acceptance criterion.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .cartan import build_space
from .errors import (
    InvariantViolation,
    QuadratureBudgetError,
    SingularPointError,
    ThresholdError,
)
from .io import dump_csv, dump_json, fmt_float, write_output
from .spherical import DEFAULT_CONFIG, plancherel_weights, radial_jacobian, spherical_values

__all__ = ["main", "build_parser", "resolve_config", "DEFAULTS"]

EXIT_OK, EXIT_ARGS, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4

DEFAULTS = {
    "family": "real-hyperbolic",
    "n": 2,
    "m": 1,
    "m_alpha": None,
    "m_2alpha": None,
    "t": None,
    "lambda": None,
    "lambda_max": DEFAULT_CONFIG.lambda_max,
    "lambda_points": DEFAULT_CONFIG.lambda_points,
    "k_order": DEFAULT_CONFIG.k_order,
    "N": 100_000,
    "seed": 0,
    "bins": 100,
    "grid": None,
    "grid_points": 201,
    "k": 0,
    "samples": False,
    "out": None,
    "format": "json",
}

# keys that select output rather than define the computation
_NOT_ECHOED = {"out", "format", "config", "command", "quick", "only"}


class UsageError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _add_space(p):
    p.add_argument("--family", help="real-hyperbolic | complex-hyperbolic | generic-rank-one")
    p.add_argument("--n", type=int, help="n for real-hyperbolic H^n (default 2)")
    p.add_argument("--m", type=int, help="m for complex-hyperbolic")
    p.add_argument("--m-alpha", dest="m_alpha", type=int, help="m_alpha for generic-rank-one")
    p.add_argument("--m-2alpha", dest="m_2alpha", type=int, help="m_2alpha for generic-rank-one")


def _add_common(p):
    p.add_argument("--config", help="JSON file with default settings")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", choices=("json", "csv"))


def _add_quad(p):
    p.add_argument("--lambda-max", dest="lambda_max", type=float,
                   help="spectral cutoff / grid end")
    p.add_argument("--lambda-points", dest="lambda_points", type=int,
                   help="grid points (spherical) or nodes per spectral panel")
    p.add_argument("--k-order", dest="k_order", type=int,
                   help="starting order of the quadrature over K")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbconv",
        description="Convolutions of orbital measures on rank-one symmetric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="root data of a symmetric space")
    _add_space(p)
    _add_common(p)

    p = sub.add_parser("spherical", help="spherical function on a lambda grid")
    _add_space(p)
    _add_common(p)
    _add_quad(p)
    p.add_argument("--t", help="radial point (single value)")
    p.add_argument("--lambda", dest="lambda", help="explicit comma-separated lambda values")

    p = sub.add_parser("l2", help="Plancherel L2 norm and threshold verdict")
    _add_space(p)
    _add_common(p)
    _add_quad(p)
    p.add_argument("--t", help="generators t_1,...,t_r")

    p = sub.add_parser("density", help="radial density (or its k-th derivative) on a grid")
    _add_space(p)
    _add_common(p)
    _add_quad(p)
    p.add_argument("--t", help="generators t_1,...,t_r")
    p.add_argument("--k", type=int, help="derivative order (default 0)")
    p.add_argument("--grid", help="explicit comma-separated radial points")
    p.add_argument("--grid-points", dest="grid_points", type=int,
                   help="uniform grid size on [0, sum t_i] (default 201)")

    p = sub.add_parser("simulate", help="Monte Carlo radial samples / histogram")
    _add_space(p)
    _add_common(p)
    p.add_argument("--t", help="generators t_1,...,t_r")
    p.add_argument("--N", type=int, help="number of samples")
    p.add_argument("--seed", type=int, help="64-bit seed")
    p.add_argument("--bins", type=int, help="histogram bins")
    p.add_argument("--samples", action="store_true", default=None,
                   help="emit the raw samples instead of a histogram")

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true", help="scaled-down sample sizes")
    p.add_argument("--only", help="comma-separated criterion numbers")
    _add_common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over :data:`DEFAULTS`."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}") from exc
        if not isinstance(from_file, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(from_file)
    for key, val in vars(args).items():
        if key in DEFAULTS and val is not None:
            cfg[key] = val
    for key in ("lambda_max",):
        if not float(cfg[key]) > 0:
            raise UsageError(f"{key} must be positive")
    for key in ("lambda_points", "k_order", "N", "bins", "grid_points"):
        if int(cfg[key]) <= 0:
            raise UsageError(f"{key} must be positive")
    seed = int(cfg["seed"])
    if not 0 <= seed < 2 ** 64:
        raise UsageError("seed must be a 64-bit unsigned value")
    if cfg["format"] not in ("json", "csv"):
        raise UsageError("format must be json or csv")
    return cfg


def _echo(cfg: dict, command: str) -> dict:
    out = {k: v for k, v in cfg.items() if k not in _NOT_ECHOED}
    out["command"] = command
    return out


def _space(cfg: dict):
    family = cfg["family"]
    if family == "real-hyperbolic":
        params = [cfg["n"]]
    elif family == "complex-hyperbolic":
        params = [cfg["m"]]
    elif family == "generic-rank-one":
        if cfg["m_alpha"] is None:
            raise UsageError("generic-rank-one needs --m-alpha (and optionally --m-2alpha)")
        params = [cfg["m_alpha"], cfg["m_2alpha"] or 0]
    else:
        raise UsageError(f"unsupported family {family!r} on the command line")
    return build_space(family, params)


def _quad(cfg: dict):
    kwargs = {"lambda_max": float(cfg["lambda_max"]), "k_order": int(cfg["k_order"])}
    if cfg["lambda_points"] >= 2:
        kwargs["lambda_points"] = int(cfg["lambda_points"])
    return DEFAULT_CONFIG.with_(**kwargs)


def _generators(cfg: dict) -> list[float]:
    if cfg["t"] is None:
        raise UsageError("--t is required")
    gens = _floats(cfg["t"]) if isinstance(cfg["t"], str) else [float(x) for x in
                                                                 np.atleast_1d(cfg["t"])]
    if not gens:
        raise UsageError("--t needs at least one value")
    return gens


def _conv(cfg: dict):
    from .transform import OrbitalConvolution

    return OrbitalConvolution(_space(cfg), tuple(_generators(cfg)))


# ---------------------------------------------------------------------------

def cmd_describe(cfg):
    space = _space(cfg)
    d = space.to_dict()
    d["m_alpha"], d["m_2alpha"], d["rho"] = space.m_alpha, space.m_2alpha, space.rho_scalar
    d["config"] = _echo(cfg, "describe")
    if cfg["format"] == "csv":
        rows = [('"' + ",".join(fmt_float(x) for x in r["vector"]) + '"', r["multiplicity"])
                for r in d["roots"]]
        return dump_csv(["root", "multiplicity"], rows, d["config"])
    return dump_json(d)


def cmd_spherical(cfg):
    space = _space(cfg)
    quad = _quad(cfg)
    if cfg["t"] is None:
        raise UsageError("--t is required")
    ts = _floats(cfg["t"]) if isinstance(cfg["t"], str) else [float(cfg["t"])]
    if len(ts) != 1:
        raise UsageError("spherical takes a single radial point --t")
    t = ts[0]
    if t < 0:
        raise UsageError("the radial point must be nonnegative")
    if cfg["lambda"] is not None:
        lam = np.asarray(_floats(cfg["lambda"]) if isinstance(cfg["lambda"], str)
                         else cfg["lambda"], dtype=float)
    else:
        lam = np.linspace(0.0, float(cfg["lambda_max"]), int(cfg["lambda_points"]))
    vals, orders = spherical_values(space, lam, t, quad, return_orders=True)
    weights = plancherel_weights(space, lam)
    conf = _echo(cfg, "spherical")
    if cfg["format"] == "csv":
        rows = zip(lam.tolist(), vals.real.tolist(), vals.imag.tolist(), weights.tolist())
        return dump_csv(["lambda", "phi_re", "phi_im", "plancherel_weight"], rows, conf)
    return dump_json({"space": space.name, "t": t, "lambda": lam, "phi_re": vals.real,
                      "phi_im": vals.imag, "plancherel_weight": weights,
                      "k_order_used": orders, "config": conf})


def cmd_l2(cfg):
    from .transform import l2_norm_sq, regularity_report

    conv = _conv(cfg)
    rep = l2_norm_sq(conv, _quad(cfg))
    reg = regularity_report(conv)
    conf = _echo(cfg, "l2")
    d = rep.to_dict()
    d.update(space=conv.space.name, generators=list(conv.generators),
             regularity=reg.to_dict(), config=conf)
    if cfg["format"] == "csv":
        keys = ["verdict", "tail_exponent", "value", "threshold_r", "r", "n"]
        return dump_csv(keys, [[("" if d[k] is None else d[k]) for k in keys]], conf)
    return dump_json(d)


def cmd_density(cfg):
    from .transform import density_derivative

    conv = _conv(cfg)
    quad = _quad(cfg)
    k = int(cfg["k"])
    if k < 0:
        raise UsageError("--k must be nonnegative")
    if cfg["grid"] is not None:
        grid = np.asarray(_floats(cfg["grid"]) if isinstance(cfg["grid"], str) else cfg["grid"],
                          dtype=float)
        if np.any(grid < 0):
            raise UsageError("radial grid points must be nonnegative")
    else:
        grid = np.linspace(0.0, conv.support_radius, int(cfg["grid_points"]))
    vals = np.asarray(density_derivative(conv, grid, k, quad), dtype=float)
    jac = np.asarray(radial_jacobian(conv.space, grid), dtype=float)
    conf = _echo(cfg, "density")
    column = "rho" if k == 0 else f"rho_d{k}"
    if cfg["format"] == "csv":
        return dump_csv(["t", column, "jacobian"], zip(grid.tolist(), vals.tolist(),
                                                       jac.tolist()), conf)
    return dump_json({"space": conv.space.name, "generators": list(conv.generators), "k": k,
                      "t": grid, "rho": vals, "jacobian": jac,
                      "support_radius": conv.support_radius, "config": conf})


def cmd_simulate(cfg):
    from .montecarlo import histogram, sample_convolution

    conv = _conv(cfg)
    samples = sample_convolution(conv, int(cfg["N"]), seed=int(cfg["seed"]))
    conf = _echo(cfg, "simulate")
    if cfg["samples"]:
        if cfg["format"] == "csv":
            return dump_csv(["t"], ((x,) for x in samples.tolist()), conf)
        return dump_json({"space": conv.space.name, "generators": list(conv.generators),
                          "samples": samples, "config": conf})
    hi = max(conv.support_radius, float(samples.max()))
    hist = histogram(samples, bins=int(cfg["bins"]), space=conv.space, range_=(0.0, hi))
    centres = hist.centres
    if cfg["format"] == "csv":
        return dump_csv(["bin_center", "density_estimate", "count"],
                        zip(centres.tolist(), hist.density_estimate.tolist(),
                            hist.counts.tolist()), conf)
    d = hist.to_dict()
    d.update(space=conv.space.name, generators=list(conv.generators),
             sample_mean=float(samples.mean()), sample_max=float(samples.max()), config=conf)
    return dump_json(d)


def cmd_verify(cfg, args, stream):
    from .acceptance import run_all

    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",") if x}
        except ValueError as exc:
            raise UsageError("--only takes comma-separated integers") from exc
    results = run_all(quick=args.quick, only=only,
                      log=lambda line: print(line, file=stream, flush=True))
    conf = {"command": "verify", "quick": bool(args.quick), "only": sorted(only or [])}
    payload = {"passed": all(r.passed for r in results),
               "criteria": [r.to_dict() for r in results], "config": conf}
    if cfg["format"] == "csv":
        text = dump_csv(["criterion", "passed", "seconds", "title"],
                        [(r.number, r.passed, r.seconds, f'"{r.title}"') for r in results], conf)
    else:
        text = dump_json(payload)
    if all(r.passed for r in results):
        code = EXIT_OK
    elif any(r.budget_failure for r in results):
        code = EXIT_BUDGET
    else:
        code = EXIT_INVARIANT
    return text, code


COMMANDS = {"describe": cmd_describe, "spherical": cmd_spherical, "l2": cmd_l2,
            "density": cmd_density, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    err = sys.stderr
    try:
        cfg = resolve_config(args)
        if args.command == "verify":
            # the summary lines go to stderr when the report itself goes to stdout
            stream = err if not args.out else sys.stdout
            text, code = cmd_verify(cfg, args, stream)
        else:
            text, code = COMMANDS[args.command](cfg), EXIT_OK
        write_output(text, cfg["out"])
        return code
    except QuadratureBudgetError as exc:
        print(f"orbconv: quadrature budget exhausted: {exc}", file=err)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"orbconv: invariant violated: {exc}", file=err)
        return EXIT_INVARIANT
    except (ThresholdError, SingularPointError) as exc:
        print(f"orbconv: {exc}", file=err)
        return EXIT_ARGS
    except (UsageError, ValueError, TypeError) as exc:
        print(f"orbconv: invalid arguments: {exc}", file=err)
        return EXIT_ARGS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
