"""``fold2d`` command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 mathematical precondition
failure, 3 verification or classification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import chaos
from .expr import EQUIVALENT, ExprError, const, equiv_numeric, parameters_of, rename, to_text
from .folding import (
    FoldedForm,
    FoldingError,
    PlanarSystem,
    check_fv_nonvanishing,
    fold,
    linear_target,
    semi_invert,
    synthesize_g,
    synthesize_g_autonomous,
    synthesize_g_linear,
)
from .numerics import (
    IntegrationError,
    initial_slope,
    integrate_planar,
    integrate_scalar,
    passive_y,
    trajectory_csv,
    verify_fold,
)
from .sysfile import SystemFile, SystemFileError, load_system_file

EXIT_OK, EXIT_USAGE, EXIT_MATH, EXIT_FAIL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def show_folded(e) -> str:
    """Folded expressions are displayed with x for u and xdot for w."""
    return to_text(rename(e, {"u": "x", "w": "xdot"}))


def _params(sf: SystemFile, args) -> dict:
    params = sf.params
    for item in args.param or []:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in params:
            raise UsageError(f"--param expects name=value for a parameter declared in [params], got {item!r}")
        try:
            params[name] = float(value)
        except ValueError:
            raise UsageError(f"--param {name}: {value!r} is not a number") from None
    return params


def _seed(sf: SystemFile, args) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in sf.section("lyapunov"):
        return int(sf.number("lyapunov", "seed"))
    env = os.environ.get("FOLD2D_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"FOLD2D_SEED must be an integer, got {env!r}") from None
    return 0


def _span(sf: SystemFile, args) -> dict:
    out = {}
    defaults = {"t0": 0.0, "t1": 10.0, "dt": 1e-3, "x0": 0.0, "y0": 0.0}
    for key, default in defaults.items():
        cli = getattr(args, key, None)
        out[key] = cli if cli is not None else sf.number("simulate", key, default)
    return out


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def _claimed_fold(sf: SystemFile, system: PlanarSystem, params: dict) -> FoldedForm | None:
    if "phi" not in sf.section("target"):
        return None
    phi = sf.target_expression("phi", params)
    return FoldedForm(phi, semi_invert(system.f).h, params, system)


# Subcommands ----------------------------------------------------------------


def cmd_check(sf: SystemFile, args) -> int:
    params = _params(sf, args)
    system = sf.system(params, require_g=False)
    inv = semi_invert(system.f)
    print(f"h = {show_folded(inv.h)}")
    print(f"f_y = {to_text(inv.q)}")
    report = check_fv_nonvanishing(system.f, system.domain, n=args.samples, seed=_seed(sf, args), params=params)
    line = f"fv: {report.verdict} ({report.method}"
    if report.samples:
        line += f", {report.samples} samples, seed {report.seed}"
    line += ")"
    if report.witness:
        line += " witness " + ", ".join(f"{k}={v:.6g}" for k, v in report.witness.items())
    print(line)
    return EXIT_OK if report.nonvanishing else EXIT_MATH


def cmd_fold(sf: SystemFile, args) -> int:
    system = sf.system(_params(sf, args))
    ff = fold(system)
    print(f"phi = {show_folded(ff.phi)}")
    print(f"h = {show_folded(ff.h)}")
    if args.out:
        record = {
            "phi": show_folded(ff.phi),
            "h": show_folded(ff.h),
            "phi_uw": to_text(ff.phi),
            "h_uw": to_text(ff.h),
            "variables": {"t": "t", "x": "u", "xdot": "w"},
        }
        Path(args.out).write_text(json.dumps(record, indent=2) + "\n")
    return EXIT_OK


def _synth_target(sf: SystemFile, params: dict):
    target = sf.section("target")
    forms = [k for k in ("phi", "sigma") if k in target]
    linear = [k for k in ("A", "B", "C") if k in target]
    if len(forms) + bool(linear) != 1:
        raise sf.error("[target] needs exactly one of phi, sigma, or A/B/C")
    if forms == ["phi"]:
        phi = sf.target_expression("phi", params)
        return phi, lambda f: synthesize_g(f, phi)
    if forms == ["sigma"]:
        sigma = sf.target_expression("sigma", params)
        return sigma, lambda f: synthesize_g_autonomous(f, sigma)
    A, B, C = (sf.target_expression(k, params) if k in target else const(0) for k in ("A", "B", "C"))
    return linear_target(A, B, C), lambda f: synthesize_g_linear(f, A, B, C)


def cmd_synth(sf: SystemFile, args) -> int:
    params = _params(sf, args)
    system = sf.system(params, require_g=False)
    if not sf.has("target"):
        raise sf.error("synth needs a [target] section")
    phi, synth = _synth_target(sf, params)
    g = synth(system.f)
    print(f"g = {to_text(g)}")
    if not args.verify:
        return EXIT_OK
    refolded = fold(PlanarSystem(system.f, g, params, system.domain)).phi
    box = {"t": system.domain["t"], "u": system.domain["x"], "w": system.domain["y"]}
    for name in parameters_of(refolded) | parameters_of(phi):
        box[name] = (params[name], params[name]) if name in params else (-2.0, 2.0)
    report = equiv_numeric(refolded, phi, box, n=args.samples, tol=args.tol or 1e-9, seed=_seed(sf, args))
    print(f"verify: {report.verdict} (max deviation {report.max_deviation:.3e}, {report.samples} samples, seed {report.seed})")
    return EXIT_OK if report.verdict == EQUIVALENT else EXIT_FAIL


def cmd_simulate(sf: SystemFile, args) -> int:
    params = _params(sf, args)
    system = sf.system(params)
    span = _span(sf, args)
    t0, t1, dt, x0, y0 = (span[k] for k in ("t0", "t1", "dt", "x0", "y0"))
    mode = args.mode or "system"
    outputs = []
    if mode in ("system", "both"):
        traj = integrate_planar(system, x0, y0, t0, t1, dt)
        outputs.append(("system", trajectory_csv(traj)))
    if mode in ("scalar", "both"):
        ff = fold(system)
        traj = integrate_scalar(ff, x0, initial_slope(system, t0, x0, y0), t0, t1, dt)
        outputs.append(("scalar", trajectory_csv(traj, passive_y(ff, traj))))
    if args.out is None:
        sys.stdout.write("\n".join(text for _, text in outputs))
    elif len(outputs) == 1:
        _write(args.out, outputs[0][1])
    else:
        out = Path(args.out)
        for tag, text in outputs:
            _write(str(out.with_name(f"{out.stem}_{tag}{out.suffix or '.csv'}")), text)
    return EXIT_OK


def cmd_verify(sf: SystemFile, args) -> int:
    params = _params(sf, args)
    system = sf.system(params)
    span = _span(sf, args)
    tol = args.tol if args.tol is not None else 1e-6
    report = verify_fold(
        system,
        (span["x0"], span["y0"]),
        span["t0"],
        span["t1"],
        span["dt"],
        tol,
        folded=_claimed_fold(sf, system, params),
    )
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAIL


def _lyapunov_settings(sf: SystemFile, args) -> dict:
    s = {
        "t_transient": chaos.DEFAULT_TRANSIENT,
        "t_total": 2000.0,
        "renorm_dt": chaos.DEFAULT_RENORM_DT,
        "dt": 1e-3,
        "d0": chaos.DEFAULT_D0,
        "threshold": chaos.DEFAULT_THRESHOLD,
        "radius": None,
        "window": chaos.DEFAULT_WINDOW,
    }
    for key in s:
        s[key] = sf.number("lyapunov", key, s[key])
        cli = getattr(args, key, None)
        if cli is not None:
            s[key] = cli
    return s


def _lyapunov_target(sf: SystemFile, args) -> str:
    target = args.target
    if target is None:
        entry = sf.section("lyapunov").get("target")
        target = entry.value.strip() if entry else "system"
    if target not in ("system", "scalar"):
        raise UsageError(f"lyapunov target must be 'system' or 'scalar', got {target!r}")
    return target


def cmd_lyapunov(sf: SystemFile, args) -> int:
    params = _params(sf, args)
    system = sf.system(params)
    span = _span(sf, args)
    settings = _lyapunov_settings(sf, args)
    threshold = settings.pop("threshold")
    dt = settings.pop("dt")
    t0, x0, y0 = span["t0"], span["x0"], span["y0"]
    if _lyapunov_target(sf, args) == "system":
        flow, init = system, (x0, y0)
    else:
        flow, init = fold(system), (x0, initial_slope(system, t0, x0, y0))

    seeds = args.seeds if args.seeds else [_seed(sf, args)]

    def run(seed):
        return chaos.lyapunov(flow, init, dt=dt, seed=seed, t0=t0, **settings)

    if len(seeds) > 1 and args.jobs > 1:
        chaos.lyapunov(flow, init, dt=dt, seed=seeds[0], t0=t0, **{**settings, "t_transient": 0.0,
                       "t_total": settings["renorm_dt"]})  # compile once before threading
        with ThreadPoolExecutor(args.jobs) as pool:
            estimates = list(pool.map(run, seeds))
    else:
        estimates = [run(s) for s in seeds]

    status = EXIT_OK
    for i, (seed, est) in enumerate(zip(seeds, estimates)):
        verdict = chaos.classify(est, threshold)
        record = {**verdict.record(), "seed": seed} if len(seeds) > 1 else verdict.record()
        print(json.dumps(record))
        if args.out:
            out = Path(args.out)
            if len(seeds) > 1:
                out = out.with_name(f"{out.stem}_{i}{out.suffix or '.csv'}")
            _write(str(out), est.history_csv())
        if verdict.verdict == chaos.INDETERMINATE:
            status = EXIT_FAIL
    return status


COMMANDS = {
    "check": cmd_check,
    "fold": cmd_fold,
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "lyapunov": cmd_lyapunov,
}


def _seed_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--file", required=True, help="system definition file")
    common.add_argument("--out", help="output path")
    common.add_argument("--tol", type=float, help="tolerance")
    common.add_argument("--seed", type=int, help="RNG seed (default: $FOLD2D_SEED or 0)")
    common.add_argument("--t0", type=float)
    common.add_argument("--t1", type=float)
    common.add_argument("--dt", type=float)
    common.add_argument("--x0", type=float)
    common.add_argument("--y0", type=float)
    common.add_argument("--param", action="append", metavar="NAME=VALUE", help="override a parameter")

    parser = argparse.ArgumentParser(prog="fold2d", description="Fold nonautonomous planar systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="semi-invert f and check f_y != 0")
    p.add_argument("--samples", type=int, default=1000)
    sub.add_parser("fold", parents=[common], help="print the folded equation")
    p = sub.add_parser("synth", parents=[common], help="synthesize g for a target phi")
    p.add_argument("--verify", action="store_true", help="check the fold round trip numerically")
    p.add_argument("--samples", type=int, default=1000)
    p = sub.add_parser("simulate", parents=[common], help="integrate and emit CSV")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--scalar", dest="mode", action="store_const", const="scalar")
    mode.add_argument("--system", dest="mode", action="store_const", const="system")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    sub.add_parser("verify", parents=[common], help="compare system and folded trajectories")
    p = sub.add_parser("lyapunov", parents=[common], help="largest Lyapunov exponent and chaos verdict")
    p.add_argument("--target", choices=("system", "scalar"))
    p.add_argument("--t-transient", dest="t_transient", type=float)
    p.add_argument("--t-total", dest="t_total", type=float)
    p.add_argument("--renorm-dt", dest="renorm_dt", type=float)
    p.add_argument("--d0", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--window", type=float)
    p.add_argument("--seeds", type=_seed_list, help="comma-separated seed sweep")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for a seed sweep")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        sf = load_system_file(args.file)
        return COMMANDS[args.command](sf, args)
    except (SystemFileError, UsageError, ExprError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FoldingError, IntegrationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
