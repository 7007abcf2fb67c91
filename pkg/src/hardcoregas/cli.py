"""Command-line front end.

Commands
--------
sample       draw one configuration (dcftp, rejection, or bdchain) to CSV + JSON metadata
extinction   extinction estimate for one intensity, written as a one-row sweep CSV
sweep        extinction estimates over an intensity grid
verify       run the numeric verification suite, write the report CSV
bound        print critical intensity, the older bound, and the event bound

Exit codes: 0 ok, 1 verification failure, 2 bad parameters,
3 sampler non-termination (rejection cap or no coalescence).

Every command embeds its seed and parameters in its output; rerunning
with the same arguments reproduces the files byte for byte, for any
--threads value.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import bdchain, cod, dcftp, poisson, theory
from .geometry import Configuration
from .poisson import ModelParams, Window
from .rng import generator

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_PARAMS = 2
EXIT_NO_TERMINATION = 3

DEFAULT_BDCHAIN_TIME = 50.0


def _parse_window(text: str) -> Window:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"window must be x0,x1,y0,y1, got {text!r}")
    x0, x1, y0, y1 = (float(p) for p in parts)
    return Window(x0, x1, y0, y1)


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:step:count, got {text!r}")
    start, step = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1:
        raise ValueError(f"grid count must be >= 1, got {count}")
    if count > 1 and step <= 0:
        raise ValueError(f"grid step must be positive for count > 1, got {step}")
    return [start + i * step for i in range(count)]


def _write_points_csv(config, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["x", "y"])
        for _, point in config:
            writer.writerow([repr(point.x), repr(point.y)])


def _write_metadata(path: Path, payload: dict) -> None:
    meta_path = path.with_suffix(".json")
    with open(meta_path, "w") as f:
        json.dump(payload, f, sort_keys=True, indent=2)
        f.write("\n")


def cmd_sample(args) -> int:
    window = _parse_window(args.window)
    params = ModelParams(args.lam, args.radius)
    out = Path(args.out)
    rng = generator(args.seed)
    meta = {
        "command": "sample",
        "sampler": args.sampler,
        "seed": args.seed,
        "lambda": params.intensity,
        "R": params.radius,
        "window": [window.x0, window.x1, window.y0, window.y1],
    }

    if args.sampler == "rejection":
        config, attempts = poisson.rejection_sample_with_attempts(
            window, params, rng, args.max_attempts)
        meta["attempts"] = attempts
    elif args.sampler == "dcftp":
        draw = dcftp.draw_dcftp(window, params, rng, args.t0, args.max_doublings)
        config = draw.config
        meta.update({
            "horizon_used": draw.horizon_used,
            "doublings": draw.doublings,
            "event_count": draw.event_count,
            "t0": args.t0,
        })
    else:
        state = bdchain.ChainState(Configuration())
        state, events = bdchain.run(state, args.t_end, window, params, rng)
        config = state.config
        meta["t_end"] = args.t_end
        meta["events"] = len(events)
        if args.events_out is not None:
            bdchain.write_event_csv(events, args.events_out)
            meta["events_out"] = str(args.events_out)

    meta["n_points"] = len(config)
    _write_points_csv(config, out)
    _write_metadata(out, meta)
    return EXIT_OK


def cmd_extinction(args) -> int:
    params = ModelParams(args.lam, args.radius)
    row = cod.estimate_extinction(params, args.trials, args.ceiling, args.seed,
                                  lambda_index=0, n_jobs=args.threads)
    cod.write_sweep_csv([row], args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid)
    rows = cod.sweep(grid, args.radius, args.trials, args.ceiling, args.seed,
                     n_jobs=args.threads)
    cod.write_sweep_csv(rows, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    rows = theory.verification_suite(
        args.seed,
        drift_evals=args.drift_evals,
        mc_samples=args.mc_samples,
        cover_samples=args.cover_samples,
        event_trials=args.event_trials,
        n_jobs=args.threads,
    )
    with open(args.out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["check_name", "expected", "observed", "tolerance", "pass"])
        for row in rows:
            writer.writerow([row.name, repr(row.expected), repr(row.observed),
                             repr(row.tolerance), row.passed])
    failed = [row.name for row in rows if not row.passed]
    if failed:
        print(f"verification FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print(f"verification passed: {len(rows)} checks")
    return EXIT_OK


def cmd_bound(args) -> int:
    params = ModelParams(args.lam, args.radius)
    critical = theory.critical_intensity(params.radius)
    older = theory.prior_critical_intensity(params.radius)
    try:
        event_bound = f"{theory.expected_event_bound(params):.4f}"
    except theory.SupercriticalLambda:
        event_bound = "SUPERCRITICAL"
    print(f"critical={critical:.7f} old={older:.7f} event_bound={event_bound}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardcoregas",
        description="Hard-core point process samplers and extinction experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model(p):
        p.add_argument("--lambda", dest="lam", type=float, required=True,
                       help="intensity (points per unit area)")
        p.add_argument("--radius", type=float, default=1.0,
                       help="hard-core radius (default 1)")

    def add_common(p):
        p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker threads for trial sweeps")

    p = sub.add_parser("sample", help="draw one configuration")
    add_model(p)
    add_common(p)
    p.add_argument("--window", required=True, help="sampling window x0,x1,y0,y1")
    p.add_argument("--sampler", choices=["dcftp", "rejection", "bdchain"],
                   default="dcftp")
    p.add_argument("--out", required=True, help="points CSV path (metadata JSON beside it)")
    p.add_argument("--max-attempts", type=int, default=poisson.DEFAULT_MAX_ATTEMPTS,
                   help="rejection sampler attempt cap")
    p.add_argument("--t0", type=float, default=dcftp.DEFAULT_INITIAL_HORIZON,
                   help="initial coupling horizon")
    p.add_argument("--max-doublings", type=int, default=dcftp.DEFAULT_MAX_DOUBLINGS,
                   help="horizon doubling cap before giving up")
    p.add_argument("--t-end", type=float, default=DEFAULT_BDCHAIN_TIME,
                   help="bdchain run time (approximate sampler)")
    p.add_argument("--events-out", default=None,
                   help="optional bdchain event-log CSV path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("extinction", help="extinction estimate at one intensity")
    add_model(p)
    add_common(p)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--ceiling", type=int, default=750)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extinction)

    p = sub.add_parser("sweep", help="extinction estimates over an intensity grid")
    add_common(p)
    p.add_argument("--grid", required=True, help="intensity grid start:step:count")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--ceiling", type=int, default=750)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the numeric verification suite")
    add_common(p)
    p.add_argument("--out", required=True, help="report CSV path")
    p.add_argument("--drift-evals", type=int, default=100_000)
    p.add_argument("--mc-samples", type=int, default=1_000_000)
    p.add_argument("--cover-samples", type=int, default=100_000)
    p.add_argument("--event-trials", type=int, default=10_000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bound", help="print the intensity bounds")
    add_model(p)
    p.set_defaults(func=cmd_bound)

    return parser


def _validate(args) -> None:
    lam = getattr(args, "lam", None)
    if lam is not None and not (lam >= 0):
        raise ValueError(f"--lambda must be >= 0, got {lam}")
    radius = getattr(args, "radius", None)
    if radius is not None and not (radius > 0):
        raise ValueError(f"--radius must be > 0, got {radius}")
    trials = getattr(args, "trials", None)
    if trials is not None and trials < 1:
        raise ValueError(f"--trials must be >= 1, got {trials}")
    ceiling = getattr(args, "ceiling", None)
    if ceiling is not None and ceiling < 2:
        raise ValueError(f"--ceiling must be >= 2, got {ceiling}")
    threads = getattr(args, "threads", None)
    if threads is not None and threads < 1:
        raise ValueError(f"--threads must be >= 1, got {threads}")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        return args.func(args)
    except (poisson.AttemptsExhausted, dcftp.CoalescenceFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: the intensity is likely beyond the artificial phase "
              "transition for this sampler; lower --lambda or the window size, "
              "or switch sampler", file=sys.stderr)
        return EXIT_NO_TERMINATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
