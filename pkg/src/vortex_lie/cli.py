"""Command line: ``vortex-lie {run,validate,energy-report,convergence} --config PATH``.

Exit codes: 0 success, 1 experiment or validation failure, 2 usage or
configuration error.
"""
import argparse
import dataclasses
import os
import sys

from . import runner, serialize, validation
from .config import load_config
from .errors import ConfigurationError, FilamentDegenerateError, InputError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser():
    p = argparse.ArgumentParser(prog="vortex-lie", description="Vortex filament LIE simulator and checks")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "run": "evolve the configured filament and write frames, diagnostics, manifest",
        "validate": "run the full validation suite (nonzero exit on any failure)",
        "energy-report": "modified energy of the configured initial filament",
        "convergence": "epsilon-limit and dt convergence studies",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--out", metavar="DIR", help="output directory (default: outputs.directory)")
        sp.add_argument("--seed", type=int, help="seed for randomized ensembles (default: config seed)")
        sp.add_argument("--quiet", action="store_true")
        if name == "validate":
            sp.add_argument("--quick", action="store_true", help="smaller random ensembles")
    return p


def _say(args, msg):
    if not args.quiet:
        print(msg)


def _cmd_run(args, cfg):
    out = args.out or cfg.outputs.directory
    traj, manifest = runner.execute(cfg, out)
    term = traj.termination
    _say(args, f"{len(traj.frames)} frames written to {out}; termination: {term.kind}"
         + (f" at t={term.time:.6g}, xi={term.xi}" if term.kind != "completed" else ""))
    return EXIT_OK


def _report_results(args, results, out, name):
    for r in results:
        _say(args, r.line())
    if out:
        serialize.write_json({"results": [r.to_dict() for r in results]}, os.path.join(out, name))
    ok = all(r.verdict for r in results)
    _say(args, "all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_validate(args, cfg):
    results = validation.run_suite(seed=cfg.seed, quick=args.quick)
    return _report_results(args, results, args.out, "validation.json")


def _cmd_convergence(args, cfg):
    return _report_results(args, runner.convergence_studies(cfg), args.out, "convergence.json")


def _cmd_energy(args, cfg):
    reports = runner.energy_report(cfg)
    summaries = [r.summary() for r in reports]
    for s in summaries:
        _say(args, ", ".join(f"{k}={v:.10g}" if isinstance(v, float) else f"{k}={v}" for k, v in s.items()))
    if args.out:
        serialize.write_json({"reports": summaries}, os.path.join(args.out, "energy_report.json"))
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "validate": _cmd_validate, "energy-report": _cmd_energy, "convergence": _cmd_convergence}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
    except ConfigurationError as exc:
        print(f"vortex-lie: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, cfg)
    except ConfigurationError as exc:
        print(f"vortex-lie: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FilamentDegenerateError, InputError, OSError) as exc:
        print(f"vortex-lie: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
