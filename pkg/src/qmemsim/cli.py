"""Command-line interface: ``qmemsim <command> [options]``.

Commands: surface, cross-section, trajectory, verify, advantage.

Data files are deterministic given the arguments. Every data file written
with ``--out`` gets a sibling ``<out>.manifest.json`` holding the
configuration echo, seed, backend and timestamp.
"""
import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, sweep
from .errors import QmemsimError, ValidationError
from .harness import NoiseModel, verification_report
from .process import (
    ProcessParams,
    _draw_initial,
    _initial_weights,
    classical_complexity,
    classical_max_entropy,
    run_classical_trajectory,
)
from .quantum import quantum_complexity, quantum_max_entropy, run_quantum_trajectory

ENGINES = ("classical", "quantum")


class IOFailure(QmemsimError):
    category = "io"
    exit_code = 5


def _floats(text, n=None):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    return tuple(vals)


def _fix(text):
    name, _, value = text.partition("=")
    if name not in ("p", "q") or not value:
        raise argparse.ArgumentTypeError(f"--fix takes p=V or q=V, got {text!r}")
    return name, float(value)


def _initial(text):
    if text == "stationary":
        return None
    if text in ("0", "1", "2"):
        return int(text)
    raise argparse.ArgumentTypeError(f"initial state must be 0, 1, 2 or 'stationary', got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="qmemsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout, no manifest)")
    common.add_argument("--config", help="JSON file of option defaults; command-line flags win")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid", type=int, default=99, help="points per axis")
    grid.add_argument("--range", type=lambda s: _floats(s, 2), default=sweep.DEFAULT_RANGE,
                      metavar="LO,HI", help="open-interval sweep bounds")
    grid.add_argument("--format", choices=("csv", "json"), default="csv")
    grid.add_argument("--jobs", type=int, default=1)
    grid.add_argument("--seed", type=int, default=0, help="recorded only; sweeps are deterministic")

    pq = argparse.ArgumentParser(add_help=False)
    pq.add_argument("--p", type=float, required=True)
    pq.add_argument("--q", type=float, required=True)

    s = sub.add_parser("surface", parents=[common, grid], help="C_mu and C_Q over a p-q grid")
    s.set_defaults(func=cmd_surface)

    s = sub.add_parser("cross-section", parents=[common, grid], help="1-D sweep at fixed p or q")
    s.add_argument("--fix", type=_fix, required=True, metavar="p=V|q=V")
    s.set_defaults(func=cmd_cross_section)

    s = sub.add_parser("trajectory", parents=[common, pq], help="sample an output trajectory")
    s.add_argument("--engine", choices=ENGINES, default="quantum")
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--initial", type=_initial, default=None, metavar="0|1|2|stationary")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_trajectory)

    s = sub.add_parser("verify", parents=[common, pq], help="emulated verification run")
    s.add_argument("--shots", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise-depol", type=float, default=0.0, metavar="LAMBDA")
    s.add_argument("--eff", type=lambda t: _floats(t, 3), default=(1.0, 1.0, 1.0), metavar="E0,E1,E2")
    s.add_argument("--conditioning", choices=("input", "output"), default="input")
    s.add_argument("--bootstrap", type=int, default=200)
    s.add_argument("--format", choices=("json",), default="json")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("advantage", parents=[common, pq], help="memory cost summary")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_advantage)
    return parser


def _config_echo(args):
    skip = {"func", "config"}
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def emit(args, text, provenance):
    """Write ``text`` to ``--out`` (plus manifest) or stdout."""
    if not args.out:
        sys.stdout.write(text)
        return
    manifest = {
        "tool": "qmemsim",
        "version": __version__,
        "command": args.command,
        "config": _config_echo(args),
        "seed": getattr(args, "seed", None),
        "backend": sweep.backend(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "data_file": args.out,
        "provenance": provenance,
    }
    try:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        with open(args.out + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise IOFailure(f"cannot write {args.out}: {exc.strerror or exc}") from exc


def _write_rows(args, rows, description):
    text = sweep.to_csv(rows) if args.format == "csv" else sweep.to_json(rows)
    provenance = {
        "rows": len(rows),
        "order": description,
        "source": f"closed-form stationary solve + 2x2 eigenvalues ({sweep.backend()} kernel)",
        "gap_rows": int(rows.gap.sum()),
    }
    emit(args, text, provenance)


def cmd_surface(args):
    lo, hi = args.range
    rows = sweep.surface(args.grid, lo, hi, args.jobs)
    _write_rows(args, rows, "p-major, q fastest")


def cmd_cross_section(args):
    lo, hi = args.range
    name, value = args.fix
    rows = sweep.cross_section(name, value, args.grid, lo, hi, args.jobs)
    _write_rows(args, rows, f"{name} fixed at {value}, other parameter ascending")


def engine_seed(seed, engine):
    """Independent stream per engine so the two engines are not coupled."""
    return np.random.SeedSequence(seed, spawn_key=(ENGINES.index(engine),))


def cmd_trajectory(args):
    params = ProcessParams(args.p, args.q)
    run = run_classical_trajectory if args.engine == "classical" else run_quantum_trajectory
    rng = np.random.default_rng(engine_seed(args.seed, args.engine))
    initial = args.initial
    if initial is None:
        # drawn here so the initial state can be reported
        initial = _draw_initial(rng, _initial_weights(params, None))
    symbols, states = run(params, args.steps, initial=initial, seed=rng)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("step", "symbol", "causal_state"))
        w.writerow((0, "", f"S{initial}"))
        for t, (x, s) in enumerate(zip(symbols.tolist(), states.tolist()), start=1):
            w.writerow((t, x, f"S{s}"))
        text = buf.getvalue()
    else:
        text = json.dumps({
            "engine": args.engine,
            "params": {"p": params.p, "q": params.q},
            "initial_state": f"S{initial}",
            "symbols": symbols.tolist(),
            "causal_states": [f"S{s}" for s in states.tolist()],
        }) + "\n"
    emit(args, text, {"engine": args.engine, "steps": args.steps, "initial_state": f"S{initial}"})


def cmd_verify(args):
    noise = NoiseModel(args.noise_depol, tuple(args.eff))
    report = verification_report((args.p, args.q), args.shots, noise, args.seed,
                                 args.conditioning, args.bootstrap)
    emit(args, report.to_json(indent=1) + "\n", {"report": "verification", "conditioning": args.conditioning})


def advantage_summary(params):
    params = ProcessParams(*params).require_interior()
    c_mu = classical_complexity(params)
    c_q = quantum_complexity(params)
    return {
        "params": {"p": params.p, "q": params.q},
        "dimension_classical": 3,
        "dimension_quantum": 2,
        "max_entropy_classical": classical_max_entropy(),
        "max_entropy_quantum": quantum_max_entropy(),
        "single_shot_saving": classical_max_entropy() - quantum_max_entropy(),
        "c_mu": c_mu,
        "c_q": c_q,
        "iid_saving_per_simulator": c_mu - c_q,
        "gap": bool(c_q < 1.0 < c_mu),
    }


def cmd_advantage(args):
    s = advantage_summary((args.p, args.q))
    if args.format == "json":
        text = json.dumps(s, indent=1) + "\n"
    else:
        text = "\n".join([
            f"process          p = {s['params']['p']}, q = {s['params']['q']}",
            f"memory dimension classical D = {s['dimension_classical']}, quantum D = {s['dimension_quantum']}",
            f"max-entropy      classical log2 3 = {s['max_entropy_classical']:.6f} bits, "
            f"quantum log2 2 = {s['max_entropy_quantum']:.6f} bits",
            f"single-shot      saving {s['single_shot_saving']:.6f} bits",
            f"complexity       C_mu = {s['c_mu']:.6f} bits, C_Q = {s['c_q']:.6f} bits",
            f"i.i.d.           N parallel simulators need N*C: saving {s['iid_saving_per_simulator']:.6f} bits "
            "per simulator",
            f"gap region       C_Q < 1 < C_mu: {'yes' if s['gap'] else 'no'}",
        ]) + "\n"
    emit(args, text, {"report": "advantage"})


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IOFailure(f"cannot read config {known.config}: {exc}") from exc
    sub = parser._subparsers._group_actions[0].choices
    for cmd in sub.values():
        defaults = {}
        for key, value in cfg.items():
            dest = key.replace("-", "_")
            if dest == "fix" and isinstance(value, str):
                value = _fix(value)
            elif dest in ("range", "eff") and isinstance(value, list):
                value = tuple(value)
            defaults[dest] = value
        cmd.set_defaults(**defaults)
        for action in cmd._actions:
            if action.dest in defaults:
                action.required = False


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise ValidationError("--jobs must be >= 1")
        args.func(args)
    except QmemsimError as exc:
        print(f"qmemsim: error [{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"qmemsim: error [invalid-input]: {exc}", file=sys.stderr)
        return ValidationError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
