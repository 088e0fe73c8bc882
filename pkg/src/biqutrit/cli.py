"""Command-line entry point: ``biqutrit {prepare,simulate,invert,sweep,check}``.

Exit codes: 0 success, 1 a ``check`` failed, 2 bad usage or input.
"""

import argparse
import json
import sys

from . import experiment, protocol
from .moments import CoherencyMatrix, QutritState, check_constraints, k4_from_rho


class InputError(Exception):
    pass


def _read_json(path):
    try:
        if path == "-":
            text = sys.stdin.read()
            where = "<stdin>"
        else:
            with open(path) as fh:
                text = fh.read()
            where = path
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{where}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _dump(obj):
    json.dump(obj, sys.stdout, indent=1)
    sys.stdout.write("\n")


def _config(path):
    if path is None:
        return experiment.SweepConfig()
    try:
        return experiment.SweepConfig.from_dict(_read_json(path))
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(f"bad config {path}: {exc}") from exc


def _state(path, validate=True):
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: state JSON must be an object")
    try:
        return QutritState.from_dict(data, validate=validate)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid state: {exc}") from exc


def cmd_prepare(args):
    cfg = _config(args.config)
    print(f"delta = {cfg.delta:.12g} rad", file=sys.stderr)
    _dump(experiment.prepare(args.alpha, cfg).to_dict())
    return 0


def cmd_simulate(args):
    state = _state(args.state)
    if args.noise == "poisson":
        if args.total is None or args.total <= 0:
            raise InputError("--total must be a positive integer for poisson noise")
        m = protocol.simulate(state, mode="poisson", total_per_setting=args.total, seed=args.seed)
    else:
        m = protocol.simulate(state)
    _dump(m.to_dict())
    return 0


def cmd_invert(args):
    data = _read_json(args.moments)
    try:
        m = protocol.MomentVector.from_dict(data)
        result = protocol.invert(m, pure=args.pure)
    except (TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"cannot invert moments: {exc}") from exc
    _dump(result.to_dict())
    return 0


def cmd_sweep(args):
    cfg = _config(args.config)
    print(f"delta = {cfg.delta:.12g} rad", file=sys.stderr)
    records = experiment.run_sweep(cfg)
    path = experiment.emit(records, args.format, args.out, cfg)
    print(f"wrote {len(records)} records to {path}", file=sys.stderr)
    return 0


def cmd_check(args):
    state = _state(args.state, validate=False)
    report = check_constraints(k4_from_rho(state, validate=False), pure_hypothesis=args.pure)
    _dump(report.to_dict())
    return 0 if report.passed else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="biqutrit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="state after the setting plate")
    p.add_argument("--alpha", type=float, required=True, help="plate angle, degrees")
    p.add_argument("--config", help="sweep config JSON")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("simulate", help="coincidence rates for the nine settings")
    p.add_argument("--state", required=True, help="state JSON path, or - for stdin")
    p.add_argument("--noise", choices=["exact", "poisson"], default="exact")
    p.add_argument("--total", type=int, help="expected counts scale per setting")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("invert", help="reconstruct K4 and rho from rates")
    p.add_argument("--moments", required=True, help="moment JSON path, or - for stdin")
    p.add_argument("--pure", action="store_true", help="assume a pure state (7 rates suffice)")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("sweep", help="run the setting-plate sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="normalization and purity diagnostics")
    p.add_argument("--state", required=True)
    p.add_argument("--pure", action="store_true", help="also test the purity identities")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
