"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 domain validation error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from oneswitch import du, verify
from oneswitch.core import DomainError
from oneswitch.discount import Hyperbolic, classify_impatience, evaluate, rate, rate_derivative
from oneswitch.discount import to_json as discount_to_json
from oneswitch.curves import COLUMNS, reference_curves
from oneswitch.jsonio import SchemaError, model_from_json, model_to_json, sequence_from_json, sequence_to_json
from oneswitch.mixture import mix

EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3

SUITES = ("one-switch", "zero-set", "weak", "impatience")


class CliIOError(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliIOError(f"cannot read {path}: {exc}") from exc


def _model(args):
    if not args.model:
        raise CliIOError("--model is required for this command")
    return model_from_json(_load(args.model))


def _emit(obj, args) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise CliIOError(f"cannot write {args.out}: {exc}") from exc
    else:
        print(text)


def cmd_validate(args) -> int:
    obj = _load(args.model) if args.model else None
    if obj is None:
        raise CliIOError("--model is required")
    try:
        model = model_from_json(obj)
    except DomainError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        _emit({"valid": False, "error": str(exc)}, args)
        return EXIT_DOMAIN
    _emit({"valid": True, **model_to_json(model)}, args)
    return EXIT_OK


def cmd_eval(args) -> int:
    model = _model(args)
    out = {}
    if args.t:
        out["t"] = args.t
        out["D"] = [float(evaluate(model.discount, t)) for t in args.t]
    if args.sequences:
        out["utility"] = [du.utility(model, sequence_from_json(_load(p))) for p in args.sequences]
    _emit(out, args)
    return EXIT_OK


def cmd_rate(args) -> int:
    model = _model(args)
    ts = args.t or [0.0]
    _emit(
        {
            "t": ts,
            "rate": [float(rate(model.discount, t)) for t in ts],
            "rate_derivative": [float(rate_derivative(model.discount, t)) for t in ts],
        },
        args,
    )
    return EXIT_OK


def cmd_classify(args) -> int:
    D = _model(args).discount
    cls = classify_impatience(D)
    out = {"discount": discount_to_json(D), "class": cls.tag.value, "rule": cls.evidence.rule}
    if args.oracle:
        num = verify.impatience_oracle(D)
        shape = verify.log_concavity_oracle(D)
        out["ratio_oracle"] = {"class": num.tag.value, "witness": [list(p) for p in num.evidence.points]}
        out["log_shape"] = shape.shape.value
    _emit(out, args)
    return EXIT_OK


def _two_sequences(args):
    if len(args.sequences) != 2:
        raise CliIOError("expected exactly two sequence files")
    return [sequence_from_json(_load(p)) for p in args.sequences]


def cmd_switch(args) -> int:
    model = _model(args)
    a, b = _two_sequences(args)
    if args.compare:
        cf = du.switch_closed_form(model, a, b)
        num = du.switch_numeric(model, a, b, args.sigma_max, args.grid)
        out = {"closed_form": cf.to_json(), "numeric": num.to_json()}
        clipped = du.clip_to_window(cf, args.sigma_max)
        if clipped.sigma_star is not None and num.sigma_star is not None:
            out["sigma_star_diff"] = abs(clipped.sigma_star - num.sigma_star)
        out["agree"] = clipped.verdict is num.verdict
        _emit(out, args)
        return EXIT_OK
    _emit(du.analyse(model, a, b, args.sigma_max, args.grid, numeric=args.numeric).to_json(), args)
    return EXIT_OK


def cmd_mix(args) -> int:
    a, b = (s.promote() for s in _two_sequences(args))
    mixed = mix(a, args.lam, b)
    out = {"mixture": sequence_to_json(mixed), "lambda": args.lam}
    if args.model:
        model = _model(args)
        ua, ub, um = du.utility(model, a), du.utility(model, b), du.utility(model, mixed)
        out["utility"] = {"A": ua, "B": ub, "mixture": um, "linear_combination": args.lam * ua + (1 - args.lam) * ub}
    _emit(out, args)
    return EXIT_OK


def cmd_search(args) -> int:
    model = _model(args)
    res = verify.double_switch_search(model, args.seed, args.budget, args.sigma_max, args.grid)
    if isinstance(res, verify.NotFound):
        _emit({"found": False, "seed": res.seed, "budget": res.budget}, args)
    else:
        _emit({"found": True, "seed": args.seed, "budget": args.budget, **verify.witness_to_json(res.witness)}, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    model = _model(args)
    if args.expect_violation:
        res = verify.double_switch_search(model, args.seed, args.budget, args.sigma_max, args.grid)
        found = not isinstance(res, verify.NotFound)
        report = {"instances": args.budget, "violations": [], "max_residual": 0.0, "seed": args.seed}
        if found:
            report["violations"].append(verify.witness_to_json(res.witness))
        _emit(report, args)
        return EXIT_OK if found else EXIT_VERIFY
    n = args.budget
    if args.suite == "one-switch":
        rep = verify.one_switch_suite(model, n, args.seed, args.sigma_max, args.grid)
    elif args.suite == "zero-set":
        rep = verify.zero_set_suite(model, n, args.seed, args.sigma_max, args.grid)
    elif args.suite == "weak":
        rep = verify.weak_one_switch_property_suite(model, n, args.seed, args.sigma_max, deu=args.deu)
    else:
        rep = verify.impatience_suite(model.discount)
    _emit(rep.to_json(), args)
    if rep.violations and isinstance(model.discount, Hyperbolic):
        print("violations found for a non-one-switch family", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_plot_data(args) -> int:
    rows = reference_curves()
    try:
        fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    except OSError as exc:
        raise CliIOError(f"cannot write {args.out}: {exc}") from exc
    try:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([f"{v:.17g}" for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "eval": cmd_eval,
    "rate": cmd_rate,
    "classify": cmd_classify,
    "switch": cmd_switch,
    "mix": cmd_mix,
    "verify": cmd_verify,
    "search": cmd_search,
    "plot-data": cmd_plot_data,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model JSON file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--sigma-max", type=float, default=du.DEFAULT_SIGMA_MAX)
    common.add_argument("--grid", type=int, default=du.DEFAULT_GRID_POINTS, help="grid points")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=1000, help="instances or search candidates")
    common.add_argument("--compare", action="store_true", help="switch: run both methods")
    common.add_argument("--numeric", action="store_true", help="switch: force the numeric scan")
    common.add_argument("--expect-violation", action="store_true", help="verify: success means a double switch was found")

    parser = argparse.ArgumentParser(prog="oneswitch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("eval", "switch", "mix"):
            p.add_argument("sequences", nargs="*", help="sequence JSON files")
        if name in ("eval", "rate"):
            p.add_argument("--t", type=float, nargs="+", help="times")
        if name == "mix":
            p.add_argument("--lambda", dest="lam", type=float, required=True)
        if name == "classify":
            p.add_argument("--oracle", action="store_true", help="also run the numeric oracles")
        if name == "verify":
            p.add_argument("--suite", choices=SUITES, default="one-switch")
            p.add_argument("--deu", action="store_true", help="weak suite: lottery indifference checks")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("sigma_max", "grid", "budget"):
        if getattr(args, name) <= 0:
            print(f"--{name.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_DOMAIN
    try:
        return COMMANDS[args.command](args)
    except (CliIOError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, du.UnsupportedFamily, ValueError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
