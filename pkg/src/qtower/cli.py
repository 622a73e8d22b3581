"""``qtower`` command line: check, eval, equal, dilate and suite."""

import argparse
import json
import sys
from pathlib import Path

from . import BACKEND, biaffine, channels, dsl, lotimes, suite
from .errors import TowerError
from .linalg import matrix_to_json
from .rigstruct import dim

EXIT_OK, EXIT_FALSE, EXIT_ERROR = 0, 1, 2
FORMATS = ("choi", "kraus", "matrix")


class CliError(Exception):
    pass


def _read_program(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    return dsl.check(text)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from None


def _emit(obj, out):
    text = json.dumps(obj, indent=2)
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n")


def _infer_format(out, explicit, level):
    if explicit:
        return explicit
    if out is not None:
        stem = Path(out).stem.lower()
        for fmt in FORMATS:
            if fmt in stem:
                return fmt
    return "matrix" if level <= dsl.Level.C else "kraus"


def _render(value, te, level, fmt):
    if fmt == "matrix":
        if level == dsl.Level.U:
            return matrix_to_json(value)
        if level == dsl.Level.C:
            return {
                "dom": str(value.dom),
                "cod": str(value.cod),
                "in_ancilla": str(value.in_anc),
                "out_ancilla": str(value.out_anc),
                "unitary": matrix_to_json(value.mat),
                "corner": matrix_to_json(biaffine.corner(value).mat),
            }
        raise CliError(f"no matrix output at level {level.name}; use choi or kraus")
    if level < dsl.Level.Q:
        channel = dsl.coerce(value, te, level, dsl.Level.Q)
    else:
        channel = value if level == dsl.Level.Q else value.f
    if fmt == "kraus":
        return channels.channel_to_json(channel)
    return channels.choi_to_json(channels.choi(channel))


def cmd_check(args):
    te = _read_program(args.file)
    print(f"{te.dom} -> {te.cod}  level {te.min_level.name}")
    return EXIT_OK


def cmd_eval(args):
    te = _read_program(args.file)
    level = dsl.Level.parse(args.level)
    value = dsl.evaluate(te, level)
    fmt = _infer_format(args.out, args.format, level)
    _emit(_render(value, te, level, fmt), args.out)
    return EXIT_OK


def cmd_equal(args):
    a, b = _read_program(args.file1), _read_program(args.file2)
    same = dsl.equal_at_level(a, b, dsl.Level.parse(args.level))
    print("equal" if same else "not equal")
    return EXIT_OK if same else EXIT_FALSE


def cmd_dilate(args):
    ch = channels.channel_from_json(_read_json(args.channel))
    if args.kind == "halmos":
        if ch.rank != 1:
            raise CliError(
                f"halmos dilation needs a single Kraus operator, the channel has {ch.rank}"
            )
        u = biaffine.halmos_dilate(ch.kraus[0])
        result = {
            "kind": "halmos",
            "dom": str(u.dom),
            "cod": str(u.cod),
            "unitary": matrix_to_json(u.mat),
        }
    else:
        f = lotimes.from_channel(ch)
        result = {
            "kind": "stinespring",
            "in": dim(f.dom),
            "out": dim(f.cod),
            "ancilla": dim(f.anc),
            "dilation": matrix_to_json(f.mat),
        }
    _emit(result, args.out)
    return EXIT_OK


def cmd_suite(args):
    names = [k for k in suite.CHECKS if args.filter is None or args.filter in k]
    if not names:
        raise CliError(f"no property check matches {args.filter!r}")
    print(f"seed {args.seed}, backend {BACKEND}")
    failed = 0
    for name in names:
        result = suite.run_check(name, args.seed, args.cases)
        print(result.line(), flush=True)
        failed += not result.passed
    print(f"{len(names) - failed}/{len(names)} passed")
    return EXIT_OK if failed == 0 else EXIT_FALSE


def build_parser():
    p = argparse.ArgumentParser(
        prog="qtower", description="Typed morphism programs over a tower of quantum categories."
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and typecheck a program")
    c.add_argument("file")
    c.set_defaults(run=cmd_check)

    levels = [lv.name for lv in dsl.Level]
    e = sub.add_parser("eval", help="evaluate a program at a level")
    e.add_argument("--level", required=True, choices=levels)
    e.add_argument("file")
    e.add_argument("--out", help="output file; choi/kraus/matrix in the name selects the format")
    e.add_argument("--format", choices=FORMATS)
    e.set_defaults(run=cmd_eval)

    q = sub.add_parser("equal", help="compare two programs at a level (exit 0 equal, 1 not)")
    q.add_argument("--level", required=True, choices=levels)
    q.add_argument("file1")
    q.add_argument("file2")
    q.set_defaults(run=cmd_equal)

    d = sub.add_parser("dilate", help="dilate a channel given as JSON")
    d.add_argument("--kind", required=True, choices=("halmos", "stinespring"))
    d.add_argument("channel")
    d.add_argument("--out")
    d.set_defaults(run=cmd_dilate)

    s = sub.add_parser("suite", help="run the seeded property checks")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--filter", help="only checks whose name contains this text")
    s.add_argument("--cases", type=int, help="override the per-check case count")
    s.set_defaults(run=cmd_suite)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.run(args)
    except (TowerError, CliError, ValueError, TypeError) as exc:
        print(f"qtower: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
