"""Command-line front end.

    pfskl gen-g50c --seed S --out FILE
    pfskl run --config FILE [--out FILE]
    pfskl spectrum --config FILE
    pfskl verify

Exit codes: 0 success, 1 failed self-check, 2 argument/config error,
3 numerical error, 4 degenerate instance.
"""

import argparse
import sys

from . import verify
from .errors import SklError
from .experiment import ExperimentConfig, dump_spectrum, gen_g50c, run_experiment


def _write_csv(data, path):
    with open(path, "w") as fh:
        for x, y in zip(data.features, data.labels):
            fh.write(",".join(repr(float(v)) for v in x) + f",{int(y)}\n")


def _cmd_gen(args):
    _write_csv(gen_g50c(args.seed), args.out)
    return 0


def _cmd_run(args):
    report = run_experiment(ExperimentConfig.from_file(args.config))
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_spectrum(args):
    sys.stdout.write(dump_spectrum(ExperimentConfig.from_file(args.config)))
    return 0


def _cmd_verify(args):
    failed = 0
    for name, ok, detail in verify.run_all():
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="pfskl", description="Parameter-free spectral kernel learning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-g50c", help="write the two-Gaussian G50C benchmark as CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("run", help="transductive evaluation; JSON report on stdout")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("spectrum", help="per-eigenpair gamma, a, lambda_bar as CSV")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("verify", help="compare closed forms with brute-force oracles")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except SklError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
