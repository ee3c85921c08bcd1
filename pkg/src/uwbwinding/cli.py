"""Command-line interface.

Exit codes: 0 ok, 2 I/O failure, 3 parse failure, 4 no reference strip.
"""

from __future__ import annotations

import argparse
import sys

from . import fileio, pipeline
from .analysis import estimate_displacement
from .config import load_config
from .errors import InvalidArgument, NoStripError, ParseError, UndefinedErrorPct

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_NO_STRIP = 4


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_simulate(args, cfg):
    bscan = pipeline.run_simulate(cfg, args.displacement, args.seed)
    fileio.write_bscan(args.out, bscan)
    info = pipeline.simulation_summary(cfg, bscan)
    print(
        f"K={info['K']} N={info['N']} step_mm={info['step_mm']:g} "
        f"span_mm={info['span_mm']:g} resolution_x_mm={info['resolution_x_mm']:.4f}"
    )
    return EXIT_OK


def cmd_migrate(args, cfg):
    bscan = fileio.read_bscan(args.bscan)
    alg = args.algorithm or cfg.algorithm
    image = pipeline.run_migrate(cfg, bscan, alg)
    fileio.write_image(args.out, image, alg)
    if args.gray_out:
        fileio.write_pgm(args.gray_out, pipeline.gray_export(image))
    return EXIT_OK


def cmd_analyze(args, cfg):
    image, recorded = fileio.read_image(args.image)
    alg = args.algorithm or recorded or cfg.algorithm
    report = pipeline.run_analyze(cfg, image, alg)
    fileio.write_strip_report(args.out, report)
    return EXIT_OK


def cmd_compare(args, cfg):
    baseline = fileio.read_strip_report(args.baseline)
    state = fileio.read_strip_report(args.state)
    disp = estimate_displacement(baseline, state, args.actual)
    _write_text(args.out, fileio.format_displacement_report(baseline, state, disp))
    return EXIT_OK


def cmd_experiment(args, cfg):
    algs = ("kirchhoff", "das") if args.algorithm == "both" else (args.algorithm or cfg.algorithm,)
    results = pipeline.run_experiment(cfg, algs, args.seed)
    _write_text(args.out, pipeline.format_experiment(results))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uwbwinding",
        description="UWB radar imaging of a winding and axial displacement measurement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, algorithms=("kirchhoff", "das")):
        p.add_argument("--config", metavar="PATH", help="JSON configuration file")
        p.add_argument("--algorithm", choices=algorithms, help="migration algorithm")

    p = sub.add_parser("simulate", help="synthesize an averaged B-scan of the winding model")
    common(p)
    p.add_argument("--displacement", type=float, default=0.0, metavar="MM",
                   help="axial displacement toward smaller x")
    p.add_argument("--seed", type=int, default=None, metavar="N")
    p.add_argument("out", help="output B-scan file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("migrate", help="form a radar image from a B-scan")
    common(p)
    p.add_argument("--gray-out", metavar="PATH", help="also write an 8-bit PGM")
    p.add_argument("bscan")
    p.add_argument("out")
    p.set_defaults(func=cmd_migrate)

    p = sub.add_parser("analyze", help="measure the reference strip edges of a radar image")
    common(p)
    p.add_argument("image")
    p.add_argument("out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="displacement between a baseline and a state report")
    p.add_argument("--config", metavar="PATH", help=argparse.SUPPRESS)
    p.add_argument("--actual", type=float, default=None, metavar="MM")
    p.add_argument("--out", metavar="PATH", default=None)
    p.add_argument("baseline")
    p.add_argument("state")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("experiment", help="run the four-state displacement experiment")
    common(p, ("kirchhoff", "das", "both"))
    p.add_argument("--seed", type=int, default=None, metavar="N")
    p.add_argument("--out", metavar="PATH", default=None)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoStripError as exc:
        print(f"no reference strip: {exc}", file=sys.stderr)
        return EXIT_NO_STRIP
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidArgument, UndefinedErrorPct) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
