"""Command-line entry point: ``decokit {run,table1,trinity-demo,oracle}``.

Exit codes: 0 success, 2 config error, 3 physics-regime guard failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import trinity
from .config import ConfigError, load_config
from .oracle import MotionError, standard_suite
from .report import run_scenario, table1
from .scattering import RegimeError

EXIT_OK, EXIT_CONFIG, EXIT_REGIME = 0, 2, 3


def trinity_demo(figure: int) -> list[dict]:
    """Every stage of a demo sequence as serialised 6x6 matrices."""
    if figure == 4:
        seq = trinity.fig4_sequence()
    elif figure == 5:
        seq = trinity.fig5_sequence()
    else:
        raise ValueError(f"figure must be 4 or 5, got {figure!r}")
    stages = []
    for label, rho in seq:
        stages.append({
            "stage": label,
            "matrix": trinity.to_json(rho),
            "entropy_bits": {
                "joint": trinity.entropy(rho),
                "subject": trinity.entropy(trinity.partial_trace(rho, trinity.SUBJECT_OBJECT, [0])),
                "object": trinity.entropy(trinity.partial_trace(rho, trinity.SUBJECT_OBJECT, [1])),
            },
            "mutual_information_bits": trinity.mutual_information(rho, trinity.SUBJECT_OBJECT, (0, 1)),
        })
    return stages


def _trinity_text(figure: int, stages: list[dict]) -> str:
    lines = [f"# trinity demo, figure {figure}",
             "basis: " + "  ".join(trinity.SO_BASIS.names)]
    for s in stages:
        m = trinity.from_json(s["matrix"]).matrix
        e = s["entropy_bits"]
        lines.append("")
        lines.append(f"{s['stage']}: S_object = {e['object']:.3f} bit, "
                     f"S_subject = {e['subject']:.3f} bit, I = {s['mutual_information_bits']:.3f} bit")
        for row in m.real:
            lines.append("  " + " ".join(f"{v:5.2f}" for v in row))
    return "\n".join(lines) + "\n"


def _clean(x):
    # -0.0 and tiny float noise print identically across runs
    if isinstance(x, float):
        return 0.0 if x == 0 else x
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_clean(v) for v in x]
    return x


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decokit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, theta=True):
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="text")
        if theta:
            p.add_argument("--theta-policy", choices=("drop", "worst", "best"), default=None,
                           help="angular factor for tidal timescales (default: drop)")

    p = sub.add_parser("run", help="evaluate a scenario config")
    p.add_argument("config")
    common(p)
    p = sub.add_parser("table1", help="the four-row decoherence timescale table")
    common(p)
    p = sub.add_parser("trinity-demo", help="subject/object density-matrix sequences")
    p.add_argument("--figure", type=int, choices=(4, 5), required=True)
    common(p, theta=False)
    p = sub.add_parser("oracle", help="run the grid oracle checks")
    common(p, theta=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            report = run_scenario(load_config(args.config), args.theta_policy)
            text = report.to_json() if args.format == "json" else report.to_text()
        elif args.command == "table1":
            report = table1(args.theta_policy or "drop")
            text = report.to_json() if args.format == "json" else report.to_text()
        elif args.command == "trinity-demo":
            stages = _clean(trinity_demo(args.figure))
            if args.format == "json":
                text = json.dumps({"figure": args.figure, "stages": stages}, indent=2) + "\n"
            else:
                text = _trinity_text(args.figure, stages)
        else:
            records = [r.to_dict() for r in standard_suite()]
            if args.format == "json":
                text = json.dumps(records, indent=2) + "\n"
            else:
                w = max(len(r["test"]) for r in records)
                text = "".join(f"{r['test'].ljust(w)}  rel_err = {r['relative_error']:.2e}\n"
                               for r in records)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (RegimeError, MotionError) as e:
        print(f"regime error: {e}", file=sys.stderr)
        return EXIT_REGIME
    except (OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
