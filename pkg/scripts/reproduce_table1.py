"""Print the four-row timescale table next to the published orders of magnitude."""

from __future__ import annotations

import argparse
import math

from decokit.report import PUBLISHED_TIMESCALES, format_seconds, table1


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta-policy", choices=("drop", "worst", "best"), default="drop")
    args = ap.parse_args()
    report = table1(args.theta_policy)
    print(f"{'object':12s} {'environment':15s} {'computed':>10s} {'published':>10s} {'decades':>8s}")
    for row, (_, _, published) in zip(report.rows, PUBLISHED_TIMESCALES):
        tau = row.result.tau.value
        print(f"{row.object:12s} {row.result.mechanism:15s} {format_seconds(tau):>10s} "
              f"{format_seconds(published):>10s} {math.log10(tau / published):+8.2f}")
        closed = row.result.intermediates.get("closed_form_tau")
        if closed is not None:
            print(f"{'':12s} {'(closed form)':15s} {format_seconds(closed.value):>10s}")


if __name__ == "__main__":
    main()
