"""Grid oracle error against the analytic Gaussian tidal factor as the grid
is refined, plus the Wigner duality mismatch at each size."""

from __future__ import annotations

import argparse

from decokit.oracle import gaussian_agreement, wigner_duality


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128, 256])
    ap.add_argument("--kicks", type=int, default=20)
    args = ap.parse_args()
    print(f"{'points':>6s} {'gaussian rel err':>17s} {'duality max err':>16s}")
    for n in args.sizes:
        g = gaussian_agreement(points=n).relative_error
        w = wigner_duality(n_kicks=args.kicks, points=n).relative_error
        print(f"{n:6d} {g:17.3e} {w:16.3e}")


if __name__ == "__main__":
    main()
