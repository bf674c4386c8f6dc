"""How much do ions beyond the nearest one add to tidal decoherence?

Places environment ions on a random Poisson sample around a superposed ion
at the neuron ion density, sums tau^-2 over all of them, and compares with
the nearest-ion timescale alone.
"""

from __future__ import annotations

import argparse

import numpy as np

from decokit.scenarios import NA_MASS, WATER_DENSITY
from decokit.tidal import (
    GaussianEnvironmentState, coulomb_hessian, minimal_thermal_spread, multi_ion_timescale,
    tidal_timescale,
)
from decokit.units import LENGTH, Quantity, quantity


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius-nm", type=float, default=60.0)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n = (2e-4 * WATER_DENSITY).value
    R = args.radius_nm * 1e-9
    env = GaussianEnvironmentState.isotropic(minimal_thermal_spread(NA_MASS, quantity(310, "K")))
    dr = Quantity(np.array([8e-9, 0.0, 0.0]), LENGTH)
    ratios = []
    for _ in range(args.trials):
        count = rng.poisson(n * 4 / 3 * np.pi * R ** 3)
        pts = rng.uniform(-R, R, size=(4 * count + 10, 3))
        pts = pts[np.linalg.norm(pts, axis=1) < R][:count]
        pts = pts[np.linalg.norm(pts, axis=1) > 1e-10]
        couplings = [coulomb_hessian(Quantity(p, LENGTH)) for p in pts]
        nearest = couplings[int(np.argmin(np.linalg.norm(pts, axis=1)))]
        ratios.append(tidal_timescale(nearest, env, dr).value
                      / multi_ion_timescale(couplings, env, dr).value)
    ratios = np.array(ratios)
    print(f"ions within {args.radius_nm:g} nm: ~{n * 4 / 3 * np.pi * R ** 3:.0f}")
    print(f"tau(nearest) / tau(all): median {np.median(ratios):.2f}, "
          f"range {ratios.min():.2f}..{ratios.max():.2f} over {args.trials} trials")


if __name__ == "__main__":
    main()
