"""Safe gain region for the lateral controller.

Sweeps the (K_d, K_theta) plane, evaluates the closed-form worst-case
lateral offset in every cell and marks the cells that keep the offset
below d_max = 0.4 m.  In the real-eigenvalue half the bound is just
z_max / K_d, so the safe set there is the exact half-plane K_d >= 0.25;
in the complex regime the oscillation factor shrinks the safe set as
K_theta drops.

Writes sweep.csv and fig2.svg into demos/output/.
"""

from pathlib import Path

import numpy as np

from wcbound import Regime, TfcParams, sweep
from wcbound.fileio import write_sweep_csv
from wcbound.svgfig import write_sweep_svg

OUT = Path(__file__).parent / "output"


def main():
    params = TfcParams(v=10.0, k_d=0.3, k_theta=0.5, z_max=0.1, d_max=0.4)
    region = sweep(params, kd_range=(0.01, 1.5), ktheta_range=(0.01, 2.5), resolution=200)

    n_safe = int(np.count_nonzero(region.safe))
    print(f"{n_safe} of {region.safe.size} cells keep the offset below "
          f"{params.d_max} m")

    complex_cells = region.regime == Regime.COMPLEX
    print(f"complex-regime cells: {int(np.count_nonzero(complex_cells))}, "
          f"safe fraction {np.mean(region.safe[complex_cells]):.2%}")
    real_cells = region.regime == Regime.REAL_DISTINCT
    print(f"real-regime cells:    {int(np.count_nonzero(real_cells))}, "
          f"safe fraction {np.mean(region.safe[real_cells]):.2%} "
          f"(exactly the K_d >= z_max/d_max half-plane)")

    i = int(np.argmin(np.abs(region.kd_grid - 0.3)))
    for kt_probe in (0.5, 1.2):
        j = int(np.argmin(np.abs(region.ktheta_grid - kt_probe)))
        print(f"cell (K_d~0.3, K_theta~{kt_probe}): bound "
              f"{region.bound[i, j]:.4f} m, "
              f"{'safe' if region.safe[i, j] else 'unsafe'}, "
              f"{region.regime[i, j].value}")

    OUT.mkdir(exist_ok=True)
    write_sweep_csv(OUT / "sweep.csv", region)
    write_sweep_svg(OUT / "fig2.svg", region)
    print(f"\nartifacts written to {OUT}/")


if __name__ == "__main__":
    main()
