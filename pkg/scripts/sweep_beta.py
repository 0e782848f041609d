"""Carbon 3/2 vs 1/2 peak gap after one and two steps as the E+/E- imbalance beta grows.

    python scripts/sweep_beta.py
"""

import numpy as np

from methyl_lls.master_equation import SpectralDensitySet, het_generator, rate_matrix, rate_propagate, seed_populations
from methyl_lls.observables import carbon_peaks, predicted_peaks_first_order
from methyl_lls.symmetry_basis import E_MINUS, E_PLUS, PolarizationParams

J = SpectralDensitySet({(E_PLUS, 0): 1.3, (E_MINUS, 0): 0.4, (E_PLUS, 2): 0.9, (E_MINUS, 2): 1.7})
DT = 1e-3


def main():
    w = rate_matrix(het_generator(J))
    print(f"{'beta':>6s} {'gap dt':>12s} {'predicted':>12s} {'gap 2dt':>12s}")
    for beta in np.linspace(0, 1, 6):
        params = PolarizationParams(0.5, beta)
        traj = rate_propagate(seed_populations(params), w, DT, 2)
        g1 = np.subtract(*carbon_peaks(traj[1])[:2])
        g2 = np.subtract(*carbon_peaks(traj[2])[:2])
        pred = np.subtract(*predicted_peaks_first_order(params, J, DT).carbon[:2])
        print(f"{beta:6.2f} {g1:12.4e} {pred:12.4e} {g2:12.4e}")


if __name__ == "__main__":
    main()
