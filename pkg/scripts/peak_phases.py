"""Carbon and proton peak signs for a symmetry-ordered seed versus a thermal seed.

    python scripts/peak_phases.py [--steps 400] [--dt 1e-3]
"""

import argparse

import numpy as np

from methyl_lls.master_equation import (
    SpectralDensitySet,
    het_generator,
    populations,
    rate_matrix,
    rate_propagate,
)
from methyl_lls.observables import carbon_peaks, proton_peaks
from methyl_lls.spinalg import IDENTITY
from methyl_lls.symmetry_basis import E_MINUS, E_PLUS, q_lls, thermal_state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--gamma", type=float, default=0.9)
    args = ap.parse_args()

    J = SpectralDensitySet({(E_PLUS, 0): 1.0, (E_MINUS, 0): 1.0, (E_PLUS, 2): 2.0, (E_MINUS, 2): 2.0})
    w = rate_matrix(het_generator(J))
    seeds = {
        "LLS": np.kron(q_lls(args.gamma), IDENTITY / 2),
        "thermal": thermal_state(0.5, 0.3),
    }
    print(f"{'seed':8s} {'t (s)':>8s}  carbon m=+3/2 +1/2 -1/2 -3/2        proton up / down")
    for name, rho in seeds.items():
        traj = rate_propagate(populations(rho), w, args.dt, args.steps)
        for n in np.linspace(0, args.steps, 5).astype(int)[1:]:
            c, h = carbon_peaks(traj[n]), proton_peaks(traj[n])
            cs = " ".join(f"{x:+.2e}" for x in c)
            hs = " ".join(f"{x:+.2e}" for x in h)
            print(f"{name:8s} {n * args.dt:8.3f}  {cs}  {hs}")


if __name__ == "__main__":
    main()
