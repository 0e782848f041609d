"""Per-step gap between the Euler rate model and the Lindblad oracle as dt shrinks.

    python scripts/rate_vs_lindblad.py [--seed 0]
"""

import argparse

import numpy as np

from methyl_lls.master_equation import (
    SpectralDensitySet,
    het_generator,
    lindblad_propagate,
    populations,
    rate_matrix,
    rate_step,
)
from methyl_lls.symmetry_basis import E_MINUS, E_PLUS, PolarizationParams, seed_state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    J = SpectralDensitySet({(lam, q): rng.uniform(0.5, 2) for lam in (E_PLUS, E_MINUS) for q in (0, 2)})
    terms = het_generator(J)
    w = rate_matrix(terms)
    rho0 = seed_state(PolarizationParams(*rng.uniform(-1, 1, 3)))
    p0 = populations(rho0)

    prev = None
    print(f"{'dt':>10s} {'max |gap|':>12s} {'ratio':>8s}")
    for dt in 0.04 / 2 ** np.arange(6):
        oracle = populations(lindblad_propagate(rho0, terms, dt, dt / 16))
        gap = np.max(np.abs(p0 + rate_step(p0, w, dt) - oracle))
        ratio = "" if prev is None else f"{prev / gap:8.3f}"
        print(f"{dt:10.2e} {gap:12.4e} {ratio:>8s}")
        prev = gap


if __name__ == "__main__":
    main()
