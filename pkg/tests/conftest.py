import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from methyl_lls.master_equation import SpectralDensitySet
from methyl_lls.symmetry_basis import E_MINUS, E_PLUS, PolarizationParams

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_het(rng, lo=0.1, hi=2.0) -> SpectralDensitySet:
    return SpectralDensitySet(
        {(lam, q): rng.uniform(lo, hi) for lam in (E_PLUS, E_MINUS) for q in (0, 2)}
    )


def random_homo(rng, lo=0.1, hi=2.0, zq=True) -> SpectralDensitySet:
    orders = (0, 1, 2) if zq else (1, 2)
    return SpectralDensitySet(homo={(lam, q): rng.uniform(lo, hi) for lam in (E_PLUS, E_MINUS) for q in orders})


def random_params(rng, alpha=False) -> PolarizationParams:
    g, b, a = rng.uniform(-1, 1, 3)
    return PolarizationParams(g, b, a if alpha else 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
