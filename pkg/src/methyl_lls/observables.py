"""NMR peak amplitudes of the carbon quartet and the proton doublet.

All peaks are diagonal observables, so a state and its population vector in the
symmetry level order give the same numbers.  Amplitudes are signed; the sign
is the peak phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dipolar import FrequencyParams
from .master_equation import SpectralDensitySet, populations, seeds
from .symmetry_basis import (
    E_MINUS,
    E_PLUS,
    FULL_LEVELS,
    PROTON_LEVELS,
    PolarizationParams,
)

CARBON_M = (1.5, 0.5, -0.5, -1.5)
PROTON_SPINS = ("up", "down")


@dataclass(frozen=True)
class GammaFactors:
    """Gamma^lam = J2^lam - J0^lam / 6 and the crossed tilde variant
    J2^lam - J0^-lam / 6."""

    gamma: dict
    gamma_tilde: dict


@dataclass(frozen=True)
class PeakSet:
    carbon: tuple[float, float, float, float]  # m = 3/2, 1/2, -1/2, -3/2
    proton: tuple[float, float]  # carbon up, carbon down
    carbon_freqs: tuple | None = None
    proton_freqs: tuple | None = None

    def __post_init__(self):
        if len(self.carbon) != 4 or len(self.proton) != 2:
            raise ValueError("a peak set holds four carbon and two proton amplitudes")
        if not np.all(np.isfinite([*self.carbon, *self.proton])):
            raise ValueError("peak amplitudes must be finite")

    def as_dict(self) -> dict:
        out = {
            "carbon": dict(zip(("+3/2", "+1/2", "-1/2", "-3/2"), map(float, self.carbon))),
            "proton": dict(zip(PROTON_SPINS, map(float, self.proton))),
        }
        if self.carbon_freqs is not None:
            out["carbon_freqs"] = [float(f) for f in self.carbon_freqs]
        if self.proton_freqs is not None:
            out["proton_freqs"] = [float(f) for f in self.proton_freqs]
        return out


@dataclass(frozen=True)
class SpectrumConfig:
    j_hc: float = 125.0  # Hz, proton-carbon scalar coupling
    j_hh: float = 0.0  # Hz, proton-proton scalar coupling
    larmor: FrequencyParams = field(default_factory=FrequencyParams)

    def __post_init__(self):
        if not (np.isfinite(self.j_hc) and np.isfinite(self.j_hh)):
            raise ValueError("scalar couplings must be finite")


def _as_populations(state) -> np.ndarray:
    a = np.asarray(state)
    if a.ndim == 2:
        return populations(a)
    return a.astype(float)


def carbon_peaks(state) -> np.ndarray:
    """<Pi_m (x) I_z> for m = 3/2, 1/2, -1/2, -3/2 from a 16-dim state or population vector."""
    p = _as_populations(state)
    if p.size != 16:
        raise ValueError(f"carbon peaks need the 16-level system, got {p.size} levels")
    out = np.zeros(4)
    for k, lv in enumerate(FULL_LEVELS):
        sign = 0.5 if lv.test_spin == "up" else -0.5
        out[CARBON_M.index(float(lv.m))] += sign * p[k]
    return out


def proton_peaks(state) -> np.ndarray:
    """<S_z (x) |up><up|> and <S_z (x) |down><down|>.

    An 8-level proton state is read as carrying an unpolarized test spin.
    """
    p = _as_populations(state)
    if p.size == 8:
        sz = float(sum(float(lv.m) * p[k] for k, lv in enumerate(PROTON_LEVELS)))
        return np.array([sz / 2, sz / 2])
    if p.size != 16:
        raise ValueError(f"expected 8 or 16 levels, got {p.size}")
    out = np.zeros(2)
    for k, lv in enumerate(FULL_LEVELS):
        out[PROTON_SPINS.index(lv.test_spin)] += float(lv.m) * p[k]
    return out


def proton_magnetization(state) -> float:
    """<S_z> of the protons, for 8- or 16-level input."""
    return float(np.sum(proton_peaks(state)))


def peak_set(state, config: SpectrumConfig | None = None) -> PeakSet:
    p = _as_populations(state)
    carbon = carbon_peaks(p) if p.size == 16 else np.zeros(4)
    cf, pf = peak_frequencies(config) if config is not None else (None, None)
    return PeakSet(tuple(carbon), tuple(proton_peaks(p)), cf, pf)


def gamma_factors(J: SpectralDensitySet) -> GammaFactors:
    missing = [
        f"J{q}_{lam.short}" for lam in (E_PLUS, E_MINUS) for q in (0, 2) if (lam, q) not in J.het
    ]
    if missing:
        raise ValueError(f"spectral densities missing: {', '.join(missing)}")
    gamma = {lam: J.J(lam, 2) - J.J(lam, 0) / 6 for lam in (E_PLUS, E_MINUS)}
    tilde = {lam: J.J(lam, 2) - J.J(-lam, 0) / 6 for lam in (E_PLUS, E_MINUS)}
    return GammaFactors(gamma, tilde)


def predicted_peaks_first_order(params: PolarizationParams, J: SpectralDensitySet, dt: float) -> PeakSet:
    """Peaks after one step dt of the default ZQ/DQ relaxation, closed form.

    Terms carrying beta multiply J^E+ - J^E- differences.  The test-spin
    polarization alpha adds the seed peaks and their decay at the summed
    rates J2 + J0 / 6.
    """
    g, b, a = params.gamma, params.beta, params.alpha
    gf = gamma_factors(J)
    G = gf.gamma[E_PLUS] + gf.gamma[E_MINUS]
    dG = gf.gamma[E_PLUS] - gf.gamma[E_MINUS]
    Gt = gf.gamma_tilde[E_PLUS] + gf.gamma_tilde[E_MINUS]
    dGt = gf.gamma_tilde[E_PLUS] - gf.gamma_tilde[E_MINUS]
    rates = {lam: J.J(lam, 2) + J.J(lam, 0) / 6 for lam in (E_PLUS, E_MINUS)}
    R = rates[E_PLUS] + rates[E_MINUS]
    dR = rates[E_PLUS] - rates[E_MINUS]
    bb = b * (1 - g) / 2
    h = dt / 16

    carbon = []
    for m in CARBON_M:
        pm = 1 if m > 0 else -1
        if abs(m) == 1.5:
            seed, decay, sym = a * (1 + g) / 16, R, bb
        else:
            seed, decay, sym = a * (3 - g) / 16, (3 - 4 * g / 3) * R, -bb
        carbon.append(seed - h * (pm * g * G + sym * dG) - a * h * (decay - pm * bb * dR))

    # gamma and alpha * beta parts are anti-phase, the pure alpha decay in-phase
    anti = 4 * h * (a * bb * dGt - g * Gt)
    inphase = -4 * a * h * (1 - g / 3) * Gt
    return PeakSet(tuple(carbon), (anti + inphase, -anti + inphase))


def homo_proton_signal_first_order(params: PolarizationParams, g: SpectralDensitySet, dt: float) -> float:
    """<S_z> after one dt from the SQ and DQ proton-proton channels (the seed carries none)."""
    s = seeds(params)
    bracket = (g.g(E_PLUS, 1) - g.g(E_MINUS, 1)) + 2 * (g.g(E_PLUS, 2) - g.g(E_MINUS, 2))
    return dt * (s.c_plus - s.c_minus) * bracket


def peak_frequencies(config: SpectrumConfig) -> tuple[tuple, tuple]:
    """Line positions (rad/s): carbon m at w_I + 2 pi J_HC m, protons at w_S +/- pi J_HC."""
    w = 2 * np.pi * config.j_hc
    carbon = tuple(config.larmor.omega_I + w * m for m in CARBON_M)
    proton = (config.larmor.omega_S + w / 2, config.larmor.omega_S - w / 2)
    return carbon, proton
