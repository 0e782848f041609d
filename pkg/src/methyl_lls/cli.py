"""Command-line front end.

    python -m methyl_lls simulate --config run.json [--out traj.csv]
    python -m methyl_lls verify --config run.json --tolerance 1e-10
    python -m methyl_lls peaks --config run.json

Configs are flat JSON objects; rates in 1/s, times in s.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .dipolar import FrequencyParams, homo_symmetrized, sym_spin_op
from .master_equation import (
    SpectralDensitySet,
    analytic_first_step_het,
    analytic_first_step_homo,
    analytic_second_step_het,
    het_generator,
    homo_generator,
    lindblad_propagate,
    populations,
    rate_matrix,
    rate_step,
    seed_populations,
    zero_rates,
)
from .observables import (
    SpectrumConfig,
    carbon_peaks,
    homo_proton_signal_first_order,
    peak_set,
    predicted_peaks_first_order,
    proton_magnetization,
    proton_peaks,
)
from .spinalg import IDENTITY, kron
from .symmetry_basis import (
    ALL_LABELS,
    E_MINUS,
    E_PLUS,
    FULL_LEVELS,
    PROTON_LEVELS,
    PolarizationParams,
    q_protected,
    seed_state,
    thermal_state,
    to_symmetry_basis,
)

MODES = ("het", "homo", "both-sequential")
SEED_KINDS = ("lls", "protected", "thermal")
RATE_KEYS = tuple(f"{c}{q}_{s}" for c in "Jg" for q in "012" for s in ("Ep", "Em"))
# optional rates of the fully symmetric label, used with include_symmetric
SYMMETRIC_RATE_KEYS = tuple(f"{c}{q}_A" for c in "Jg" for q in "012")
REQUIRED_KEYS = ("dt", "steps")
DEFAULTS = {
    "mode": "het",
    "gamma": 0.0,
    "beta": 0.0,
    "alpha": 0.0,
    "include_sq": False,
    "include_symmetric": False,
    "j_hc": 125.0,
    "j_hh": 0.0,
    "omega_S": 0.0,
    "omega_I": 0.0,
    "seed_kind": "lls",
    "output_path": None,
    **{k: 0.0 for k in RATE_KEYS},
}
KNOWN_KEYS = set(DEFAULTS) | set(REQUIRED_KEYS) | set(SYMMETRIC_RATE_KEYS)
# dt * max_rate * STABILITY_MARGIN must stay below 1
STABILITY_MARGIN = 16


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    dt: float
    steps: int
    mode: str = "het"
    params: PolarizationParams = field(default_factory=PolarizationParams)
    spectral: SpectralDensitySet = field(default_factory=SpectralDensitySet)
    include_sq: bool = False
    include_symmetric: bool = False
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    seed_kind: str = "lls"
    output_path: str | None = None

    @property
    def n_levels(self) -> int:
        return 8 if self.mode == "homo" else 16


@dataclass(frozen=True)
class RunRecord:
    step: int
    time: float
    populations: np.ndarray
    carbon: np.ndarray
    proton: np.ndarray


def _number(d: dict, key: str, lo=-np.inf, hi=np.inf) -> float:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    v = float(v)
    if not np.isfinite(v) or not lo <= v <= hi:
        raise ConfigError(f"{key} = {v} outside the allowed range [{lo}, {hi}]")
    return v


def _flag(d: dict, key: str) -> bool:
    if not isinstance(d[key], bool):
        raise ConfigError(f"{key} must be true or false, got {d[key]!r}")
    return d[key]


def parse_config(text: str) -> RunConfig:
    """Validate a flat JSON config and fill in defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(f"missing required key: {key}")
    unknown = sorted(set(raw) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    d = {**DEFAULTS, **raw}

    if d["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {d['mode']!r}")
    if d["seed_kind"] not in SEED_KINDS:
        raise ConfigError(f"seed_kind must be one of {SEED_KINDS}, got {d['seed_kind']!r}")
    gamma_hi = 2 / 3 if d["seed_kind"] == "thermal" else 1.0
    params = PolarizationParams(
        _number(d, "gamma", -gamma_hi, gamma_hi), _number(d, "beta", -1, 1), _number(d, "alpha", -1, 1)
    )
    dt = _number(d, "dt", 0, np.inf)
    if dt <= 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    steps = d["steps"]
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
        raise ConfigError(f"steps must be an integer >= 1, got {steps!r}")

    rates = {}
    for key in (*RATE_KEYS, *SYMMETRIC_RATE_KEYS):
        if key in d:
            rates[key] = _number(d, key)
            if rates[key] < 0:
                raise ConfigError(f"spectral density {key} must be >= 0, got {rates[key]}")
    spectral = SpectralDensitySet.from_flat(rates)
    worst = dt * spectral.max_rate() * STABILITY_MARGIN
    if worst >= 1:
        raise ConfigError(
            f"dt * max_rate * {STABILITY_MARGIN} = {worst:.6g} must be < 1; reduce dt or the rates"
        )

    spectrum = SpectrumConfig(
        _number(d, "j_hc"),
        _number(d, "j_hh"),
        FrequencyParams(_number(d, "omega_S"), _number(d, "omega_I")),
    )
    out = d["output_path"]
    if out is not None and not isinstance(out, str):
        raise ConfigError(f"output_path must be a string, got {out!r}")
    return RunConfig(
        dt=dt,
        steps=steps,
        mode=d["mode"],
        params=params,
        spectral=spectral,
        include_sq=_flag(d, "include_sq"),
        include_symmetric=_flag(d, "include_symmetric"),
        spectrum=spectrum,
        seed_kind=d["seed_kind"],
        output_path=out,
    )


# ----------------------------------------------------------------- simulate


def initial_state(config: RunConfig) -> np.ndarray:
    """Seed density matrix (product basis) selected by ``seed_kind``."""
    p = config.params
    if config.seed_kind == "thermal":
        rho = thermal_state(p.gamma, p.alpha)
    else:
        beta = p.beta if config.seed_kind == "protected" else 0.0
        rho = seed_state(PolarizationParams(p.gamma, beta, p.alpha))
    if config.mode == "homo":
        rho = rho.reshape(8, 2, 8, 2).trace(axis1=1, axis2=3)
    return rho


def _rates_or_zero(terms, dim):
    return rate_matrix(terms) if terms else zero_rates(dim)


def het_rates(config: RunConfig) -> np.ndarray:
    return _rates_or_zero(
        het_generator(config.spectral, config.include_sq, config.include_symmetric), 16
    )


def homo_rates(config: RunConfig) -> np.ndarray:
    return _rates_or_zero(homo_generator(config.spectral, config.include_symmetric), 8)


def _record(step: int, config: RunConfig, p: np.ndarray) -> RunRecord:
    if abs(p.sum() - 1) > 1e-9 or p.min() < -1e-9:
        raise RuntimeError(f"populations left the probability simplex at step {step}")
    carbon = carbon_peaks(p) if p.size == 16 else np.zeros(4)
    return RunRecord(step, step * config.dt, p.copy(), carbon, proton_peaks(p))


def run_simulate(config: RunConfig) -> list[RunRecord]:
    p = populations(initial_state(config))
    if config.mode == "het":
        stages = [het_rates(config)]
    elif config.mode == "homo":
        stages = [homo_rates(config)]
    else:
        # proton-proton relaxation leaves the test spin alone
        stages = [het_rates(config), np.kron(np.eye(2), homo_rates(config))]
    records = [_record(0, config, p)]
    for n in range(1, config.steps + 1):
        for w in stages:
            p = p + rate_step(p, w, config.dt)
        records.append(_record(n, config, p))
    return records


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_header(n_levels: int) -> list[str]:
    levels = FULL_LEVELS if n_levels == 16 else PROTON_LEVELS
    cols = ["step", "time"]
    for lv in levels:
        name = f"p_{lv.s.short}_{'+' if lv.m > 0 else '-'}{abs(lv.m.numerator)}/2"
        if lv.test_spin is not None:
            name += f"_{lv.test_spin}"
        cols.append(name)
    cols += ["carbon_+3/2", "carbon_+1/2", "carbon_-1/2", "carbon_-3/2", "proton_up", "proton_down"]
    return cols


def records_to_csv(records: list[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header(records[0].populations.size))
    for r in records:
        row = [str(r.step), _fmt(r.time)]
        row += [_fmt(x) for x in (*r.populations, *r.carbon, *r.proton)]
        writer.writerow(row)
    return buf.getvalue()


# ------------------------------------------------------------------- verify


def _target_leak(op, levels, lam, shift, compare_spin) -> float:
    m = to_symmetry_basis(op)
    worst = 0.0
    for i, out in enumerate(levels):
        for j, inp in enumerate(levels):
            allowed = out.s == inp.s + lam and out.m == inp.m + shift
            if compare_spin:
                allowed = allowed and out.test_spin == inp.test_spin
            if not allowed:
                worst = max(worst, abs(m[i, j]))
    return worst


def selection_rule_leak() -> float:
    """Largest matrix element of S^lam_p (x) 1 or T^lam_q off its (s + lam, m + p) targets."""
    worst = 0.0
    for lam in ALL_LABELS:
        for p in (-1, 0, 1):
            op = kron(sym_spin_op(lam, p), IDENTITY)
            worst = max(worst, _target_leak(op, FULL_LEVELS, lam, p, True))
        for q in (-2, -1, 0, 1, 2):
            worst = max(worst, _target_leak(homo_symmetrized(lam, q), PROTON_LEVELS, lam, q, False))
    return worst


def _exact_rate_flow(p0, w, t):
    k = w - np.diag(w.sum(axis=1))
    return expm(k * t) @ p0


def _lindblad_vs_rates(rho0, terms, dim, t) -> float:
    if not terms:
        return 0.0
    rho_t = lindblad_propagate(rho0, terms, t, t / 8)
    return float(np.max(np.abs(populations(rho_t) - _exact_rate_flow(populations(rho0), rate_matrix(terms), t))))


def run_verify(config: RunConfig, tolerance: float, fault: str | None = None) -> dict:
    """Compare closed forms, rate engine, Lindblad oracle and peak identities.

    ``fault="rate"`` doubles the rate matrix seen by the analytic-vs-rate
    comparison, which must then fail.
    """
    if fault not in (None, "rate"):
        raise ValueError(f"unknown fault {fault!r}")
    dt = config.dt
    J = config.spectral
    params = config.params
    quiet = PolarizationParams(params.gamma, params.beta, 0.0)
    corrupt = 2.0 if fault == "rate" else 1.0

    # closed forms assume the default ZQ/DQ generator
    w = _rates_or_zero(het_generator(J), 16)
    w_bad = corrupt * w
    p0 = seed_populations(quiet)
    p1 = p0 + rate_step(p0, w_bad, dt)
    p2 = p1 + rate_step(p1, w_bad, dt)
    dev = [np.max(np.abs(p1 - p0 - analytic_first_step_het(quiet, J, dt)))]
    dev += [abs(p2[k] - p1[k] - v) for k, v in analytic_second_step_het(quiet, J, dt).items()]
    no_zq = SpectralDensitySet(homo={(lam, q): J.g(lam, q) for lam in (E_PLUS, E_MINUS) for q in (1, 2)})
    wh = corrupt * _rates_or_zero(homo_generator(no_zq), 8)
    q0 = seed_populations(quiet, test_spin=False)
    step = rate_step(q0, wh, dt)
    dev.append(np.max(np.abs(step - analytic_first_step_homo(quiet, no_zq, dt))))
    wg = corrupt * _rates_or_zero(homo_generator(J), 8)
    dev.append(abs(proton_magnetization(q0 + rate_step(q0, wg, dt)) - homo_proton_signal_first_order(quiet, J, dt)))
    analytic = float(max(dev))

    het_terms = het_generator(J, config.include_sq, config.include_symmetric)
    homo_terms = homo_generator(J, config.include_symmetric)
    lind = max(
        _lindblad_vs_rates(seed_state(params), het_terms, 16, dt),
        _lindblad_vs_rates(q_protected(params.gamma, params.beta), homo_terms, 8, dt),
    )

    ps = seed_populations(params)
    engine = ps + rate_step(ps, w, dt)
    pred = predicted_peaks_first_order(params, J, dt)
    peak_dev = max(
        np.max(np.abs(carbon_peaks(engine) - pred.carbon)),
        np.max(np.abs(proton_peaks(engine) - pred.proton)),
    )
    anti = proton_peaks(p0 + rate_step(p0, w, dt))
    peak_dev = float(max(peak_dev, abs(anti[0] + anti[1])))

    checks = [
        ("analytic_vs_rate", analytic),
        ("rate_vs_lindblad", float(lind)),
        ("selection_rules", selection_rule_leak()),
        ("peak_identities", peak_dev),
    ]
    report = {
        "tolerance": tolerance,
        "checks": [{"name": n, "max_deviation": v, "pass": bool(v < tolerance)} for n, v in checks],
    }
    report["all_pass"] = all(c["pass"] for c in report["checks"])
    return report


# -------------------------------------------------------------------- peaks


def run_peaks(config: RunConfig) -> dict:
    records = run_simulate(config)
    out = {
        "initial": peak_set(records[0].populations, config.spectrum).as_dict(),
        "final": peak_set(records[-1].populations, config.spectrum).as_dict(),
        "time": records[-1].time,
    }
    if config.mode == "homo":
        q = PolarizationParams(config.params.gamma, config.params.beta if config.seed_kind == "protected" else 0.0)
        out["first_order_proton_magnetization"] = homo_proton_signal_first_order(q, config.spectral, config.dt)
    elif config.seed_kind != "thermal":
        p = config.params
        q = PolarizationParams(p.gamma, p.beta if config.seed_kind == "protected" else 0.0, p.alpha)
        out["first_order"] = predicted_peaks_first_order(q, config.spectral, config.dt).as_dict()
    return out


# --------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="methyl-lls", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="write a population and peak trajectory as CSV")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", help="CSV path; defaults to output_path or stdout")
    ver = sub.add_parser("verify", help="run the consistency checks, JSON report")
    ver.add_argument("--config", required=True)
    ver.add_argument("--tolerance", type=float, required=True)
    ver.add_argument("--inject-fault", choices=["rate"], help="testing hook: corrupt the rate matrix")
    pk = sub.add_parser("peaks", help="print peak amplitudes and line positions")
    pk.add_argument("--config", required=True)
    return ap


def _load(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "simulate":
        text = records_to_csv(run_simulate(config))
        path = args.out or config.output_path
        if path:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if args.command == "verify":
        report = run_verify(config, args.tolerance, args.inject_fault)
        print(json.dumps(report, indent=2))
        return 0 if report["all_pass"] else 1
    print(json.dumps(run_peaks(config), indent=2))
    return 0
