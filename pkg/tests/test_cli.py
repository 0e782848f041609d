import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from methyl_lls.cli import (
    ConfigError,
    csv_header,
    main,
    parse_config,
    records_to_csv,
    run_peaks,
    run_simulate,
    run_verify,
)
from methyl_lls.symmetry_basis import E_MINUS, E_PLUS

BASE = {
    "gamma": 0.8,
    "beta": 0.3,
    "dt": 1e-4,
    "steps": 20,
    "J0_Ep": 1.2,
    "J0_Em": 0.7,
    "J2_Ep": 2.5,
    "J2_Em": 1.9,
    "g1_Ep": 0.6,
    "g1_Em": 0.4,
    "g2_Ep": 0.9,
    "g2_Em": 0.5,
    "seed_kind": "protected",
}


def cfg(**over):
    return parse_config(json.dumps({**BASE, **over}))


def write(tmp_path, **over):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({**BASE, **over}))
    return str(path)


def test_minimal_config_defaults():
    c = parse_config('{"gamma": 1, "dt": 1e-4, "steps": 10, "J2_Ep": 1, "J2_Em": 1}')
    assert c.mode == "het" and c.seed_kind == "lls"
    assert not c.include_sq and not c.include_symmetric
    assert c.spectral.J(E_PLUS, 2) == 1.0 and (E_MINUS, 0) in c.spectral.het
    assert c.spectrum.j_hc == 125.0


@pytest.mark.parametrize(
    "text, match",
    [
        ('{"steps": 3}', "missing required key: dt"),
        ('{"dt": 1e-3}', "missing required key: steps"),
        ('{"dt": 1e-3, "steps": 1, "gamma": 1.5}', "gamma"),
        ('{"dt": 1e-3, "steps": 1, "J0_Ep": -1}', "J0_Ep must be >= 0"),
        ('{"dt": 1e-3, "steps": 0}', "steps must be an integer >= 1"),
        ('{"dt": 0, "steps": 1}', "dt must be > 0"),
        ('{"dt": 0.01, "steps": 1, "J2_Ep": 10}', "dt \\* max_rate \\* 16"),
        ('{"dt": 1e-3, "steps": 1, "mode": "sideways"}', "mode"),
        ('{"dt": 1e-3, "steps": 1, "colour": 3}', "unknown config key"),
        ('{"dt": 1e-3, "steps": 1, "include_sq": 1}', "include_sq"),
        ('{"dt": 1e-3, "steps": 1, "seed_kind": "thermal", "gamma": 0.9}', "gamma"),
        ("[1, 2]", "JSON object"),
        ("{", "valid JSON"),
    ],
)
def test_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_single_step_example():
    c = parse_config('{"gamma": 1, "dt": 1e-3, "steps": 1, "J2_Ep": 1, "J2_Em": 1}')
    rec = run_simulate(c)
    assert len(rec) == 2
    # -dt/4 on the normalized 16-level vector
    assert rec[1].populations[0] - rec[0].populations[0] == pytest.approx(-2.5e-4, abs=1e-15)


def test_homo_mode_without_beta_stays_silent():
    recs = run_simulate(cfg(mode="homo", beta=0.0, steps=50, g0_Ep=0.8))
    assert all(r.populations.size == 8 for r in recs)
    assert max(np.max(np.abs(r.proton)) for r in recs) < 1e-15


def test_both_sequential_conserves_and_differs():
    het = run_simulate(cfg(mode="het"))
    both = run_simulate(cfg(mode="both-sequential"))
    assert all(abs(r.populations.sum() - 1) < 1e-12 for r in both)
    assert not np.allclose(het[-1].populations, both[-1].populations)


def test_thermal_seed_peaks_in_phase():
    recs = run_simulate(cfg(seed_kind="thermal", gamma=0.3, alpha=0.5))
    assert np.all(recs[-1].carbon > 0)


def test_csv_layout():
    recs = run_simulate(cfg(steps=3))
    text = records_to_csv(recs)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == csv_header(16)
    assert len(rows[0]) == 2 + 16 + 4 + 2
    assert rows[0][2] == "p_A_+3/2_up" and rows[0][-1] == "proton_down"
    assert len(rows) == 5
    assert float(rows[2][1]) == pytest.approx(1e-4)
    # 17 significant digits round-trip exactly
    assert float(rows[3][2]) == recs[2].populations[0]
    assert len(csv_header(8)) == 2 + 8 + 6


def test_simulate_is_byte_identical(tmp_path):
    conf = write(tmp_path)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", conf, "--out", str(out1)]) == 0
    assert main(["simulate", "--config", conf, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_output_path_from_config(tmp_path):
    target = tmp_path / "from_config.csv"
    conf = write(tmp_path, output_path=str(target))
    assert main(["simulate", "--config", conf]) == 0
    assert target.read_text().startswith("step,time,")


def test_verify_default_passes():
    report = run_verify(cfg(), 1e-10)
    assert report["all_pass"]
    assert {c["name"] for c in report["checks"]} == {
        "analytic_vs_rate",
        "rate_vs_lindblad",
        "selection_rules",
        "peak_identities",
    }


def test_verify_fault_flags_only_rate_check():
    report = run_verify(cfg(), 1e-10, fault="rate")
    failed = [c["name"] for c in report["checks"] if not c["pass"]]
    assert failed == ["analytic_vs_rate"]


def test_verify_zero_tolerance_fails_everything():
    report = run_verify(cfg(), 0.0)
    assert not any(c["pass"] for c in report["checks"])


def test_verify_exit_status(tmp_path, capsys):
    conf = write(tmp_path)
    assert main(["verify", "--config", conf, "--tolerance", "1e-10"]) == 0
    assert json.loads(capsys.readouterr().out)["all_pass"] is True
    assert main(["verify", "--config", conf, "--tolerance", "1e-10", "--inject-fault", "rate"]) == 1
    assert main(["verify", "--config", conf, "--tolerance", "0"]) == 1


def test_peaks_command(tmp_path, capsys):
    conf = write(tmp_path, j_hc=100.0, omega_I=1000.0)
    assert main(["peaks", "--config", conf]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["final"]["carbon_freqs"][3] == pytest.approx(1000.0 - 3 * np.pi * 100.0)
    assert "first_order" in out
    homo = run_peaks(cfg(mode="homo"))
    assert "first_order_proton_magnetization" in homo


def test_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"steps": 2}')
    assert main(["simulate", "--config", str(path)]) == 2
    assert "dt" in capsys.readouterr().err
    assert main(["peaks", "--config", str(tmp_path / "missing.json")]) == 2


def test_module_entry_point(tmp_path):
    conf = write(tmp_path, steps=2)
    res = subprocess.run(
        [sys.executable, "-m", "methyl_lls", "simulate", "--config", conf], capture_output=True, text=True
    )
    assert res.returncode == 0 and len(res.stdout.splitlines()) == 4


@given(
    st.floats(-1, 1, allow_nan=False),
    st.floats(-1, 1, allow_nan=False),
    st.floats(0, 5, allow_nan=False),
    st.integers(1, 5),
)
def test_simulation_stays_on_simplex(g, b, j, steps):
    c = parse_config(json.dumps({"gamma": g, "beta": b, "dt": 1e-3, "steps": steps, "J2_Ep": j, "J0_Em": j, "mode": "both-sequential", "g2_Ep": j}))
    for r in run_simulate(c):
        assert abs(r.populations.sum() - 1) < 1e-9
        assert r.populations.min() > -1e-12
