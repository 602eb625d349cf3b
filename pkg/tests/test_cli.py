import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from opa_photothermal.cli import main, parse_family
from opa_photothermal.config import DEFAULTS
from opa_photothermal.spectra import build_model

CFG = str(Path(__file__).resolve().parents[1] / "params" / "table1.cfg")
SMALL = ["--f-min", "1", "--f-max", "1e5", "--ppd", "10"]


def run(tmp_path, name, *argv):
    out = tmp_path / name
    assert main([*argv, "--config", CFG, "--out", str(out)]) == 0
    return out


def test_spectrum_values_match_model(tmp_path):
    out = run(tmp_path, "s.csv", "spectrum", *SMALL)
    lines = out.read_text().splitlines()
    assert lines[0] == "freq_hz,V1_dB,V2_dB"
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    assert len(data) == 51
    V1, V2 = build_model(DEFAULTS).variances(2 * np.pi * data[:, 0])
    assert np.allclose(data[:, 1], 10 * np.log10(V1), rtol=1e-14)
    assert np.allclose(data[:, 2], 10 * np.log10(V2), rtol=1e-14)
    # full double precision survives the text round trip
    assert float(lines[5].split(",")[2]) == 10 * np.log10(V2[4])


def test_reruns_are_byte_identical(tmp_path):
    a = run(tmp_path, "a.csv", "spectrum", *SMALL, "--family", "P_seed=0.1,1 mW")
    b = run(tmp_path, "b.csv", "spectrum", *SMALL, "--family", "P_seed=0.1,1 mW")
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()
    assert Path(str(a) + ".json").read_bytes() == Path(str(b) + ".json").read_bytes()


def test_no_photothermal_equals_zero_absorption(tmp_path):
    a = run(tmp_path, "a.csv", "spectrum", *SMALL, "--no-photothermal")
    b = run(tmp_path, "b.csv", "spectrum", *SMALL, "--set", "sigma_a_abs=0 %/cm", "--set", "sigma_b_abs=0 %/cm")
    assert a.read_bytes() == b.read_bytes()


def test_sidecar_records_resolved_parameters(tmp_path):
    out = run(tmp_path, "s.csv", "spectrum", *SMALL, "--seed-mw", "10", "--amplitude-squeeze")
    meta = json.loads(Path(str(out) + ".json").read_text())
    assert meta["command"] == "spectrum"
    assert meta["params"]["P_seed"] == pytest.approx(0.01)
    assert meta["params"]["phi_b"] == pytest.approx(np.pi)
    assert meta["code_version"]


def test_family_labels():
    key, values, labels = parse_family("phi_b=0,180 deg")
    assert key == "phi_b" and values[1] == pytest.approx(np.pi)
    assert labels == ["phi_b=0 deg", "phi_b=180 deg"]


def test_sweep_and_gw_headers(tmp_path):
    s = run(tmp_path, "sw.csv", "sweep", "--axis", "seed", "--values", "1e-3,2e-3", "--freqs", "100")
    lines = s.read_text().splitlines()
    assert lines[0] == "seed_watts,freq_hz,V1_dB,V2_dB" and len(lines) == 3
    g = run(tmp_path, "gw.csv", "gw", "--ppd", "10", "--amplitude-squeeze", "--seed-mw", "10")
    lines = g.read_text().splitlines()
    assert lines[0] == "freq_hz,S_over_hsql2_dB,scheme"
    schemes = {ln.rsplit(",", 1)[1] for ln in lines[1:]}
    assert schemes == {"unsqueezed", "fixed", "fixed-no-photothermal", "frequency-dependent", "filter"}


def test_threshold_report(capsys):
    assert main(["threshold", "--config", CFG]) == 0
    rows = dict(ln.split(",") for ln in capsys.readouterr().out.splitlines()[1:])
    ss = build_model(DEFAULTS).steady
    assert float(rows["P_th_W"]) == ss.P_th
    assert "gamma_a_tot_per_s" in rows and "tau_rt_s" in rows


def test_plot_script_written(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["spectrum", *SMALL, "--out", str(out), "--plot"]) == 0
    script = (tmp_path / "p_plot.py").read_text()
    compile(script, "p_plot.py", "exec")


def test_error_exit_codes(tmp_path, capsys):
    assert main(["spectrum", *SMALL, "--pump-frac", "1.2"]) == 3
    assert "error [" in capsys.readouterr().err
    assert main(["spectrum", "--f-min", "10", "--f-max", "1"]) == 2
    assert main(["spectrum", *SMALL, "--config", str(tmp_path / "missing.cfg")]) == 4
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--ppd", "ten"])
    assert exc.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "opa_photothermal", "threshold"],
                       capture_output=True, text=True, check=True)
    assert r.stdout.startswith("quantity,value\n")
