#!/usr/bin/env python3
"""
🧪 Test CLI weq-arrival
=======================

Códigos de salida, archivos generados y salida determinista.
"""

import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# Agregar directorio del proyecto al path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from results_export import MASS_SWEEP_COLUMNS, SPIN_COLUMNS, read_table  # noqa: E402
from weq_arrival import EXIT_OK, EXIT_VALIDATION, EXIT_VERIFICATION, main, parse_key_value_options  # noqa: E402


def test_verify_quick_passes():
    assert main(["verify", "--quick", "--quiet"]) == EXIT_OK


def test_verify_detects_injected_fault():
    assert main(["verify", "--quick", "--inject-fault", "--quiet"]) == EXIT_VERIFICATION


def test_invalid_configuration_writes_nothing():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "tablas.csv")
        code = main(["tables", "--set", "sigma0_m=-1", "--out", out, "--quiet"])
        assert code == EXIT_VALIDATION
        assert not os.path.exists(out)


def test_tables_fall_row():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "tablas.csv")
        code = main(["tables", "--scenario", "fall", "--set", "z_ca_values=[13]", "--out", out, "--quiet"])
        assert code == EXIT_OK
        table = read_table(out)
        print(table.to_string())
        assert len(table) == 1
        row = table.iloc[0]
        assert row["scenario"] == "fall"
        assert abs(row["overlap"] - 0.04394) < 1e-4
        for column in ("tau_be", "tau_fd", "tau_mb"):
            assert abs(row[column] - 1.4381) < 0.002
        header = Path(out).read_text(encoding="utf-8").splitlines()
        assert header[0] == "# tables"
        assert any(line.startswith("# t_ref_s:") for line in header)


def test_arrival_dist_distant_packets_are_statistics_independent():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "dist.csv")
        code = main(["arrival-dist", "--statistics", "mb", "--separation", "50", "--out", out, "--quiet"])
        assert code == EXIT_OK
        table = read_table(out)
        assert list(table.columns) == ["t_over_tref", "pi_be_tref", "pi_fd_tref", "pi_mb_tref"]
        scale = table["pi_mb_tref"].abs().max()
        assert np.max(np.abs(table["pi_be_tref"] - table["pi_mb_tref"])) < 1e-8 * scale
        assert np.max(np.abs(table["pi_fd_tref"] - table["pi_mb_tref"])) < 1e-8 * scale


def test_arrival_dist_writes_one_file_per_separation():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "dist.csv")
        code = main(["arrival-dist", "--set", "z_ca_values=[10, 12]", "--out", out, "--quiet"])
        assert code == EXIT_OK
        assert sorted(os.listdir(tmp)) == ["dist_zca10.csv", "dist_zca12.csv"]


def test_output_is_deterministic():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "tablas.json")
        args = ["tables", "--scenario", "fall", "--set", "z_ca_values=[10]", "--format", "json", "--out", out,
                "--quiet"]
        assert main(args) == EXIT_OK
        first = Path(out).read_bytes()
        assert main(args) == EXIT_OK
        assert Path(out).read_bytes() == first
        payload = json.loads(first)
        assert payload["title"] == "tables"
        assert len(payload["rows"]) == 1


def _run_csv(args: list) -> pd.DataFrame:
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "salida.csv")
        assert main(args + ["--out", out, "--quiet"]) == EXIT_OK
        return read_table(out)


def _no_error(value) -> bool:
    return pd.isna(value) or value == ""


def test_mass_sweep_single_mass():
    table = _run_csv(["mass-sweep", "--masses", "1"])
    assert list(table.columns) == MASS_SWEEP_COLUMNS
    assert len(table) == 1
    row = table.iloc[0]
    assert row["m_over_mn"] == 1.0
    assert _no_error(row["error"])
    assert abs(row["tau_be"] - 1.3387) < 0.002
    assert row["spread_be_over_sigma0"] != row["spread_fd_over_sigma0"]
    assert row["mean_z_be0_over_sigma0"] == pytest.approx(row["mean_z_fd0_over_sigma0"])
    assert row["printed_mean_z_be0_over_sigma0"] < row["printed_mean_z_fd0_over_sigma0"]


def test_mass_sweep_explicit_masses_keep_order():
    table = _run_csv(["mass-sweep", "--masses", "0.5,5"])
    assert list(table["m_over_mn"]) == [0.5, 5.0]
    assert table["tau_be"].iloc[0] > table["tau_be"].iloc[1]
    assert abs(table["tau_be"].iloc[0] - 1.34674) < 0.002


def test_spin_sweep_neutron_row():
    table = _run_csv(["spin-sweep", "--masses", "1"])
    assert list(table.columns) == SPIN_COLUMNS
    row = table.iloc[0]
    print(f"📊 τ_Sch = {row['tau_sch']:.6f}, δ = {row['delta']:.3e}")
    assert _no_error(row["error"])
    assert abs(row["tau_sch"] - 1.2644) < 0.002
    assert 1.0e-4 <= row["delta"] <= 1.3e-4


def test_tables_identical_packets_report_fermion_error():
    table = _run_csv(["tables", "--scenario", "fall", "--z_ca_values", "[8]"])
    row = table.iloc[0]
    assert not _no_error(row["error"])
    assert "FD" in row["error"]
    assert math.isnan(row["tau_fd"])
    assert math.isfinite(row["tau_be"]) and math.isfinite(row["tau_mb"])


def test_tables_free_evolution_defaults():
    table = _run_csv(["tables", "--scenario", "free", "--z_ca_values=[12]", "--mass_ratio", "1"])
    row = table.iloc[0]
    print(f"📊 libre z_ca = 12σ₀: {row['tau_be']:.4f} / {row['tau_fd']:.4f} / {row['tau_mb']:.4f}")
    assert abs(row["tau_be"] - 2.682) < 0.002
    assert abs(row["tau_fd"] - 2.707) < 0.002
    assert abs(row["tau_mb"] - 2.694) < 0.002


def test_usage_errors_are_validation_errors():
    assert main(["tables", "--no_such_key", "1", "--quiet"]) == EXIT_VALIDATION
    assert main(["tables", "--statistics", "xx", "--quiet"]) == EXIT_VALIDATION
    assert main(["no-such-command", "--quiet"]) == EXIT_VALIDATION
    assert main(["tables", "--mass_ratio", "--quiet"]) == EXIT_VALIDATION
    assert main(["tables", "suelto", "--quiet"]) == EXIT_VALIDATION


def test_key_value_options():
    assert parse_key_value_options(["--mass_ratio", "2", "--z-ca-values=[10, 12]"]) == {
        "mass_ratio": 2, "z_ca_values": [10, 12]}
    assert parse_key_value_options([]) == {}


if __name__ == "__main__":
    print("🧪 CLI WEQ-ARRIVAL")
    print("=" * 40)
    failures = 0
    for name, test in [(n, f) for n, f in list(globals().items()) if n.startswith("test_") and callable(f)]:
        try:
            test()
            print(f"✅ {name}")
        except Exception as e:
            failures += 1
            print(f"❌ {name}: {e}")
    print("\n🎉 ¡TODOS LOS TESTS PASARON!" if not failures else f"\n❌ {failures} tests fallaron")
    raise SystemExit(1 if failures else 0)
