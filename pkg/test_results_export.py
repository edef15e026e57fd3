#!/usr/bin/env python3
"""
🧪 Test Exportación de Resultados
=================================
"""

import json
import math
import os
import sys
import tempfile
from pathlib import Path

import pandas as pd
import pytest

# Agregar directorio del proyecto al path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from arrival_time import MassSweepRow, SeparationRow  # noqa: E402
from physical_model import DEFAULT_CONSTANTS, reference_time  # noqa: E402
from results_export import (  # noqa: E402
    MASS_SWEEP_COLUMNS,
    format_header,
    mass_sweep_frame,
    normalization_header,
    read_table,
    render_table,
    separation_frame,
    write_table,
)

SIGMA0 = 1e-5
T_REF = reference_time(DEFAULT_CONSTANTS.neutron_mass, SIGMA0)


def test_header_keeps_metadata_order():
    lines = format_header("tables", {"b": 2, "a": 0.5, "axis": (0.0, 1.0, 0.0)})
    assert lines == ["# tables", "# b: 2", "# a: 0.5", "# axis: [0.0, 1.0, 0.0]"]


def test_normalization_header():
    header = normalization_header(SIGMA0)
    assert list(header) == ["version", "t_ref_s", "sigma0_m", "m_n_kg", "hbar_Js"]
    assert header["t_ref_s"] == pytest.approx(T_REF)


def test_separation_frame_is_dimensionless():
    rows = [SeparationRow(z_ca=10 * SIGMA0, overlap=0.6065, tau_be=1.3387 * T_REF, tau_fd=1.34 * T_REF,
                          tau_mb=1.3391 * T_REF)]
    frame = separation_frame(rows, "fall", SIGMA0, T_REF)
    assert frame.loc[0, "z_ca_over_sigma0"] == pytest.approx(10.0)
    assert frame.loc[0, "tau_be"] == pytest.approx(1.3387)


def test_mass_sweep_frame_keeps_missing_values():
    frame = mass_sweep_frame([MassSweepRow(mass=DEFAULT_CONSTANTS.neutron_mass, error="FD: degenerado")], SIGMA0)
    assert list(frame.columns) == MASS_SWEEP_COLUMNS
    assert frame.loc[0, "m_over_mn"] == pytest.approx(1.0)
    assert math.isnan(frame.loc[0, "tau_fd"])


def test_csv_round_trip_ignores_header():
    frame = pd.DataFrame({"x": [0.1, 0.2], "y": [1.0, 2.0]})
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "sub", "tabla.csv")
        write_table(frame, path, "prueba", {"sigma0_m": SIGMA0})
        text = Path(path).read_text(encoding="utf-8")
        assert text.startswith("# prueba\n# sigma0_m: 1e-05\nx,y\n")
        assert read_table(path)["y"].tolist() == [1.0, 2.0]


def test_json_and_stdout_output(capsys):
    frame = pd.DataFrame({"x": [0.5]})
    payload = json.loads(render_table(frame, "prueba", {"axis": (0.0, 1.0, 0.0)}, "json"))
    assert payload["metadata"]["axis"] == [0.0, 1.0, 0.0]
    assert payload["rows"] == [{"x": 0.5}]
    assert write_table(frame, "-", "prueba", {}) is None
    assert capsys.readouterr().out == "# prueba\nx\n0.5\n"
    with pytest.raises(ValueError):
        render_table(frame, "prueba", {}, "xlsx")


if __name__ == "__main__":
    print("🧪 EXPORTACIÓN DE RESULTADOS")
    print("=" * 40)
    failures = 0
    for name, test in [(n, f) for n, f in list(globals().items()) if n.startswith("test_") and callable(f)]:
        if test.__code__.co_argcount:
            continue
        try:
            test()
            print(f"✅ {name}")
        except Exception as e:
            failures += 1
            print(f"❌ {name}: {e}")
    print("\n🎉 ¡TODOS LOS TESTS PASARON!" if not failures else f"\n❌ {failures} tests fallaron")
    raise SystemExit(1 if failures else 0)
