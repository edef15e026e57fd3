#!/usr/bin/env python3
"""
🧪 Test Configuración de Simulación
===================================

Valores por defecto, precedencia archivo < entorno < línea de comandos,
errores de validación con clave y línea.
"""

import os
import sys
import tempfile
from pathlib import Path

import pytest

# Agregar directorio del proyecto al path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from physical_model import DEFAULT_CONSTANTS, FREE_EVOLUTION_KICK, StatisticsKind  # noqa: E402
from simulation_config import (  # noqa: E402
    ConfigValidationError,
    get_env_overrides,
    get_simulation_defaults,
    load_run_config,
    parse_set_overrides,
    parse_value,
)


def _write_config(text: str) -> str:
    handle, path = tempfile.mkstemp(suffix=".toml")
    with os.fdopen(handle, "w", encoding="utf-8") as f:
        f.write(text)
    return path


def test_defaults_reproduce_published_parameters():
    cfg = load_run_config(use_env=False)
    config = cfg.two_body_config()
    assert cfg.sigma0_m == 1e-5
    assert cfg.mass == DEFAULT_CONSTANTS.neutron_mass
    assert config.packet_a.z_c == pytest.approx(1e-4)
    assert config.packet_b.z_c == pytest.approx(8e-5)
    assert config.scenario.is_fall and config.scenario.g == 10.0
    assert config.statistics is StatisticsKind.BE
    assert list(cfg.z_ca_values) == [10.0, 11.0, 12.0, 13.0]


def test_free_evolution_starts_with_kick():
    cfg = load_run_config(use_env=False)
    assert cfg.kicks("free") == (FREE_EVOLUTION_KICK, FREE_EVOLUTION_KICK)
    assert cfg.kicks() == (0.0, 0.0)
    free = cfg.two_body_config(scenario="free")
    assert free.packet_a.k == pytest.approx(-2.0 / cfg.sigma0_m)
    assert free.packet_b.k == pytest.approx(-2.0 / cfg.sigma0_m)
    fall = cfg.two_body_config(scenario="fall")
    assert fall.packet_a.k == 0.0 and fall.packet_b.k == 0.0
    tuned = load_run_config(environ={"WEQ_FREE_K_A": "-1.5"})
    assert tuned.kicks("free") == (-1.5, FREE_EVOLUTION_KICK)
    with pytest.raises(ConfigValidationError):
        load_run_config(cli_overrides={"k_a": 1.0}, use_env=False)


def test_defaults_are_copied():
    defaults = get_simulation_defaults()
    defaults["z_ca_values"].append(99.0)
    assert 99.0 not in get_simulation_defaults()["z_ca_values"]


def test_precedence_file_env_cli():
    path = _write_config("z_ca = 11\nscenario = \"free\"\n")
    try:
        environ = {"WEQ_Z_CA": "12", "OTHER": "1"}
        assert load_run_config(path, use_env=False).z_ca == 11.0
        assert load_run_config(path, environ=environ).z_ca == 12.0
        cfg = load_run_config(path, {"z_ca": 13.0}, environ=environ)
        assert cfg.z_ca == 13.0
        assert cfg.scenario == "free"
        assert not cfg.two_body_config().scenario.is_fall
    finally:
        os.unlink(path)


def test_unknown_key_reports_line():
    path = _write_config("z_ca = 10\nz_cb = 8\nz_cc = 6\n")
    try:
        with pytest.raises(ConfigValidationError) as excinfo:
            load_run_config(path, use_env=False)
        assert excinfo.value.key == "z_cc"
        assert excinfo.value.line == 3
        assert excinfo.value.source == path
    finally:
        os.unlink(path)


def test_invalid_values_are_rejected():
    for overrides in ({"sigma0_m": -1.0}, {"statistics": "xy"}, {"workers": 0},
                      {"spin_axis": [0.0, 2.0, 0.0]}, {"mass_min": 10.0, "mass_max": 1.0},
                      {"masses": [2.0, 1.0]}):
        with pytest.raises(ConfigValidationError):
            load_run_config(cli_overrides=overrides, use_env=False)
    with pytest.raises(ConfigValidationError) as excinfo:
        load_run_config(cli_overrides={"sigma0_m": 0.0}, use_env=False)
    assert excinfo.value.key == "sigma0_m"


def test_malformed_files_are_rejected():
    for text in ("z_ca = \n", "[tabla]\nz_ca = 10\n"):
        path = _write_config(text)
        try:
            with pytest.raises(ConfigValidationError):
                load_run_config(path, use_env=False)
        finally:
            os.unlink(path)
    with pytest.raises(ConfigValidationError):
        load_run_config("/no/existe.toml", use_env=False)


def test_set_overrides_and_value_parsing():
    overrides = parse_set_overrides(["scenario=free", "z_ca_values=[10, 12]", "workers=2"])
    assert overrides == {"scenario": "free", "z_ca_values": [10, 12], "workers": 2}
    assert parse_value("1e-5") == pytest.approx(1e-5)
    assert parse_value("true") is True
    with pytest.raises(ConfigValidationError):
        parse_set_overrides(["sin_igual"])


def test_env_overrides_use_prefix():
    overrides = get_env_overrides({"WEQ_MASS_RATIO": "2.5", "WEQ_SCENARIO": "free", "HOME": "/root"})
    assert overrides == {"mass_ratio": 2.5, "scenario": "free"}


def test_mass_grid_and_header():
    cfg = load_run_config(use_env=False)
    ratios = cfg.mass_ratios()
    assert len(ratios) == 40
    assert ratios[0] == pytest.approx(0.25) and ratios[-1] == pytest.approx(100.0)
    assert load_run_config(cli_overrides={"masses": [0.5, 5.0]}, use_env=False).mass_ratios() == [0.5, 5.0]
    header = cfg.header_items()
    assert header["const_hbar"] == DEFAULT_CONSTANTS.hbar
    assert "out" not in header
    assert cfg.quadrature_policy().free_window == 15.0
    assert cfg.spin_scenario().z_c == pytest.approx(8e-5)


if __name__ == "__main__":
    print("🧪 CONFIGURACIÓN DE SIMULACIÓN")
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
