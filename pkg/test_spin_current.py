#!/usr/bin/env python3
"""
🧪 Test Corriente con Espín
===========================

Módulos cerrados frente a la construcción vectorial, paridad en x y
desplazamiento τ_Sch − τ(ŝ) en función de la masa.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Agregar directorio del proyecto al path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from grid_oracle import brute_force_spin_arrival_time  # noqa: E402
from physical_model import DEFAULT_CONSTANTS, reference_time  # noqa: E402
from spin_current import (  # noqa: E402
    SpinScenario,
    current_modulus_sample,
    current_vector,
    schrodinger_current_modulus,
    spin_arrival_distribution,
    spin_crossing_time,
    spin_current_modulus,
    spin_mass_sweep,
)

SIGMA0 = 1e-5
M_N = DEFAULT_CONSTANTS.neutron_mass
T_REF = reference_time(M_N, SIGMA0)


def _scenario(k0: float = 0.0, mass: float = M_N, axis=(0.0, 1.0, 0.0)) -> SpinScenario:
    return SpinScenario(SIGMA0, 8 * SIGMA0, k0, mass, 10.0, axis)


def _samples(scn: SpinScenario, count: int = 200, seed: int = 3):
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.05, 2.0, count) * T_REF
    z_cl = scn.z_c - 0.5 * scn.g * t ** 2 + DEFAULT_CONSTANTS.hbar * scn.k0 / scn.mass * t
    x = rng.uniform(-3, 3, count) * SIGMA0
    z = z_cl + rng.uniform(-3, 3, count) * SIGMA0
    return x, z, t


def _norm(components):
    jx, jy, jz = components
    return np.sqrt(jx ** 2 + jy ** 2 + jz ** 2)


def test_closed_forms_match_vector_construction():
    for k0 in (0.0, 0.7 / SIGMA0):
        scn = _scenario(k0)
        x, z, t = _samples(scn)
        sch = schrodinger_current_modulus(scn, x, z, t)
        spin = spin_current_modulus(scn, x, z, t)
        assert np.max(np.abs(sch - _norm(current_vector(scn, x, z, t, include_spin=False))) / sch) < 1e-8
        assert np.max(np.abs(spin - _norm(current_vector(scn, x, z, t))) / spin) < 1e-8


def test_arbitrary_spin_axis_uses_vector_formula():
    axis = (1 / math.sqrt(2), 0.0, 1 / math.sqrt(2))
    scn = _scenario(0.3 / SIGMA0, axis=axis)
    x, z, t = _samples(scn, 50)
    spin = spin_current_modulus(scn, x, z, t)
    assert np.max(np.abs(spin - _norm(current_vector(scn, x, z, t))) / spin) < 1e-8
    along_x = _scenario(axis=(1.0, 0.0, 0.0))
    assert not along_x.uses_printed_forms
    assert _scenario().uses_printed_forms


def test_schrodinger_modulus_is_even_in_x():
    scn = _scenario()
    x, z, t = _samples(scn, 50)
    sch_plus = schrodinger_current_modulus(scn, x, z, t)
    sch_minus = schrodinger_current_modulus(scn, -x, z, t)
    assert np.allclose(sch_plus, sch_minus, rtol=1e-12, atol=0)
    spin_plus = spin_current_modulus(scn, x, z, t)
    spin_minus = spin_current_modulus(scn, -x, z, t)
    assert np.max(np.abs(spin_plus - spin_minus) / spin_plus) > 1e-6


def test_invalid_scenarios_are_rejected():
    with pytest.raises(ValueError):
        _scenario(axis=(0.0, 2.0, 0.0))
    with pytest.raises(ValueError):
        SpinScenario(0.0, 8 * SIGMA0, 0.0, M_N, 10.0)
    with pytest.raises(ValueError):
        SpinScenario(SIGMA0, 8 * SIGMA0, 0.0, M_N, 0.0)
    with pytest.raises(ValueError):
        schrodinger_current_modulus(_scenario(), 0.0, 0.0, -1.0)


def test_current_modulus_sample():
    sample = current_modulus_sample(_scenario(), SIGMA0, 3 * SIGMA0, T_REF)
    assert sample.j_sch_modulus > 0
    assert sample.j_spin_modulus > 0


def test_spin_crossing_time():
    assert spin_crossing_time(_scenario()) == pytest.approx(math.sqrt(2 * 8 * SIGMA0 / 10.0))


def test_spin_shift_decreases_with_mass():
    rows = spin_mass_sweep(_scenario(), [M_N, 10 * M_N])
    light, heavy = rows
    print(f"📊 m_n: τ_Sch = {light.tau_sch / T_REF:.6f}, δ = {light.delta / T_REF:.3e} t_ref")
    assert light.error == "" and heavy.error == ""
    assert abs(light.tau_sch / T_REF - 1.2644) < 0.002
    assert 1.0e-4 <= light.delta / T_REF <= 1.3e-4
    assert light.tau_spin == pytest.approx(light.tau_sch - light.delta)
    assert 0 < heavy.delta < 0.2 * light.delta


def test_spin_shift_vanishes_for_heavy_particles():
    light, heavy = spin_mass_sweep(_scenario(), [M_N, 1e3 * M_N])
    ratio = heavy.delta / light.delta
    print(f"📉 δ(10³ m_n)/δ(m_n) = {ratio:.3e}")
    assert light.delta > 0 and heavy.delta > 0
    assert ratio < 1e-2


def test_schrodinger_time_matches_grid_integration():
    scn = _scenario()
    tau = spin_arrival_distribution(scn, 0.0, False).mean_time
    brute = brute_force_spin_arrival_time(scn)
    print(f"📊 τ_Sch: cerrado {tau / T_REF:.7f}, grilla {brute / T_REF:.7f}")
    assert abs(tau / brute - 1) < 1e-5


if __name__ == "__main__":
    print("🧪 CORRIENTE CON ESPÍN")
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
