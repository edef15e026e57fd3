#!/usr/bin/env python3
"""
🧪 Test Paquetes Gaussianos
===========================

Formas cerradas de evolución libre y caída libre, derivada analítica,
solapamiento y normalización de dos cuerpos.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import simpson

# Agregar directorio del proyecto al path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from physical_model import DEFAULT_CONSTANTS, GaussianPacketSpec, Scenario, StatisticsKind, reference_time  # noqa: E402
from wavepacket import (  # noqa: E402
    DegenerateStateError,
    amplitude_and_derivative,
    complex_width,
    evolve,
    evolve_derivative,
    evolve_fall,
    evolve_free,
    normalization,
    overlap,
    spreading_width,
)

SIGMA0 = 1e-5
M_N = DEFAULT_CONSTANTS.neutron_mass
T_REF = reference_time(M_N, SIGMA0)


def _grid(center: float, width: float, n: int = 8001) -> np.ndarray:
    return np.linspace(center - 14 * width, center + 14 * width, n)


def test_free_packet_stays_normalized():
    spec = GaussianPacketSpec(SIGMA0, 8 * SIGMA0, 0.5 / SIGMA0)
    for t in (0.0, 0.5 * T_REF, 3 * T_REF):
        width = float(spreading_width(spec, M_N, t))
        center = spec.z_c + DEFAULT_CONSTANTS.hbar * spec.k / M_N * t
        z = _grid(center, width)
        norm = simpson(evolve_free(spec, M_N, t, z).modulus ** 2, x=z)
        assert abs(norm - 1) < 1e-10


def test_falling_packet_center_and_width():
    spec = GaussianPacketSpec(SIGMA0, 8 * SIGMA0)
    t = T_REF
    z = _grid(spec.z_c - 5 * t ** 2, 2 * SIGMA0)
    rho = evolve_fall(spec, M_N, 10.0, t, z).modulus ** 2
    mean = simpson(z * rho, x=z)
    spread = math.sqrt(simpson((z - mean) ** 2 * rho, x=z))
    assert abs(mean - (spec.z_c - 0.5 * 10.0 * t ** 2)) < 1e-9 * SIGMA0
    assert spread == pytest.approx(float(spreading_width(spec, M_N, t)), rel=1e-9)
    assert spread == pytest.approx(math.sqrt(2) * SIGMA0, rel=1e-9)


def test_complex_width_properties():
    spec = GaussianPacketSpec(SIGMA0, 0.0)
    width = complex_width(spec, M_N, 0.7 * T_REF)
    assert width.sigma0 == pytest.approx(SIGMA0)
    assert width.sigma_t == pytest.approx(float(spreading_width(spec, M_N, 0.7 * T_REF)))


def test_analytic_derivative_matches_finite_difference():
    spec = GaussianPacketSpec(1.3 * SIGMA0, 5 * SIGMA0, -0.8 / SIGMA0)
    rng = np.random.default_rng(7)
    for scenario in (Scenario.free(), Scenario.fall(10.0)):
        for t in rng.uniform(0, 2, 5) * T_REF:
            center = spec.z_c - 0.5 * scenario.gravity * t ** 2
            z = center + rng.uniform(-3, 3, 20) * SIGMA0
            h = 1e-5 * SIGMA0
            plus, _ = amplitude_and_derivative(spec, M_N, scenario, t, z + h)
            minus, _ = amplitude_and_derivative(spec, M_N, scenario, t, z - h)
            numeric = (plus - minus) / (2 * h)
            analytic = evolve_derivative(spec, M_N, scenario, t, z).value
            scale = np.max(np.abs(analytic))
            assert np.max(np.abs(numeric - analytic)) / scale < 1e-6


def test_fall_reduces_to_free_for_vanishing_gravity():
    spec = GaussianPacketSpec(SIGMA0, 8 * SIGMA0, 0.3 / SIGMA0)
    z = _grid(spec.z_c, 2 * SIGMA0, 501)
    free = evolve_free(spec, M_N, T_REF, z).value
    fall = evolve_fall(spec, M_N, 1e-14, T_REF, z).value
    assert np.max(np.abs(fall - free)) / np.max(np.abs(free)) < 1e-8


def test_evolve_dispatches_on_scenario():
    spec = GaussianPacketSpec(SIGMA0, 0.0)
    z = np.linspace(-5 * SIGMA0, 5 * SIGMA0, 11)
    assert np.allclose(evolve(spec, M_N, Scenario.free(), T_REF, z).value, evolve_free(spec, M_N, T_REF, z).value)
    assert np.allclose(evolve(spec, M_N, Scenario.fall(10.0), T_REF, z).value,
                       evolve_fall(spec, M_N, 10.0, T_REF, z).value)


def test_negative_time_is_rejected():
    spec = GaussianPacketSpec(SIGMA0, 0.0)
    with pytest.raises(ValueError):
        evolve_free(spec, M_N, -1e-3, 0.0)


def test_overlap_published_values():
    b = GaussianPacketSpec(SIGMA0, 8 * SIGMA0)
    expected = {10: 0.6065, 11: 0.3247, 12: 0.1353, 13: 0.04394}
    for z_ca, value in expected.items():
        a = GaussianPacketSpec(SIGMA0, z_ca * SIGMA0)
        assert abs(abs(overlap(a, b)) - value) < 1e-4
    assert overlap(b, b) == pytest.approx(1.0)


def test_overlap_matches_numeric_integral():
    a = GaussianPacketSpec(SIGMA0, 9 * SIGMA0, 0.6 / SIGMA0)
    b = GaussianPacketSpec(1.4 * SIGMA0, 7 * SIGMA0, -0.2 / SIGMA0)
    z = np.linspace(-20 * SIGMA0, 35 * SIGMA0, 20001)
    numeric = simpson(np.conj(evolve_free(a, M_N, 0.0, z).value) * evolve_free(b, M_N, 0.0, z).value, x=z)
    assert abs(numeric - overlap(a, b)) < 1e-9
    assert overlap(b, a) == pytest.approx(overlap(a, b).conjugate())


def test_normalization_constants():
    a = GaussianPacketSpec(SIGMA0, 10 * SIGMA0)
    b = GaussianPacketSpec(SIGMA0, 8 * SIGMA0)
    overlap_sq = abs(overlap(a, b)) ** 2
    assert normalization(a, b, StatisticsKind.BE) == pytest.approx(1 / math.sqrt(2 * (1 + overlap_sq)))
    assert normalization(a, b, StatisticsKind.FD) == pytest.approx(1 / math.sqrt(2 * (1 - overlap_sq)))
    assert normalization(a, a, StatisticsKind.BE) == pytest.approx(0.5)
    with pytest.raises(DegenerateStateError):
        normalization(a, a, StatisticsKind.FD)
    with pytest.raises(ValueError):
        normalization(a, b, StatisticsKind.MB)


if __name__ == "__main__":
    print("🧪 PAQUETES GAUSSIANOS")
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
