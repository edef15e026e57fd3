#!/usr/bin/env python3
"""
🧪 Test Tiempos de Llegada
==========================

Valores tabulados de τ en caída libre y evolución libre, normalización
de Π, promedio MB y barridos en masa y separación.
"""

import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np
import pytest

# Agregar directorio del proyecto al path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from arrival_time import (  # noqa: E402
    arrival_distribution,
    arrival_table,
    classical_crossing_time,
    mass_sweep,
    mean_arrival_time,
    parallel_map,
    separation_sweep,
    single_packet_arrival,
    validate_masses,
)
from physical_model import (  # noqa: E402
    DEFAULT_CONSTANTS,
    FREE_EVOLUTION_KICK,
    GaussianPacketSpec,
    Scenario,
    StatisticsKind,
    TwoBodyConfig,
    reference_time,
)

SIGMA0 = 1e-5
M_N = DEFAULT_CONSTANTS.neutron_mass
T_REF = reference_time(M_N, SIGMA0)
TOLERANCE = 0.002


def _config(z_ca: float, statistics: StatisticsKind = StatisticsKind.BE, scenario: Scenario = Scenario.fall(10.0),
            mass: float = M_N, k: Optional[float] = None) -> TwoBodyConfig:
    """Pareja publicada; en evolución libre ambos paquetes parten con k = −2/σ₀"""
    if k is None:
        k = 0.0 if scenario.is_fall else FREE_EVOLUTION_KICK
    return TwoBodyConfig(GaussianPacketSpec(SIGMA0, z_ca * SIGMA0, k / SIGMA0),
                         GaussianPacketSpec(SIGMA0, 8 * SIGMA0, k / SIGMA0), statistics, scenario, mass)


def _taus(config: TwoBodyConfig) -> dict:
    t_ref = reference_time(config.mass, SIGMA0)
    return {s: mean_arrival_time(config.with_statistics(s)) / t_ref for s in StatisticsKind}


def test_classical_crossing_time():
    expected = math.sqrt(2 * 10 * SIGMA0 / 10.0)
    assert classical_crossing_time(_config(10.0)) == pytest.approx(expected)


def test_free_fall_table_row():
    taus = _taus(_config(10.0))
    print(f"📊 z_ca = 10σ₀: BE {taus[StatisticsKind.BE]:.4f}, FD {taus[StatisticsKind.FD]:.4f}, "
          f"MB {taus[StatisticsKind.MB]:.4f}")
    assert abs(taus[StatisticsKind.BE] - 1.3387) < TOLERANCE
    assert abs(taus[StatisticsKind.FD] - 1.3400) < TOLERANCE
    assert abs(taus[StatisticsKind.MB] - 1.3391) < TOLERANCE
    assert taus[StatisticsKind.BE] < taus[StatisticsKind.MB] < taus[StatisticsKind.FD]


def test_free_evolution_table_row():
    taus = _taus(_config(12.0, scenario=Scenario.free()))
    print(f"📊 libre z_ca = 12σ₀: BE {taus[StatisticsKind.BE]:.4f}, FD {taus[StatisticsKind.FD]:.4f}, "
          f"MB {taus[StatisticsKind.MB]:.4f}")
    assert abs(taus[StatisticsKind.BE] - 2.682) < TOLERANCE
    assert abs(taus[StatisticsKind.FD] - 2.707) < TOLERANCE
    assert abs(taus[StatisticsKind.MB] - 2.694) < TOLERANCE


def test_distribution_is_normalized():
    result = arrival_distribution(_config(10.0))
    assert result.total_probability() == pytest.approx(1.0, abs=1e-4)
    assert np.all(result.pi_values >= 0)
    assert result.cutoff_time > classical_crossing_time(_config(10.0))
    assert result.label == "BE"


def test_maxwell_boltzmann_is_average_of_isolated_packets():
    config = _config(10.0, StatisticsKind.MB)
    tau_a = single_packet_arrival(config, "a").mean_time
    tau_b = single_packet_arrival(config, "b").mean_time
    tau_mb = mean_arrival_time(config)
    assert abs(tau_mb - 0.5 * (tau_a + tau_b)) / T_REF < 1e-5
    with pytest.raises(ValueError):
        single_packet_arrival(config, "c")


def test_arrival_table_columns():
    table = arrival_table(_config(11.0))
    assert list(table.columns) == ["t_over_tref", "pi_be_tref", "pi_fd_tref", "pi_mb_tref"]
    assert table["t_over_tref"].iloc[0] == 0.0
    assert set(table.attrs["mean_times"]) == {"be", "fd", "mb"}
    assert abs(table.attrs["mean_times"]["mb"] - 1.3736) < TOLERANCE


def test_arrival_table_with_identical_packets_drops_fd():
    table = arrival_table(_config(8.0))
    assert table["pi_fd_tref"].isna().all()
    assert table["pi_be_tref"].notna().all()
    assert "fd" not in table.attrs["mean_times"]


def test_mass_sweep_rows():
    rows = mass_sweep(_config(10.0), [0.5 * M_N, 5 * M_N])
    assert [row.mass for row in rows] == [0.5 * M_N, 5 * M_N]
    light, heavy = rows
    assert abs(light.tau_be / T_REF - 1.34674) < TOLERANCE
    assert abs(light.tau_fd / T_REF - 1.357339) < TOLERANCE
    assert abs(light.tau_mb / T_REF - 1.35009) < TOLERANCE
    assert abs(heavy.tau_be / T_REF - 1.336035) < TOLERANCE
    assert abs(heavy.tau_fd / T_REF - 1.334353) < TOLERANCE
    for row in rows:
        assert row.error == ""
        assert abs(row.tau_mb - row.tau_mb_from_packets) / T_REF < 1e-5
        assert row.t_plus < row.t_minus
        assert row.spread_be > 0 and row.spread_fd > 0


def test_mass_sweep_shape():
    masses = [r * M_N for r in (0.5, 5, 50, 100)]
    rows = mass_sweep(_config(10.0), masses)
    for attr in ("tau_be", "tau_fd", "tau_mb"):
        values = [getattr(row, attr) / T_REF for row in rows]
        print(f"📉 {attr}: " + ", ".join(f"{v:.6f}" for v in values))
        assert values[0] - values[1] > 0.01
        assert abs(values[2] - values[3]) < 1e-3
    heavy = rows[-1]
    spread = max(heavy.tau_be, heavy.tau_fd, heavy.tau_mb) - min(heavy.tau_be, heavy.tau_fd, heavy.tau_mb)
    assert spread / T_REF > 1e-4
    assert abs(heavy.spread_be - heavy.spread_fd) / SIGMA0 > 1e-3


def test_mass_sweep_printed_means_differ_by_statistics():
    row = mass_sweep(_config(10.0), [M_N])[0]
    assert row.mean_position_be0 == pytest.approx(row.mean_position_fd0)
    assert row.printed_mean_position_be0 / SIGMA0 == pytest.approx(5.369277, rel=1e-4)
    assert row.printed_mean_position_fd0 / SIGMA0 == pytest.approx(16.856677, rel=1e-4)


def test_mass_sweep_records_degenerate_fermions():
    rows = mass_sweep(_config(8.0), [M_N])
    assert math.isnan(rows[0].tau_fd)
    assert not math.isnan(rows[0].tau_be)
    assert "FD" in rows[0].error


def test_validate_masses():
    assert validate_masses([1, 2, 3]) == [1.0, 2.0, 3.0]
    for bad in ([], [1.0, -1.0], [2.0, 1.0], [math.inf]):
        with pytest.raises(ValueError):
            validate_masses(bad)


def test_parallel_map_preserves_order():
    items = list(range(20))
    assert parallel_map(lambda x: x * x, items, workers=4) == [x * x for x in items]
    assert parallel_map(lambda x: -x, items) == [-x for x in items]


def test_separation_sweep_rows():
    rows = separation_sweep(_config(10.0, scenario=Scenario.free()), [11 * SIGMA0, 13 * SIGMA0], workers=2)
    assert [round(row.z_ca / SIGMA0, 6) for row in rows] == [11.0, 13.0]
    assert abs(rows[0].overlap - 0.3247) < 1e-4
    assert abs(rows[1].tau_mb / T_REF - 2.828) < TOLERANCE
    with pytest.raises(ValueError):
        separation_sweep(_config(10.0), [])


if __name__ == "__main__":
    print("🧪 TIEMPOS DE LLEGADA")
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
