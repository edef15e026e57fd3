#!/usr/bin/env python3
"""
⏱️ Distribución de Tiempos de Llegada
=====================================

Distribución de llegada Π(Z,t) = |j₁(Z,t)| / ∫₀^∞|j₁(Z,t)|dt y tiempo
medio τ(Z) = ∫t·Π dt para pares de paquetes idénticos, más los barridos
en masa y en separación que cuantifican la violación del principio de
equivalencia débil.

Funcionalidades:
- Distribución normalizada muestreada sobre una grilla temporal
- Tiempo medio de llegada para MB, BE y FD
- Tiempos de paquetes individuales τ_a y τ_b
- Barridos en masa (con momentos ⟨z⟩±(0), t± y Δz±(t±)) y en separación
- Evaluación en paralelo con resultados en el orden de entrada

Corte temporal:
- Caída libre: T₀ = factor × cruce clásico, duplicando T hasta que la cola
  aporte menos de `tail_fraction`.
- Evolución libre: la corriente de un paquete que se ensancha decae como
  t⁻² en el detector y ∫t|j|dt crece logarítmicamente; el corte se limita
  a `free_window` × t_ref.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Sequence, TypeVar

import numpy as np
import pandas as pd
from scipy.integrate import simpson
from tqdm import tqdm

from one_body import (
    UnsupportedConfigurationError,
    center_crossing_time,
    j1,
    mean_position,
    position_spread,
    printed_mean_position,
    single_packet_current,
)
from physical_model import (
    DEFAULT_CONSTANTS,
    GaussianPacketSpec,
    PhysicalConstants,
    Scenario,
    SimulationError,
    StatisticsKind,
    TwoBodyConfig,
    reference_time,
)
from quadrature import DEFAULT_POLICY, QuadraturePolicy, integrate_semi_infinite
from wavepacket import overlap

# Configurar logging
logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

NORM_FLOOR = 1e-12


class NoArrivalError(SimulationError):
    """La corriente prácticamente no atraviesa el detector"""
    pass


@dataclass(frozen=True, eq=False)
class ArrivalResult:
    """Distribución de llegada muestreada y su tiempo medio"""
    detector_z: float  # m
    times: np.ndarray  # s
    pi_values: np.ndarray  # 1/s
    norm_integral: float  # ∫|j|dt antes de normalizar
    mean_time: float  # s
    cutoff_time: float  # s
    quadrature_error_estimate: float  # relativo
    sign_changes: int = 0
    label: str = ""

    def total_probability(self) -> float:
        """∫Π dt sobre las muestras (regla de Simpson)"""
        return float(simpson(self.pi_values, x=self.times))


@dataclass
class MassSweepRow:
    """Fila del barrido en masa (SI; la exportación adimensionaliza)"""
    mass: float
    tau_be: float = math.nan
    tau_fd: float = math.nan
    tau_mb: float = math.nan
    tau_a: float = math.nan
    tau_b: float = math.nan
    tau_mb_from_packets: float = math.nan
    mean_position_be0: float = math.nan
    mean_position_fd0: float = math.nan
    printed_mean_position_be0: float = math.nan
    printed_mean_position_fd0: float = math.nan
    t_plus: float = math.nan
    t_minus: float = math.nan
    spread_be: float = math.nan
    spread_fd: float = math.nan
    error: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SeparationRow:
    """Fila de las tablas de separación"""
    z_ca: float
    overlap: float
    tau_be: float = math.nan
    tau_fd: float = math.nan
    tau_mb: float = math.nan
    error: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _packet_crossing(spec: GaussianPacketSpec, mass: float, scenario: Scenario, detector_z: float,
                     constants: PhysicalConstants) -> float:
    height = spec.z_c - detector_z
    velocity = constants.hbar * spec.k / mass
    g = scenario.gravity
    if g > 0:
        discriminant = velocity ** 2 + 2 * g * height
        if discriminant >= 0:
            root = (velocity + math.sqrt(discriminant)) / g
            if root > 0:
                return root
    elif velocity * height < 0:
        return -height / velocity
    # Sin cruce cinemático: tiempo en que σ_t alcanza la distancia al detector
    return 2 * mass * spec.sigma0 * max(abs(height), spec.sigma0) / constants.hbar


def classical_crossing_time(config: TwoBodyConfig, detector_z: float = 0.0,
                            constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Cruce clásico más tardío de los dos centros (escala de T₀)"""
    return max(
        _packet_crossing(spec, config.mass, config.scenario, detector_z, constants)
        for spec in (config.packet_a, config.packet_b)
    )


def arrival_from_current(current: Callable[[Any], Any], detector_z: float, time_scale: float,
                         crossing_time: float, policy: QuadraturePolicy = DEFAULT_POLICY,
                         free_evolution: bool = False, nonnegative: bool = False,
                         label: str = "") -> ArrivalResult:
    """
    Construye Π y τ a partir de una corriente j(t) en el detector.

    La integración se hace en tiempo adimensional u = t/time_scale; en
    evolución libre el corte se limita a `free_window` unidades.
    """
    def scaled(u):
        return time_scale * np.asarray(current(np.asarray(u) * time_scale), dtype=float)

    ceiling = policy.free_window if free_evolution else None
    integrals = integrate_semi_infinite(
        scaled,
        initial_cutoff=policy.initial_cutoff_factor * crossing_time / time_scale,
        policy=policy,
        ceiling=ceiling,
        orders=(0, 1),
        nonnegative=nonnegative,
    )
    norm, first = integrals.values
    if norm < NORM_FLOOR:
        raise NoArrivalError(f"Normalización despreciable ({norm:.3e}) en Z = {detector_z:.4g} m [{label}]")

    grid = np.union1d(np.linspace(0.0, integrals.cutoff, policy.sample_points), np.asarray(integrals.roots))
    pi_values = np.abs(scaled(grid)) / norm / time_scale
    error = integrals.errors[0] / norm + integrals.errors[1] / max(first, NORM_FLOOR)
    mean_time = time_scale * first / norm
    logger.debug(
        f"📊 [{label}] τ = {mean_time / time_scale:.6f} (corte {integrals.cutoff:.3f}, "
        f"{len(integrals.roots)} cambios de signo, error {error:.2e})"
    )
    return ArrivalResult(
        detector_z=detector_z,
        times=grid * time_scale,
        pi_values=pi_values,
        norm_integral=norm,
        mean_time=mean_time,
        cutoff_time=integrals.cutoff * time_scale,
        quadrature_error_estimate=error,
        sign_changes=len(integrals.roots),
        label=label,
    )


def arrival_distribution(config: TwoBodyConfig, detector_z: float = 0.0,
                         policy: QuadraturePolicy = DEFAULT_POLICY,
                         constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ArrivalResult:
    """Π(Z,t) para la estadística de la configuración"""
    return arrival_from_current(
        lambda t: j1(config, detector_z, t, constants),
        detector_z=detector_z,
        time_scale=reference_time(config.mass, config.max_sigma0, constants),
        crossing_time=classical_crossing_time(config, detector_z, constants),
        policy=policy,
        free_evolution=not config.scenario.is_fall,
        label=config.statistics.label,
    )


def mean_arrival_time(config: TwoBodyConfig, detector_z: float = 0.0,
                      policy: QuadraturePolicy = DEFAULT_POLICY,
                      constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """τ(Z) = ∫t·Π(Z,t)dt"""
    return arrival_distribution(config, detector_z, policy, constants).mean_time


def single_packet_arrival(config: TwoBodyConfig, which: str = "a", detector_z: float = 0.0,
                          policy: QuadraturePolicy = DEFAULT_POLICY,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ArrivalResult:
    """Distribución de un paquete distinguible aislado (τ_a o τ_b)"""
    if which not in ("a", "b"):
        raise ValueError(f"Paquete desconocido: {which}")
    spec = config.packet_a if which == "a" else config.packet_b
    single = TwoBodyConfig(spec, spec, StatisticsKind.MB, config.scenario, config.mass)
    return arrival_from_current(
        lambda t: single_packet_current(spec, config.mass, config.scenario, detector_z, t, constants),
        detector_z=detector_z,
        time_scale=reference_time(config.mass, config.max_sigma0, constants),
        crossing_time=classical_crossing_time(single, detector_z, constants),
        policy=policy,
        free_evolution=not config.scenario.is_fall,
        label=f"paquete_{which}",
    )


def arrival_table(config: TwoBodyConfig, detector_z: float = 0.0, policy: QuadraturePolicy = DEFAULT_POLICY,
                  constants: PhysicalConstants = DEFAULT_CONSTANTS) -> pd.DataFrame:
    """
    Π de las tres estadísticas sobre una grilla común.

    Columnas: t/t_ref y Π·t_ref por estadística (NaN si la estadística no
    está definida, por ejemplo FD con paquetes idénticos).
    """
    t_ref = reference_time(config.mass, config.max_sigma0, constants)
    results: Dict[StatisticsKind, ArrivalResult] = {}
    for statistics in (StatisticsKind.BE, StatisticsKind.FD, StatisticsKind.MB):
        try:
            results[statistics] = arrival_distribution(config.with_statistics(statistics), detector_z, policy, constants)
        except SimulationError as e:
            logger.warning(f"⚠️ {statistics.label}: {e}")

    if not results:
        raise NoArrivalError("Ninguna estadística produjo una distribución de llegada")
    cutoff = max(r.cutoff_time for r in results.values())
    times = np.linspace(0.0, cutoff, policy.sample_points)
    table = pd.DataFrame({"t_over_tref": times / t_ref})
    for statistics in (StatisticsKind.BE, StatisticsKind.FD, StatisticsKind.MB):
        column = f"pi_{statistics.value}_tref"
        result = results.get(statistics)
        if result is None:
            table[column] = np.nan
            continue
        current = np.abs(j1(config.with_statistics(statistics), detector_z, times, constants))
        table[column] = current / result.norm_integral * t_ref
    table.attrs["mean_times"] = {s.value: r.mean_time / t_ref for s, r in results.items()}
    return table


def parallel_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1,
                 desc: str = "", progress: bool = False) -> List[R]:
    """Mapa en paralelo que preserva el orden de entrada"""
    if workers <= 1:
        return [func(item) for item in tqdm(items, desc=desc, disable=not progress)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(func, items), total=len(items), desc=desc, disable=not progress))


def validate_masses(masses: Sequence[float]) -> List[float]:
    masses = [float(m) for m in masses]
    if not masses:
        raise ValueError("La lista de masas está vacía")
    if any(m <= 0 or not math.isfinite(m) for m in masses):
        raise ValueError("Todas las masas deben ser positivas")
    if any(b < a for a, b in zip(masses, masses[1:])):
        raise ValueError("Las masas deben estar ordenadas de forma creciente")
    return masses


def _mass_row(config_template: TwoBodyConfig, mass: float, detector_z: float,
              policy: QuadraturePolicy, constants: PhysicalConstants) -> MassSweepRow:
    config = config_template.with_mass(mass)
    row = MassSweepRow(mass=mass)
    errors: List[str] = []
    for statistics, attribute in ((StatisticsKind.BE, "tau_be"), (StatisticsKind.FD, "tau_fd"),
                                  (StatisticsKind.MB, "tau_mb")):
        try:
            setattr(row, attribute, mean_arrival_time(config.with_statistics(statistics), detector_z, policy, constants))
        except SimulationError as e:
            errors.append(f"{statistics.label}: {e}")
    for which in ("a", "b"):
        try:
            setattr(row, f"tau_{which}", single_packet_arrival(config, which, detector_z, policy, constants).mean_time)
        except SimulationError as e:
            errors.append(f"{which}: {e}")
    row.tau_mb_from_packets = 0.5 * (row.tau_a + row.tau_b)

    try:
        be = config.with_statistics(StatisticsKind.BE)
        fd = config.with_statistics(StatisticsKind.FD)
        row.mean_position_be0 = mean_position(be, 0.0, constants)
        row.mean_position_fd0 = mean_position(fd, 0.0, constants)
        row.printed_mean_position_be0 = printed_mean_position(be, 0.0, constants)
        row.printed_mean_position_fd0 = printed_mean_position(fd, 0.0, constants)
        row.t_plus = center_crossing_time(be, detector_z)
        row.t_minus = center_crossing_time(fd, detector_z)
        row.spread_be = position_spread(be, row.t_plus, constants)
        row.spread_fd = position_spread(fd, row.t_minus, constants)
    except UnsupportedConfigurationError:
        pass
    except SimulationError as e:
        errors.append(f"momentos: {e}")

    if errors:
        row.error = "; ".join(errors)
        logger.warning(f"⚠️ m = {mass:.4g} kg: {row.error}")
    return row


def mass_sweep(config_template: TwoBodyConfig, masses: Sequence[float], detector_z: float = 0.0,
               policy: QuadraturePolicy = DEFAULT_POLICY, workers: int = 1, progress: bool = False,
               constants: PhysicalConstants = DEFAULT_CONSTANTS) -> List[MassSweepRow]:
    """τ_BE, τ_FD, τ_MB, τ_a y τ_b para cada masa; los errores por punto no detienen el barrido"""
    masses = validate_masses(masses)
    logger.info(f"🔧 Barrido en masa: {len(masses)} puntos, Z = {detector_z:.4g} m")
    return parallel_map(
        lambda m: _mass_row(config_template, m, detector_z, policy, constants),
        masses, workers=workers, desc="masa", progress=progress,
    )


def _separation_row(config_template: TwoBodyConfig, z_ca: float, detector_z: float,
                    policy: QuadraturePolicy, constants: PhysicalConstants) -> SeparationRow:
    spec_a = GaussianPacketSpec(config_template.packet_a.sigma0, z_ca, config_template.packet_a.k)
    config = TwoBodyConfig(spec_a, config_template.packet_b, config_template.statistics,
                           config_template.scenario, config_template.mass)
    row = SeparationRow(z_ca=z_ca, overlap=abs(overlap(spec_a, config.packet_b, config.scenario)))
    errors: List[str] = []
    for statistics, attribute in ((StatisticsKind.BE, "tau_be"), (StatisticsKind.FD, "tau_fd"),
                                  (StatisticsKind.MB, "tau_mb")):
        try:
            setattr(row, attribute, mean_arrival_time(config.with_statistics(statistics), detector_z, policy, constants))
        except SimulationError as e:
            errors.append(f"{statistics.label}: {e}")
    if errors:
        row.error = "; ".join(errors)
        logger.warning(f"⚠️ z_ca = {z_ca:.4g} m: {row.error}")
    return row


def separation_sweep(config_template: TwoBodyConfig, z_ca_values: Sequence[float], detector_z: float = 0.0,
                     policy: QuadraturePolicy = DEFAULT_POLICY, workers: int = 1, progress: bool = False,
                     constants: PhysicalConstants = DEFAULT_CONSTANTS) -> List[SeparationRow]:
    """Filas (z_ca, |⟨a|b⟩|, τ_BE, τ_FD, τ_MB) de las tablas de separación"""
    if not z_ca_values:
        raise ValueError("La lista de z_ca está vacía")
    logger.info(f"🔧 Barrido en separación: {len(z_ca_values)} filas ({config_template.scenario.kind.value})")
    return parallel_map(
        lambda z: _separation_row(config_template, float(z), detector_z, policy, constants),
        list(z_ca_values), workers=workers, desc="separación", progress=progress,
    )
