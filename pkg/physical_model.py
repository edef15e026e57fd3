#!/usr/bin/env python3
"""
⚛️ Modelo Físico Base
=====================

Constantes físicas, convenciones de unidades y tipos de parámetros
compartidos por todos los módulos de simulación de tiempos de llegada.

Funcionalidades:
- Constantes (ℏ, g por defecto, masa del neutrón) inmutables y validadas
- Especificación de paquetes gaussianos y configuración de dos cuerpos
- Tiempo de referencia t_ref = 2mσ₀²/ℏ y masa característica m₀ = ℏ/√(gσ₀³)

Todas las magnitudes internas están en SI; la capa de presentación divide
por t_ref, σ₀ y m_n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

__version__ = "1.0.0"

# Configurar logging
logger = logging.getLogger(__name__)


class SimulationError(Exception):
    """Error base de la simulación numérica"""
    pass


@dataclass(frozen=True)
class PhysicalConstants:
    """Constantes físicas usadas en todos los cálculos (SI)"""
    hbar: float = 1.054571817e-34  # J·s (CODATA)
    default_g: float = 10.0  # m/s²
    neutron_mass: float = 1.67e-27  # kg

    def __post_init__(self):
        for name in ("hbar", "default_g", "neutron_mass"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"La constante {name} debe ser positiva y finita (recibido {value})")


DEFAULT_CONSTANTS = PhysicalConstants()

# Impulso inicial k_a = k_b (en 1/σ₀) de la evolución libre publicada; en caída libre k = 0
FREE_EVOLUTION_KICK = -2.0


@dataclass(frozen=True)
class GaussianPacketSpec:
    """Parámetros iniciales de un paquete: ancho rms, centro y momento de impulso"""
    sigma0: float  # m
    z_c: float  # m
    k: float = 0.0  # 1/m

    def __post_init__(self):
        if not math.isfinite(self.sigma0) or self.sigma0 <= 0:
            raise ValueError(f"sigma0 debe ser positivo (recibido {self.sigma0})")
        if not math.isfinite(self.z_c) or not math.isfinite(self.k):
            raise ValueError("z_c y k deben ser finitos")


class ScenarioKind(Enum):
    """Tipo de evolución temporal"""
    FREE_EVOLUTION = "free"
    FREE_FALL = "fall"


@dataclass(frozen=True)
class Scenario:
    """Escenario de evolución; g sólo se usa en caída libre"""
    kind: ScenarioKind = ScenarioKind.FREE_EVOLUTION
    g: float = 0.0  # m/s²

    def __post_init__(self):
        if self.kind is ScenarioKind.FREE_FALL and (not math.isfinite(self.g) or self.g <= 0):
            raise ValueError(f"La caída libre requiere g > 0 (recibido {self.g})")

    @classmethod
    def free(cls) -> "Scenario":
        return cls(ScenarioKind.FREE_EVOLUTION, 0.0)

    @classmethod
    def fall(cls, g: float = DEFAULT_CONSTANTS.default_g) -> "Scenario":
        return cls(ScenarioKind.FREE_FALL, g)

    @property
    def gravity(self) -> float:
        """Aceleración efectiva (0 en evolución libre)"""
        return self.g if self.kind is ScenarioKind.FREE_FALL else 0.0

    @property
    def is_fall(self) -> bool:
        return self.kind is ScenarioKind.FREE_FALL


class StatisticsKind(Enum):
    """Estadística de partículas: BE toma el signo superior, FD el inferior"""
    MB = "mb"
    BE = "be"
    FD = "fd"

    @property
    def sign(self) -> int:
        return {StatisticsKind.BE: 1, StatisticsKind.FD: -1, StatisticsKind.MB: 0}[self]

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class TwoBodyConfig:
    """Par de paquetes idénticos con estadística, escenario y masa"""
    packet_a: GaussianPacketSpec
    packet_b: GaussianPacketSpec
    statistics: StatisticsKind
    scenario: Scenario
    mass: float  # kg

    def __post_init__(self):
        if not math.isfinite(self.mass) or self.mass <= 0:
            raise ValueError(f"La masa debe ser positiva (recibido {self.mass})")

    def swapped(self) -> "TwoBodyConfig":
        """Intercambia las etiquetas a↔b"""
        return replace(self, packet_a=self.packet_b, packet_b=self.packet_a)

    def with_statistics(self, statistics: StatisticsKind) -> "TwoBodyConfig":
        return replace(self, statistics=statistics)

    def with_mass(self, mass: float) -> "TwoBodyConfig":
        return replace(self, mass=mass)

    def with_scenario(self, scenario: Scenario) -> "TwoBodyConfig":
        return replace(self, scenario=scenario)

    @property
    def max_sigma0(self) -> float:
        return max(self.packet_a.sigma0, self.packet_b.sigma0)


def reference_time(mass: float, sigma0: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """t_ref = 2·m·σ₀²/ℏ (s)"""
    if mass <= 0 or sigma0 <= 0:
        raise ValueError("reference_time requiere mass > 0 y sigma0 > 0")
    return 2.0 * mass * sigma0 ** 2 / constants.hbar


def characteristic_mass(g: float, sigma0: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """m₀ = ℏ/√(g·σ₀³) (kg)"""
    if g <= 0 or sigma0 <= 0:
        raise ValueError("characteristic_mass requiere g > 0 y sigma0 > 0")
    return constants.hbar / math.sqrt(g * sigma0 ** 3)
