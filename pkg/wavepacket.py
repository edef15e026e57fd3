#!/usr/bin/env python3
"""
🌊 Paquetes Gaussianos de una Partícula
=======================================

Evolución en forma cerrada de un paquete gaussiano 1D, su derivada
espacial analítica, integrales de solapamiento y constantes de
normalización de dos cuerpos, para evolución libre y caída libre.

Funcionalidades:
- ψ(z,t) libre con ancho complejo s_t = σ₀(1 + iℏt/2mσ₀²)
- ψ(z,t) en campo gravitatorio uniforme para cualquier k
- ∂ψ/∂z analítica
- ⟨ψ_a|ψ_b⟩ (independiente del tiempo y de g) y N± = [2(1 ± |⟨a|b⟩|²)]^(-1/2)

Todas las funciones aceptan escalares o arrays de numpy (broadcasting).
"""

from __future__ import annotations

import cmath
import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Iterator, Optional, Tuple

import numpy as np

from physical_model import (
    DEFAULT_CONSTANTS,
    GaussianPacketSpec,
    PhysicalConstants,
    Scenario,
    SimulationError,
    StatisticsKind,
)

# Configurar logging
logger = logging.getLogger(__name__)

# Por debajo de este tiempo se evalúa directamente el paquete inicial
T_FLOOR = 1e-12  # s

# Factor sobre N±; distinto de 1 sólo dentro de perturbed_normalization
_normalization_fault = 1.0


class DegenerateStateError(SimulationError):
    """Paquetes idénticos con estadística FD: la función de onda se anula"""
    pass


@dataclass(frozen=True)
class ComplexAmplitude:
    """Valor complejo de ψ o ∂ψ/∂z (partes real e imaginaria explícitas)"""
    re: Any
    im: Any

    def __post_init__(self):
        if not (np.all(np.isfinite(self.re)) and np.all(np.isfinite(self.im))):
            raise ValueError("La amplitud compleja contiene valores no finitos")

    @classmethod
    def from_complex(cls, value) -> "ComplexAmplitude":
        value = np.asarray(value, dtype=complex)
        if value.ndim == 0:
            return cls(float(value.real), float(value.imag))
        return cls(value.real.copy(), value.imag.copy())

    @property
    def value(self):
        """Valor como complejo de numpy"""
        return np.asarray(self.re) + 1j * np.asarray(self.im)

    @property
    def modulus(self):
        return np.hypot(self.re, self.im)


@dataclass(frozen=True)
class ComplexWidth:
    """Ancho complejo s_t; Re(s_t) = σ₀ y |s_t| = σ_t"""
    value: complex

    @property
    def sigma0(self) -> float:
        return self.value.real

    @property
    def sigma_t(self) -> float:
        return abs(self.value)


def _check_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("El tiempo debe ser finito y no negativo")
    return np.where(t < T_FLOOR, 0.0, t)


def complex_width(spec: GaussianPacketSpec, mass: float, t: float,
                  constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ComplexWidth:
    """s_t = σ₀(1 + iℏt/2mσ₀²)"""
    t_eff = float(_check_times(t))
    return ComplexWidth(spec.sigma0 * (1 + 1j * constants.hbar * t_eff / (2 * mass * spec.sigma0 ** 2)))


def spreading_width(spec: GaussianPacketSpec, mass: float, t,
                    constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """σ_t = σ₀√(1 + ℏ²t²/4m²σ₀⁴)"""
    t_eff = _check_times(t)
    ratio = constants.hbar * t_eff / (2 * mass * spec.sigma0 ** 2)
    return spec.sigma0 * np.sqrt(1 + ratio ** 2)


def classical_center(spec: GaussianPacketSpec, mass: float, scenario: Scenario, t,
                     constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """z_cl(t) = z_c + (ℏk/m)t − gt²/2"""
    t_eff = _check_times(t)
    velocity = constants.hbar * spec.k / mass
    return spec.z_c + velocity * t_eff - 0.5 * scenario.gravity * t_eff ** 2


def _free_components(spec: GaussianPacketSpec, mass: float, t_eff: np.ndarray, z,
                     hbar: float) -> Tuple[np.ndarray, np.ndarray]:
    sigma0 = spec.sigma0
    s_t = sigma0 * (1 + 1j * hbar * t_eff / (2 * mass * sigma0 ** 2))
    offset = np.asarray(z, dtype=float) - spec.z_c - (hbar * spec.k / mass) * t_eff
    prefactor = (2 * np.pi * sigma0 ** 2) ** -0.25 * np.sqrt(sigma0 / s_t)
    psi = prefactor * np.exp(
        -offset ** 2 / (4 * sigma0 * s_t)
        + 1j * spec.k * np.asarray(z, dtype=float)
        - 1j * hbar * spec.k ** 2 * t_eff / (2 * mass)
    )
    dpsi = psi * (1j * spec.k - offset / (2 * sigma0 * s_t))
    return psi, dpsi


def amplitude_and_derivative(spec: GaussianPacketSpec, mass: float, scenario: Scenario, t, z,
                             constants: PhysicalConstants = DEFAULT_CONSTANTS) -> Tuple[np.ndarray, np.ndarray]:
    """
    ψ(z,t) y ∂ψ/∂z como arrays complejos.

    En caída libre ψ_g(z,t) = exp[−i(mgtz/ℏ + mg²t³/6ℏ)]·ψ_libre(z + gt²/2, t).
    """
    t_eff = _check_times(t)
    hbar = constants.hbar
    g = scenario.gravity
    if g == 0.0:
        return _free_components(spec, mass, t_eff, z, hbar)

    z = np.asarray(z, dtype=float)
    psi_f, dpsi_f = _free_components(spec, mass, t_eff, z + 0.5 * g * t_eff ** 2, hbar)
    phase = np.exp(-1j * (mass * g * t_eff * z / hbar + mass * g ** 2 * t_eff ** 3 / (6 * hbar)))
    psi = phase * psi_f
    dpsi = phase * (dpsi_f - 1j * (mass * g * t_eff / hbar) * psi_f)
    return psi, dpsi


def evolve_free(spec: GaussianPacketSpec, mass: float, t, z,
                constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ComplexAmplitude:
    """ψ_i(z,t) para evolución libre"""
    psi, _ = amplitude_and_derivative(spec, mass, Scenario.free(), t, z, constants)
    return ComplexAmplitude.from_complex(psi)


def evolve_fall(spec: GaussianPacketSpec, mass: float, g: float, t, z,
                constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ComplexAmplitude:
    """ψ_i(z,t) en el campo gravitatorio uniforme V(z) = mgz"""
    psi, _ = amplitude_and_derivative(spec, mass, Scenario.fall(g), t, z, constants)
    return ComplexAmplitude.from_complex(psi)


def evolve(spec: GaussianPacketSpec, mass: float, scenario: Scenario, t, z,
           constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ComplexAmplitude:
    psi, _ = amplitude_and_derivative(spec, mass, scenario, t, z, constants)
    return ComplexAmplitude.from_complex(psi)


def evolve_derivative(spec: GaussianPacketSpec, mass: float, scenario: Scenario, t, z,
                      constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ComplexAmplitude:
    """∂ψ/∂z de la forma cerrada diferenciada analíticamente"""
    _, dpsi = amplitude_and_derivative(spec, mass, scenario, t, z, constants)
    return ComplexAmplitude.from_complex(dpsi)


def overlap(spec_a: GaussianPacketSpec, spec_b: GaussianPacketSpec,
            scenario: Optional[Scenario] = None) -> complex:
    """
    ⟨ψ_a|ψ_b⟩ evaluado con los datos iniciales.

    La evolución es unitaria y común a ambos paquetes, por lo que el
    resultado no depende del tiempo ni de g; `scenario` se acepta por
    simetría con el resto de la API.
    """
    var_a = spec_a.sigma0 * spec_a.sigma0
    var_b = spec_b.sigma0 * spec_b.sigma0
    total = var_a + var_b
    dk = spec_a.k - spec_b.k
    dz = spec_a.z_c - spec_b.z_c
    prefactor = math.sqrt(2 * spec_a.sigma0 * spec_b.sigma0 / total)
    exponent = -(
        4 * dk ** 2 * var_a * var_b
        + dz ** 2
        + 4j * dk * (var_b * spec_a.z_c + var_a * spec_b.z_c)
    ) / (4 * total)
    return prefactor * cmath.exp(exponent)


def normalization(spec_a: GaussianPacketSpec, spec_b: GaussianPacketSpec,
                  statistics: StatisticsKind, scenario: Optional[Scenario] = None) -> float:
    """N± = [2(1 ± |⟨ψ_a|ψ_b⟩|²)]^(-1/2); BE signo superior, FD inferior"""
    if statistics is StatisticsKind.MB:
        raise ValueError("La normalización N± sólo está definida para BE y FD")
    overlap_sq = abs(overlap(spec_a, spec_b, scenario)) ** 2
    bracket = 1 + statistics.sign * overlap_sq
    if bracket < 1e-12:
        raise DegenerateStateError(
            "Paquetes idénticos con estadística FD: el estado antisimétrico se anula (exclusión de Pauli)"
        )
    return _normalization_fault / math.sqrt(2 * bracket)


@contextmanager
def perturbed_normalization(factor: float) -> Iterator[None]:
    """Multiplica N± por `factor` dentro del bloque (control negativo de la verificación)"""
    global _normalization_fault
    previous = _normalization_fault
    _normalization_fault = factor
    if factor != 1.0:
        logger.warning(f"⚠️ N± perturbado por un factor {factor:g}")
    try:
        yield
    finally:
        _normalization_fault = previous
