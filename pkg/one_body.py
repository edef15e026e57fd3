#!/usr/bin/env python3
"""
👥 Densidad y Corriente de Un Cuerpo
====================================

Densidad de probabilidad ρ₁ y corriente j₁ de un cuerpo para dos
partículas idénticas (MB, BE, FD), junto con los momentos analíticos
de la distribución: ⟨z⟩, Δz y el instante t± en que el centro de ρ₁
alcanza el detector.

Funcionalidades:
- ρ₁ = |N|²(|ψ_a|² ± 2Re[⟨a|b⟩ψ_b*ψ_a] + |ψ_b|²), ρ_MB = (ρ_a + ρ_b)/2
- j₁ = (ℏ/m)|N|² Im{ψ_a*∂ψ_a + ψ_b*∂ψ_b ± ⟨a|b⟩ψ_b*∂ψ_a ± ⟨b|a⟩ψ_a*∂ψ_b}
- Momentos exactos a partir del producto gaussiano complejo ψ_b*ψ_a
- Formas cerradas compactas para caída libre con anchos iguales
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from physical_model import (
    DEFAULT_CONSTANTS,
    GaussianPacketSpec,
    PhysicalConstants,
    Scenario,
    SimulationError,
    StatisticsKind,
    TwoBodyConfig,
)
from wavepacket import (
    amplitude_and_derivative,
    classical_center,
    complex_width,
    normalization,
    overlap,
    spreading_width,
)

# Configurar logging
logger = logging.getLogger(__name__)


class UnsupportedConfigurationError(SimulationError):
    """La forma cerrada pedida no aplica a esta configuración"""
    pass


class NoCrossingError(SimulationError):
    """El centro de ρ₁ nunca alcanza el detector"""
    pass


@dataclass(frozen=True)
class DensityCurrentSample:
    """Muestra de densidad y corriente en un punto (z, t)"""
    z: float  # m
    t: float  # s
    rho: float  # 1/m
    j: float  # 1/s

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError(f"La densidad no puede ser negativa (rho={self.rho})")


def _pair_amplitudes(config: TwoBodyConfig, z, t, constants: PhysicalConstants):
    psi_a, dpsi_a = amplitude_and_derivative(config.packet_a, config.mass, config.scenario, t, z, constants)
    psi_b, dpsi_b = amplitude_and_derivative(config.packet_b, config.mass, config.scenario, t, z, constants)
    return psi_a, dpsi_a, psi_b, dpsi_b


def single_packet_density(spec: GaussianPacketSpec, mass: float, scenario: Scenario, z, t,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS):
    psi, _ = amplitude_and_derivative(spec, mass, scenario, t, z, constants)
    return np.abs(psi) ** 2


def single_packet_current(spec: GaussianPacketSpec, mass: float, scenario: Scenario, z, t,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Corriente (ℏ/m)Im[ψ*∂ψ] de un único paquete distinguible"""
    psi, dpsi = amplitude_and_derivative(spec, mass, scenario, t, z, constants)
    return constants.hbar / mass * np.imag(np.conj(psi) * dpsi)


def rho1(config: TwoBodyConfig, z, t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Densidad de probabilidad de un cuerpo ρ₁(z,t)"""
    psi_a, _, psi_b, _ = _pair_amplitudes(config, z, t, constants)
    direct = np.abs(psi_a) ** 2 + np.abs(psi_b) ** 2
    if config.statistics is StatisticsKind.MB:
        return 0.5 * direct

    n_sq = normalization(config.packet_a, config.packet_b, config.statistics, config.scenario) ** 2
    overlap_ab = overlap(config.packet_a, config.packet_b, config.scenario)
    exchange = 2 * np.real(overlap_ab * np.conj(psi_b) * psi_a)
    return n_sq * (direct + config.statistics.sign * exchange)


def j1(config: TwoBodyConfig, z, t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Corriente de probabilidad de un cuerpo j₁(z,t)"""
    psi_a, dpsi_a, psi_b, dpsi_b = _pair_amplitudes(config, z, t, constants)
    direct = np.imag(np.conj(psi_a) * dpsi_a + np.conj(psi_b) * dpsi_b)
    prefactor = constants.hbar / config.mass
    if config.statistics is StatisticsKind.MB:
        return 0.5 * prefactor * direct

    n_sq = normalization(config.packet_a, config.packet_b, config.statistics, config.scenario) ** 2
    overlap_ab = overlap(config.packet_a, config.packet_b, config.scenario)
    exchange = np.imag(
        overlap_ab * np.conj(psi_b) * dpsi_a + np.conj(overlap_ab) * np.conj(psi_a) * dpsi_b
    )
    return prefactor * n_sq * (direct + config.statistics.sign * exchange)


def density_current_sample(config: TwoBodyConfig, z: float, t: float,
                           constants: PhysicalConstants = DEFAULT_CONSTANTS) -> DensityCurrentSample:
    return DensityCurrentSample(
        z=float(z),
        t=float(t),
        rho=float(rho1(config, z, t, constants)),
        j=float(j1(config, z, t, constants)),
    )


def _exchange_moments(config: TwoBodyConfig, t: float,
                      constants: PhysicalConstants) -> Tuple[complex, complex]:
    """
    Primer y segundo momento normalizados del producto ψ_b*ψ_a.

    ψ_b*ψ_a ∝ exp(−αz² + βz); la fase gravitatoria es común y se cancela.
    Devuelve (w, w² + 1/2α) con w = β/2α.
    """
    spec_a, spec_b = config.packet_a, config.packet_b
    s_a = complex_width(spec_a, config.mass, t, constants).value
    s_b = complex_width(spec_b, config.mass, t, constants).value.conjugate()
    c_a = float(classical_center(spec_a, config.mass, config.scenario, t, constants))
    c_b = float(classical_center(spec_b, config.mass, config.scenario, t, constants))
    alpha = 1 / (4 * spec_a.sigma0 * s_a) + 1 / (4 * spec_b.sigma0 * s_b)
    beta = c_a / (2 * spec_a.sigma0 * s_a) + c_b / (2 * spec_b.sigma0 * s_b) + 1j * (spec_a.k - spec_b.k)
    first = beta / (2 * alpha)
    return first, first ** 2 + 1 / (2 * alpha)


def _direct_moments(config: TwoBodyConfig, t: float, constants: PhysicalConstants):
    centers, seconds = [], []
    for spec in (config.packet_a, config.packet_b):
        center = float(classical_center(spec, config.mass, config.scenario, t, constants))
        width = float(spreading_width(spec, config.mass, t, constants))
        centers.append(center)
        seconds.append(center ** 2 + width ** 2)
    return centers, seconds


def mean_position(config: TwoBodyConfig, t: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """⟨z⟩ = ∫z·ρ₁ dz exacto para cualquier ancho, impulso y escenario"""
    centers, _ = _direct_moments(config, t, constants)
    if config.statistics is StatisticsKind.MB:
        return 0.5 * (centers[0] + centers[1])

    n_sq = normalization(config.packet_a, config.packet_b, config.statistics, config.scenario) ** 2
    overlap_sq = abs(overlap(config.packet_a, config.packet_b)) ** 2
    first, _ = _exchange_moments(config, t, constants)
    return n_sq * (centers[0] + centers[1] + 2 * config.statistics.sign * overlap_sq * first.real)


def second_moment(config: TwoBodyConfig, t: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """⟨z²⟩ = ∫z²·ρ₁ dz"""
    _, seconds = _direct_moments(config, t, constants)
    if config.statistics is StatisticsKind.MB:
        return 0.5 * (seconds[0] + seconds[1])

    n_sq = normalization(config.packet_a, config.packet_b, config.statistics, config.scenario) ** 2
    overlap_sq = abs(overlap(config.packet_a, config.packet_b)) ** 2
    _, second = _exchange_moments(config, t, constants)
    return n_sq * (seconds[0] + seconds[1] + 2 * config.statistics.sign * overlap_sq * second.real)


def center_of_mass_position(config: TwoBodyConfig, t: float,
                            constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """
    ⟨z_cm⟩ = ⟨Ψ|(z₁ + z₂)/2|Ψ⟩ desarrollado sobre el estado de dos cuerpos.

    Los términos de intercambio son ⟨a|z|b⟩⟨b|a⟩ y su conjugado.
    """
    centers, _ = _direct_moments(config, t, constants)
    if config.statistics is StatisticsKind.MB:
        return 0.5 * (centers[0] + centers[1])

    n_sq = normalization(config.packet_a, config.packet_b, config.statistics, config.scenario) ** 2
    overlap_ab = overlap(config.packet_a, config.packet_b)
    first, _ = _exchange_moments(config, t, constants)
    z_ba = first * overlap_ab.conjugate()  # ⟨b|z|a⟩
    z_ab = z_ba.conjugate()
    sign = config.statistics.sign
    z1 = n_sq * (centers[0] + centers[1] + sign * (z_ab * overlap_ab.conjugate() + z_ba * overlap_ab).real)
    z2 = n_sq * (centers[1] + centers[0] + sign * (z_ba * overlap_ab + z_ab * overlap_ab.conjugate()).real)
    return 0.5 * (z1 + z2)


def _validate_equal_width_fall(config: TwoBodyConfig) -> float:
    if not config.scenario.is_fall:
        raise UnsupportedConfigurationError("La forma cerrada requiere el escenario de caída libre")
    sigma_a, sigma_b = config.packet_a.sigma0, config.packet_b.sigma0
    if abs(sigma_a - sigma_b) > 1e-12 * max(sigma_a, sigma_b):
        raise UnsupportedConfigurationError("La forma cerrada requiere anchos iguales")
    if config.packet_a.k != 0.0 or config.packet_b.k != 0.0:
        raise UnsupportedConfigurationError("La forma cerrada requiere k_a = k_b = 0")
    if config.statistics is not StatisticsKind.MB:
        normalization(config.packet_a, config.packet_b, config.statistics, config.scenario)
    return sigma_a


def position_spread(config: TwoBodyConfig, t: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """
    Δz±(t) en caída libre con anchos iguales y k = 0:

        Δz² = σ_t² + (d²/4)(1 ∓ e^(−d²/4σ₀²) ε²)/(1 ± e^(−d²/4σ₀²)),  ε = ℏt/2mσ₀²

    Independiente de g.
    """
    sigma0 = _validate_equal_width_fall(config)
    if t < 0:
        raise ValueError("El tiempo debe ser no negativo")
    separation = config.packet_a.z_c - config.packet_b.z_c
    overlap_sq = math.exp(-separation ** 2 / (4 * sigma0 ** 2))
    eps = constants.hbar * t / (2 * config.mass * sigma0 ** 2)
    sign = config.statistics.sign
    variance = sigma0 ** 2 * (1 + eps ** 2) + 0.25 * separation ** 2 * (1 - sign * overlap_sq * eps ** 2) / (
        1 + sign * overlap_sq
    )
    return math.sqrt(variance)


def printed_mean_position(config: TwoBodyConfig, t: float,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """
    Forma compacta de ⟨z⟩± cuya raíz es t±.

    No coincide con el primer momento exacto cuando el solapamiento es
    apreciable; ver `mean_position`.
    """
    spec_a, spec_b = config.packet_a, config.packet_b
    c_a = float(classical_center(spec_a, config.mass, config.scenario, t, constants))
    c_b = float(classical_center(spec_b, config.mass, config.scenario, t, constants))
    if config.statistics is StatisticsKind.MB:
        return 0.5 * (c_a + c_b)

    var_a, var_b = spec_a.sigma0 ** 2, spec_b.sigma0 ** 2
    weighted = (spec_a.z_c * var_a + spec_b.z_c * var_b) / (var_a + var_b)
    if config.scenario.is_fall:
        correction = -0.5 * config.scenario.g * t ** 2 - weighted
    else:
        drift = constants.hbar * t * (spec_a.k * var_a + spec_b.k * var_b) / (config.mass * (var_a + var_b))
        correction = drift - weighted

    n_sq = normalization(spec_a, spec_b, config.statistics, config.scenario) ** 2
    overlap_sq = abs(overlap(spec_a, spec_b)) ** 2
    return n_sq * (c_a + c_b + config.statistics.sign * overlap_sq * correction)


def center_crossing_time(config: TwoBodyConfig, detector_z: float = 0.0) -> float:
    """
    t± = √( (z_ca + z_cb)/g · (2 ∓ e^(−d²/4σ₀²)) / (2 ± e^(−d²/4σ₀²)) )

    Alturas medidas desde el detector; MB devuelve √((z_ca + z_cb)/g).
    """
    sigma0 = _validate_equal_width_fall(config)
    height_sum = (config.packet_a.z_c - detector_z) + (config.packet_b.z_c - detector_z)
    separation = config.packet_a.z_c - config.packet_b.z_c
    exchange = math.exp(-separation ** 2 / (4 * sigma0 ** 2))
    sign = config.statistics.sign
    radicand = height_sum / config.scenario.g * (2 - sign * exchange) / (2 + sign * exchange)
    if radicand < 0 or height_sum <= 0:
        raise NoCrossingError(f"El centro de ρ₁ no cruza el detector (radicando {radicand:.3e})")
    return math.sqrt(radicand)
