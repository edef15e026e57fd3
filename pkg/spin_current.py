#!/usr/bin/env python3
"""
🌀 Corriente de Probabilidad Dependiente del Espín
==================================================

Corriente j = (ℏ/m){Im[ψ*∇ψ] + Re[ψ*∇ψ] × ŝ} para un paquete gaussiano
2D simétrico en caída libre, distribuciones de llegada integradas en x y
comparación τ_Sch frente a τ(ŝ).

Funcionalidades:
- Módulos cerrados |j_Sch| (polinomio f₀…f₄ en m) y |j| (polinomio h₀…h₂)
  para ŝ = (0, 1, 0)
- Reconstrucción vectorial para cualquier ŝ unitario
- Construcción independiente desde las amplitudes 1D factorizadas
- Π_Sch y Π(ŝ) integradas en x, desplazamiento τ_Sch − τ(ŝ) sin cancelación
- Barrido en masa en paralelo
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from arrival_time import ArrivalResult, NoArrivalError, arrival_from_current, parallel_map, validate_masses
from physical_model import (
    DEFAULT_CONSTANTS,
    GaussianPacketSpec,
    PhysicalConstants,
    Scenario,
    SimulationError,
    reference_time,
)
from quadrature import DEFAULT_POLICY, QuadraturePolicy, integrate_adaptive, nested_integrand, panel_breakpoints
from wavepacket import amplitude_and_derivative

# Configurar logging
logger = logging.getLogger(__name__)

SPIN_UP_Y = (0.0, 1.0, 0.0)
X_HALF_WIDTH = 10.0  # en unidades de σ_t
SPIN_SAMPLE_POINTS = 401


@dataclass(frozen=True)
class SpinScenario:
    """Paquete 2D simétrico en caída libre con eje de espín ŝ"""
    sigma0: float  # m
    z_c: float  # m
    k0: float  # 1/m
    mass: float  # kg
    g: float  # m/s²
    spin_axis: Tuple[float, float, float] = SPIN_UP_Y

    def __post_init__(self):
        if self.sigma0 <= 0 or self.mass <= 0 or self.g <= 0:
            raise ValueError("sigma0, mass y g deben ser positivos")
        if not (math.isfinite(self.z_c) and math.isfinite(self.k0)):
            raise ValueError("z_c y k0 deben ser finitos")
        if len(self.spin_axis) != 3 or abs(math.sqrt(sum(c * c for c in self.spin_axis)) - 1) > 1e-12:
            raise ValueError(f"spin_axis debe ser un vector unitario (recibido {self.spin_axis})")

    def with_mass(self, mass: float) -> "SpinScenario":
        return replace(self, mass=mass)

    @property
    def uses_printed_forms(self) -> bool:
        return tuple(float(c) for c in self.spin_axis) == SPIN_UP_Y


@dataclass(frozen=True)
class CurrentModulusSample:
    """Módulos de corriente en (x, z, t)"""
    x: float
    z: float
    t: float
    j_sch_modulus: float
    j_spin_modulus: float

    def __post_init__(self):
        if self.j_sch_modulus < 0 or self.j_spin_modulus < 0:
            raise ValueError("Los módulos de corriente no pueden ser negativos")


@dataclass
class SpinSweepRow:
    """Fila del barrido en masa con y sin espín (SI)"""
    mass: float
    tau_sch: float = math.nan
    tau_spin: float = math.nan
    delta: float = math.nan
    error: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _kinematics(scn: SpinScenario, t, constants: PhysicalConstants):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("El tiempo debe ser no negativo")
    eps = constants.hbar * t / (2 * scn.mass * scn.sigma0 ** 2)
    sigma_t_sq = scn.sigma0 ** 2 * (1 + eps ** 2)
    z_cl = -0.5 * scn.g * t ** 2 + constants.hbar * scn.k0 / scn.mass * t + scn.z_c
    return t, eps, sigma_t_sq, z_cl


def gaussian_envelope(scn: SpinScenario, x, z, t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """exp{−(x² + (z − z_cl)²)/2σ_t²}"""
    _, _, sigma_t_sq, z_cl = _kinematics(scn, t, constants)
    return np.exp(-(np.asarray(x) ** 2 + (np.asarray(z) - z_cl) ** 2) / (2 * sigma_t_sq))


def schrodinger_current_modulus(scn: SpinScenario, x, z, t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """|j_Sch| = √(f₄m⁴ + f₃m³ + f₂m² + f₁m + f₀)/(16πm²σ₀²σ_t⁴) × envolvente"""
    t, _, sigma_t_sq, _ = _kinematics(scn, t, constants)
    x, z = np.asarray(x, dtype=float), np.asarray(z, dtype=float)
    hbar, m, s0, g, k0, zc = constants.hbar, scn.mass, scn.sigma0, scn.g, scn.k0, scn.z_c

    f0 = hbar ** 4 * t ** 2 * (g ** 2 * t ** 4 + 4 * (x ** 2 + (z - zc) ** 2) + 4 * g * t ** 2 * (zc - z))
    f1 = -16 * hbar ** 3 * k0 * s0 ** 4 * t * (g * t ** 2 - 2 * z + 2 * zc)
    f2 = 16 * hbar ** 2 * s0 ** 4 * (4 * k0 ** 2 * s0 ** 4 + g * t ** 2 * (g * t ** 2 - 2 * z + 2 * zc))
    f3 = -128 * g * hbar * k0 * s0 ** 8 * t
    f4 = 64 * g ** 2 * s0 ** 8 * t ** 2
    radicand = (((f4 * m + f3) * m + f2) * m + f1) * m + f0
    modulus = np.sqrt(np.maximum(radicand, 0.0)) / (16 * np.pi * m ** 2 * s0 ** 2 * sigma_t_sq ** 2)
    return modulus * gaussian_envelope(scn, x, z, t, constants)


def _closed_form_components(scn: SpinScenario, x, z, t, include_spin: bool, constants: PhysicalConstants):
    t, eps, sigma_t_sq, z_cl = _kinematics(scn, t, constants)
    x, z = np.asarray(x, dtype=float), np.asarray(z, dtype=float)
    offset = z - z_cl
    rho = np.exp(-(x ** 2 + offset ** 2) / (2 * sigma_t_sq)) / (2 * np.pi * sigma_t_sq)
    scale = constants.hbar / scn.mass * rho
    kappa = scn.k0 - scn.mass * scn.g * t / constants.hbar

    jx = scale * x * eps / (2 * sigma_t_sq)
    jy = np.zeros_like(jx)
    jz = scale * (kappa + offset * eps / (2 * sigma_t_sq))
    if not include_spin:
        return jx, jy, jz, np.zeros_like(jx), np.zeros_like(jx), np.zeros_like(jx)

    # (ℏ/m)Re[ψ*∇ψ] = (ℏ/2m)∇ρ
    rx = -scale * x / (2 * sigma_t_sq)
    rz = -scale * offset / (2 * sigma_t_sq)
    sx, sy, sz = scn.spin_axis
    return jx, jy, jz, -rz * sy, rz * sx - rx * sz, rx * sy


def spin_current_modulus(scn: SpinScenario, x, z, t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """
    |j| = √(h₂m² + h₁m + h₀)/(8πmσ₀σ_t³) × envolvente para ŝ = (0, 1, 0);
    otros ejes se reconstruyen desde la fórmula vectorial.
    """
    if not scn.uses_printed_forms:
        jx, jy, jz, px, py, pz = _closed_form_components(scn, x, z, t, True, constants)
        return np.sqrt((jx + px) ** 2 + (jy + py) ** 2 + (jz + pz) ** 2)

    t, _, sigma_t_sq, _ = _kinematics(scn, t, constants)
    x, z = np.asarray(x, dtype=float), np.asarray(z, dtype=float)
    hbar, m, s0, g, k0, zc = constants.hbar, scn.mass, scn.sigma0, scn.g, scn.k0, scn.z_c

    h0 = hbar ** 2 * (
        16 * k0 ** 2 * s0 ** 4 + g ** 2 * t ** 4 - 16 * k0 * s0 ** 2 * x
        + 4 * (x ** 2 + (z - zc) ** 2) + 4 * g * t ** 2 * (zc - z)
    )
    h1 = 16 * g * hbar * s0 ** 2 * t * (-2 * k0 * s0 ** 2 + x)
    h2 = 16 * g ** 2 * s0 ** 4 * t ** 2
    radicand = (h2 * m + h1) * m + h0
    modulus = np.sqrt(np.maximum(radicand, 0.0)) / (8 * np.pi * m * s0 * sigma_t_sq ** 1.5)
    return modulus * gaussian_envelope(scn, x, z, t, constants)


def current_vector(scn: SpinScenario, x, z, t, include_spin: bool = True,
                   constants: PhysicalConstants = DEFAULT_CONSTANTS) -> Tuple[Any, Any, Any]:
    """
    (j_x, j_y, j_z) construido desde las amplitudes 1D factorizadas
    ψ = ψ_x(x,t)ψ_z(z,t); ψ_x evoluciona libre y ψ_z cae.
    """
    packet_x = GaussianPacketSpec(scn.sigma0, 0.0, 0.0)
    packet_z = GaussianPacketSpec(scn.sigma0, scn.z_c, scn.k0)
    psi_x, dpsi_x = amplitude_and_derivative(packet_x, scn.mass, Scenario.free(), t, x, constants)
    psi_z, dpsi_z = amplitude_and_derivative(packet_z, scn.mass, Scenario.fall(scn.g), t, z, constants)
    grad_x = np.abs(psi_z) ** 2 * np.conj(psi_x) * dpsi_x
    grad_z = np.abs(psi_x) ** 2 * np.conj(psi_z) * dpsi_z
    prefactor = constants.hbar / scn.mass

    jx, jz = prefactor * np.imag(grad_x), prefactor * np.imag(grad_z)
    jy = np.zeros_like(jx)
    if include_spin:
        rx, rz = prefactor * np.real(grad_x), prefactor * np.real(grad_z)
        sx, sy, sz = scn.spin_axis
        jx, jy, jz = jx - rz * sy, jy + rz * sx - rx * sz, jz + rx * sy
    return jx, jy, jz


def current_modulus_sample(scn: SpinScenario, x: float, z: float, t: float,
                           constants: PhysicalConstants = DEFAULT_CONSTANTS) -> CurrentModulusSample:
    return CurrentModulusSample(
        x=float(x), z=float(z), t=float(t),
        j_sch_modulus=float(schrodinger_current_modulus(scn, x, z, t, constants)),
        j_spin_modulus=float(spin_current_modulus(scn, x, z, t, constants)),
    )


def _spin_difference(scn: SpinScenario, x, z, t, constants: PhysicalConstants):
    """|j| − |j_Sch| = (2 j_Sch·j_s + |j_s|²)/(|j| + |j_Sch|)"""
    jx, jy, jz, px, py, pz = _closed_form_components(scn, x, z, t, True, constants)
    sch = np.sqrt(jx ** 2 + jy ** 2 + jz ** 2)
    total = np.sqrt((jx + px) ** 2 + (jy + py) ** 2 + (jz + pz) ** 2)
    numerator = 2 * (jx * px + jy * py + jz * pz) + px ** 2 + py ** 2 + pz ** 2
    denominator = sch + total
    return np.where(denominator > 0, numerator / np.where(denominator > 0, denominator, 1.0), 0.0)


def _x_bounds(scn: SpinScenario, constants: PhysicalConstants):
    def bounds(t: float) -> Tuple[float, float]:
        _, _, sigma_t_sq, _ = _kinematics(scn, t, constants)
        half = X_HALF_WIDTH * math.sqrt(float(sigma_t_sq))
        return -half, half
    return bounds


def _vectorized(func):
    def wrapper(t):
        t_arr = np.asarray(t, dtype=float)
        values = np.array([func(ti) for ti in t_arr.ravel()])
        return values.reshape(t_arr.shape)
    return wrapper


def spin_crossing_time(scn: SpinScenario, detector_z: float = 0.0,
                       constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Primer t > 0 con z_cl(t) = Z"""
    velocity = constants.hbar * scn.k0 / scn.mass
    discriminant = velocity ** 2 + 2 * scn.g * (scn.z_c - detector_z)
    if discriminant < 0:
        raise NoArrivalError("El centro del paquete nunca alcanza el detector")
    return (velocity + math.sqrt(discriminant)) / scn.g


def spin_arrival_distribution(scn: SpinScenario, detector_z: float = 0.0, include_spin: bool = True,
                              policy: QuadraturePolicy = DEFAULT_POLICY,
                              constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ArrivalResult:
    """Π_Sch o Π(·;ŝ): módulo de la corriente integrado en x sobre el plano z = Z"""
    modulus = spin_current_modulus if include_spin else schrodinger_current_modulus
    integrand = nested_integrand(
        lambda x, t: modulus(scn, x, detector_z, t, constants), _x_bounds(scn, constants), policy
    )
    return arrival_from_current(
        _vectorized(integrand),
        detector_z=detector_z,
        time_scale=reference_time(scn.mass, scn.sigma0, constants),
        crossing_time=spin_crossing_time(scn, detector_z, constants),
        policy=replace(policy, sample_points=min(policy.sample_points, SPIN_SAMPLE_POINTS)),
        nonnegative=True,
        label="espín" if include_spin else "Schrödinger",
    )


def spin_arrival_shift(scn: SpinScenario, detector_z: float = 0.0, policy: QuadraturePolicy = DEFAULT_POLICY,
                       constants: PhysicalConstants = DEFAULT_CONSTANTS,
                       reference: Optional[ArrivalResult] = None) -> float:
    """
    τ_Sch − τ(ŝ) en segundos.

    Integra directamente la diferencia |j| − |j_Sch| sobre la ventana de
    Π_Sch: con D_n = ∫∫tⁿ(|j| − |j_Sch|), δ = (τ_Sch·D₀ − D₁)/(N₀ + D₀).
    """
    if reference is None:
        reference = spin_arrival_distribution(scn, detector_z, False, policy, constants)
    time_scale = reference_time(scn.mass, scn.sigma0, constants)
    difference = nested_integrand(
        lambda x, t: _spin_difference(scn, x, detector_z, t, constants), _x_bounds(scn, constants), policy
    )
    upper = reference.cutoff_time / time_scale
    panels = panel_breakpoints(0.0, upper, policy.panels)
    d0, _ = integrate_adaptive(lambda u: time_scale * difference(u * time_scale), 0.0, upper, policy, panels)
    d1, _ = integrate_adaptive(lambda u: u * time_scale * difference(u * time_scale), 0.0, upper, policy, panels)
    tau_sch = reference.mean_time / time_scale
    return time_scale * (tau_sch * d0 - d1) / (reference.norm_integral + d0)


def _spin_row(scn_template: SpinScenario, mass: float, detector_z: float, policy: QuadraturePolicy,
              constants: PhysicalConstants) -> SpinSweepRow:
    scn = scn_template.with_mass(mass)
    row = SpinSweepRow(mass=mass)
    try:
        reference = spin_arrival_distribution(scn, detector_z, False, policy, constants)
        row.tau_sch = reference.mean_time
        row.delta = spin_arrival_shift(scn, detector_z, policy, constants, reference=reference)
        row.tau_spin = row.tau_sch - row.delta
    except SimulationError as e:
        row.error = str(e)
        logger.warning(f"⚠️ m = {mass:.4g} kg: {e}")
    return row


def spin_mass_sweep(scn_template: SpinScenario, masses: Sequence[float], detector_z: float = 0.0,
                    policy: QuadraturePolicy = DEFAULT_POLICY, workers: int = 1, progress: bool = False,
                    constants: PhysicalConstants = DEFAULT_CONSTANTS) -> List[SpinSweepRow]:
    """(m, τ_Sch, τ(ŝ), τ_Sch − τ(ŝ)) por masa; errores por punto no fatales"""
    masses = validate_masses(masses)
    logger.info(f"🔧 Barrido de espín: {len(masses)} masas, ŝ = {scn_template.spin_axis}")
    return parallel_map(
        lambda m: _spin_row(scn_template, m, detector_z, policy, constants),
        masses, workers=workers, desc="espín", progress=progress,
    )
