#!/usr/bin/env python3
"""
🧪 Oráculo Numérico en Grilla
=============================

Comprobaciones independientes de las formas cerradas: propagador de
Schrödinger 1D sobre una grilla uniforme (libre y potencial lineal mgz) e
integradores de momentos por fuerza bruta.

Funcionalidades:
- Split-step de Fourier (por defecto): exacto para potenciales lineales
  salvo una fase c-número τ³mg²/24ℏ por paso, que se elimina
- Crank–Nicolson con matrices dispersas (segundo orden, unitario)
- Detección de deriva de la norma y de cobertura insuficiente de la grilla
- Momentos (norma, media, dispersión) por la regla de Simpson
- ⟨(z₁ + z₂)/2⟩ sobre una grilla 2D del estado de dos cuerpos
- τ de la corriente 2D con espín o sin él, integrada sobre una grilla (x, t)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.integrate import simpson
from scipy.sparse.linalg import splu

from physical_model import (
    DEFAULT_CONSTANTS,
    GaussianPacketSpec,
    PhysicalConstants,
    Scenario,
    SimulationError,
    StatisticsKind,
    TwoBodyConfig,
)
from spin_current import SpinScenario, current_vector, spin_crossing_time
from wavepacket import amplitude_and_derivative, classical_center, normalization, overlap, spreading_width

# Configurar logging
logger = logging.getLogger(__name__)

MIN_GRID_POINTS = 2 ** 10
NORM_DRIFT_LIMIT = 1e-6
EDGE_FRACTION = 0.05  # fracción de la grilla vigilada en cada borde
EDGE_PROBABILITY_LIMIT = 1e-10
COVERAGE_SIGMAS = 6.0  # media ± 6σ dentro de la grilla (12σ en total)
CN_PHASE_LIMIT = 0.5  # fase máxima por paso en el modo poblado más rápido


class StepSizeError(SimulationError):
    """La norma deriva más de lo permitido o el paso viola el criterio del esquema"""
    pass


class CoverageError(SimulationError):
    """La grilla no cubre la densidad (en posición o en momento)"""
    pass


class PropagationScheme(Enum):
    SPLIT_STEP = "split_step"
    CRANK_NICOLSON = "crank_nicolson"


@dataclass(frozen=True, eq=False)
class GridState:
    """Amplitud compleja sobre una grilla uniforme [z_min, z_max) en el instante t"""
    z_min: float  # m
    z_max: float  # m
    n_points: int
    dt: float  # s
    values: np.ndarray
    t: float = 0.0  # s

    def __post_init__(self):
        if self.n_points < MIN_GRID_POINTS:
            raise ValueError(f"La grilla necesita al menos {MIN_GRID_POINTS} puntos (recibido {self.n_points})")
        if not self.z_max > self.z_min:
            raise ValueError("z_max debe ser mayor que z_min")
        if self.dt <= 0:
            raise ValueError("dt debe ser positivo")
        if np.shape(self.values) != (self.n_points,):
            raise ValueError("values debe tener n_points elementos")

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.n_points

    @property
    def z(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_points)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        """∫|ψ|²dz (suma de Riemann, exacta para la grilla periódica)"""
        return float(np.sum(self.density) * self.dz)


def initial_grid_state(spec: GaussianPacketSpec, z_min: float, z_max: float, n_points: int, dt: float,
                       mass: Optional[float] = None,
                       constants: PhysicalConstants = DEFAULT_CONSTANTS) -> GridState:
    """ψ(z, 0) muestreado en la grilla"""
    mass = constants.neutron_mass if mass is None else mass
    z = z_min + (z_max - z_min) / n_points * np.arange(n_points)
    psi, _ = amplitude_and_derivative(spec, mass, Scenario.free(), 0.0, z, constants)
    return GridState(z_min, z_max, n_points, dt, np.asarray(psi, dtype=complex), 0.0)


def _wavenumbers(state: GridState) -> np.ndarray:
    return 2 * np.pi * np.fft.fftfreq(state.n_points, d=state.dz)


def _check_coverage(state: GridState, where: str) -> None:
    density = state.density
    total = float(np.sum(density))
    edge = max(1, int(EDGE_FRACTION * state.n_points))
    leaked = float(np.sum(density[:edge]) + np.sum(density[-edge:])) / total
    if leaked > EDGE_PROBABILITY_LIMIT:
        raise CoverageError(f"La densidad alcanza los bordes de la grilla ({where}: {leaked:.2e})")

    spectrum = np.abs(np.fft.fft(state.values)) ** 2
    spectrum_edge = np.fft.fftshift(spectrum)
    leaked_k = float(np.sum(spectrum_edge[:edge]) + np.sum(spectrum_edge[-edge:])) / float(np.sum(spectrum))
    if leaked_k > EDGE_PROBABILITY_LIMIT:
        raise CoverageError(f"El espectro alcanza el límite de Nyquist ({where}: {leaked_k:.2e})")


def _check_step(state: GridState, mass: float, g: float, tau: float, duration: float,
                scheme: PropagationScheme, hbar: float) -> None:
    k_nyquist = math.pi / state.dz
    if scheme is PropagationScheme.SPLIT_STEP:
        kick = mass * g * tau / hbar
        if kick >= k_nyquist:
            raise StepSizeError(f"El impulso por paso ({kick:.3e} 1/m) supera el de Nyquist ({k_nyquist:.3e} 1/m)")
        return

    # Crank–Nicolson: fase por paso del modo poblado más rápido
    spectrum = np.abs(np.fft.fft(state.values)) ** 2
    populated = np.abs(_wavenumbers(state))[spectrum > 1e-12 * spectrum.max()]
    k_fast = float(populated.max()) + mass * g * duration / hbar
    phase = hbar * k_fast ** 2 * tau / (2 * mass)
    if phase > CN_PHASE_LIMIT:
        raise StepSizeError(
            f"Paso demasiado grande para Crank–Nicolson: fase {phase:.3f} rad > {CN_PHASE_LIMIT} "
            f"(reducir dt por debajo de {tau * CN_PHASE_LIMIT / phase:.3e} s)"
        )


def _split_step(state: GridState, mass: float, g: float, tau: float, steps: int, hbar: float) -> np.ndarray:
    k = _wavenumbers(state)
    kinetic = np.exp(-1j * hbar * k ** 2 * tau / (2 * mass))
    half_potential = np.exp(-1j * mass * g * state.z * tau / (2 * hbar))
    # Strang con V lineal: error exacto = fase +τ³mg²/24ℏ por paso
    correction = np.exp(-1j * tau ** 3 * mass * g ** 2 / (24 * hbar))
    psi = state.values.copy()
    norm0 = float(np.sum(np.abs(psi) ** 2))
    for step in range(steps):
        psi = half_potential * np.fft.ifft(kinetic * np.fft.fft(half_potential * psi))
        psi *= correction
        _check_norm(psi, norm0, step)
    return psi


def _crank_nicolson(state: GridState, mass: float, g: float, tau: float, steps: int, hbar: float) -> np.ndarray:
    n = state.n_points
    laplacian = sparse.diags([np.ones(n - 1), -2 * np.ones(n), np.ones(n - 1)], [-1, 0, 1]) / state.dz ** 2
    hamiltonian = -hbar ** 2 / (2 * mass) * laplacian + sparse.diags(mass * g * state.z)
    identity = sparse.identity(n, dtype=complex)
    lhs = (identity + 0.5j * tau / hbar * hamiltonian).tocsc()
    rhs = (identity - 0.5j * tau / hbar * hamiltonian).tocsr()
    solver = splu(lhs)
    psi = state.values.copy()
    norm0 = float(np.sum(np.abs(psi) ** 2))
    for step in range(steps):
        psi = solver.solve(rhs @ psi)
        _check_norm(psi, norm0, step)
    return psi


def _check_norm(psi: np.ndarray, norm0: float, step: int) -> None:
    drift = abs(float(np.sum(np.abs(psi) ** 2)) / norm0 - 1)
    if drift > NORM_DRIFT_LIMIT:
        raise StepSizeError(f"Deriva de la norma {drift:.2e} en el paso {step + 1}")


def propagate(initial: GridState, g: Optional[float], mass: float, t_final: float,
              scheme: PropagationScheme = PropagationScheme.SPLIT_STEP,
              constants: PhysicalConstants = DEFAULT_CONSTANTS) -> GridState:
    """
    Evoluciona `initial` hasta t_final con V(z) = mgz (g = None o 0: libre).

    El número de pasos es ⌈(t_final − t)/dt⌉ con paso uniforme.
    """
    if mass <= 0:
        raise ValueError("La masa debe ser positiva")
    duration = t_final - initial.t
    if duration < 0:
        raise ValueError(f"t_final ({t_final}) es anterior al estado inicial ({initial.t})")
    if duration == 0:
        return initial
    g = 0.0 if g is None else float(g)
    if g < 0:
        raise ValueError("g debe ser no negativo")

    steps = max(1, math.ceil(duration / initial.dt - 1e-9))
    tau = duration / steps
    hbar = constants.hbar
    _check_coverage(initial, "estado inicial")
    _check_step(initial, mass, g, tau, duration, scheme, hbar)
    logger.debug(f"🔧 Propagando {steps} pasos de {tau:.3e} s ({scheme.value}, g = {g})")

    if scheme is PropagationScheme.SPLIT_STEP:
        values = _split_step(initial, mass, g, tau, steps, hbar)
    else:
        values = _crank_nicolson(initial, mass, g, tau, steps, hbar)

    final = replace(initial, values=values, t=t_final)
    _check_coverage(final, f"t = {t_final:.3e} s")
    return final


def brute_force_moments(z: np.ndarray, rho: np.ndarray, check_coverage: bool = True) -> Tuple[float, float, float]:
    """(norma, media, dispersión) de una densidad muestreada, por Simpson"""
    z = np.asarray(z, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if z.shape != rho.shape or z.ndim != 1 or len(z) < 3:
        raise ValueError("z y rho deben ser arrays 1D de igual longitud (≥ 3)")
    norm = float(simpson(rho, x=z))
    if norm <= 0:
        raise CoverageError("La densidad muestreada tiene norma nula")
    mean = float(simpson(z * rho, x=z)) / norm
    spread = math.sqrt(max(float(simpson((z - mean) ** 2 * rho, x=z)) / norm, 0.0))
    if check_coverage and (mean - COVERAGE_SIGMAS * spread < z[0] or mean + COVERAGE_SIGMAS * spread > z[-1]):
        raise CoverageError(
            f"La grilla [{z[0]:.4g}, {z[-1]:.4g}] no cubre ±{COVERAGE_SIGMAS:g}σ alrededor de {mean:.4g}"
        )
    return norm, mean, spread


def l2_distance(state: GridState, amplitude: np.ndarray) -> float:
    """‖ψ_grilla − ψ_ref‖ / ‖ψ_ref‖ sobre los puntos de la grilla"""
    reference = np.asarray(amplitude, dtype=complex)
    if reference.shape != state.values.shape:
        raise ValueError("La amplitud de referencia no coincide con la grilla")
    return float(np.linalg.norm(state.values - reference) / np.linalg.norm(reference))


def grid_for_packet(spec: GaussianPacketSpec, mass: float, g: float, t_final: float, n_points: int = 2 ** 11,
                    steps: int = 64, margin: float = 12.0,
                    constants: PhysicalConstants = DEFAULT_CONSTANTS) -> GridState:
    """Grilla que cubre el recorrido del paquete hasta t_final con `margin` σ_t a cada lado"""
    scenario = Scenario.fall(g) if g else Scenario.free()
    sigma_end = float(spreading_width(spec, mass, t_final, constants))
    centers = [spec.z_c, float(classical_center(spec, mass, scenario, t_final, constants))]
    z_min = min(centers) - margin * sigma_end
    z_max = max(centers) + margin * sigma_end
    return initial_grid_state(spec, z_min, z_max, n_points, t_final / steps, mass, constants)


def brute_force_center_of_mass(config: TwoBodyConfig, t: float, n_points: int = 401, margin: float = 10.0,
                               constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """⟨(z₁ + z₂)/2⟩ integrando |Ψ(z₁,z₂,t)|² sobre una grilla 2D"""
    specs = (config.packet_a, config.packet_b)
    centers = [float(classical_center(s, config.mass, config.scenario, t, constants)) for s in specs]
    widths = [float(spreading_width(s, config.mass, t, constants)) for s in specs]
    z = np.linspace(min(centers) - margin * max(widths), max(centers) + margin * max(widths), n_points)

    psi_a, _ = amplitude_and_derivative(config.packet_a, config.mass, config.scenario, t, z, constants)
    psi_b, _ = amplitude_and_derivative(config.packet_b, config.mass, config.scenario, t, z, constants)
    direct = np.outer(psi_a, psi_b)
    swapped = np.outer(psi_b, psi_a)
    if config.statistics is StatisticsKind.MB:
        density = 0.5 * (np.abs(direct) ** 2 + np.abs(swapped) ** 2)
    else:
        n_pm = normalization(config.packet_a, config.packet_b, config.statistics, config.scenario)
        density = n_pm ** 2 * np.abs(direct + config.statistics.sign * swapped) ** 2

    z1, z2 = np.meshgrid(z, z, indexing="ij")
    norm = simpson(simpson(density, x=z, axis=1), x=z)
    first = simpson(simpson(0.5 * (z1 + z2) * density, x=z, axis=1), x=z)
    logger.debug(f"📊 Norma 2D {norm:.10f} (|⟨a|b⟩| = {abs(overlap(*specs)):.4g})")
    return float(first / norm)


def brute_force_spin_arrival_time(scn: SpinScenario, detector_z: float = 0.0, include_spin: bool = False,
                                  window: float = 3.0, n_times: int = 4001, n_x: int = 241, margin: float = 12.0,
                                  constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """
    τ integrando |j| de la construcción vectorial sobre una grilla (x, t)
    en el plano z = Z, con Simpson en ambos ejes.

    La grilla en x sigue a σ_t (±margin σ_t) y la ventana temporal es
    `window` veces el cruce clásico.
    """
    if n_times < 3 or n_x < 3:
        raise ValueError("La grilla necesita al menos 3 puntos por eje")
    t = np.linspace(0.0, window * spin_crossing_time(scn, detector_z, constants), n_times)
    u = np.linspace(-margin, margin, n_x)
    sigma_t = spreading_width(GaussianPacketSpec(scn.sigma0, scn.z_c), scn.mass, t, constants)
    x = sigma_t[:, None] * u[None, :]
    times = np.broadcast_to(t[:, None], x.shape)

    jx, jy, jz = current_vector(scn, x, detector_z, times, include_spin, constants)
    flux = sigma_t * simpson(np.sqrt(jx ** 2 + jy ** 2 + jz ** 2), x=u, axis=1)
    norm = simpson(flux, x=t)
    if not norm > 0:
        raise CoverageError("La corriente no atraviesa el plano del detector dentro de la ventana")
    return float(simpson(t * flux, x=t) / norm)
