#!/usr/bin/env python3
"""
📐 Cuadratura Adaptativa
========================

Utilidades de integración numérica compartidas: cuadratura adaptativa 1D
con estimación de error (Gauss–Kronrod vía QUADPACK), localización de
cambios de signo para integrar |f| por tramos suaves, extensión del corte
temporal en dominios semi-infinitos e integración anidada 2D.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from physical_model import SimulationError

# Configurar logging
logger = logging.getLogger(__name__)

RealFunction = Callable[[float], float]


class ConvergenceError(SimulationError):
    """Presupuesto de subdivisiones o de extensiones agotado"""

    def __init__(self, message: str, best_estimate: Optional[float] = None,
                 error_estimate: Optional[float] = None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadraturePolicy:
    """Tolerancias y reglas de corte de la cuadratura"""
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_subdivisions: int = 200
    initial_cutoff_factor: float = 4.0  # multiplica el cruce clásico estimado
    tail_fraction: float = 1e-8  # criterio de parada de la extensión del corte
    scan_points: int = 1024
    max_extensions: int = 24
    free_window: float = 15.0  # ventana de observación en evolución libre (unidades de t_ref)
    sample_points: int = 2001
    panels: int = 32  # tramos iniciales para no perder picos estrechos

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("Las tolerancias deben ser positivas")
        if self.max_subdivisions < 16:
            raise ValueError("max_subdivisions debe ser al menos 16")
        if self.scan_points < 32:
            raise ValueError("scan_points debe ser al menos 32")
        if self.initial_cutoff_factor <= 0 or self.tail_fraction <= 0 or self.free_window <= 0:
            raise ValueError("Los parámetros de corte deben ser positivos")
        if self.sample_points < 3 or self.max_extensions < 1 or self.panels < 1:
            raise ValueError("sample_points >= 3, max_extensions >= 1 y panels >= 1")

    def tightened(self, factor: float = 0.5) -> "QuadraturePolicy":
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


DEFAULT_POLICY = QuadraturePolicy()


@dataclass(frozen=True)
class CutoffIntegrals:
    """Momentos ∫tⁿ|f|dt sobre [inicio, corte] con diagnóstico"""
    values: Tuple[float, ...]
    errors: Tuple[float, ...]
    cutoff: float
    roots: Tuple[float, ...]
    extensions: int
    reached_ceiling: bool


def integrate_adaptive(f: RealFunction, a: float, b: float, policy: QuadraturePolicy = DEFAULT_POLICY,
                       breakpoints: Sequence[float] = ()) -> Tuple[float, float]:
    """
    ∫_a^b f con estimación de error; los puntos de quiebre separan tramos
    que se integran por separado.
    """
    if not a < b:
        raise ValueError(f"Intervalo inválido [{a}, {b}]")
    edges = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    total, error = 0.0, 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        if right <= left:
            continue
        result = quad(f, left, right, epsabs=policy.abs_tol, epsrel=policy.rel_tol,
                      limit=policy.max_subdivisions, full_output=1)
        value, err = result[0], result[1]
        if len(result) > 3:
            allowed = 100 * max(policy.abs_tol, policy.rel_tol * abs(value))
            if err > allowed:
                raise ConvergenceError(
                    f"Cuadratura sin convergencia en [{left:.6g}, {right:.6g}]: {result[3]}",
                    best_estimate=total + value,
                    error_estimate=error + err,
                )
            logger.debug(f"⚠️ Aviso de QUADPACK aceptado (error {err:.2e}): {result[3]}")
        total += value
        error += err
    return total, error


def panel_breakpoints(a: float, b: float, panels: int) -> List[float]:
    """Puntos interiores de una partición uniforme de [a, b]"""
    return [float(p) for p in np.linspace(a, b, panels + 1)[1:-1]]


def _evaluate_on_grid(f: RealFunction, grid: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(f(grid), dtype=float)
        if values.shape == grid.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([float(f(x)) for x in grid])


def locate_sign_changes(f: RealFunction, a: float, b: float, scan_points: int = 256) -> List[float]:
    """Raíces de f en (a, b) detectadas por muestreo y refinadas con Brent a 10⁻¹²(b−a)"""
    if scan_points < 32:
        raise ValueError("scan_points debe ser al menos 32")
    grid = np.linspace(a, b, scan_points)
    signs = np.sign(_evaluate_on_grid(f, grid))
    xtol = 1e-12 * (b - a)
    roots: List[float] = []
    for i in range(len(grid) - 1):
        if signs[i] * signs[i + 1] < 0:
            roots.append(brentq(lambda x: float(f(x)), grid[i], grid[i + 1], xtol=xtol))
        elif signs[i + 1] == 0 and 0 < i + 1 < len(grid) - 1 and signs[i] * signs[i + 2] < 0:
            roots.append(float(grid[i + 1]))
    return roots


def integrate_abs_moments(f: RealFunction, a: float, b: float, policy: QuadraturePolicy = DEFAULT_POLICY,
                          orders: Sequence[int] = (0, 1),
                          nonnegative: bool = False) -> Tuple[List[float], List[float], List[float]]:
    """∫_a^b tⁿ|f(t)| dt para cada orden, partiendo en los cambios de signo de f"""
    roots = [] if nonnegative else locate_sign_changes(f, a, b, policy.scan_points)
    breakpoints = sorted(set(roots) | set(panel_breakpoints(a, b, policy.panels)))
    values, errors = [], []
    for order in orders:
        value, err = integrate_adaptive(lambda x, n=order: x ** n * abs(float(f(x))), a, b, policy, breakpoints)
        values.append(value)
        errors.append(err)
    return values, errors, roots


def integrate_semi_infinite(f: RealFunction, initial_cutoff: float, policy: QuadraturePolicy = DEFAULT_POLICY,
                            ceiling: Optional[float] = None, orders: Sequence[int] = (0, 1),
                            start: float = 0.0, nonnegative: bool = False) -> CutoffIntegrals:
    """
    Momentos de |f| sobre [start, ∞) truncados en T.

    T parte de `initial_cutoff` y se duplica hasta que la cola aporta menos
    de `tail_fraction` a todos los momentos, o hasta alcanzar `ceiling`.
    """
    cutoff = initial_cutoff if ceiling is None else min(initial_cutoff, ceiling)
    if not cutoff > start:
        raise ValueError(f"Corte inicial inválido: {cutoff}")
    values, errors, roots = integrate_abs_moments(f, start, cutoff, policy, orders, nonnegative)
    extensions = 0
    reached_ceiling = ceiling is not None and cutoff >= ceiling
    while not reached_ceiling:
        if extensions >= policy.max_extensions:
            raise ConvergenceError(
                f"La cola no decae tras {extensions} extensiones (corte {cutoff:.4g})",
                best_estimate=values[0],
                error_estimate=errors[0],
            )
        upper = 2 * cutoff if ceiling is None else min(2 * cutoff, ceiling)
        tail_values, tail_errors, tail_roots = integrate_abs_moments(f, cutoff, upper, policy, orders, nonnegative)
        values = [v + tv for v, tv in zip(values, tail_values)]
        errors = [e + te for e, te in zip(errors, tail_errors)]
        roots = roots + tail_roots
        cutoff = upper
        extensions += 1
        reached_ceiling = ceiling is not None and cutoff >= ceiling
        if all(tv <= policy.tail_fraction * v for tv, v in zip(tail_values, values)):
            break
        logger.debug(f"🔧 Extendiendo corte a {cutoff:.4g} (cola relativa {tail_values[0] / max(values[0], 1e-300):.2e})")

    return CutoffIntegrals(
        values=tuple(values),
        errors=tuple(errors),
        cutoff=cutoff,
        roots=tuple(roots),
        extensions=extensions,
        reached_ceiling=reached_ceiling,
    )


def nested_integrand(f: Callable[[float, float], float], x_bounds: Callable[[float], Tuple[float, float]],
                     policy: QuadraturePolicy = DEFAULT_POLICY) -> RealFunction:
    """
    g(t) = ∫ f(x, t) dx sobre x_bounds(t), memorizado por t para que los
    distintos momentos temporales reutilicen las integrales internas.
    """
    cache: Dict[float, float] = {}

    def inner(t: float) -> float:
        t = float(t)
        if t not in cache:
            low, high = x_bounds(t)
            cache[t], _ = integrate_adaptive(lambda x: float(f(x, t)), low, high, policy)
        return cache[t]

    return inner
