#!/usr/bin/env python3
"""
🔧 Configuración de Simulación
==============================

Configuración centralizada de las corridas: valores por defecto con los
parámetros publicados, archivo TOML plano, variables de entorno WEQ_* y
overrides de línea de comandos, validados con JSON Schema.

Precedencia: defaults < archivo < entorno < línea de comandos.

Unidades de las claves: longitudes en σ₀, números de onda en 1/σ₀, masas en
m_n, g en m/s², tiempos en t_ref.
"""

from __future__ import annotations

import logging
import os
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import toml
from dotenv import load_dotenv
from jsonschema import Draft202012Validator

from physical_model import (
    DEFAULT_CONSTANTS,
    FREE_EVOLUTION_KICK,
    GaussianPacketSpec,
    PhysicalConstants,
    Scenario,
    StatisticsKind,
    TwoBodyConfig,
)
from quadrature import QuadraturePolicy
from spin_current import SpinScenario

# Configurar logging
logger = logging.getLogger(__name__)

ENV_PREFIX = "WEQ_"

# Parámetros publicados (σ₀ = 10 µm, z_cb = 8σ₀, m = m_n, g = 10, Z = 0)
SIMULATION_DEFAULTS: Dict[str, Any] = {
    "sigma0_m": 1e-5,
    "z_ca": 10.0,
    "z_cb": 8.0,
    "free_k_a": FREE_EVOLUTION_KICK,
    "free_k_b": FREE_EVOLUTION_KICK,
    "fall_k_a": 0.0,
    "fall_k_b": 0.0,
    "sigma_ratio_b": 1.0,
    "mass_ratio": 1.0,
    "g": 10.0,
    "scenario": "fall",
    "statistics": "be",
    "detector_z": 0.0,
    "z_ca_values": [10.0, 11.0, 12.0, 13.0],
    "mass_min": 0.25,
    "mass_max": 100.0,
    "mass_points": 40,
    "masses": [],
    "spin_axis": [0.0, 1.0, 0.0],
    "spin_z_c": 8.0,
    "spin_k0": 0.0,
    "abs_tol": 1e-9,
    "rel_tol": 1e-9,
    "max_subdivisions": 200,
    "initial_cutoff_factor": 4.0,
    "tail_fraction": 1e-8,
    "scan_points": 1024,
    "free_window": 15.0,
    "sample_points": 2001,
    "workers": 1,
    "output_format": "csv",
    "out": "",
}

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_FINITE = {"type": "number"}

RUN_CONFIG_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "sigma0_m": _POSITIVE,
        "z_ca": _FINITE,
        "z_cb": _FINITE,
        "free_k_a": _FINITE,
        "free_k_b": _FINITE,
        "fall_k_a": _FINITE,
        "fall_k_b": _FINITE,
        "sigma_ratio_b": _POSITIVE,
        "mass_ratio": _POSITIVE,
        "g": _POSITIVE,
        "scenario": {"enum": ["free", "fall"]},
        "statistics": {"enum": ["mb", "be", "fd"]},
        "detector_z": _FINITE,
        "z_ca_values": {"type": "array", "items": _FINITE, "minItems": 1},
        "mass_min": _POSITIVE,
        "mass_max": _POSITIVE,
        "mass_points": {"type": "integer", "minimum": 1},
        "masses": {"type": "array", "items": _POSITIVE},
        "spin_axis": {"type": "array", "items": _FINITE, "minItems": 3, "maxItems": 3},
        "spin_z_c": _FINITE,
        "spin_k0": _FINITE,
        "abs_tol": _POSITIVE,
        "rel_tol": _POSITIVE,
        "max_subdivisions": {"type": "integer", "minimum": 16},
        "initial_cutoff_factor": _POSITIVE,
        "tail_fraction": _POSITIVE,
        "scan_points": {"type": "integer", "minimum": 32},
        "free_window": _POSITIVE,
        "sample_points": {"type": "integer", "minimum": 3},
        "workers": {"type": "integer", "minimum": 1},
        "output_format": {"enum": ["csv", "json"]},
        "out": {"type": "string"},
    },
}


class ConfigValidationError(ValueError):
    """Configuración inválida; indica la clave y, si se conoce, la línea del archivo"""

    def __init__(self, message: str, key: Optional[str] = None, source: Optional[str] = None,
                 line: Optional[int] = None):
        location = ""
        if source:
            location = f" ({source}" + (f", línea {line}" if line else "") + ")"
        super().__init__(f"{message}{location}")
        self.key = key
        self.source = source
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    """Parámetros de una corrida ya validados"""
    sigma0_m: float
    z_ca: float
    z_cb: float
    free_k_a: float
    free_k_b: float
    fall_k_a: float
    fall_k_b: float
    sigma_ratio_b: float
    mass_ratio: float
    g: float
    scenario: str
    statistics: str
    detector_z: float
    z_ca_values: Tuple[float, ...]
    mass_min: float
    mass_max: float
    mass_points: int
    masses: Tuple[float, ...]
    spin_axis: Tuple[float, float, float]
    spin_z_c: float
    spin_k0: float
    abs_tol: float
    rel_tol: float
    max_subdivisions: int
    initial_cutoff_factor: float
    tail_fraction: float
    scan_points: int
    free_window: float
    sample_points: int
    workers: int
    output_format: str
    out: str
    constants: PhysicalConstants = field(default=DEFAULT_CONSTANTS, compare=False)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any],
                     constants: PhysicalConstants = DEFAULT_CONSTANTS) -> "RunConfig":
        data = dict(values)
        for key in ("z_ca_values", "masses", "spin_axis"):
            data[key] = tuple(float(v) for v in data[key])
        for key in ("mass_points", "max_subdivisions", "scan_points", "sample_points", "workers"):
            data[key] = int(data[key])
        return cls(constants=constants, **data)

    @property
    def mass(self) -> float:
        """Masa en kg"""
        return self.mass_ratio * self.constants.neutron_mass

    @property
    def detector_z_m(self) -> float:
        return self.detector_z * self.sigma0_m

    def scenario_object(self, kind: Optional[str] = None) -> Scenario:
        kind = kind or self.scenario
        return Scenario.fall(self.g) if kind == "fall" else Scenario.free()

    def kicks(self, kind: Optional[str] = None) -> Tuple[float, float]:
        """(k_a, k_b) en 1/σ₀ del escenario: libre usa −2/σ₀, caída parte del reposo"""
        kind = kind or self.scenario
        if kind == "free":
            return self.free_k_a, self.free_k_b
        return self.fall_k_a, self.fall_k_b

    def two_body_config(self, z_ca: Optional[float] = None, statistics: Optional[str] = None,
                        scenario: Optional[str] = None) -> TwoBodyConfig:
        """TwoBodyConfig en SI; z_ca en unidades de σ₀"""
        s0 = self.sigma0_m
        z_ca = self.z_ca if z_ca is None else z_ca
        k_a, k_b = self.kicks(scenario)
        packet_a = GaussianPacketSpec(s0, z_ca * s0, k_a / s0)
        packet_b = GaussianPacketSpec(s0 * self.sigma_ratio_b, self.z_cb * s0, k_b / s0)
        return TwoBodyConfig(
            packet_a,
            packet_b,
            StatisticsKind(statistics or self.statistics),
            self.scenario_object(scenario),
            self.mass,
        )

    def spin_scenario(self) -> SpinScenario:
        return SpinScenario(
            sigma0=self.sigma0_m,
            z_c=self.spin_z_c * self.sigma0_m,
            k0=self.spin_k0 / self.sigma0_m,
            mass=self.mass,
            g=self.g,
            spin_axis=tuple(self.spin_axis),
        )

    def quadrature_policy(self) -> QuadraturePolicy:
        return QuadraturePolicy(
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            max_subdivisions=self.max_subdivisions,
            initial_cutoff_factor=self.initial_cutoff_factor,
            tail_fraction=self.tail_fraction,
            scan_points=self.scan_points,
            free_window=self.free_window,
            sample_points=self.sample_points,
        )

    def mass_ratios(self) -> List[float]:
        """Masas explícitas si existen; si no, grilla logarítmica [mass_min, mass_max]"""
        if self.masses:
            return list(self.masses)
        return [float(m) for m in np.geomspace(self.mass_min, self.mass_max, self.mass_points)]

    def header_items(self) -> Dict[str, Any]:
        """Parámetros que se repiten en la cabecera de los archivos de salida"""
        items = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("constants", "out")}
        items.update({f"const_{k}": v for k, v in asdict(self.constants).items()})
        return items


def get_simulation_defaults() -> Dict[str, Any]:
    """Copia de los valores por defecto"""
    return {k: list(v) if isinstance(v, list) else v for k, v in SIMULATION_DEFAULTS.items()}


def _line_of(text: Optional[str], key: str) -> Optional[int]:
    if not text:
        return None
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*=")
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return number
    return None


def parse_value(raw: str) -> Any:
    """Interpreta un valor escrito en sintaxis TOML; si no lo es, lo devuelve como texto"""
    try:
        return toml.loads(f"value = {raw}")["value"]
    except toml.TomlDecodeError:
        return raw.strip()


def load_config_file(path: str) -> Tuple[Dict[str, Any], str]:
    """Lee un archivo TOML plano; devuelve (valores, texto)"""
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigValidationError(f"No existe el archivo de configuración {path}", source=path)
    text = config_path.read_text(encoding="utf-8")
    try:
        values = toml.loads(text)
    except toml.TomlDecodeError as e:
        raise ConfigValidationError(f"TOML inválido: {e.msg}", source=path, line=e.lineno) from e
    for key, value in values.items():
        if isinstance(value, dict):
            raise ConfigValidationError(f"Se esperaba un archivo plano; la tabla [{key}] no está permitida",
                                        key=key, source=path, line=_line_of(text, key))
    logger.info(f"🔧 Configuración cargada desde {path} ({len(values)} claves)")
    return values, text


def get_env_overrides(environ: Optional[Mapping[str, str]] = None, dotenv_path: Optional[str] = None) -> Dict[str, Any]:
    """Claves WEQ_<CLAVE> del entorno (carga .env si existe)"""
    if environ is None:
        load_dotenv(dotenv_path, override=False)
        environ = os.environ
    overrides = {}
    for name, raw in environ.items():
        if name.startswith(ENV_PREFIX):
            overrides[name[len(ENV_PREFIX):].lower()] = parse_value(raw)
    if overrides:
        logger.debug(f"🔧 Overrides de entorno: {sorted(overrides)}")
    return overrides


def parse_set_overrides(assignments: Sequence[str]) -> Dict[str, Any]:
    """Convierte ['clave=valor', ...] en un diccionario"""
    overrides = {}
    for assignment in assignments:
        if "=" not in assignment:
            raise ConfigValidationError(f"Override sin '=': {assignment!r}", source="--set")
        key, raw = assignment.split("=", 1)
        overrides[key.strip()] = parse_value(raw)
    return overrides


def _coerce_numbers(values: Dict[str, Any]) -> Dict[str, Any]:
    # Enteros donde el esquema pide número (p. ej. z_ca = 10)
    coerced = {}
    for key, value in values.items():
        kind = RUN_CONFIG_SCHEMA["properties"].get(key, {}).get("type")
        if kind == "number" and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        coerced[key] = value
    return coerced


def validate_config(values: Mapping[str, Any], sources: Optional[Mapping[str, str]] = None,
                    texts: Optional[Mapping[str, str]] = None) -> None:
    """Valida el diccionario fusionado contra el esquema y reglas cruzadas"""
    sources = sources or {}
    texts = texts or {}
    validator = Draft202012Validator(RUN_CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(dict(values)), key=lambda e: list(e.absolute_path))
    if errors:
        error = errors[0]
        if error.validator == "additionalProperties":
            unknown = sorted(set(values) - set(RUN_CONFIG_SCHEMA["properties"]))
            key = unknown[0] if unknown else None
            message = f"Clave desconocida: {key}"
        else:
            key = str(error.absolute_path[0]) if error.absolute_path else None
            message = f"Valor inválido para {key}: {error.message}"
        source = sources.get(key) if key else None
        raise ConfigValidationError(message, key=key, source=source, line=_line_of(texts.get(source), key))

    if values["mass_min"] >= values["mass_max"] and not values["masses"]:
        raise ConfigValidationError("mass_min debe ser menor que mass_max", key="mass_min",
                                    source=sources.get("mass_min"))
    masses = list(values["masses"])
    if any(b < a for a, b in zip(masses, masses[1:])):
        raise ConfigValidationError("masses debe estar ordenada de forma creciente", key="masses",
                                    source=sources.get("masses"))
    axis = np.asarray(values["spin_axis"], dtype=float)
    if abs(float(np.linalg.norm(axis)) - 1) > 1e-12:
        raise ConfigValidationError("spin_axis debe ser un vector unitario", key="spin_axis",
                                    source=sources.get("spin_axis"))


def load_run_config(config_path: Optional[str] = None, cli_overrides: Optional[Mapping[str, Any]] = None,
                    environ: Optional[Mapping[str, str]] = None, use_env: bool = True,
                    constants: PhysicalConstants = DEFAULT_CONSTANTS) -> RunConfig:
    """
    Fusiona defaults, archivo, entorno y línea de comandos y valida el resultado.

    Raises:
        ConfigValidationError: clave desconocida, tipo o rango inválido
    """
    merged = get_simulation_defaults()
    sources = {key: "defaults" for key in merged}
    texts: Dict[str, str] = {}

    layers: List[Tuple[str, Mapping[str, Any]]] = []
    if config_path:
        file_values, text = load_config_file(config_path)
        texts[config_path] = text
        layers.append((config_path, file_values))
    if use_env:
        layers.append(("entorno", get_env_overrides(environ)))
    if cli_overrides:
        layers.append(("línea de comandos", cli_overrides))

    for source, layer in layers:
        for key, value in layer.items():
            merged[key] = value
            sources[key] = source

    merged = _coerce_numbers(merged)
    validate_config(merged, sources, texts)
    try:
        config = RunConfig.from_mapping(merged, constants)
        # Los constructores de dominio validan rangos físicos adicionales
        config.two_body_config()
        config.spin_scenario()
        config.quadrature_policy()
    except ValueError as e:
        raise ConfigValidationError(f"Parámetros físicos inválidos: {e}") from e
    logger.debug(f"🔧 Configuración final: {merged}")
    return config
