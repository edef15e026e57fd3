#!/usr/bin/env python3
"""
📊 Exportación de Resultados
============================

Tablas adimensionales (divididas por t_ref, σ₀ o m_n) en CSV con cabecera
de metadatos `#`, o en JSON. La salida es determinista: sin marcas de
tiempo y con los parámetros en orden fijo.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import pandas as pd

from arrival_time import MassSweepRow, SeparationRow
from physical_model import DEFAULT_CONSTANTS, PhysicalConstants, __version__, reference_time
from spin_current import SpinSweepRow

# Configurar logging
logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"

MASS_SWEEP_COLUMNS = [
    "m_over_mn", "tau_be", "tau_fd", "tau_mb", "tau_a", "tau_b", "tau_mb_from_packets",
    "mean_z_be0_over_sigma0", "mean_z_fd0_over_sigma0", "printed_mean_z_be0_over_sigma0",
    "printed_mean_z_fd0_over_sigma0", "t_plus", "t_minus",
    "spread_be_over_sigma0", "spread_fd_over_sigma0", "error",
]
SEPARATION_COLUMNS = ["scenario", "z_ca_over_sigma0", "overlap", "tau_be", "tau_fd", "tau_mb", "error"]
SPIN_COLUMNS = ["m_over_mn", "tau_sch", "tau_spin", "delta", "error"]


def normalization_header(sigma0: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> Dict[str, Any]:
    """Constantes de adimensionalización: t_ref de m_n, σ₀ y m_n"""
    return {
        "version": __version__,
        "t_ref_s": reference_time(constants.neutron_mass, sigma0, constants),
        "sigma0_m": sigma0,
        "m_n_kg": constants.neutron_mass,
        "hbar_Js": constants.hbar,
    }


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return str(value)


def format_header(title: str, metadata: Mapping[str, Any]) -> List[str]:
    """Líneas `# clave: valor` en el orden recibido"""
    lines = [f"# {title}"]
    lines.extend(f"# {key}: {_format_value(value)}" for key, value in metadata.items())
    return lines


def render_table(frame: pd.DataFrame, title: str, metadata: Mapping[str, Any], output_format: str = "csv") -> str:
    if output_format == "csv":
        body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return "\n".join(format_header(title, metadata)) + "\n" + body
    if output_format == "json":
        rows = json.loads(frame.to_json(orient="records", double_precision=10))
        payload = {"title": title, "metadata": {k: _jsonable(v) for k, v in metadata.items()}, "rows": rows}
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"Formato de salida desconocido: {output_format}")


def _jsonable(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def write_table(frame: pd.DataFrame, path: str, title: str, metadata: Mapping[str, Any],
                output_format: str = "csv") -> Optional[Path]:
    """Escribe la tabla; `-` escribe en stdout y devuelve None"""
    text = render_table(frame, title, metadata, output_format)
    if path == "-":
        sys.stdout.write(text)
        return None
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info(f"✅ Tabla guardada en {target} ({len(frame)} filas)")
    return target


def separation_frame(rows: Iterable[SeparationRow], scenario: str, sigma0: float, t_ref: float) -> pd.DataFrame:
    records = [
        {
            "scenario": scenario,
            "z_ca_over_sigma0": row.z_ca / sigma0,
            "overlap": row.overlap,
            "tau_be": row.tau_be / t_ref,
            "tau_fd": row.tau_fd / t_ref,
            "tau_mb": row.tau_mb / t_ref,
            "error": row.error,
        }
        for row in rows
    ]
    return pd.DataFrame(records, columns=SEPARATION_COLUMNS)


def mass_sweep_frame(rows: Sequence[MassSweepRow], sigma0: float,
                     constants: PhysicalConstants = DEFAULT_CONSTANTS) -> pd.DataFrame:
    """Tiempos en unidades de t_ref(m_n); posiciones en σ₀"""
    t_ref = reference_time(constants.neutron_mass, sigma0, constants)
    records = [
        {
            "m_over_mn": row.mass / constants.neutron_mass,
            "tau_be": row.tau_be / t_ref,
            "tau_fd": row.tau_fd / t_ref,
            "tau_mb": row.tau_mb / t_ref,
            "tau_a": row.tau_a / t_ref,
            "tau_b": row.tau_b / t_ref,
            "tau_mb_from_packets": row.tau_mb_from_packets / t_ref,
            "mean_z_be0_over_sigma0": row.mean_position_be0 / sigma0,
            "mean_z_fd0_over_sigma0": row.mean_position_fd0 / sigma0,
            "printed_mean_z_be0_over_sigma0": row.printed_mean_position_be0 / sigma0,
            "printed_mean_z_fd0_over_sigma0": row.printed_mean_position_fd0 / sigma0,
            "t_plus": row.t_plus / t_ref,
            "t_minus": row.t_minus / t_ref,
            "spread_be_over_sigma0": row.spread_be / sigma0,
            "spread_fd_over_sigma0": row.spread_fd / sigma0,
            "error": row.error,
        }
        for row in rows
    ]
    return pd.DataFrame(records, columns=MASS_SWEEP_COLUMNS)


def spin_sweep_frame(rows: Sequence[SpinSweepRow], sigma0: float,
                     constants: PhysicalConstants = DEFAULT_CONSTANTS) -> pd.DataFrame:
    t_ref = reference_time(constants.neutron_mass, sigma0, constants)
    records = [
        {
            "m_over_mn": row.mass / constants.neutron_mass,
            "tau_sch": row.tau_sch / t_ref,
            "tau_spin": row.tau_spin / t_ref,
            "delta": row.delta / t_ref,
            "error": row.error,
        }
        for row in rows
    ]
    return pd.DataFrame(records, columns=SPIN_COLUMNS)


def read_table(path: str) -> pd.DataFrame:
    """Lee un CSV exportado ignorando la cabecera `#`"""
    return pd.read_csv(path, comment="#", keep_default_na=True)
