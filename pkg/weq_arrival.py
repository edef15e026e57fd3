#!/usr/bin/env python3
"""
🚀 weq-arrival - Tiempos de Llegada de Partículas Idénticas
===========================================================

Front-end por lotes: regenera las distribuciones de llegada, las tablas
de separación, los barridos en masa (con y sin espín) y la suite de
verificación a partir de una configuración TOML plana.

Códigos de salida: 0 éxito, 1 error de validación, 2 fallo numérico,
3 verificación fallida.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from arrival_time import arrival_table, mass_sweep, separation_sweep
from physical_model import SimulationError, reference_time
from results_export import (
    mass_sweep_frame,
    normalization_header,
    separation_frame,
    spin_sweep_frame,
    write_table,
)
from simulation_config import (
    ConfigValidationError,
    RunConfig,
    load_run_config,
    parse_set_overrides,
    parse_value,
)
from spin_current import spin_mass_sweep
from verification import run_verification

# Configurar logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3


def _parse_float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Lista de números inválida: {text}") from e


def _output_path(cfg: RunConfig, default_name: str, suffix: str = "") -> str:
    if cfg.out == "-":
        return "-"
    base = Path(cfg.out or f"{default_name}.{cfg.output_format}")
    if not suffix:
        return str(base)
    return str(base.with_name(f"{base.stem}{suffix}{base.suffix}"))


def _metadata(cfg: RunConfig, subcommand: str, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    metadata = {"subcommand": subcommand}
    metadata.update(normalization_header(cfg.sigma0_m, cfg.constants))
    metadata.update(extra or {})
    metadata.update(cfg.header_items())
    return metadata


def _format_z(value: float) -> str:
    return f"{value:g}".replace("-", "m")


def cmd_arrival_dist(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Π·t_ref de BE, FD y MB sobre una grilla común; un archivo por z_ca"""
    if args.separation is not None:
        z_values = [cfg.z_cb + args.separation]
    else:
        z_values = list(cfg.z_ca_values)
    policy = cfg.quadrature_policy()
    for z_ca in z_values:
        config = cfg.two_body_config(z_ca=z_ca)
        table = arrival_table(config, cfg.detector_z_m, policy, cfg.constants)
        mean_times = table.attrs.get("mean_times", {})
        extra = {"z_ca_over_sigma0": float(z_ca)}
        extra.update({f"tau_{k}_over_tref": v for k, v in mean_times.items()})
        suffix = f"_zca{_format_z(z_ca)}" if len(z_values) > 1 else ""
        write_table(table, _output_path(cfg, "arrival_dist", suffix), "arrival-dist",
                    _metadata(cfg, "arrival-dist", extra), cfg.output_format)
        logger.info(f"📊 z_ca = {z_ca:g}σ₀: " + ", ".join(f"τ_{k.upper()} = {v:.4f}" for k, v in mean_times.items()))
    return EXIT_OK


def cmd_tables(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Filas (z_ca/σ₀, |⟨a|b⟩|, τ_BE, τ_FD, τ_MB) para evolución libre y caída libre"""
    scenarios = ["free", "fall"] if args.scenario == "both" else [args.scenario]
    policy = cfg.quadrature_policy()
    frames = []
    for scenario in scenarios:
        template = cfg.two_body_config(scenario=scenario)
        t_ref = reference_time(template.mass, template.max_sigma0, cfg.constants)
        rows = separation_sweep(
            template,
            [z * cfg.sigma0_m for z in cfg.z_ca_values],
            cfg.detector_z_m,
            policy,
            workers=cfg.workers,
            progress=not args.quiet,
            constants=cfg.constants,
        )
        frames.append(separation_frame(rows, scenario, cfg.sigma0_m, t_ref))
    table = pd.concat(frames, ignore_index=True)
    write_table(table, _output_path(cfg, "tables"), "tables", _metadata(cfg, "tables"), cfg.output_format)
    return EXIT_OK


def cmd_mass_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    """τ(m) para BE, FD, MB y paquetes aislados, con ⟨z⟩±(0), t± y Δz±(t±)"""
    masses = [m * cfg.constants.neutron_mass for m in cfg.mass_ratios()]
    rows = mass_sweep(cfg.two_body_config(), masses, cfg.detector_z_m, cfg.quadrature_policy(),
                      workers=cfg.workers, progress=not args.quiet, constants=cfg.constants)
    table = mass_sweep_frame(rows, cfg.sigma0_m, cfg.constants)
    write_table(table, _output_path(cfg, "mass_sweep"), "mass-sweep", _metadata(cfg, "mass-sweep"),
                cfg.output_format)
    failed = sum(1 for row in rows if row.error)
    if failed:
        logger.warning(f"⚠️ {failed} de {len(rows)} masas con errores (columna error)")
    return EXIT_OK


def cmd_spin_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    """τ_Sch, τ(ŝ) y su diferencia en función de la masa"""
    masses = [m * cfg.constants.neutron_mass for m in cfg.mass_ratios()]
    rows = spin_mass_sweep(cfg.spin_scenario(), masses, cfg.detector_z_m, cfg.quadrature_policy(),
                           workers=cfg.workers, progress=not args.quiet, constants=cfg.constants)
    table = spin_sweep_frame(rows, cfg.sigma0_m, cfg.constants)
    write_table(table, _output_path(cfg, "spin_sweep"), "spin-sweep", _metadata(cfg, "spin-sweep"),
                cfg.output_format)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Suite de invariantes; código 3 si alguna comprobación falla"""
    report = run_verification(quick=args.quick, inject_fault=args.inject_fault,
                              policy=cfg.quadrature_policy(), constants=cfg.constants)
    if cfg.out:
        write_table(report.to_frame(), _output_path(cfg, "verify"), "verify",
                    _metadata(cfg, "verify", {"quick": args.quick, "inject_fault": args.inject_fault}),
                    cfg.output_format)
    if not report.passed:
        for check in report.failures:
            logger.error(f"❌ {check.name}: {check.measured:.3e} > {check.tolerance:.1e} {check.detail}")
        return EXIT_VERIFICATION
    logger.info("✅ Todas las comprobaciones superadas")
    return EXIT_OK


COMMANDS = {
    "arrival-dist": cmd_arrival_dist,
    "tables": cmd_tables,
    "mass-sweep": cmd_mass_sweep,
    "spin-sweep": cmd_spin_sweep,
    "verify": cmd_verify,
}


class CommandLineParser(argparse.ArgumentParser):
    """argparse sin abreviaturas; los errores de uso se reportan como errores de validación"""

    def __init__(self, *args: Any, **kwargs: Any):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message: str):
        raise ConfigValidationError(f"Uso inválido: {message}")


def parse_key_value_options(tokens: List[str]) -> Dict[str, Any]:
    """Convierte `--clave valor` o `--clave=valor` en overrides; las claves se validan con el schema"""
    overrides: Dict[str, Any] = {}
    index = 0
    while index < len(tokens):
        token = tokens[index]
        if not token.startswith("--") or len(token) <= 2:
            raise ConfigValidationError(f"Argumento inesperado: {token}")
        name, has_value, raw = token[2:].partition("=")
        if not has_value:
            if index + 1 >= len(tokens) or tokens[index + 1].startswith("--"):
                raise ConfigValidationError(f"Falta el valor de --{name}", key=name.replace("-", "_"))
            raw = tokens[index + 1]
            index += 1
        overrides[name.replace("-", "_")] = parse_value(raw)
        index += 1
    return overrides


def build_parser() -> argparse.ArgumentParser:
    common = CommandLineParser(add_help=False)
    common.add_argument("--config", "-c", type=str, help="Archivo TOML plano con la configuración")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="CLAVE=VALOR",
                        help="Override de una clave (repetible)")
    common.add_argument("--out", "-o", type=str, help="Archivo de salida ('-' para stdout)")
    common.add_argument("--format", dest="output_format", choices=["csv", "json"], help="Formato de salida")
    common.add_argument("--statistics", choices=["mb", "be", "fd"], help="Estadística de la configuración")
    common.add_argument("--masses", type=_parse_float_list, help="Masas en m_n separadas por comas")
    common.add_argument("--workers", type=int, help="Hilos para los barridos")
    common.add_argument("--verbose", "-v", action="store_true", help="Logging detallado")
    common.add_argument("--quiet", "-q", action="store_true", help="Sólo advertencias, sin barra de progreso")

    parser = CommandLineParser(
        prog="weq-arrival",
        usage="weq-arrival <subcomando> [--config ARCHIVO] [--clave valor ...]",
        description="Tiempos de llegada de dos paquetes gaussianos idénticos (MB, BE, FD)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Ejemplos de uso:
  python weq_arrival.py tables --out tablas.csv
  python weq_arrival.py tables --scenario free --z_ca_values [10,12] --mass_ratio 2
  python weq_arrival.py arrival-dist --set scenario=free --out dist.csv
  python weq_arrival.py arrival-dist --statistics mb --separation 50 --out -
  python weq_arrival.py mass-sweep --masses 0.5,5,50,100 --workers 4
  python weq_arrival.py spin-sweep --config corrida.toml
  python weq_arrival.py verify --quick
        """,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    arrival = subparsers.add_parser("arrival-dist", parents=[common], help="Distribución Π(Z,t)")
    arrival.add_argument("--separation", type=float, help="z_ca − z_cb en σ₀ (un único archivo)")
    tables = subparsers.add_parser("tables", parents=[common], help="Tablas de separación")
    tables.add_argument("--scenario", choices=["free", "fall", "both"], default="both")
    subparsers.add_parser("mass-sweep", parents=[common], help="Barrido en masa")
    subparsers.add_parser("spin-sweep", parents=[common], help="Barrido en masa con espín")
    verify = subparsers.add_parser("verify", parents=[common], help="Suite de verificación")
    verify.add_argument("--quick", action="store_true", help="Sólo comprobaciones de formas cerradas")
    verify.add_argument("--inject-fault", action="store_true", help="Perturba N± un 1%% (control negativo)")
    return parser


def _cli_overrides(args: argparse.Namespace, extra: Optional[List[str]] = None) -> Dict[str, Any]:
    """--set, luego `--clave valor` libres y por último los flags dedicados"""
    overrides = parse_set_overrides(args.overrides)
    overrides.update(parse_key_value_options(extra or []))
    for key in ("out", "output_format", "statistics", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.masses is not None:
        overrides["masses"] = args.masses
    return overrides


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")

    try:
        args, extra = parser.parse_known_args(argv)
        overrides = _cli_overrides(args, extra)
    except ConfigValidationError as e:
        logger.error(f"❌ {e}")
        return EXIT_VALIDATION

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    try:
        cfg = load_run_config(args.config, overrides)
        logger.info(f"🔧 {args.command}: σ₀ = {cfg.sigma0_m:g} m, m = {cfg.mass_ratio:g} m_n, g = {cfg.g:g} m/s²")
        return COMMANDS[args.command](cfg, args)
    except (ConfigValidationError, ValueError) as e:
        logger.error(f"❌ Configuración inválida: {e}")
        return EXIT_VALIDATION
    except SimulationError as e:
        logger.error(f"❌ Fallo numérico: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
