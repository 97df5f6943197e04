import argparse
import dataclasses
import logging
import os
import sys
from typing import List, Optional, Sequence

import pandas as pd

from src.errors import ResultsIOError, SimulatorError
from src.models.simulation import RateReport, SimConfig, SweepSection
from src.services import benchmark_service, config_service, results_service
from src.services.montecarlo_service import SimulationService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_IO = 4


class ConsoleUI:
    """
    INTERFAZ DE LÍNEA DE COMANDOS
    =============================

    Subcomandos: run, sweep, validate, emit-plots, benchmark. Cada comando
    devuelve el código de salida (0 éxito, 2 configuración, 3 ejecución, 4 E/S).
    """

    def __init__(self, stdout=None, stderr=None):
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.parser = self.build_parser()

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="mbsim", description="Simulador Monte Carlo de precodificación multicast multi-haz")
        subparsers = parser.add_subparsers(dest="command", required=True)

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--config", help="archivo INI de configuración")
        common.add_argument("--set", dest="overrides", action="append", default=[], metavar="CLAVE=VALOR",
                            help="override seccion.clave=valor (repetible)")
        common.add_argument("--seed", type=int, help="semilla maestra (sustituye simulation.seed)")
        common.add_argument("-v", "--verbose", action="count", default=0)

        simulate = argparse.ArgumentParser(add_help=False, parents=[common])
        simulate.add_argument("--out", default="results", help="directorio de salida")
        simulate.add_argument("--jobs", type=int, default=1, help="procesos en paralelo")
        simulate.add_argument("--detail", action="store_true", help="incluir resultados por cluster en el JSON")

        subparsers.add_parser("run", parents=[simulate], help="simular el punto base")
        sweep = subparsers.add_parser("sweep", parents=[simulate], help="simular todos los puntos del barrido")
        sweep.add_argument("--resume", action="store_true", help="omitir puntos ya escritos")
        subparsers.add_parser("validate", parents=[common], help="validar la configuración")

        plots = subparsers.add_parser("emit-plots", help="tablas CSV para gráficas")
        plots.add_argument("--out", default="results", help="directorio con los resultados")
        plots.add_argument("--plots", help="directorio de destino (por defecto <out>/plots)")
        plots.add_argument("-v", "--verbose", action="count", default=0)

        bench = subparsers.add_parser("benchmark", help="tiempos de clustering frente a N_U")
        bench.add_argument("--out", default="results", help="directorio de salida")
        bench.add_argument("--users", type=int, nargs="+", default=list(benchmark_service.DEFAULT_USER_COUNTS))
        bench.add_argument("--cluster-size", type=int, default=4)
        bench.add_argument("--repeats", type=int, default=3)
        bench.add_argument("--seed", type=int, default=2024)
        bench.add_argument("-v", "--verbose", action="count", default=0)
        return parser

    # ==================== SALIDA ====================

    def print_header(self, title: str):
        print("=" * 60, file=self.stdout)
        print(f" {title.center(58)} ", file=self.stdout)
        print("=" * 60, file=self.stdout)

    def print_reports(self, reports: Sequence[RateReport], title: str):
        self.print_header(title)
        if not reports:
            print("No hay resultados.", file=self.stdout)
        for i, report in enumerate(reports, 1):
            print(f"{i:2d}. {report}", file=self.stdout)
        print(file=self.stdout)

    def fail(self, message: str, code: int) -> int:
        print(f"❌ Error: {message}", file=self.stderr)
        return code

    # ==================== EJECUCIÓN ====================

    def run(self, argv: Optional[List[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        configure_logging(args.verbose)
        handlers = {
            "run": self.cmd_run,
            "sweep": self.cmd_sweep,
            "validate": self.cmd_validate,
            "emit-plots": self.cmd_emit_plots,
            "benchmark": self.cmd_benchmark,
        }
        try:
            return handlers[args.command](args)
        except SimulatorError as e:
            logger.debug("Fallo en %s", args.command, exc_info=True)
            return self.fail(str(e), e.exit_code)
        except OSError as e:
            return self.fail(str(e), EXIT_IO)

    def load_config(self, args) -> SimConfig:
        overrides = list(args.overrides)
        if getattr(args, "detail", False):
            overrides.append("simulation.detail=true")
        return config_service.parse_config(args.config, overrides, args.seed)

    def cmd_validate(self, args) -> int:
        config = self.load_config(args)
        SimulationService(config)
        self.print_header("✅ CONFIGURACIÓN VÁLIDA ✅")
        print(f"Puntos del barrido: {len(config.grid())}", file=self.stdout)
        print(f"Iteraciones por punto: {config.simulation.iterations}", file=self.stdout)
        return EXIT_OK

    def cmd_run(self, args) -> int:
        config = self.load_config(args)
        service = SimulationService(config)
        report = service.run_point(config.base_point(), args.jobs)
        results_service.write_point(args.out, report)
        results_service.write_results(args.out, _base_only(config), [report])
        self.print_reports([report], "📡 RESULTADO DEL PUNTO BASE 📡")
        return EXIT_OK

    def cmd_sweep(self, args) -> int:
        config = self.load_config(args)
        service = SimulationService(config)
        resumed: List[RateReport] = []

        def skip(point) -> bool:
            if args.resume and results_service.point_done(args.out, point):
                resumed.append(results_service.read_point(args.out, point))
                return True
            return False

        def save(report: RateReport):
            results_service.write_point(args.out, report)
            print(f"✅ {report}", file=self.stdout)

        self.print_header(f"📡 BARRIDO DE {len(config.grid())} PUNTOS 📡")
        reports, failures = service.sweep(args.jobs, skip=skip, on_report=save)
        results_service.write_results(args.out, config, resumed + reports, failures)
        if failures:
            for point, message in failures:
                print(f"❌ {point.key()}: {message}", file=self.stderr)
            return self.fail(f"{len(failures)} puntos fallaron", EXIT_RUNTIME)
        print(f"Resultados en {os.path.join(args.out, results_service.RESULTS_CSV)}", file=self.stdout)
        return EXIT_OK

    def cmd_emit_plots(self, args) -> int:
        written = results_service.emit_plots(args.out, args.plots)
        self.print_header("📊 TABLAS PARA GRÁFICAS 📊")
        for path in written:
            print(f"  {path}", file=self.stdout)
        return EXIT_OK

    def cmd_benchmark(self, args) -> int:
        rows = benchmark_service.benchmark_clustering(args.users, args.cluster_size, repeats=args.repeats,
                                                      seed=args.seed)
        try:
            os.makedirs(args.out, exist_ok=True)
            pd.DataFrame(rows).to_csv(os.path.join(args.out, "benchmark.csv"), index=False, lineterminator='\n')
        except OSError as e:
            raise ResultsIOError(f"no se puede escribir benchmark.csv: {e}") from e
        self.print_header("⏱️  COMPLEJIDAD DEL CLUSTERING ⏱️")
        for algorithm, slope in benchmark_service.loglog_slope(rows).items():
            print(f"{algorithm:10s} pendiente log-log: {slope:.2f}", file=self.stdout)
        return EXIT_OK


def _base_only(config: SimConfig) -> SimConfig:
    """Configuración sin ejes de barrido: ``run`` sólo simula el punto base"""
    return dataclasses.replace(config, sweep=SweepSection())


def configure_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
