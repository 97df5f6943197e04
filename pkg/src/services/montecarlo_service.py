"""
Servicio Monte Carlo
====================

Orquesta cada iteración: despliegue → canales → clustering por haz →
planificación de tramas → H̃, W y SINR por trama → resultados por cluster.
Agrega las métricas (η̄, CDF de γ̃ y de σ_Δγ, histograma de tamaños) y
ejecuta barridos, opcionalmente en paralelo.

Semillas: cada iteración usa ``SeedSequence(seed, spawn_key=(índices del punto, iteración, flujo))``
con flujos separados para despliegue, canal, clustering (uno por haz) y
planificación, de modo que el resultado no depende del número de procesos.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import SimulatorError
from src.models.beam import BeamLayout
from src.models.channel import GAIN_TABLE, AntennaPattern
from src.models.link import ClusterLinkResult, ModCodTable
from src.models.partition import FeatureSpace, Partition
from src.models.precoding import PowerModel
from src.models.simulation import FrameEntry, FrameSchedule, GridPoint, RateReport, SimConfig
from src.services import channel_service, clustering_service, geometry_service, link_service, precoding_service

logger = logging.getLogger(__name__)

STREAM_DEPLOYMENT = 0
STREAM_CHANNEL = 1
STREAM_CLUSTERING = 2
STREAM_SCHEDULE = 3


@dataclass
class IterationResult:
    iteration: int
    results: List[ClusterLinkResult]
    partitions: Dict[int, Partition] = field(default_factory=dict)
    users_per_beam: Dict[int, int] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)


# ==================== RECURSOS COMPARTIDOS ====================

def build_layout(config: SimConfig) -> BeamLayout:
    section = config.layout
    if section.source == "file":
        return geometry_service.load_beam_layout(section.path, section.satellite_longitude_deg)
    return geometry_service.generate_hex_layout(section.n_rings, section.beam_radius_km,
                                                (section.center_lat_deg, section.center_lon_deg),
                                                section.satellite_longitude_deg)


def build_pattern(config: SimConfig) -> AntennaPattern:
    section = config.antenna
    tables = channel_service.load_gain_table(section.gain_table) if section.mode == GAIN_TABLE else {}
    return AntennaPattern(section.mode, section.peak_gain_dbi, section.edge_taper_db, tables)


def build_modcod(config: SimConfig) -> ModCodTable:
    if config.rate.modcod_table:
        return link_service.load_modcod_table(config.rate.modcod_table)
    return link_service.default_modcod_table()


def build_power(config: SimConfig, n_beams: int) -> PowerModel:
    return PowerModel(config.power.psat, n_beams, config.power.power_split, config.power.per_stream_power_w)


def seed_sequence(master_seed: int, iteration: int, *stream: int,
                  point_key: Tuple[int, ...] = ()) -> np.random.SeedSequence:
    """Secuencia de semillas estable para (semilla maestra, punto, iteración, flujo, haz)"""
    return np.random.SeedSequence(master_seed, spawn_key=tuple(point_key) + (iteration,) + tuple(stream))


def make_rng(master_seed: int, iteration: int, *stream: int, point_key: Tuple[int, ...] = ()) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(master_seed, iteration, *stream, point_key=point_key))


# ==================== PLANIFICACIÓN ====================

def build_schedule(partitions: Dict[int, Partition], rng: np.random.Generator) -> FrameSchedule:
    """
    Trama c: cada haz sirve su c-ésimo cluster (orden de creación). Cuando un
    haz agotó sus clusters repite uno ya servido, elegido uniformemente.
    """
    counts = {beam_id: partition.n_clusters for beam_id, partition in sorted(partitions.items())}
    if any(count == 0 for count in counts.values()):
        raise SimulatorError("todos los haces planificados necesitan al menos un cluster")
    n_frames = max(counts.values(), default=0)
    frames = []
    for c in range(n_frames):
        frame = {}
        for beam_id, count in counts.items():
            if c < count:
                frame[beam_id] = FrameEntry(c)
            else:
                frame[beam_id] = FrameEntry(int(rng.integers(count)), reserve=True)
        frames.append(frame)
    return FrameSchedule(frames)


# ==================== ITERACIÓN ====================

class SimulationService:
    """
    SERVICIO PRINCIPAL DE SIMULACIÓN
    ================================

    Mantiene los recursos inmutables de una configuración (layout, patrón de
    antena, tabla ModCod) y ejecuta iteraciones, puntos y barridos.
    """

    def __init__(self, config: SimConfig):
        self.config = config.validate()
        self.layout = build_layout(self.config)
        self.pattern = build_pattern(self.config)
        self.modcod = build_modcod(self.config)

    def run_iteration(self, iteration: int, point: Optional[GridPoint] = None,
                      point_key: Optional[Tuple[int, ...]] = None) -> IterationResult:
        """
        Una gota Monte Carlo completa para el punto dado (o el punto base).
        Sin ``point_key`` se usa la clave del propio punto.
        Complejidad: dominada por el clustering, O(N_U²/K) por haz
        """
        config = self.config.at(point) if point is not None else self.config
        if point_key is None:
            point_key = self.point_key(point or self.config.base_point())
        seed = config.simulation.seed
        layout = self.layout
        n_beams = layout.n_beams

        deployment = geometry_service.deploy_users(
            layout, config.deployment.density, make_rng(seed, iteration, STREAM_DEPLOYMENT, point_key=point_key),
            config.deployment.rounding)
        channels = channel_service.synthesize_channel(
            deployment, layout, self.pattern, config.link,
            make_rng(seed, iteration, STREAM_CHANNEL, point_key=point_key), config.channel.phase_per)
        h_all = channel_service.stack_channels(channels)
        all_users = deployment.all_users()

        rows_by_beam: Dict[int, np.ndarray] = {}
        offset = 0
        for beam_id in sorted(deployment.users_by_beam):
            count = deployment.count(beam_id)
            rows_by_beam[beam_id] = np.arange(offset, offset + count)
            offset += count

        space = FeatureSpace.for_metric(config.clustering.metric, n_beams)
        partitions: Dict[int, Partition] = {}
        for beam_id in deployment.active_beams():
            rows = rows_by_beam[beam_id]
            features = clustering_service.feature_vectors(
                deployment.users(beam_id), channels[rows[0]:rows[-1] + 1], space)
            if config.clustering.feature_scaling == "standard":
                features = clustering_service.standardize(features)
            partitions[beam_id] = clustering_service.build_partition(
                config.clustering.algorithm, features, config.clustering.cluster_size,
                make_rng(seed, iteration, STREAM_CLUSTERING, beam_id, point_key=point_key),
                beam_id, config.clustering.tol, config.clustering.max_iter)

        schedule = build_schedule(partitions, make_rng(seed, iteration, STREAM_SCHEDULE, point_key=point_key))
        power = build_power(config, n_beams)
        p = power.per_stream_power
        results: List[ClusterLinkResult] = []
        for frame_index, frame in enumerate(schedule.frames):
            rows = [None] * n_beams
            cluster_ids: List[Optional[int]] = [None] * n_beams
            members: Dict[int, np.ndarray] = {}
            for beam_id, entry in frame.items():
                members[beam_id] = rows_by_beam[beam_id][list(partitions[beam_id].clusters[entry.cluster_index])]
                rows[beam_id - 1] = precoding_service.equivalent_channel(h_all[members[beam_id]])
                cluster_ids[beam_id - 1] = entry.cluster_index
            h_eq = precoding_service.equivalent_channel_matrix(rows, n_beams, cluster_ids)
            w = precoding_service.frame_precoder(h_eq, power, config.precoding.precoder)
            for beam_id, entry in sorted(frame.items()):
                member_rows = members[beam_id]
                sinrs = precoding_service.sinr_vector(h_all[member_rows], w, [beam_id - 1] * member_rows.size, p)
                result = link_service.cluster_link_result(sinrs, self.modcod, beam_id, entry.cluster_index,
                                                          config.rate.model)
                results.append(result.with_context(iteration, frame_index, entry.reserve,
                                                   tuple(all_users[r].user_id for r in member_rows)))

        return IterationResult(
            iteration=iteration,
            results=results,
            partitions=partitions,
            users_per_beam={beam_id: deployment.count(beam_id) for beam_id in sorted(deployment.users_by_beam)},
            warnings=list(deployment.warnings),
        )

    # ==================== PUNTOS Y BARRIDOS ====================

    def point_key(self, point: GridPoint) -> Tuple[int, ...]:
        """
        Índice del valor del punto en cada eje del barrido. Añadir valores al
        final de un eje no cambia los flujos de los puntos existentes. Con
        ``common_random_numbers`` todos los puntos comparten los mismos flujos.
        """
        if self.config.simulation.common_random_numbers:
            return ()
        return tuple(axis.index(value) if value in axis else len(axis)
                     for axis, value in zip(self.config.axes(), point.values()))

    def run_point(self, point: Optional[GridPoint] = None, jobs: int = 1,
                  executor: Optional[ProcessPoolExecutor] = None) -> RateReport:
        """
        Simular un punto. Con ``executor`` las iteraciones se reparten en ese
        pool; si no, se crea uno propio cuando ``jobs > 1``.
        """
        point = point or self.config.base_point()
        iterations = range(self.config.simulation.iterations)
        logger.info("Punto %s: %d iteraciones", point.key(), len(iterations))
        units = [(self.config, point, i, self.point_key(point)) for i in iterations]
        if executor is not None:
            outcomes = list(executor.map(_run_unit, units))
        elif jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(_run_unit, units))
        else:
            outcomes = [self.run_iteration(i, unit_point, key).results for _, unit_point, i, key in units]
        results = [result for outcome in outcomes for result in outcome]
        report = aggregate(results, point, len(iterations), self.config.simulation.include_reserve,
                           self.config.simulation.detail)
        logger.info("Punto %s terminado: η̄=%.4f bit/s/Hz", point.key(), report.avg_rate)
        return report

    def sweep(self, jobs: int = 1, skip: Optional[Callable[[GridPoint], bool]] = None,
              on_report: Optional[Callable[[RateReport], None]] = None
              ) -> Tuple[List[RateReport], List[Tuple[GridPoint, str]]]:
        """
        Ejecutar todos los puntos del barrido. Los fallos por punto se acumulan
        y se devuelven al final; el resto de puntos se sigue ejecutando.
        """
        reports: List[RateReport] = []
        failures: List[Tuple[GridPoint, str]] = []
        executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
        try:
            for point in self.config.grid():
                if skip is not None and skip(point):
                    logger.info("Punto %s ya completado, se omite", point.key())
                    continue
                try:
                    report = self.run_point(point, jobs, executor)
                except SimulatorError as e:
                    logger.error("Punto %s falló: %s", point.key(), e)
                    failures.append((point, str(e)))
                    continue
                reports.append(report)
                if on_report is not None:
                    on_report(report)
        finally:
            if executor is not None:
                executor.shutdown()
        return reports, failures


def _run_unit(args) -> List[ClusterLinkResult]:
    config, point, iteration, key = args
    return _cached_service(config).run_iteration(iteration, point, key).results


_worker_service: Optional[SimulationService] = None


def _cached_service(config: SimConfig) -> SimulationService:
    """Un servicio por proceso trabajador; se reconstruye sólo si cambia la configuración"""
    global _worker_service
    if _worker_service is None or _worker_service.config != config:
        _worker_service = SimulationService(config)
    return _worker_service


def run_iteration(config: SimConfig, iteration: int, point: Optional[GridPoint] = None) -> List[ClusterLinkResult]:
    """Resultados por cluster de una iteración (atajo sin servicio explícito)"""
    return SimulationService(config).run_iteration(iteration, point).results


# ==================== AGREGACIÓN ====================

def aggregate(results: Sequence[ClusterLinkResult], point: GridPoint, n_iterations: int,
              include_reserve: bool = False, detail: bool = False) -> RateReport:
    """
    η̄ = media de las tasas de todos los (iteración, cluster, haz), sin las
    tramas de re-servicio salvo ``include_reserve``. El error estándar se
    calcula sobre las medias por iteración.
    """
    if not results:
        raise SimulatorError("no hay resultados que agregar")
    counted = [r for r in results if include_reserve or not r.reserve]
    if not counted:
        raise SimulatorError("todos los resultados son re-servicios")
    rates = np.array([r.rate for r in counted])
    all_rates = np.array([r.rate for r in results])
    sizes = np.array([r.size for r in counted])
    serving = np.array([r.serving_sinr_db for r in counted])

    by_iteration: Dict[int, List[float]] = {}
    for r in counted:
        by_iteration.setdefault(r.iteration, []).append(r.rate)
    iteration_means = np.array([np.mean(v) for _, v in sorted(by_iteration.items())])
    if iteration_means.size > 1:
        std_err = float(iteration_means.std(ddof=1) / np.sqrt(iteration_means.size))
    elif rates.size > 1:
        std_err = float(rates.std(ddof=1) / np.sqrt(rates.size))
    else:
        std_err = 0.0

    unique_sizes, counts = np.unique(sizes, return_counts=True)
    return RateReport(
        point=point,
        n_iterations=n_iterations,
        n_clusters=int(rates.size),
        avg_rate=float(rates.mean()),
        std_err=std_err,
        avg_rate_with_reserve=float(all_rates.mean()),
        outage_fraction=float(np.mean([r.outage for r in counted])),
        mean_serving_sinr_db=float(serving.mean()),
        max_cluster_size=int(sizes.max()),
        serving_sinr_db=sorted(float(x) for x in serving),
        sigma_loss_db=sorted(r.loss_std_db() for r in counted),
        size_histogram={int(s): float(c) / sizes.size for s, c in zip(unique_sizes, counts)},
        detail=[r.to_dict() for r in results] if detail else None,
    )


def sweep(config: SimConfig, jobs: int = 1) -> List[RateReport]:
    """Un RateReport por punto del barrido; lanza si algún punto falla"""
    reports, failures = SimulationService(config).sweep(jobs)
    if failures:
        summary = "; ".join(f"{point.key()}: {message}" for point, message in failures)
        raise SimulatorError(f"{len(failures)} puntos fallaron: {summary}")
    return reports
