import dataclasses
import itertools
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.errors import ConfigError
from src.models.channel import GAIN_TABLE, TAPERED_APERTURE, LinkBudgetParams
from src.models.partition import ALGORITHMS, METRICS
from src.models.precoding import EQUAL_SPLIT, EXPLICIT_SPLIT, NORMALIZATIONS

RATE_MODELS = ("modcod", "shannon")


# ==================== SECCIONES DE CONFIGURACIÓN ====================

@dataclass(frozen=True)
class LayoutSection:
    source: str = "hex"
    n_rings: int = 1
    beam_radius_km: float = 160.0
    center_lat_deg: float = 50.0
    center_lon_deg: float = 10.0
    satellite_longitude_deg: float = 30.0
    path: str = ""


@dataclass(frozen=True)
class DeploymentSection:
    density: float = 1.25e-3
    rounding: str = "round"


@dataclass(frozen=True)
class AntennaSection:
    mode: str = TAPERED_APERTURE
    peak_gain_dbi: float = 52.0
    edge_taper_db: float = 3.0
    gain_table: str = ""


@dataclass(frozen=True)
class ChannelSection:
    phase_per: str = "feed"


@dataclass(frozen=True)
class ClusteringSection:
    algorithm: str = "maxdist"
    metric: str = "channel"
    cluster_size: int = 4
    tol: float = 1e-6
    max_iter: int = 300
    feature_scaling: str = "none"


@dataclass(frozen=True)
class PrecodingSection:
    precoder: str = "pac"


@dataclass(frozen=True)
class PowerSection:
    psat: float = 90.0
    power_split: str = EQUAL_SPLIT
    per_stream_power_w: float = 0.0


@dataclass(frozen=True)
class RateSection:
    model: str = "modcod"
    modcod_table: str = ""


@dataclass(frozen=True)
class SimulationSection:
    iterations: int = 50
    seed: int = 2024
    include_reserve: bool = False
    common_random_numbers: bool = False
    detail: bool = False


@dataclass(frozen=True)
class SweepSection:
    """Ejes del barrido; None = usar el valor base de la sección correspondiente"""

    cluster_size: Optional[Tuple[int, ...]] = None
    density: Optional[Tuple[float, ...]] = None
    psat: Optional[Tuple[float, ...]] = None
    algorithm: Optional[Tuple[str, ...]] = None
    metric: Optional[Tuple[str, ...]] = None
    precoder: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True)
class SimConfig:
    """
    CONFIGURACIÓN COMPLETA DE UNA SIMULACIÓN
    ========================================

    Agrupa las secciones del archivo INI. ``validate()`` es el único punto de
    validación usado por ``validate``, ``run``, ``sweep`` y la API.
    """

    layout: LayoutSection = field(default_factory=LayoutSection)
    deployment: DeploymentSection = field(default_factory=DeploymentSection)
    link: LinkBudgetParams = field(default_factory=LinkBudgetParams)
    antenna: AntennaSection = field(default_factory=AntennaSection)
    channel: ChannelSection = field(default_factory=ChannelSection)
    clustering: ClusteringSection = field(default_factory=ClusteringSection)
    precoding: PrecodingSection = field(default_factory=PrecodingSection)
    power: PowerSection = field(default_factory=PowerSection)
    rate: RateSection = field(default_factory=RateSection)
    simulation: SimulationSection = field(default_factory=SimulationSection)
    sweep: SweepSection = field(default_factory=SweepSection)

    def validate(self) -> "SimConfig":
        """Comprobar rangos, enumeraciones y existencia de archivos"""
        _check(self.layout.source in ("hex", "file"), "layout.source", "debe ser hex o file")
        _check(self.layout.n_rings >= 0, "layout.n_rings", "debe ser >= 0")
        _check(self.layout.beam_radius_km > 0, "layout.beam_radius_km", "debe ser positivo")
        _check(abs(self.layout.center_lat_deg) < 90, "layout.center_lat_deg", "fuera de (-90, 90)")
        if self.layout.source == "file":
            _check_file(self.layout.path, "layout.path")
        _check(self.deployment.density > 0, "deployment.density", "debe ser positivo")
        _check(self.deployment.rounding in ("round", "floor"), "deployment.rounding", "debe ser round o floor")
        _check(self.antenna.mode in (TAPERED_APERTURE, GAIN_TABLE), "antenna.mode",
               f"debe ser {TAPERED_APERTURE} o {GAIN_TABLE}")
        _check(self.antenna.edge_taper_db > 0, "antenna.edge_taper_db", "debe ser positivo")
        if self.antenna.mode == GAIN_TABLE:
            _check_file(self.antenna.gain_table, "antenna.gain_table")
        _check(self.channel.phase_per in ("feed", "beam"), "channel.phase_per", "debe ser feed o beam")
        _check(self.clustering.algorithm in ALGORITHMS, "clustering.algorithm", f"debe ser uno de {ALGORITHMS}")
        _check(self.clustering.metric in METRICS, "clustering.metric", f"debe ser uno de {METRICS}")
        _check(self.clustering.cluster_size >= 1, "clustering.cluster_size", "debe ser >= 1")
        _check(self.clustering.tol > 0, "clustering.tol", "debe ser positivo")
        _check(self.clustering.max_iter >= 1, "clustering.max_iter", "debe ser >= 1")
        _check(self.clustering.feature_scaling in ("none", "standard"), "clustering.feature_scaling",
               "debe ser none o standard")
        _check(self.precoding.precoder in NORMALIZATIONS, "precoding.precoder", f"debe ser uno de {NORMALIZATIONS}")
        _check(self.power.psat > 0, "power.psat", "debe ser positivo")
        _check(self.power.power_split in (EQUAL_SPLIT, EXPLICIT_SPLIT), "power.power_split", "debe ser equal o explicit")
        if self.power.power_split == EXPLICIT_SPLIT:
            _check(self.power.per_stream_power_w > 0, "power.per_stream_power_w", "debe ser positivo")
        _check(self.rate.model in RATE_MODELS, "rate.model", f"debe ser uno de {RATE_MODELS}")
        if self.rate.modcod_table:
            _check_file(self.rate.modcod_table, "rate.modcod_table")
        _check(self.simulation.iterations >= 1, "simulation.iterations", "debe ser >= 1")
        _check(self.simulation.seed >= 0, "simulation.seed", "debe ser >= 0")
        self._validate_sweep()
        return self

    def _validate_sweep(self):
        axes = self.sweep
        for name in ('cluster_size', 'density', 'psat', 'algorithm', 'metric', 'precoder'):
            values = getattr(axes, name)
            if values is not None and len(values) == 0:
                raise ConfigError("el eje no puede estar vacío", key=f"sweep.{name}")
        for k in axes.cluster_size or ():
            _check(k >= 1, "sweep.cluster_size", "valores >= 1")
        for rho in axes.density or ():
            _check(rho > 0, "sweep.density", "valores positivos")
        for psat in axes.psat or ():
            _check(psat > 0, "sweep.psat", "valores positivos")
        for algorithm in axes.algorithm or ():
            _check(algorithm in ALGORITHMS, "sweep.algorithm", f"'{algorithm}' no es uno de {ALGORITHMS}")
        for metric in axes.metric or ():
            _check(metric in METRICS, "sweep.metric", f"'{metric}' no es uno de {METRICS}")
        for precoder in axes.precoder or ():
            _check(precoder in NORMALIZATIONS, "sweep.precoder", f"'{precoder}' no es uno de {NORMALIZATIONS}")

    def axes(self) -> Tuple[tuple, ...]:
        """Valores de cada eje en orden (algoritmo, métrica, precodificador, K, ρ, P_sat)"""
        axes = self.sweep
        return (
            axes.algorithm or (self.clustering.algorithm,),
            axes.metric or (self.clustering.metric,),
            axes.precoder or (self.precoding.precoder,),
            tuple(int(k) for k in axes.cluster_size or (self.clustering.cluster_size,)),
            tuple(float(rho) for rho in axes.density or (self.deployment.density,)),
            tuple(float(psat) for psat in axes.psat or (self.power.psat,)),
        )

    def grid(self) -> List["GridPoint"]:
        """Producto cartesiano de los ejes; el último eje varía más rápido"""
        return [GridPoint(*values) for values in itertools.product(*self.axes())]

    def base_point(self) -> "GridPoint":
        return GridPoint(self.clustering.algorithm, self.clustering.metric, self.precoding.precoder,
                         self.clustering.cluster_size, self.deployment.density, self.power.psat)

    def at(self, point: "GridPoint") -> "SimConfig":
        """Configuración concreta de un punto del barrido"""
        return dataclasses.replace(
            self,
            clustering=dataclasses.replace(self.clustering, algorithm=point.algorithm, metric=point.metric,
                                           cluster_size=point.cluster_size),
            precoding=dataclasses.replace(self.precoding, precoder=point.precoder),
            deployment=dataclasses.replace(self.deployment, density=point.density),
            power=dataclasses.replace(self.power, psat=point.psat),
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _check(condition: bool, key: str, message: str):
    if not condition:
        raise ConfigError(message, key=key)


def _check_file(path: str, key: str):
    if not path:
        raise ConfigError("ruta requerida", key=key)
    if not os.path.isfile(path):
        raise ConfigError(f"el archivo '{path}' no existe", key=key)


# ==================== BARRIDO, PLANIFICACIÓN Y RESULTADOS ====================

@dataclass(frozen=True)
class GridPoint:
    algorithm: str
    metric: str
    precoder: str
    cluster_size: int
    density: float
    psat: float

    def values(self) -> tuple:
        return (self.algorithm, self.metric, self.precoder, self.cluster_size, self.density, self.psat)

    def key(self) -> str:
        """Nombre estable para archivos por punto"""
        return (f"{self.algorithm}_{self.metric}_{self.precoder}_K{self.cluster_size}"
                f"_rho{self.density!r}_psat{self.psat!r}")

    def to_dict(self) -> dict:
        return {
            'algorithm': self.algorithm,
            'metric': self.metric,
            'precoder': self.precoder,
            'K': self.cluster_size,
            'rho': self.density,
            'psat': self.psat,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridPoint":
        return cls(data['algorithm'], data['metric'], data['precoder'], int(data['K']),
                   float(data['rho']), float(data['psat']))


@dataclass(frozen=True)
class FrameEntry:
    cluster_index: int
    reserve: bool = False


@dataclass
class FrameSchedule:
    """
    PLANIFICACIÓN DE TRAMAS
    =======================

    ``frames[n][b]`` es el cluster que sirve el haz b en la trama n. El número
    de tramas es el máximo de clusters por haz; los haces que agotaron sus
    clusters repiten uno ya servido (marcado ``reserve``).
    """

    frames: List[Dict[int, FrameEntry]]

    def __len__(self) -> int:
        return len(self.frames)

    def reserve_count(self) -> int:
        return sum(entry.reserve for frame in self.frames for entry in frame.values())

    def to_dict(self) -> dict:
        return {
            'frames': [
                {str(b): {'cluster': e.cluster_index, 'reserve': e.reserve} for b, e in sorted(frame.items())}
                for frame in self.frames
            ]
        }


@dataclass
class RateReport:
    """
    INFORME DE TASAS DE UN PUNTO DEL BARRIDO
    ========================================

    - avg_rate: η̄ promediado sobre iteraciones, clusters y haces (sin re-servicios
      salvo ``simulation.include_reserve``)
    - serving_sinr_db / sigma_loss_db: muestras ordenadas para las CDF empíricas
    - size_histogram: frecuencia relativa de tamaños de cluster
    """

    point: GridPoint
    n_iterations: int
    n_clusters: int
    avg_rate: float
    std_err: float
    avg_rate_with_reserve: float
    outage_fraction: float
    mean_serving_sinr_db: float
    max_cluster_size: int
    serving_sinr_db: List[float] = field(default_factory=list)
    sigma_loss_db: List[float] = field(default_factory=list)
    size_histogram: Dict[int, float] = field(default_factory=dict)
    detail: Optional[List[dict]] = None

    @staticmethod
    def cdf(samples: List[float]) -> Tuple[np.ndarray, np.ndarray]:
        """CDF empírica: valores ordenados y probabilidades i/n"""
        values = np.sort(np.asarray(samples, dtype=float))
        probabilities = np.arange(1, values.size + 1) / max(values.size, 1)
        return values, probabilities

    def summary(self) -> dict:
        return {
            **self.point.to_dict(),
            'avg_rate': self.avg_rate,
            'outage_frac': self.outage_fraction,
            'std_err': self.std_err,
            'avg_rate_with_reserve': self.avg_rate_with_reserve,
            'mean_serving_sinr_db': self.mean_serving_sinr_db,
            'n_clusters': self.n_clusters,
            'max_cluster_size': self.max_cluster_size,
            'n_iterations': self.n_iterations,
        }

    def to_dict(self) -> dict:
        data = {
            'point': self.point.to_dict(),
            'n_iterations': self.n_iterations,
            'n_clusters': self.n_clusters,
            'avg_rate': self.avg_rate,
            'std_err': self.std_err,
            'avg_rate_with_reserve': self.avg_rate_with_reserve,
            'outage_fraction': self.outage_fraction,
            'mean_serving_sinr_db': self.mean_serving_sinr_db,
            'max_cluster_size': self.max_cluster_size,
            'serving_sinr_db': list(self.serving_sinr_db),
            'sigma_loss_db': list(self.sigma_loss_db),
            'size_histogram': {str(size): freq for size, freq in sorted(self.size_histogram.items())},
        }
        if self.detail is not None:
            data['detail'] = self.detail
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RateReport":
        return cls(
            point=GridPoint.from_dict(data['point']),
            n_iterations=int(data['n_iterations']),
            n_clusters=int(data['n_clusters']),
            avg_rate=float(data['avg_rate']),
            std_err=float(data['std_err']),
            avg_rate_with_reserve=float(data['avg_rate_with_reserve']),
            outage_fraction=float(data['outage_fraction']),
            mean_serving_sinr_db=float(data['mean_serving_sinr_db']),
            max_cluster_size=int(data['max_cluster_size']),
            serving_sinr_db=[float(x) for x in data.get('serving_sinr_db', [])],
            sigma_loss_db=[float(x) for x in data.get('sigma_loss_db', [])],
            size_histogram={int(k): float(v) for k, v in data.get('size_histogram', {}).items()},
            detail=data.get('detail'),
        )

    def __str__(self) -> str:
        return (f"{self.point.algorithm}/{self.point.metric}/{self.point.precoder} K={self.point.cluster_size} "
                f"ρ={self.point.density:g} P_sat={self.point.psat:g} W → η̄={self.avg_rate:.4f} bit/s/Hz "
                f"(±{self.std_err:.4f}, outage {100 * self.outage_fraction:.1f}%)")
