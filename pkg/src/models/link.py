from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.errors import ModCodError


@dataclass(frozen=True, eq=False)
class ModCodTable:
    """
    TABLA MODCOD
    ============

    Escalera de puntos de operación (umbral Es/N0 en dB, eficiencia espectral
    en bit/s/Hz). Ambas columnas estrictamente crecientes.
    """

    thresholds_db: np.ndarray
    efficiencies: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        thresholds = np.asarray(self.thresholds_db, dtype=float)
        efficiencies = np.asarray(self.efficiencies, dtype=float)
        if thresholds.ndim != 1 or thresholds.shape != efficiencies.shape or thresholds.size == 0:
            raise ModCodError(f"tabla '{self.name}': columnas vacías o de distinta longitud")
        if np.any(np.diff(thresholds) <= 0):
            raise ModCodError(f"tabla '{self.name}': los umbrales deben ser estrictamente crecientes")
        if np.any(np.diff(efficiencies) <= 0):
            raise ModCodError(f"tabla '{self.name}': las eficiencias deben ser estrictamente crecientes")
        if np.any(efficiencies <= 0):
            raise ModCodError(f"tabla '{self.name}': eficiencias no positivas")
        object.__setattr__(self, "thresholds_db", thresholds)
        object.__setattr__(self, "efficiencies", efficiencies)

    def __len__(self) -> int:
        return self.thresholds_db.size

    @property
    def lowest_threshold_db(self) -> float:
        return float(self.thresholds_db[0])

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'rows': [
                {'es_n0_dB': float(t), 'spectral_efficiency': float(e)}
                for t, e in zip(self.thresholds_db, self.efficiencies)
            ],
        }


@dataclass(frozen=True)
class ClusterLinkResult:
    """
    RESULTADO DE ENLACE DE UN CLUSTER
    =================================

    SINR de servicio = mínimo de los miembros; Δγ_i = γ_i - γ̃ en dB (≥ 0).
    ``reserve`` marca las tramas de re-servicio.
    """

    beam_id: int
    cluster_id: int
    serving_sinr_db: float
    member_sinr_db: Tuple[float, ...]
    member_loss_db: Tuple[float, ...]
    rate: float
    outage: bool = False
    member_ids: Tuple[int, ...] = ()
    iteration: int = 0
    frame: int = 0
    reserve: bool = False

    @property
    def size(self) -> int:
        return len(self.member_sinr_db)

    def loss_std_db(self) -> float:
        """Desviación típica poblacional de las pérdidas Δγ (dB)"""
        return float(np.std(self.member_loss_db))

    def with_context(self, iteration: int, frame: int, reserve: bool,
                     member_ids: Optional[Tuple[int, ...]] = None) -> "ClusterLinkResult":
        return ClusterLinkResult(
            beam_id=self.beam_id, cluster_id=self.cluster_id,
            serving_sinr_db=self.serving_sinr_db, member_sinr_db=self.member_sinr_db,
            member_loss_db=self.member_loss_db, rate=self.rate, outage=self.outage,
            member_ids=self.member_ids if member_ids is None else tuple(member_ids),
            iteration=iteration, frame=frame, reserve=reserve,
        )

    def to_dict(self) -> dict:
        return {
            'iteration': self.iteration,
            'frame': self.frame,
            'beam_id': self.beam_id,
            'cluster_id': self.cluster_id,
            'reserve': self.reserve,
            'serving_sinr_db': self.serving_sinr_db,
            'member_ids': list(self.member_ids),
            'member_sinr_db': list(self.member_sinr_db),
            'member_loss_db': list(self.member_loss_db),
            'rate': self.rate,
            'outage': self.outage,
        }
