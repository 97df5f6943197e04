from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.errors import ConfigError

NONE = "none"
PAC = "pac"
SPC = "spc"
NORMALIZATIONS = (NONE, PAC, SPC)

EQUAL_SPLIT = "equal"
EXPLICIT_SPLIT = "explicit"


@dataclass(frozen=True, eq=False)
class EquivalentChannelMatrix:
    """
    MATRIZ DE CANAL EQUIVALENTE H̃
    ==============================

    Fila b = media aritmética de los canales del cluster servido por el haz b
    en la trama. Los haces sin usuarios tienen fila nula y ``cluster_ids`` None.
    """

    matrix: np.ndarray
    cluster_ids: Tuple[Optional[int], ...]

    @property
    def n_beams(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PrecodingMatrix:
    """Matriz W (N_B×N_B); la columna w_b precodifica el flujo del haz b, la fila i es el alimentador i"""

    matrix: np.ndarray
    normalization: str = NONE

    def __post_init__(self):
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"normalización desconocida '{self.normalization}'", key="precoding.precoder")

    @property
    def n_beams(self) -> int:
        return self.matrix.shape[1]

    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.matrix, axis=1)

    def power_trace(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix.conj().T)))


@dataclass(frozen=True)
class PowerModel:
    """
    MODELO DE POTENCIA
    ==================

    P_sat total del satélite; la potencia por flujo p es P_sat/N_B con reparto
    ``equal`` o el valor explícito ``per_stream_power_w``.
    """

    satellite_power_w: float = 90.0
    n_beams: int = 1
    power_split: str = EQUAL_SPLIT
    per_stream_power_w: float = 0.0

    def __post_init__(self):
        if self.satellite_power_w <= 0:
            raise ConfigError("debe ser positivo", key="power.psat")
        if self.n_beams < 1:
            raise ConfigError("debe haber al menos un haz", key="power.n_beams")
        if self.power_split not in (EQUAL_SPLIT, EXPLICIT_SPLIT):
            raise ConfigError(f"reparto desconocido '{self.power_split}'", key="power.power_split")
        if self.power_split == EXPLICIT_SPLIT and self.per_stream_power_w <= 0:
            raise ConfigError("debe ser positivo con reparto explicit", key="power.per_stream_power_w")

    @property
    def per_stream_power(self) -> float:
        if self.power_split == EXPLICIT_SPLIT:
            return self.per_stream_power_w
        return self.satellite_power_w / self.n_beams
