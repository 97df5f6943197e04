"""
Servicio de enlace
==================

Convierte SINR en tasa (escalera ModCod o Shannon) y construye el resultado
multicast de cada cluster: SINR de servicio = mínimo de los miembros.
"""

import functools
import logging
import os
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from src.errors import LayoutParseError, ModCodError, NumericalError
from src.models.link import ClusterLinkResult, ModCodTable

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data')
DEFAULT_MODCOD_PATH = os.path.join(DATA_DIR, 'dvbs2x_normal_frame.csv')
MODCOD_COLUMNS = ('es_n0_dB', 'spectral_efficiency')

RateFunction = Callable[[np.ndarray], np.ndarray]


# ==================== TABLA MODCOD ====================

def load_modcod_table(path: str, name: str = "") -> ModCodTable:
    """Cargar CSV ``es_n0_dB,spectral_efficiency`` (las líneas con # son comentarios)"""
    try:
        frame = pd.read_csv(path, comment='#', skipinitialspace=True, encoding='utf-8')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise LayoutParseError(path, 1, f"no se puede leer: {e}") from e
    missing = [column for column in MODCOD_COLUMNS if column not in frame.columns]
    if missing:
        raise LayoutParseError(path, 1, f"faltan columnas {missing}")
    values = frame[list(MODCOD_COLUMNS)].apply(pd.to_numeric, errors='coerce')
    if values.isna().any().any():
        raise ModCodError(f"{path}: valores no numéricos en la tabla ModCod")
    return ModCodTable(values['es_n0_dB'].to_numpy(), values['spectral_efficiency'].to_numpy(),
                       name or os.path.splitext(os.path.basename(path))[0])


@functools.lru_cache(maxsize=1)
def default_modcod_table() -> ModCodTable:
    """Escalera DVB-S2X de tramas normales incluida con el paquete"""
    return load_modcod_table(DEFAULT_MODCOD_PATH, "dvbs2x_normal_frame")


# ==================== TASAS ====================

def to_db(sinr) -> np.ndarray:
    sinr = np.asarray(sinr, dtype=float)
    with np.errstate(divide='ignore'):
        return 10.0 * np.log10(sinr)


def rate_from_sinr(sinr, table: ModCodTable):
    """
    Eficiencia de la fila de mayor umbral ≤ 10·log10(γ) (comparación inclusiva);
    0 por debajo del umbral más bajo (outage). Acepta escalares o arreglos.
    """
    sinr_db = to_db(sinr)
    index = np.searchsorted(table.thresholds_db, sinr_db, side='right') - 1
    rates = np.where(index >= 0, table.efficiencies[np.clip(index, 0, None)], 0.0)
    return float(rates) if rates.ndim == 0 else rates


def shannon_rate(sinr):
    """log2(1 + γ)"""
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise NumericalError("la SINR no puede ser negativa")
    rates = np.log2(1.0 + sinr)
    return float(rates) if rates.ndim == 0 else rates


def rate_function(model: str, table: ModCodTable) -> RateFunction:
    if model == "shannon":
        return shannon_rate
    return functools.partial(rate_from_sinr, table=table)


# ==================== RESULTADO POR CLUSTER ====================

def cluster_link_result(member_sinrs: Sequence[float], table: ModCodTable, beam_id: int = 0,
                        cluster_id: int = 0, rate_model: str = "modcod") -> ClusterLinkResult:
    """
    Tasa multicast del cluster: η = f(min γ_i); Δγ_i = γ_i,dB − γ̃_dB
    """
    sinrs = np.asarray(member_sinrs, dtype=float)
    if sinrs.size == 0:
        raise ModCodError("un cluster necesita al menos un miembro")
    serving = float(sinrs.min())
    sinr_db = to_db(sinrs)
    serving_db = float(sinr_db.min())
    rate = float(rate_function(rate_model, table)(serving))
    outage = rate_model == "modcod" and bool(serving_db < table.lowest_threshold_db)
    return ClusterLinkResult(
        beam_id=beam_id,
        cluster_id=cluster_id,
        serving_sinr_db=serving_db,
        member_sinr_db=tuple(float(x) for x in sinr_db),
        member_loss_db=tuple(float(x) for x in sinr_db - serving_db),
        rate=rate,
        outage=outage,
    )
