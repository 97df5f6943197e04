"""
Servicio de canal
=================

Sintetiza los coeficientes complejos h_bj^(i) de cada par usuario-alimentador:

    h = √(G_R·G_loss·G_bj) / (4π·(d/λ)·√P_Z) · exp(-j2πd/λ) · exp(-jϑ)

El ruido queda incluido en el canal (varianza unitaria tras la precodificación).
"""

import functools
import logging
from typing import Dict, List

import numpy as np
import pandas as pd
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import brentq
from scipy.special import j1

from src.errors import ConfigError, InterpolationError, LayoutParseError
from src.models.beam import BeamLayout, UserDeployment
from src.models.channel import GAIN_TABLE, AntennaPattern, GainGrid, LinkBudgetParams, UserChannel
from src.services.geometry_service import destination_point, ecef_km, satellite_ecef_km, slant_range

logger = logging.getLogger(__name__)

FIRST_NULL_U = 3.8317059702075125
GAIN_TABLE_COLUMNS = ('feed_id', 'lat_deg', 'lon_deg', 'gain_dBi')


# ==================== GANANCIAS ====================

def aperture_taper(u) -> np.ndarray:
    """(2·J1(u)/u)², con límite 1 en u → 0"""
    u = np.abs(np.asarray(u, dtype=float))
    safe = np.where(u < 1e-9, 1.0, u)
    return np.where(u < 1e-9, 1.0, (2.0 * j1(safe) / safe) ** 2)


@functools.lru_cache(maxsize=32)
def edge_u(edge_taper_db: float) -> float:
    """Valor de u donde el patrón cae ``edge_taper_db`` dB bajo el pico (antes del primer nulo)"""
    target = 10 ** (-edge_taper_db / 10)
    return float(brentq(lambda u: float(aperture_taper(u)) - target, 1e-6, FIRST_NULL_U))


def _off_axis_angle(boresight: np.ndarray, direction: np.ndarray) -> np.ndarray:
    cross = np.linalg.norm(np.cross(boresight, direction), axis=-1)
    dot = np.einsum('...i,...i->...', boresight, direction)
    return np.arctan2(cross, dot)


def edge_angles(layout: BeamLayout) -> np.ndarray:
    """Ángulo (rad) entre la puntería de cada alimentador y el borde norte de su haz"""
    satellite = satellite_ecef_km(layout)
    angles = np.empty(layout.n_beams)
    for j, beam in enumerate(layout.beams):
        edge_lat, edge_lon = destination_point(beam.lat_deg, beam.lon_deg, beam.radius_km, 0.0)
        angles[j] = _off_axis_angle(ecef_km(beam.lat_deg, beam.lon_deg) - satellite,
                                    ecef_km(edge_lat, edge_lon) - satellite)
    return angles


def feed_gain_matrix(pattern: AntennaPattern, lats_deg, lons_deg, layout: BeamLayout) -> np.ndarray:
    """
    Ganancia lineal G_bj para cada usuario (filas) y alimentador (columnas)
    Complejidad: O(N_U·N_B)
    """
    lats = np.atleast_1d(np.asarray(lats_deg, dtype=float))
    lons = np.atleast_1d(np.asarray(lons_deg, dtype=float))
    if pattern.mode == GAIN_TABLE:
        return np.column_stack([
            _table_gain(pattern, beam.beam_id, lats, lons) for beam in layout.beams
        ])

    satellite = satellite_ecef_km(layout)
    directions = ecef_km(lats, lons) - satellite
    u_edge = edge_u(pattern.edge_taper_db)
    sin_edges = np.sin(edge_angles(layout))
    gains = np.empty((lats.size, layout.n_beams))
    for j, beam in enumerate(layout.beams):
        boresight = ecef_km(beam.lat_deg, beam.lon_deg) - satellite
        theta = _off_axis_angle(boresight[np.newaxis, :], directions)
        gains[:, j] = pattern.peak_gain_linear * aperture_taper(u_edge * np.sin(theta) / sin_edges[j])
    return gains


def antenna_gain(pattern: AntennaPattern, feed: int, lat_deg: float, lon_deg: float, layout: BeamLayout) -> float:
    """Ganancia lineal del alimentador ``feed`` (id de haz, 1..N_B) hacia la posición dada"""
    if not 1 <= feed <= layout.n_beams:
        raise ConfigError(f"alimentador {feed} fuera de 1..{layout.n_beams}", key="antenna.feed")
    return float(feed_gain_matrix(pattern, lat_deg, lon_deg, layout)[0, feed - 1])


def _table_gain(pattern: AntennaPattern, feed: int, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    grid = pattern.tables.get(feed)
    if grid is None:
        raise ConfigError(f"la tabla de ganancias no contiene el alimentador {feed}", key="antenna.gain_table")
    interpolator = RegularGridInterpolator((grid.lats_deg, grid.lons_deg), grid.gains_dbi,
                                           method='linear', bounds_error=True)
    try:
        gains_dbi = interpolator(np.column_stack([lats, lons]))
    except ValueError as e:
        raise InterpolationError(f"alimentador {feed}: posición fuera de la rejilla de ganancias") from e
    return 10 ** (gains_dbi / 10)


def load_gain_table(path: str) -> Dict[int, GainGrid]:
    """
    Cargar rejilla ``feed_id,lat_deg,lon_deg,gain_dBi``. Cada alimentador debe
    formar una rejilla regular completa.
    """
    try:
        frame = pd.read_csv(path, skipinitialspace=True, encoding='utf-8')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise LayoutParseError(path, 1, f"no se puede leer: {e}") from e
    missing = [column for column in GAIN_TABLE_COLUMNS if column not in frame.columns]
    if missing:
        raise LayoutParseError(path, 1, f"faltan columnas {missing}")
    bad = frame[list(GAIN_TABLE_COLUMNS)].apply(pd.to_numeric, errors='coerce').isna().any(axis=1)
    if bad.any():
        raise LayoutParseError(path, int(bad.idxmax()) + 2, "fila mal formada")

    tables = {}
    for feed_id, rows in frame.groupby('feed_id', sort=True):
        grid = rows.pivot_table(index='lat_deg', columns='lon_deg', values='gain_dBi', aggfunc='first')
        if grid.isna().any().any() or grid.shape[0] < 2 or grid.shape[1] < 2:
            raise LayoutParseError(path, int(rows.index[0]) + 2,
                                   f"el alimentador {feed_id} no forma una rejilla regular completa")
        tables[int(feed_id)] = GainGrid(grid.index.to_numpy(dtype=float), grid.columns.to_numpy(dtype=float),
                                        grid.to_numpy(dtype=float))
    return tables


# ==================== BALANCE DE ENLACE ====================

def rx_antenna_gain(params: LinkBudgetParams) -> float:
    """G_R = η·(π·D/λ)²"""
    return params.rx_antenna_efficiency * (np.pi * params.rx_antenna_diameter_m / params.wavelength_m) ** 2


def noise_power(params: LinkBudgetParams) -> float:
    """P_Z = κ·T_b·B_w (W)"""
    return params.boltzmann * params.noise_temperature_k * params.user_bandwidth_hz


def channel_coefficient(rx_gain, losses, feed_gain, distance_m, wavelength_m, noise_power_w, phase_rad=0.0):
    """Coeficiente de canal de un par usuario-alimentador; vectorizado por difusión de numpy"""
    cycles = np.asarray(distance_m, dtype=float) / wavelength_m
    magnitude = np.sqrt(rx_gain * losses * np.asarray(feed_gain, dtype=float)) / (
        4 * np.pi * cycles * np.sqrt(noise_power_w))
    phase = -2 * np.pi * np.mod(cycles, 1.0) - np.asarray(phase_rad, dtype=float)
    return magnitude * np.exp(1j * phase)


def synthesize_channel(deployment: UserDeployment, layout: BeamLayout, pattern: AntennaPattern,
                       params: LinkBudgetParams, rng: np.random.Generator,
                       phase_per: str = "feed") -> List[UserChannel]:
    """
    Canales de todos los usuarios desplegados, en el orden de ``deployment.all_users()``.
    Las fases ϑ se sortean una vez por alimentador (o por haz receptor con
    ``phase_per='beam'``) en cada llamada.
    Complejidad: O(N_U·N_B)
    """
    if phase_per not in ("feed", "beam"):
        raise ConfigError(f"valor desconocido '{phase_per}'", key="channel.phase_per")
    random_phases = rng.uniform(0.0, 2 * np.pi, layout.n_beams)
    users = deployment.all_users()
    if not users:
        return []
    lats = np.array([user.lat_deg for user in users])
    lons = np.array([user.lon_deg for user in users])
    beam_index = np.array([user.beam_id - 1 for user in users])

    distances_m = 1e3 * slant_range(lats, lons, layout)
    gains = feed_gain_matrix(pattern, lats, lons, layout)
    if phase_per == "feed":
        phases = random_phases[np.newaxis, :]
    else:
        phases = random_phases[beam_index][:, np.newaxis]

    coefficients = channel_coefficient(rx_antenna_gain(params), params.losses_linear, gains,
                                       distances_m[:, np.newaxis], params.wavelength_m,
                                       noise_power(params), phases)
    return [UserChannel(user.user_id, user.beam_id, coefficients[i]) for i, user in enumerate(users)]


def stack_channels(channels: List[UserChannel]) -> np.ndarray:
    """Matriz (n_usuarios, N_B) con las filas h_b^(i)"""
    if not channels:
        return np.zeros((0, 0), dtype=complex)
    return np.vstack([channel.coefficients for channel in channels])
