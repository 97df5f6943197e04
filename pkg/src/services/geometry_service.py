"""
Servicio de geometría
=====================

Genera el layout multi-haz, despliega usuarios uniformemente dentro de cada
huella y calcula distancias satélite-usuario. Tierra esférica (R = 6371 km),
satélite GEO ecuatorial.
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.errors import GeometryError, LayoutParseError
from src.models.beam import (EARTH_RADIUS_KM, GEO_ORBIT_RADIUS_KM, BeamLayout, BeamSpec, User,
                             UserDeployment)

logger = logging.getLogger(__name__)

LAYOUT_COLUMNS = ('id', 'lat_deg', 'lon_deg', 'radius_km')


# ==================== COORDENADAS ====================

def ecef_km(lat_deg, lon_deg, radius_km: float = EARTH_RADIUS_KM) -> np.ndarray:
    """Coordenadas cartesianas geocéntricas (km); vectorizado, última dimensión = 3"""
    lat = np.radians(np.asarray(lat_deg, dtype=float))
    lon = np.radians(np.asarray(lon_deg, dtype=float))
    return radius_km * np.stack([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)], axis=-1)


def satellite_ecef_km(layout: BeamLayout) -> np.ndarray:
    return ecef_km(0.0, layout.satellite_longitude_deg, layout.orbit_radius_km)


def destination_point(lat_deg, lon_deg, distance_km, bearing_rad) -> Tuple[np.ndarray, np.ndarray]:
    """
    Punto a distancia de círculo máximo ``distance_km`` con rumbo ``bearing_rad``
    (0 = norte, π/2 = este). Vectorizado.
    """
    lat1 = np.radians(lat_deg)
    lon1 = np.radians(lon_deg)
    delta = np.asarray(distance_km, dtype=float) / EARTH_RADIUS_KM
    bearing = np.asarray(bearing_rad, dtype=float)
    sin_lat2 = np.sin(lat1) * np.cos(delta) + np.cos(lat1) * np.sin(delta) * np.cos(bearing)
    lat2 = np.arcsin(np.clip(sin_lat2, -1.0, 1.0))
    lon2 = lon1 + np.arctan2(np.sin(bearing) * np.sin(delta) * np.cos(lat1),
                             np.cos(delta) - np.sin(lat1) * sin_lat2)
    lon2 = (np.degrees(lon2) + 540.0) % 360.0 - 180.0
    return np.degrees(lat2), lon2


def great_circle_km(lat1_deg, lon1_deg, lat2_deg, lon2_deg) -> np.ndarray:
    """Distancia de círculo máximo (fórmula del haversine)"""
    lat1, lon1, lat2, lon2 = (np.radians(np.asarray(x, dtype=float)) for x in (lat1_deg, lon1_deg, lat2_deg, lon2_deg))
    a = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def is_visible(lat_deg, lon_deg, satellite_longitude_deg: float,
               orbit_radius_km: float = GEO_ORBIT_RADIUS_KM) -> np.ndarray:
    """El punto ve al satélite por encima del horizonte (elevación > 0)"""
    ground = ecef_km(lat_deg, lon_deg)
    satellite = ecef_km(0.0, satellite_longitude_deg, orbit_radius_km)
    return np.einsum('...i,...i->...', ground, satellite - ground) > 0


# ==================== LAYOUT ====================

def hex_beam_count(n_rings: int) -> int:
    return 1 + 3 * n_rings * (n_rings + 1)


def generate_hex_layout(n_rings: int, beam_radius_km: float, center: Tuple[float, float] = (50.0, 10.0),
                        satellite_longitude_deg: float = 30.0) -> BeamLayout:
    """
    Retícula hexagonal de 1 + 3·n·(n+1) haces centrada en ``center``; los
    centros adyacentes están separados √3·r en el plano tangente local.
    El haz 1 es el central y los demás se numeran anillo a anillo.
    """
    if n_rings < 0:
        raise GeometryError("n_rings debe ser >= 0")
    if beam_radius_km <= 0:
        raise GeometryError("el radio del haz debe ser positivo")
    center_lat, center_lon = center
    if abs(center_lat) >= 90 or not is_visible(center_lat, center_lon, satellite_longitude_deg):
        raise GeometryError(f"el centro ({center_lat}, {center_lon}) no es visible desde el satélite "
                            f"en {satellite_longitude_deg}°E")

    spacing = math.sqrt(3.0) * beam_radius_km
    offsets = []
    for q in range(-n_rings, n_rings + 1):
        for r in range(max(-n_rings, -q - n_rings), min(n_rings, -q + n_rings) + 1):
            east = spacing * (q + r / 2.0)
            north = spacing * (r * math.sqrt(3.0) / 2.0)
            ring = max(abs(q), abs(r), abs(q + r))
            angle = math.atan2(north, east) % (2 * math.pi)
            offsets.append((ring, round(angle, 12), east, north))
    offsets.sort()

    beams = []
    for beam_id, (_, _, east, north) in enumerate(offsets, start=1):
        distance = math.hypot(east, north)
        lat, lon = destination_point(center_lat, center_lon, distance, math.atan2(east, north))
        beams.append(BeamSpec(beam_id, float(lat), float(lon), beam_radius_km))
    layout = BeamLayout(tuple(beams), satellite_longitude_deg)
    logger.debug("Layout hexagonal de %d anillos: %d haces", n_rings, layout.n_beams)
    return layout


def load_beam_layout(path: str, satellite_longitude_deg: float = 30.0) -> BeamLayout:
    """
    Cargar layout desde CSV ``id,lat_deg,lon_deg,radius_km`` (columna opcional
    ``area_km2``). Los errores indican la línea del archivo.
    """
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True, encoding='utf-8')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise LayoutParseError(path, 1, f"no se puede leer: {e}") from e
    missing = [column for column in LAYOUT_COLUMNS if column not in frame.columns]
    if missing:
        raise LayoutParseError(path, 1, f"faltan columnas {missing}")
    if frame.empty:
        raise LayoutParseError(path, 2, "el archivo no contiene haces")

    beams = []
    seen: Dict[int, int] = {}
    for index, row in frame.iterrows():
        line = int(index) + 2
        empty = [column for column in LAYOUT_COLUMNS if pd.isna(row[column]) or not str(row[column]).strip()]
        if empty:
            raise LayoutParseError(path, line, f"campos vacíos {empty}")
        try:
            beam_id = int(row['id'])
            lat, lon, radius = float(row['lat_deg']), float(row['lon_deg']), float(row['radius_km'])
            area = float(row['area_km2']) if 'area_km2' in frame.columns and pd.notna(row['area_km2']) else 0.0
        except (TypeError, ValueError) as e:
            raise LayoutParseError(path, line, f"fila mal formada: {e}") from e
        if beam_id in seen:
            raise LayoutParseError(path, line, f"id {beam_id} duplicado (primera aparición en la línea {seen[beam_id]})")
        seen[beam_id] = line
        try:
            beams.append(BeamSpec(beam_id, lat, lon, radius, area))
        except GeometryError as e:
            raise LayoutParseError(path, line, str(e)) from e
        if not is_visible(lat, lon, satellite_longitude_deg):
            raise LayoutParseError(path, line, f"haz {beam_id} fuera de la visibilidad del satélite")
    try:
        return BeamLayout(tuple(beams), satellite_longitude_deg)
    except GeometryError as e:
        raise LayoutParseError(path, 2, str(e)) from e


# ==================== DESPLIEGUE ====================

def users_in_beam(density: float, area_km2: float, rounding: str = "round") -> int:
    """N_U^(b) = [ρ·A_b]: redondeo half-up (``round``) o truncado (``floor``)"""
    value = density * area_km2
    if rounding == "floor":
        return int(math.floor(value))
    return int(math.floor(value + 0.5))


def deploy_users(layout: BeamLayout, density: float, rng: np.random.Generator,
                 rounding: str = "round") -> UserDeployment:
    """
    Desplegar round(ρ·A_b) usuarios i.i.d. uniformes en la huella circular de cada haz
    Complejidad: O(N_U) - muestreo vectorizado por haz
    """
    if density <= 0:
        raise GeometryError("la densidad debe ser positiva")
    users_by_beam: Dict[int, List[User]] = {}
    warnings: List[str] = []
    next_id = 0
    for beam in layout.beams:
        count = users_in_beam(density, beam.area_km2, rounding)
        if count == 0:
            message = f"el haz {beam.beam_id} no recibe usuarios (ρ·A = {density * beam.area_km2:.3f})"
            logger.warning(message)
            warnings.append(message)
            users_by_beam[beam.beam_id] = []
            continue
        radial = beam.radius_km * np.sqrt(rng.random(count))
        azimuth = 2 * np.pi * rng.random(count)
        lats, lons = destination_point(beam.lat_deg, beam.lon_deg, radial, azimuth)
        east = radial * np.sin(azimuth)
        north = radial * np.cos(azimuth)
        users_by_beam[beam.beam_id] = [
            User(next_id + i, beam.beam_id, float(lats[i]), float(lons[i]), float(east[i]), float(north[i]))
            for i in range(count)
        ]
        next_id += count
    return UserDeployment(users_by_beam, density, warnings)


# ==================== DISTANCIAS ====================

def slant_range(lat_deg, lon_deg, layout: BeamLayout) -> np.ndarray:
    """
    Distancia euclídea (km) entre el satélite GEO y el punto en superficie.
    Acepta escalares o arreglos.
    """
    visible = is_visible(lat_deg, lon_deg, layout.satellite_longitude_deg, layout.orbit_radius_km)
    if not np.all(visible):
        raise GeometryError("posición fuera de la visibilidad del satélite GEO")
    ground = ecef_km(lat_deg, lon_deg)
    distance = np.linalg.norm(satellite_ecef_km(layout) - ground, axis=-1)
    return distance


def user_slant_range(user: User, layout: BeamLayout) -> float:
    return float(slant_range(user.lat_deg, user.lon_deg, layout))


def footprint_distance_km(user: User, layout: BeamLayout, beam_id: Optional[int] = None) -> float:
    """Distancia de círculo máximo del usuario al centro de su haz (o de ``beam_id``)"""
    beam = layout.beam(beam_id or user.beam_id)
    return float(great_circle_km(user.lat_deg, user.lon_deg, beam.lat_deg, beam.lon_deg))
