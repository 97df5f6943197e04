import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from src.errors import GeometryError

EARTH_RADIUS_KM = 6371.0
GEO_ORBIT_RADIUS_KM = 42164.0


@dataclass(frozen=True)
class BeamSpec:
    """
    MODELO DE HAZ
    =============

    Huella circular de un haz sobre la Tierra esférica. El área por defecto
    es la del círculo (πr²) salvo que el archivo de layout la sobrescriba.
    """

    beam_id: int
    lat_deg: float
    lon_deg: float
    radius_km: float
    area_km2: float = 0.0

    def __post_init__(self):
        if self.radius_km <= 0:
            raise GeometryError(f"haz {self.beam_id}: el radio debe ser positivo")
        if abs(self.lat_deg) >= 90:
            raise GeometryError(f"haz {self.beam_id}: latitud fuera de (-90, 90)")
        if self.area_km2 <= 0:
            object.__setattr__(self, "area_km2", math.pi * self.radius_km ** 2)

    def to_dict(self) -> dict:
        return {
            'id': self.beam_id,
            'lat_deg': self.lat_deg,
            'lon_deg': self.lon_deg,
            'radius_km': self.radius_km,
            'area_km2': self.area_km2,
        }

    def __str__(self) -> str:
        return f"Haz {self.beam_id} ({self.lat_deg:.2f}°, {self.lon_deg:.2f}°) r={self.radius_km:.1f} km"


@dataclass(frozen=True)
class BeamLayout:
    """
    MODELO DE COBERTURA MULTI-HAZ
    =============================

    Conjunto inmutable de haces más la posición del satélite GEO. Los
    identificadores de haz son 1..N_B, únicos; el índice de alimentador j
    (columna del canal) es ``beam_id - 1``.
    """

    beams: Tuple[BeamSpec, ...]
    satellite_longitude_deg: float = 30.0
    orbit_radius_km: float = GEO_ORBIT_RADIUS_KM

    def __post_init__(self):
        if not self.beams:
            raise GeometryError("el layout debe contener al menos un haz")
        ids = [beam.beam_id for beam in self.beams]
        if sorted(ids) != list(range(1, len(ids) + 1)):
            raise GeometryError(f"identificadores de haz deben ser 1..{len(ids)} y únicos: {ids}")
        object.__setattr__(self, "beams", tuple(sorted(self.beams, key=lambda b: b.beam_id)))

    @property
    def n_beams(self) -> int:
        return len(self.beams)

    def beam(self, beam_id: int) -> BeamSpec:
        return self.beams[beam_id - 1]

    def to_dict(self) -> dict:
        return {
            'satellite_longitude_deg': self.satellite_longitude_deg,
            'orbit_radius_km': self.orbit_radius_km,
            'beams': [beam.to_dict() for beam in self.beams],
        }

    def __str__(self) -> str:
        return f"Layout de {self.n_beams} haces, satélite a {self.satellite_longitude_deg:.1f}°E"


@dataclass(frozen=True)
class User:
    """Usuario en posición fija; ``east_km``/``north_km`` son coordenadas del plano tangente local del haz"""

    user_id: int
    beam_id: int
    lat_deg: float
    lon_deg: float
    east_km: float
    north_km: float

    def to_dict(self) -> dict:
        return {
            'user_id': self.user_id,
            'beam_id': self.beam_id,
            'lat_deg': self.lat_deg,
            'lon_deg': self.lon_deg,
        }


@dataclass
class UserDeployment:
    """
    MODELO DE DESPLIEGUE DE USUARIOS
    ================================

    Usuarios por haz. ``users_by_beam[b]`` respeta el orden de generación, que
    es también el orden de índices locales usado por el clustering.
    """

    users_by_beam: Dict[int, List[User]]
    density: float
    warnings: List[str] = field(default_factory=list)

    def users(self, beam_id: int) -> List[User]:
        return self.users_by_beam.get(beam_id, [])

    def all_users(self) -> List[User]:
        return [user for beam_id in sorted(self.users_by_beam) for user in self.users_by_beam[beam_id]]

    def active_beams(self) -> List[int]:
        """Haces con al menos un usuario (los vacíos no se planifican)"""
        return [beam_id for beam_id in sorted(self.users_by_beam) if self.users_by_beam[beam_id]]

    def count(self, beam_id: int) -> int:
        return len(self.users(beam_id))

    def __len__(self) -> int:
        return sum(len(users) for users in self.users_by_beam.values())

    def to_dict(self) -> dict:
        return {
            'density': self.density,
            'users_per_beam': {str(b): len(users) for b, users in sorted(self.users_by_beam.items())},
            'warnings': list(self.warnings),
        }
