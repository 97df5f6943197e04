from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy import constants

from src.errors import ConfigError

TAPERED_APERTURE = "tapered_aperture"
GAIN_TABLE = "gain_table"


@dataclass(frozen=True)
class LinkBudgetParams:
    """
    PARÁMETROS DEL BALANCE DE ENLACE
    ================================

    Frecuencia, antena receptora, pérdidas, temperatura de ruido y ancho
    de banda del usuario.
    """

    carrier_frequency_hz: float = 19.5e9
    rx_antenna_diameter_m: float = 0.6
    rx_antenna_efficiency: float = 0.6
    antenna_losses_db: float = 2.55
    noise_temperature_k: float = 207.0
    user_bandwidth_hz: float = 500e6
    boltzmann: float = constants.Boltzmann

    def __post_init__(self):
        for name in ('carrier_frequency_hz', 'rx_antenna_diameter_m', 'noise_temperature_k',
                     'user_bandwidth_hz', 'boltzmann'):
            if not getattr(self, name) > 0:
                raise ConfigError("debe ser positivo", key=f"link.{name}")
        if not 0 < self.rx_antenna_efficiency <= 1:
            raise ConfigError("debe estar en (0, 1]", key="link.rx_antenna_efficiency")
        if self.antenna_losses_db < 0:
            raise ConfigError("no puede ser negativo", key="link.antenna_losses_db")

    @property
    def wavelength_m(self) -> float:
        return constants.c / self.carrier_frequency_hz

    @property
    def losses_linear(self) -> float:
        """G_loss como factor de atenuación lineal"""
        return 10 ** (-self.antenna_losses_db / 10)


@dataclass(frozen=True, eq=False)
class GainGrid:
    """Rejilla regular lat/lon de ganancias (dBi) de un alimentador"""

    lats_deg: np.ndarray
    lons_deg: np.ndarray
    gains_dbi: np.ndarray  # forma (len(lats), len(lons))


@dataclass(frozen=True)
class AntennaPattern:
    """
    PATRÓN DE LA ANTENA MULTI-HAZ
    =============================

    - tapered_aperture: apertura circular (2·J1(u)/u)², calibrada para que el
      contorno de -``edge_taper_db`` caiga sobre el radio del haz.
    - gain_table: rejilla por alimentador, interpolación bilineal.
    """

    mode: str = TAPERED_APERTURE
    peak_gain_dbi: float = 52.0
    edge_taper_db: float = 3.0
    tables: Dict[int, GainGrid] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in (TAPERED_APERTURE, GAIN_TABLE):
            raise ConfigError(f"modo desconocido '{self.mode}'", key="antenna.mode")
        if self.edge_taper_db <= 0:
            raise ConfigError("debe ser positivo", key="antenna.edge_taper_db")
        if self.mode == GAIN_TABLE and not self.tables:
            raise ConfigError("el modo gain_table requiere una tabla", key="antenna.gain_table")

    @property
    def peak_gain_linear(self) -> float:
        return 10 ** (self.peak_gain_dbi / 10)


@dataclass(frozen=True, eq=False)
class UserChannel:
    """Fila h_b^(i) de coeficientes complejos (longitud N_B) de un usuario"""

    user_id: int
    beam_id: int
    coefficients: np.ndarray

    @property
    def n_feeds(self) -> int:
        return self.coefficients.shape[0]

    def serving_coefficient(self) -> complex:
        return complex(self.coefficients[self.beam_id - 1])

    def to_dict(self, precision: Optional[int] = None) -> dict:
        values = self.coefficients if precision is None else np.round(self.coefficients, precision)
        return {
            'user_id': self.user_id,
            'beam_id': self.beam_id,
            'real': values.real.tolist(),
            'imag': values.imag.tolist(),
        }
