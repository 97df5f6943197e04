"""
Servicio de precodificación
===========================

Canal equivalente multicast (media de los canales del cluster), precodificador
MMSE regularizado, normalizaciones PAC/SPC y SINR por usuario.

    W = (H̃ᴴH̃ + diag(α))⁻¹ H̃ᴴ,   α_b = P_Z,b / p

El sistema se resuelve con la factorización de Cholesky de la matriz de Gram
regularizada (hermítica definida positiva); nunca se invierte explícitamente.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from src.errors import NumericalError, PrecodingError
from src.models.precoding import NONE, PAC, SPC, EquivalentChannelMatrix, PowerModel, PrecodingMatrix

logger = logging.getLogger(__name__)


# ==================== CANAL EQUIVALENTE ====================

def equivalent_channel(member_channels: np.ndarray) -> np.ndarray:
    """h̃_b = (1/K_b)·Σ h_b^(i): media compleja de las filas del cluster"""
    members = np.atleast_2d(np.asarray(member_channels, dtype=complex))
    if members.shape[0] == 0 or members.size == 0:
        raise PrecodingError("el canal equivalente de un cluster vacío no está definido")
    return members.mean(axis=0)


def equivalent_channel_matrix(rows: Sequence[Optional[np.ndarray]], n_beams: int,
                              cluster_ids: Sequence[Optional[int]] = ()) -> EquivalentChannelMatrix:
    """Apilar las filas por haz; un haz sin cluster (None) aporta una fila nula"""
    matrix = np.zeros((n_beams, n_beams), dtype=complex)
    for b, row in enumerate(rows):
        if row is not None:
            matrix[b] = row
    ids = tuple(cluster_ids) if cluster_ids else tuple(None for _ in range(n_beams))
    return EquivalentChannelMatrix(matrix, ids)


# ==================== PRECODIFICADOR MMSE ====================

def regularizers(power: PowerModel, noise_per_beam: Optional[np.ndarray] = None) -> np.ndarray:
    """α_b = P_Z,b/p; con canales normalizados por ruido P_Z,b = 1"""
    n_beams = power.n_beams
    noise = np.ones(n_beams) if noise_per_beam is None else np.asarray(noise_per_beam, dtype=float)
    return noise / power.per_stream_power


def mmse_precoder(channel: EquivalentChannelMatrix, power: Optional[PowerModel] = None,
                  noise_per_beam: Optional[np.ndarray] = None,
                  alpha: Optional[np.ndarray] = None) -> PrecodingMatrix:
    """
    Resolver (H̃ᴴH̃ + diag(α))·W = H̃ᴴ. ``alpha`` explícito tiene prioridad
    sobre el derivado de ``power``/``noise_per_beam``.
    Complejidad: O(N_B³) - factorización de Cholesky
    """
    h = np.asarray(channel.matrix, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise PrecodingError(f"H̃ debe ser cuadrada, forma {h.shape}")
    if alpha is None:
        if power is None:
            raise PrecodingError("se requiere el modelo de potencia o α explícito")
        alpha = regularizers(power, noise_per_beam)
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (h.shape[0],))
    if np.any(alpha <= 0):
        raise PrecodingError("los regularizadores α_b deben ser positivos")
    h_hermitian = h.conj().T
    gram = h_hermitian @ h + np.diag(alpha)
    try:
        factor = cho_factor(gram, lower=False, check_finite=True)
    except (LinAlgError, ValueError) as e:
        raise NumericalError(f"la matriz de Gram regularizada no es definida positiva: {e}") from e
    return PrecodingMatrix(cho_solve(factor, h_hermitian), NONE)


def normalize_pac(precoder: PrecodingMatrix) -> PrecodingMatrix:
    """Restricción por antena: cada fila de W con norma unitaria"""
    w = np.asarray(precoder.matrix, dtype=complex)
    norms = np.linalg.norm(w, axis=1)
    if np.any(norms == 0):
        raise NumericalError("PAC: W tiene filas nulas")
    return PrecodingMatrix(w / norms[:, np.newaxis], PAC)


def normalize_spc(precoder: PrecodingMatrix) -> PrecodingMatrix:
    """Restricción de potencia total: W·√(N_B/tr(WWᴴ))"""
    w = np.asarray(precoder.matrix, dtype=complex)
    trace = float(np.real(np.vdot(w, w)))
    if trace == 0:
        raise NumericalError("SPC: W es la matriz nula")
    return PrecodingMatrix(w * np.sqrt(w.shape[1] / trace), SPC)


def identity_precoder(n_beams: int) -> PrecodingMatrix:
    """Sin precodificación: cada alimentador transmite sólo el flujo de su haz"""
    return PrecodingMatrix(np.eye(n_beams, dtype=complex), NONE)


def frame_precoder(channel: EquivalentChannelMatrix, power: PowerModel, precoder: str,
                   noise_per_beam: Optional[np.ndarray] = None) -> PrecodingMatrix:
    """
    Precodificador de una trama según la configuración (none|pac|spc). Las
    columnas de los haces sin cluster se anulan.
    """
    inactive = np.array([cid is None for cid in channel.cluster_ids])
    if precoder == NONE:
        w = identity_precoder(channel.n_beams).matrix
        w[:, inactive] = 0.0
        return PrecodingMatrix(w, NONE)
    result = mmse_precoder(channel, power, noise_per_beam)
    result.matrix[:, inactive] = 0.0
    if precoder == PAC:
        return normalize_pac(result)
    if precoder == SPC:
        return normalize_spc(result)
    raise PrecodingError(f"precodificador desconocido '{precoder}'")


# ==================== SINR ====================

def sinr_vector(user_channels: np.ndarray, precoder: PrecodingMatrix, serving_beams: Sequence[int],
                power: float) -> np.ndarray:
    """
    γ_i = p|h_i w_b|² / (1 + Σ_{ℓ≠b} p|h_i w_ℓ|²) para varios usuarios a la vez.
    ``serving_beams`` son índices de columna (0..N_B-1).
    """
    h = np.atleast_2d(np.asarray(user_channels, dtype=complex))
    beams = np.asarray(serving_beams, dtype=int)
    received = np.abs(h @ precoder.matrix) ** 2
    mask = np.zeros_like(received, dtype=bool)
    mask[np.arange(h.shape[0]), beams] = True
    signal = power * received[mask]
    interference = power * np.where(mask, 0.0, received).sum(axis=1)
    return signal / (1.0 + interference)


def user_sinr(user_channel: np.ndarray, precoder: PrecodingMatrix, serving_beam: int, power: float) -> float:
    """SINR lineal de un usuario servido por el haz ``serving_beam`` (id 1..N_B)"""
    return float(sinr_vector(user_channel, precoder, [serving_beam - 1], power)[0])


def no_precoding_sinr(user_channel: np.ndarray, serving_beam: int, power: float) -> float:
    """SINR con W = I (referencia sin precodificación)"""
    h = np.asarray(user_channel, dtype=complex)
    return user_sinr(h, identity_precoder(h.shape[-1]), serving_beam, power)
