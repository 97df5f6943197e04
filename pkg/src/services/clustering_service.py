"""
Servicio de clustering
======================

Particiona los usuarios de un haz con los cuatro algoritmos:

1. UpperBound: un único cluster alrededor de un usuario de referencia aleatorio
2. Random: referencia aleatoria entre los no agrupados + sus K-1 vecinos
3. MaxDist: referencia = usuario más lejano del baricentro de los no agrupados
4. k-means++: siembra D² + iteraciones de Lloyd, tamaño de cluster variable

Empates (distancias iguales, máximos iguales): gana el índice más bajo.
"""

import logging
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from src.errors import ClusteringError
from src.models.beam import User
from src.models.channel import UserChannel
from src.models.partition import (EUCLIDEAN_2D, KMEANSPP, MAXDIST, RANDOM, UNICAST, UPPERBOUND,
                                  Centroids, FeatureSpace, Partition)

logger = logging.getLogger(__name__)

ReferencePicker = Callable[[np.ndarray], int]


# ==================== ESPACIO DE CARACTERÍSTICAS ====================

def feature_vectors(users: Sequence[User], channels: Optional[Sequence[UserChannel]],
                    space: FeatureSpace) -> np.ndarray:
    """
    u_i^(b): coordenadas (este, norte) en km del plano tangente del haz, o
    concatenación (ℜ{h}, ℑ{h}) del vector de canal.
    """
    if space.metric == EUCLIDEAN_2D:
        if not users:
            return np.zeros((0, 2))
        return np.array([[user.east_km, user.north_km] for user in users], dtype=float)
    if channels is None:
        raise ClusteringError("la métrica channel requiere canales sintetizados")
    if not channels:
        return np.zeros((0, space.dimension))
    h = np.vstack([channel.coefficients for channel in channels])
    features = np.hstack([h.real, h.imag])
    if features.shape[1] != space.dimension:
        raise ClusteringError(f"dimensión {features.shape[1]} distinta de la del espacio ({space.dimension})")
    return features


def standardize(features: np.ndarray) -> np.ndarray:
    """Escalado a varianza unitaria por columna; las columnas constantes no se tocan"""
    features = np.asarray(features, dtype=float)
    if features.shape[0] == 0:
        return features
    centered = features - features.mean(axis=0)
    std = centered.std(axis=0)
    return centered / np.where(std > 0, std, 1.0)


def _squared_distances(features: np.ndarray, point: np.ndarray) -> np.ndarray:
    diff = features - point
    return np.einsum('ij,ij->i', diff, diff)


def barycentre(features: np.ndarray, subset: Sequence[int]) -> np.ndarray:
    """Media vectorial de las características del subconjunto"""
    subset = np.asarray(subset, dtype=int)
    if subset.size == 0:
        raise ClusteringError("el baricentro de un conjunto vacío no está definido")
    return np.asarray(features, dtype=float)[subset].mean(axis=0)


def _nearest_group(features: np.ndarray, remaining: np.ndarray, reference: int, size: int) -> np.ndarray:
    """
    La referencia más sus ``size``-1 vecinos más cercanos dentro de ``remaining``
    Complejidad: O(|Q|·d + |Q| log |Q|)
    """
    others = remaining[remaining != reference]
    distances = _squared_distances(features[others], features[reference])
    nearest = others[np.argsort(distances, kind='stable')[:size - 1]]
    return np.concatenate(([reference], nearest))


def _check_size(features: np.ndarray, cluster_size: int):
    n_users = features.shape[0]
    if cluster_size < 1:
        raise ClusteringError(f"K debe ser >= 1 (K={cluster_size})")
    if cluster_size > n_users:
        raise ClusteringError(f"K={cluster_size} supera el número de usuarios del haz ({n_users})")


# ==================== ALGORITMOS DE TAMAÑO FIJO ====================

def cluster_upperbound(features: np.ndarray, cluster_size: int, rng: np.random.Generator,
                       beam_id: int = 0) -> Partition:
    """Un único cluster: usuario de referencia aleatorio y sus K-1 vecinos (partición parcial)"""
    features = np.asarray(features, dtype=float)
    _check_size(features, cluster_size)
    remaining = np.arange(features.shape[0])
    reference = int(rng.integers(features.shape[0]))
    group = _nearest_group(features, remaining, reference, cluster_size)
    return Partition(beam_id, [tuple(int(i) for i in group)], UPPERBOUND, partial=True)


def cluster_random(features: np.ndarray, cluster_size: int, rng: np.random.Generator,
                   beam_id: int = 0, pick_reference: Optional[ReferencePicker] = None) -> Partition:
    """
    Referencia uniforme entre los usuarios aún no servidos, agrupada con sus
    min(K, |Q|)-1 vecinos en Q, hasta vaciar Q.
    ``pick_reference`` recibe los índices restantes y devuelve el elegido.
    Complejidad: O(N_U²/K · d)
    """
    features = np.asarray(features, dtype=float)
    _check_size(features, cluster_size)
    remaining = np.arange(features.shape[0])
    clusters = []
    while remaining.size:
        if pick_reference is None:
            reference = int(remaining[rng.integers(remaining.size)])
        else:
            reference = int(pick_reference(remaining))
        group = _nearest_group(features, remaining, reference, min(cluster_size, remaining.size))
        clusters.append(tuple(int(i) for i in group))
        remaining = remaining[~np.isin(remaining, group)]
    return Partition(beam_id, clusters, RANDOM)


def cluster_maxdist(features: np.ndarray, cluster_size: int, beam_id: int = 0) -> Partition:
    """
    Referencia = usuario más lejano del baricentro de los restantes; el
    baricentro se recalcula tras cada cluster. Determinista.
    Complejidad: O(N_U²/K · d)
    """
    features = np.asarray(features, dtype=float)
    _check_size(features, cluster_size)
    remaining = np.arange(features.shape[0])
    clusters = []
    while remaining.size:
        g = barycentre(features, remaining)
        reference = int(remaining[np.argmax(_squared_distances(features[remaining], g))])
        group = _nearest_group(features, remaining, reference, min(cluster_size, remaining.size))
        clusters.append(tuple(int(i) for i in group))
        remaining = remaining[~np.isin(remaining, group)]
    return Partition(beam_id, clusters, MAXDIST)


def unicast_partition(n_users: int, algorithm: str = UNICAST, beam_id: int = 0) -> Partition:
    """Todos los usuarios en clusters unitarios, en orden de índice"""
    return Partition(beam_id, [(i,) for i in range(n_users)], algorithm)


# ==================== K-MEANS++ ====================

def kmeanspp_init(features: np.ndarray, n_clusters: int, rng: np.random.Generator) -> Centroids:
    """
    Siembra k-means++: primer centroide uniforme, los siguientes con
    probabilidad D(x)²/ΣD(x)² entre los usuarios no elegidos. Si todos los
    no elegidos tienen D = 0 se elige uniformemente entre ellos.
    """
    features = np.asarray(features, dtype=float)
    n_users = features.shape[0]
    if not 1 <= n_clusters <= n_users:
        raise ClusteringError(f"n_clusters={n_clusters} fuera de 1..{n_users}")
    chosen = np.zeros(n_users, dtype=bool)
    indices = [int(rng.integers(n_users))]
    chosen[indices[0]] = True
    closest = _squared_distances(features, features[indices[0]])
    for _ in range(1, n_clusters):
        weights = np.where(chosen, 0.0, closest)
        total = weights.sum()
        if total > 0:
            index = int(rng.choice(n_users, p=weights / total))
        else:
            candidates = np.flatnonzero(~chosen)
            index = int(candidates[rng.integers(candidates.size)])
        indices.append(index)
        chosen[index] = True
        np.minimum(closest, _squared_distances(features, features[index]), out=closest)
    return Centroids(features[indices].copy(), tuple(indices))


def _assign(features: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return np.argmin(cdist(features, centers, "sqeuclidean"), axis=1)


def _repair_empty(features: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """
    Resembrar cada cluster vacío en el punto con mayor distancia cuadrática a
    su centroide actual, tomado de un cluster con al menos dos miembros.
    """
    n_clusters = centers.shape[0]
    counts = np.bincount(labels, minlength=n_clusters)
    for empty in np.flatnonzero(counts == 0):
        own = np.einsum('ij,ij->i', features - centers[labels], features - centers[labels])
        own[counts[labels] < 2] = -1.0
        donor = int(np.argmax(own))
        counts[labels[donor]] -= 1
        labels[donor] = empty
        counts[empty] = 1
        centers[empty] = features[donor]
    return labels


def _labels_to_clusters(labels: np.ndarray, n_clusters: int) -> List[tuple]:
    return [tuple(int(i) for i in np.flatnonzero(labels == c)) for c in range(n_clusters)]


def cluster_kmeanspp(features: np.ndarray, n_clusters: int, rng: np.random.Generator,
                     tol: float = 1e-6, max_iter: int = 300, beam_id: int = 0) -> Partition:
    """
    Lloyd desde la siembra k-means++ hasta que el desplazamiento máximo de los
    centroides sea < ``tol`` o se alcance ``max_iter``. El SSE de cada
    iteración queda en ``sse_history`` (no creciente).
    Complejidad: O(iteraciones · N_U · N_K · d)
    """
    features = np.asarray(features, dtype=float)
    centers = kmeanspp_init(features, n_clusters, rng).matrix
    labels = np.zeros(features.shape[0], dtype=int)
    history: List[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        labels = _repair_empty(features, centers, _assign(features, centers))
        updated = np.vstack([features[labels == c].mean(axis=0) for c in range(n_clusters)])
        history.append(_sse_from_labels(features, labels, updated))
        shift = float(np.max(np.linalg.norm(updated - centers, axis=1)))
        centers = updated
        if shift < tol:
            converged = True
            break
    if not converged:
        logger.warning("k-means++ del haz %d no convergió en %d iteraciones", beam_id, max_iter)
    return Partition(beam_id, _labels_to_clusters(labels, n_clusters), KMEANSPP,
                     converged=converged, iterations=iterations, sse_history=history)


# ==================== COSTE ====================

def _sse_from_labels(features: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> float:
    diff = features - centers[labels]
    return float(np.einsum('ij,ij->', diff, diff))


def sse_cost(partition: Partition, features: np.ndarray) -> float:
    """Σ_c Σ_{j∈C_c} ‖u_j − m_c‖², con m_c la media del cluster"""
    if partition.partial:
        raise ClusteringError("el SSE requiere una partición completa")
    features = np.asarray(features, dtype=float)
    total = 0.0
    for cluster in partition.clusters:
        members = features[list(cluster)]
        diff = members - members.mean(axis=0)
        total += float(np.einsum('ij,ij->', diff, diff))
    return total


# ==================== DESPACHO ====================

def kmeans_cluster_count(n_users: int, cluster_size: int) -> int:
    """N_K = ⌊N_U/K⌋, al menos 1"""
    return max(1, n_users // cluster_size)


def build_partition(algorithm: str, features: np.ndarray, cluster_size: int, rng: np.random.Generator,
                    beam_id: int = 0, tol: float = 1e-6, max_iter: int = 300) -> Partition:
    """
    Partición de un haz dentro del pipeline. Con K=1 todos los algoritmos se
    reducen al unicast en orden de índice. Los algoritmos de tamaño fijo usan
    K_eff = min(K, N_U).
    """
    n_users = features.shape[0]
    if n_users == 0:
        return Partition(beam_id, [], algorithm)
    if cluster_size == 1:
        return unicast_partition(n_users, algorithm, beam_id)
    effective = min(cluster_size, n_users)
    if effective < cluster_size and algorithm != KMEANSPP:
        logger.debug("haz %d: K=%d reducido a %d usuarios", beam_id, cluster_size, effective)
    if algorithm == UPPERBOUND:
        return cluster_upperbound(features, effective, rng, beam_id)
    if algorithm == RANDOM:
        return cluster_random(features, effective, rng, beam_id)
    if algorithm == MAXDIST:
        return cluster_maxdist(features, effective, beam_id)
    if algorithm == KMEANSPP:
        return cluster_kmeanspp(features, kmeans_cluster_count(n_users, cluster_size), rng, tol, max_iter, beam_id)
    raise ClusteringError(f"algoritmo desconocido '{algorithm}'")

