"""
Medición del coste de los algoritmos de clustering en función de N_U
"""

import logging
import time
from typing import Dict, List, Sequence

import numpy as np

from src.models.partition import KMEANSPP, MAXDIST, RANDOM
from src.services import clustering_service

logger = logging.getLogger(__name__)

DEFAULT_USER_COUNTS = (200, 400, 800, 1600, 3200)


def _cluster_once(algorithm: str, features: np.ndarray, cluster_size: int, rng: np.random.Generator):
    if algorithm == RANDOM:
        return clustering_service.cluster_random(features, cluster_size, rng)
    if algorithm == MAXDIST:
        return clustering_service.cluster_maxdist(features, cluster_size)
    n_clusters = clustering_service.kmeans_cluster_count(features.shape[0], cluster_size)
    return clustering_service.cluster_kmeanspp(features, n_clusters, rng)


def benchmark_clustering(user_counts: Sequence[int] = DEFAULT_USER_COUNTS, cluster_size: int = 4,
                         algorithms: Sequence[str] = (RANDOM, MAXDIST, KMEANSPP), repeats: int = 3,
                         seed: int = 2024, radius_km: float = 160.0) -> List[dict]:
    """
    Mediana del tiempo de reloj de clustering de un haz con N_U usuarios
    uniformes en un disco (características euclídeas).
    """
    rows = []
    for n_users in user_counts:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(n_users),)))
        radius = radius_km * np.sqrt(rng.uniform(size=n_users))
        azimuth = 2 * np.pi * rng.uniform(size=n_users)
        features = np.column_stack([radius * np.sin(azimuth), radius * np.cos(azimuth)])
        for algorithm in algorithms:
            timings = []
            for repeat in range(repeats):
                cluster_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(n_users), repeat)))
                start = time.perf_counter()
                _cluster_once(algorithm, features, cluster_size, cluster_rng)
                timings.append(time.perf_counter() - start)
            seconds = float(np.median(timings))
            logger.info("%s N_U=%d: %.6f s", algorithm, n_users, seconds)
            rows.append({'algorithm': algorithm, 'n_users': int(n_users), 'cluster_size': cluster_size,
                         'seconds': seconds})
    return rows


def loglog_slope(rows: Sequence[dict]) -> Dict[str, float]:
    """Pendiente por mínimos cuadrados de log(tiempo) frente a log(N_U) por algoritmo"""
    by_algorithm: Dict[str, List[tuple]] = {}
    for row in rows:
        by_algorithm.setdefault(row['algorithm'], []).append((row['n_users'], row['seconds']))
    slopes = {}
    for algorithm, points in by_algorithm.items():
        if len(points) < 2:
            continue
        n_users, seconds = np.array(points, dtype=float).T
        slope, _ = np.polyfit(np.log(n_users), np.log(np.maximum(seconds, 1e-12)), 1)
        slopes[algorithm] = float(slope)
    return slopes
