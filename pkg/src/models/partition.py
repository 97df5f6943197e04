from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Set, Tuple

import numpy as np

from src.errors import ConfigError

EUCLIDEAN_2D = "euclidean2d"
CHANNEL = "channel"

UPPERBOUND = "upperbound"
RANDOM = "random"
MAXDIST = "maxdist"
KMEANSPP = "kmeanspp"
UNICAST = "unicast"

ALGORITHMS = (UPPERBOUND, RANDOM, MAXDIST, KMEANSPP)
METRICS = (EUCLIDEAN_2D, CHANNEL)


@dataclass(frozen=True)
class FeatureSpace:
    """Espacio de similitud: posiciones 2-D (km) o partes real/imaginaria del canal (2·N_B)"""

    metric: str
    dimension: int

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ConfigError(f"métrica desconocida '{self.metric}'", key="clustering.metric")
        if self.metric == EUCLIDEAN_2D and self.dimension != 2:
            raise ConfigError("la métrica euclidean2d tiene dimensión 2", key="clustering.metric")
        if self.metric == CHANNEL and (self.dimension < 2 or self.dimension % 2):
            raise ConfigError("la métrica channel tiene dimensión 2·N_B", key="clustering.metric")

    @classmethod
    def for_metric(cls, metric: str, n_beams: int) -> "FeatureSpace":
        return cls(metric, 2 if metric == EUCLIDEAN_2D else 2 * n_beams)


@dataclass(frozen=True, eq=False)
class Centroids:
    """Matriz de prototipos M^(b) (una fila por cluster) y los usuarios que la sembraron"""

    matrix: np.ndarray
    seed_indices: Tuple[int, ...] = ()

    @property
    def n_clusters(self) -> int:
        return self.matrix.shape[0]


@dataclass
class Partition:
    """
    MODELO DE PARTICIÓN DE UN HAZ
    =============================

    Lista ordenada de clusters (índices locales de usuario), en orden de
    creación. Condiciones:
    - clusters disjuntos
    - la unión cubre a todos los usuarios (excepto UpperBound: ``partial``)
    - ningún cluster vacío

    ``converged``/``iterations``/``sse_history`` sólo los rellena k-means++.
    """

    beam_id: int
    clusters: List[Tuple[int, ...]]
    algorithm: str
    partial: bool = False
    converged: Optional[bool] = None
    iterations: int = 0
    sse_history: List[float] = field(default_factory=list)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def sizes(self) -> List[int]:
        return [len(cluster) for cluster in self.clusters]

    def members(self) -> Set[int]:
        return {index for cluster in self.clusters for index in cluster}

    def canonical(self) -> FrozenSet[FrozenSet[int]]:
        """Forma canónica sin orden, para comparar particiones"""
        return frozenset(frozenset(cluster) for cluster in self.clusters)

    def violations(self, n_users: int) -> List[str]:
        """
        Verificar las tres condiciones de partición
        Complejidad: O(N_U)
        """
        problems = []
        seen: Set[int] = set()
        for c, cluster in enumerate(self.clusters):
            if not cluster:
                problems.append(f"cluster {c} vacío")
            overlap = seen.intersection(cluster)
            if overlap or len(set(cluster)) != len(cluster):
                problems.append(f"cluster {c} repite usuarios {sorted(overlap)}")
            seen.update(cluster)
        outside = [i for i in seen if not 0 <= i < n_users]
        if outside:
            problems.append(f"índices fuera de rango {sorted(outside)}")
        if not self.partial and len(seen) != n_users:
            problems.append(f"cubre {len(seen)} de {n_users} usuarios")
        return problems

    def is_valid(self, n_users: int) -> bool:
        return not self.violations(n_users)

    def to_dict(self) -> dict:
        return {
            'beam_id': self.beam_id,
            'algorithm': self.algorithm,
            'partial': self.partial,
            'converged': self.converged,
            'iterations': self.iterations,
            'clusters': [list(cluster) for cluster in self.clusters],
        }

    def __str__(self) -> str:
        return f"Partición {self.algorithm} del haz {self.beam_id}: {self.n_clusters} clusters"
