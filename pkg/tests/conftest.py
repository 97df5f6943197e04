import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.services import config_service, geometry_service  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def layout7():
    return geometry_service.generate_hex_layout(1, 160.0)


@pytest.fixture
def small_config():
    """7 haces, pocos usuarios por haz y pocas iteraciones"""
    return config_service.parse_config(None, [
        "layout.beam_radius_km=80",
        "deployment.density=1.25e-3",
        "simulation.iterations=3",
        "simulation.seed=7",
        "clustering.cluster_size=4",
    ])


@pytest.fixture
def single_beam_overrides():
    return [
        "layout.n_rings=0",
        "layout.beam_radius_km=80",
        "simulation.iterations=2",
        "simulation.seed=11",
    ]
