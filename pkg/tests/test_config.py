import pytest

from src.errors import ConfigError
from src.models.simulation import SimConfig
from src.services import config_service


def test_empty_config_uses_table_defaults():
    config = config_service.parse_config()
    assert config.link.carrier_frequency_hz == 19.5e9
    assert config.link.rx_antenna_diameter_m == 0.6
    assert config.link.rx_antenna_efficiency == 0.6
    assert config.link.antenna_losses_db == 2.55
    assert config.layout.satellite_longitude_deg == 30.0
    assert config.power.psat == 90.0
    assert config == SimConfig()


def test_override_applied():
    assert config_service.parse_config(None, ["power.psat=45"]).power.psat == 45.0


def test_unknown_key_names_the_key():
    with pytest.raises(ConfigError) as info:
        config_service.parse_config(None, ["power.watts=45"])
    assert info.value.key == "power.watts"
    assert info.value.exit_code == 2


def test_unknown_section_rejected():
    with pytest.raises(ConfigError) as info:
        config_service.parse_config(None, ["orbit.altitude=1"])
    assert info.value.key == "orbit"


def test_type_mismatch_names_the_key():
    with pytest.raises(ConfigError) as info:
        config_service.parse_config(None, ["clustering.cluster_size=four"])
    assert info.value.key == "clustering.cluster_size"


def test_malformed_override():
    with pytest.raises(ConfigError):
        config_service.parse_config(None, ["psat"])


def test_zero_iterations_rejected():
    with pytest.raises(ConfigError) as info:
        config_service.parse_config(None, ["simulation.iterations=0"])
    assert info.value.key == "simulation.iterations"


def test_ini_file_with_sweep_axes(tmp_path):
    path = tmp_path / "experiment.ini"
    path.write_text(
        "[clustering]\n"
        "algorithm = kmeanspp\n"
        "metric = euclidean2d  # posiciones\n"
        "\n"
        "[simulation]\n"
        "iterations = 10\n"
        "include_reserve = yes\n"
        "\n"
        "[sweep]\n"
        "cluster_size = 1, 2, 4, 6, 8, 10, 12\n"
        "algorithm = upperbound, random, maxdist, kmeanspp\n"
        "metric = euclidean2d, channel\n"
    )
    config = config_service.parse_config(str(path), ["power.psat=50"], seed=99)
    assert config.clustering.algorithm == "kmeanspp"
    assert config.clustering.metric == "euclidean2d"
    assert config.simulation.include_reserve is True
    assert config.simulation.seed == 99
    assert config.power.psat == 50.0
    assert config.sweep.cluster_size == (1, 2, 4, 6, 8, 10, 12)
    assert len(config.grid()) == 7 * 4 * 2


def test_grid_order_and_point_config():
    config = config_service.parse_config(None, ["sweep.psat=15, 50", "sweep.density=1.25e-3, 1e-2"])
    grid = config.grid()
    assert [(p.density, p.psat) for p in grid] == [(1.25e-3, 15.0), (1.25e-3, 50.0), (1e-2, 15.0), (1e-2, 50.0)]
    concrete = config.at(grid[3])
    assert concrete.power.psat == 50.0
    assert concrete.deployment.density == 1e-2


def test_empty_axis_rejected():
    with pytest.raises(ConfigError) as info:
        config_service.parse_config(None, ["sweep.cluster_size="])
    assert info.value.key == "sweep.cluster_size"


def test_invalid_axis_value_rejected():
    with pytest.raises(ConfigError):
        config_service.parse_config(None, ["sweep.algorithm=random, greedy"])


def test_relative_paths_resolved_against_config(tmp_path):
    (tmp_path / "layout.csv").write_text("id,lat_deg,lon_deg,radius_km\n1,50.0,10.0,160\n")
    path = tmp_path / "experiment.ini"
    path.write_text("[layout]\nsource = file\npath = layout.csv\n")
    config = config_service.parse_config(str(path))
    assert config.layout.path == str(tmp_path / "layout.csv")


def test_missing_referenced_file():
    with pytest.raises(ConfigError) as info:
        config_service.parse_config(None, ["rate.modcod_table=/nonexistent/modcod.csv"])
    assert info.value.key == "rate.modcod_table"


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        config_service.parse_config(str(tmp_path / "missing.ini"))


def test_api_style_overrides():
    config = config_service.config_from_overrides({"power.psat": 45, "sweep.cluster_size": [2, 4],
                                                   "simulation.detail": True})
    assert config.power.psat == 45.0
    assert config.sweep.cluster_size == (2, 4)
    assert config.simulation.detail is True
