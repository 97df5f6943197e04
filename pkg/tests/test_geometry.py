import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import GeometryError, LayoutParseError
from src.models.beam import EARTH_RADIUS_KM, GEO_ORBIT_RADIUS_KM, BeamLayout, BeamSpec, User
from src.services import geometry_service


@pytest.mark.parametrize("n_rings, count", [(0, 1), (1, 7), (2, 19), (3, 37), (4, 61), (5, 91), (6, 127)])
def test_hex_layout_beam_count(n_rings, count):
    layout = geometry_service.generate_hex_layout(n_rings, 160.0)
    assert layout.n_beams == count
    assert [beam.beam_id for beam in layout.beams] == list(range(1, count + 1))


def test_hex_layout_center_beam_and_spacing(layout7):
    center = layout7.beam(1)
    assert_allclose([center.lat_deg, center.lon_deg], [50.0, 10.0])
    for beam in layout7.beams[1:]:
        distance = geometry_service.great_circle_km(center.lat_deg, center.lon_deg, beam.lat_deg, beam.lon_deg)
        assert_allclose(distance, math.sqrt(3.0) * 160.0, rtol=1e-9)


def test_hex_layout_invisible_center():
    with pytest.raises(GeometryError):
        geometry_service.generate_hex_layout(1, 160.0, center=(10.0, -150.0))


def test_beam_area_defaults_to_circle():
    beam = BeamSpec(1, 50.0, 10.0, 160.0)
    assert_allclose(beam.area_km2, math.pi * 160.0 ** 2)
    assert BeamSpec(1, 50.0, 10.0, 160.0, area_km2=80000.0).area_km2 == 80000.0


@pytest.mark.parametrize("kwargs", [dict(radius_km=0.0), dict(lat_deg=90.0)])
def test_beam_spec_validation(kwargs):
    values = dict(beam_id=1, lat_deg=50.0, lon_deg=10.0, radius_km=100.0)
    values.update(kwargs)
    with pytest.raises(GeometryError):
        BeamSpec(**values)


def test_layout_ids_must_be_consecutive():
    with pytest.raises(GeometryError):
        BeamLayout((BeamSpec(1, 50.0, 10.0, 100.0), BeamSpec(3, 51.0, 10.0, 100.0)))


def test_load_beam_layout(tmp_path):
    path = tmp_path / "layout.csv"
    path.write_text("id,lat_deg,lon_deg,radius_km\n1,50.0,10.0,160\n2,48.0,12.0,160\n")
    layout = geometry_service.load_beam_layout(str(path))
    assert layout.n_beams == 2
    assert layout.beam(2).lon_deg == 12.0


def test_load_beam_layout_duplicate_id_names_line(tmp_path):
    path = tmp_path / "layout.csv"
    path.write_text("id,lat_deg,lon_deg,radius_km\n1,50.0,10.0,160\n1,48.0,12.0,160\n")
    with pytest.raises(LayoutParseError) as info:
        geometry_service.load_beam_layout(str(path))
    assert info.value.line == 3
    assert info.value.exit_code == 2


def test_load_beam_layout_malformed_row(tmp_path):
    path = tmp_path / "layout.csv"
    path.write_text("id,lat_deg,lon_deg,radius_km\n1,50.0,abc,160\n")
    with pytest.raises(LayoutParseError):
        geometry_service.load_beam_layout(str(path))


def test_users_in_beam_rounding():
    assert geometry_service.users_in_beam(1.25e-3, 80000.0) == 100
    assert geometry_service.users_in_beam(1e-3, 2500.0) == 3
    assert geometry_service.users_in_beam(1e-3, 2500.0, "floor") == 2


def test_deploy_users_inside_footprint(layout7, rng):
    deployment = geometry_service.deploy_users(layout7, 1.25e-3, rng)
    expected = geometry_service.users_in_beam(1.25e-3, math.pi * 160.0 ** 2)
    assert expected == 101
    for beam in layout7.beams:
        users = deployment.users(beam.beam_id)
        assert len(users) == expected
        for user in users:
            assert geometry_service.footprint_distance_km(user, layout7) <= beam.radius_km * (1 + 1e-9)
            assert math.hypot(user.east_km, user.north_km) <= beam.radius_km * (1 + 1e-12)
    ids = [user.user_id for user in deployment.all_users()]
    assert ids == list(range(len(deployment)))


def test_deploy_users_is_deterministic(layout7):
    first = geometry_service.deploy_users(layout7, 2.5e-3, np.random.default_rng(3))
    second = geometry_service.deploy_users(layout7, 2.5e-3, np.random.default_rng(3))
    assert first.all_users() == second.all_users()


def test_deploy_users_zero_user_beam_warns(caplog):
    layout = geometry_service.generate_hex_layout(0, 10.0)
    with caplog.at_level("WARNING"):
        deployment = geometry_service.deploy_users(layout, 1e-3, np.random.default_rng(0))
    assert deployment.active_beams() == []
    assert deployment.warnings
    assert "no recibe usuarios" in caplog.text


def test_slant_range_nadir(layout7):
    assert_allclose(geometry_service.slant_range(0.0, 30.0, layout7), GEO_ORBIT_RADIUS_KM - EARTH_RADIUS_KM)


def test_slant_range_matches_direct_geometry(layout7):
    lat = math.radians(50.0)
    ground = EARTH_RADIUS_KM * np.array([math.cos(lat) * math.cos(math.radians(30.0)),
                                         math.cos(lat) * math.sin(math.radians(30.0)), math.sin(lat)])
    satellite = GEO_ORBIT_RADIUS_KM * np.array([math.cos(math.radians(30.0)), math.sin(math.radians(30.0)), 0.0])
    expected = np.linalg.norm(satellite - ground)
    assert_allclose(geometry_service.slant_range(50.0, 30.0, layout7), expected, rtol=1e-12)
    # ley del coseno
    assert_allclose(expected, math.sqrt(EARTH_RADIUS_KM ** 2 + GEO_ORBIT_RADIUS_KM ** 2
                                        - 2 * EARTH_RADIUS_KM * GEO_ORBIT_RADIUS_KM * math.cos(lat)))


def test_slant_range_identical_positions(layout7):
    a = User(0, 1, 49.0, 11.0, 0.0, 0.0)
    b = User(1, 1, 49.0, 11.0, 0.0, 0.0)
    assert geometry_service.user_slant_range(a, layout7) == geometry_service.user_slant_range(b, layout7)


def test_slant_range_not_visible(layout7):
    with pytest.raises(GeometryError):
        geometry_service.slant_range(0.0, -150.0, layout7)


def test_uniform_disc_mean_radius():
    layout = geometry_service.generate_hex_layout(0, 160.0)
    deployment = geometry_service.deploy_users(layout, 0.15, np.random.default_rng(8))
    users = deployment.users(1)
    assert len(users) >= 10_000
    radii = np.hypot([user.east_km for user in users], [user.north_km for user in users])
    assert_allclose(radii.mean(), 2 / 3 * 160.0, rtol=0.02)
