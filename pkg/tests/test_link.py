import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import LayoutParseError, ModCodError, NumericalError, SimulatorError
from src.models.link import ModCodTable
from src.services import link_service


@pytest.fixture
def two_rows():
    return ModCodTable(np.array([0.0, 10.0]), np.array([1.0, 3.0]), "two")


def test_load_two_row_table(tmp_path):
    path = tmp_path / "modcod.csv"
    path.write_text("es_n0_dB,spectral_efficiency\n0,1.0\n10,3.0\n")
    table = link_service.load_modcod_table(str(path))
    assert len(table) == 2
    assert table.name == "modcod"


def test_rows_out_of_order_rejected(tmp_path):
    path = tmp_path / "modcod.csv"
    path.write_text("es_n0_dB,spectral_efficiency\n10,3.0\n0,1.0\n")
    with pytest.raises(ModCodError):
        link_service.load_modcod_table(str(path))


def test_missing_column_rejected(tmp_path):
    path = tmp_path / "modcod.csv"
    path.write_text("snr,eff\n0,1.0\n")
    with pytest.raises(LayoutParseError):
        link_service.load_modcod_table(str(path))


def test_default_table_reference_row():
    table = link_service.default_modcod_table()
    index = int(np.flatnonzero(np.isclose(table.thresholds_db, 10.69))[0])
    assert_allclose(table.efficiencies[index], 2.646012)
    assert np.all(np.diff(table.thresholds_db) > 0)
    assert np.all(np.diff(table.efficiencies) > 0)


def test_rate_from_sinr_boundaries(two_rows):
    assert link_service.rate_from_sinr(10 ** (-0.1), two_rows) == 0.0
    assert link_service.rate_from_sinr(1.0, two_rows) == 1.0
    assert link_service.rate_from_sinr(10.0, two_rows) == 3.0
    assert link_service.rate_from_sinr(1e12, two_rows) == 3.0
    assert link_service.rate_from_sinr(0.0, two_rows) == 0.0


def test_rate_from_sinr_is_non_decreasing():
    table = link_service.default_modcod_table()
    sinr_db = np.linspace(-10, 25, 2001)
    rates = link_service.rate_from_sinr(10 ** (sinr_db / 10), table)
    assert np.all(np.diff(rates) >= 0)


def test_shannon_rate():
    assert link_service.shannon_rate(1.0) == 1.0
    assert link_service.shannon_rate(0.0) == 0.0
    assert link_service.shannon_rate(15.0) == 4.0
    with pytest.raises(NumericalError) as error:
        link_service.shannon_rate(-1.0)
    assert isinstance(error.value, SimulatorError)
    assert error.value.exit_code == 3


def test_cluster_link_result_single_member(two_rows):
    result = link_service.cluster_link_result([10.0], two_rows)
    assert result.member_loss_db == (0.0,)
    assert result.rate == 3.0
    assert not result.outage


def test_cluster_link_result_min_serving(two_rows):
    result = link_service.cluster_link_result([10.0, 10 ** 1.3], two_rows)
    assert_allclose(result.serving_sinr_db, 10.0)
    assert_allclose(result.member_loss_db, [0.0, 3.0])
    assert_allclose(result.loss_std_db(), 1.5)


def test_cluster_link_result_equal_members(two_rows):
    result = link_service.cluster_link_result([5.0, 5.0, 5.0], two_rows)
    assert result.member_loss_db == (0.0, 0.0, 0.0)
    assert result.loss_std_db() == 0.0


def test_cluster_link_result_outage(two_rows):
    result = link_service.cluster_link_result([0.5, 4.0], two_rows)
    assert result.outage
    assert result.rate == 0.0
    shannon = link_service.cluster_link_result([0.5, 4.0], two_rows, rate_model="shannon")
    assert not shannon.outage
    assert_allclose(shannon.rate, np.log2(1.5))


def test_cluster_link_result_requires_members(two_rows):
    with pytest.raises(ModCodError):
        link_service.cluster_link_result([], two_rows)
