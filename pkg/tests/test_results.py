import json
import os

import numpy as np
import pytest

from src.errors import ResultsIOError
from src.models.simulation import GridPoint, RateReport
from src.services import config_service, results_service


def report(metric="channel", cluster_size=2, avg_rate=1.0 / 3.0, psat=90.0):
    return RateReport(
        point=GridPoint("maxdist", metric, "pac", cluster_size, 1.25e-3, psat),
        n_iterations=3, n_clusters=12, avg_rate=avg_rate, std_err=0.1 / 7.0,
        avg_rate_with_reserve=avg_rate, outage_fraction=0.0, mean_serving_sinr_db=9.123456789,
        max_cluster_size=cluster_size, serving_sinr_db=[8.0, 9.5, 10.25], sigma_loss_db=[0.0, 0.7],
        size_histogram={cluster_size: 1.0},
    )


@pytest.fixture
def metric_config():
    return config_service.parse_config(None, ["sweep.metric=euclidean2d, channel", "sweep.cluster_size=2, 4"])


@pytest.fixture
def metric_reports(metric_config):
    return [report(p.metric, p.cluster_size, avg_rate=1.0 + p.cluster_size / 7.0 + (p.metric == "channel") / 3.0)
            for p in metric_config.grid()]


def test_csv_round_trips_exactly(tmp_path, metric_config, metric_reports):
    results_service.write_results(str(tmp_path), metric_config, metric_reports)
    frame = results_service.read_summary_csv(str(tmp_path / results_service.RESULTS_CSV))
    assert list(frame.columns[:8]) == ['algorithm', 'metric', 'precoder', 'K', 'rho', 'psat', 'avg_rate',
                                       'outage_frac']
    for row, original in zip(frame.to_dict('records'), metric_reports):
        summary = original.summary()
        for key in ('avg_rate', 'std_err', 'rho', 'psat', 'mean_serving_sinr_db'):
            assert row[key] == summary[key]


def test_results_written_in_grid_order(tmp_path, metric_config, metric_reports):
    results_service.write_results(str(tmp_path), metric_config, list(reversed(metric_reports)))
    assert [r.point for r in results_service.read_results(str(tmp_path))] == metric_config.grid()


def test_point_files(tmp_path):
    original = report()
    assert not results_service.point_done(str(tmp_path), original.point)
    results_service.write_point(str(tmp_path), original)
    assert results_service.point_done(str(tmp_path), original.point)
    assert results_service.read_point(str(tmp_path), original.point) == original


def test_emit_plots_with_two_metrics(tmp_path, metric_config, metric_reports):
    results_service.write_results(str(tmp_path), metric_config, metric_reports)
    written = results_service.emit_plots(str(tmp_path))
    names = {os.path.basename(path) for path in written}
    assert {'rate_vs_k.csv', 'rate_vs_psat.csv', 'cdf_serving_sinr.csv', 'cdf_sigma_loss.csv',
            'cluster_size_hist.csv', 'rate_gain.csv'} == names

    gain = results_service.read_summary_csv(str(tmp_path / 'plots' / 'rate_gain.csv'))
    assert len(gain) == 2
    np.testing.assert_allclose(gain['gain'], 1.0 / 3.0)

    cdf = results_service.read_summary_csv(str(tmp_path / 'plots' / 'cdf_serving_sinr.csv'))
    for _, group in cdf.groupby(['metric', 'K']):
        assert np.all(np.diff(group['probability'].to_numpy()) >= 0)
        assert group['probability'].iloc[-1] == 1.0


def test_emit_plots_single_metric_skips_gain(tmp_path, caplog):
    config = config_service.parse_config(None, ["sweep.cluster_size=2, 4"])
    reports = [report("channel", p.cluster_size) for p in config.grid()]
    results_service.write_results(str(tmp_path), config, reports)
    with caplog.at_level("WARNING"):
        written = results_service.emit_plots(str(tmp_path))
    assert not any(path.endswith('rate_gain.csv') for path in written)
    assert "rate_gain.csv" in caplog.text


def test_emit_plots_lists_missing_points(tmp_path, metric_config, metric_reports):
    results_service.write_results(str(tmp_path), metric_config, metric_reports[:1])
    with pytest.raises(ResultsIOError) as info:
        results_service.emit_plots(str(tmp_path))
    for point in metric_config.grid()[1:]:
        assert point.key() in str(info.value)
    assert info.value.exit_code == 4


def test_emit_plots_without_results(tmp_path):
    with pytest.raises(ResultsIOError):
        results_service.emit_plots(str(tmp_path))


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ResultsIOError):
        results_service.write_point(str(blocker), report())


def test_results_json_echoes_config(tmp_path, metric_config, metric_reports):
    results_service.write_results(str(tmp_path), metric_config, metric_reports)
    document = json.loads((tmp_path / results_service.RESULTS_JSON).read_text(encoding='utf-8'))
    assert document['config']['power']['psat'] == 90.0
    assert len(document['grid']) == 4
    assert document['failures'] == []
