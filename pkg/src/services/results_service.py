"""
Servicio de resultados
======================

Escritura y lectura de resultados:

- ``results.json``: eco de la configuración, puntos del barrido y agregados
- ``results.csv``: una fila por punto (``algorithm,metric,precoder,K,rho,psat,
  avg_rate,outage_frac`` y columnas adicionales)
- ``points/<clave>.json``: un archivo por punto, usado por ``--resume``
- tablas para gráficas en formato largo (``emit_plots``)

Los flotantes se escriben con su representación más corta que se relee
exactamente, de modo que los CSV son idénticos byte a byte entre ejecuciones.
"""

import json
import logging
import os
from typing import Dict, List, Optional, Sequence

import pandas as pd

from src.errors import ResultsIOError
from src.models.simulation import GridPoint, RateReport, SimConfig

logger = logging.getLogger(__name__)

RESULTS_JSON = 'results.json'
RESULTS_CSV = 'results.csv'
POINTS_DIR = 'points'
SUMMARY_COLUMNS = ['algorithm', 'metric', 'precoder', 'K', 'rho', 'psat', 'avg_rate', 'outage_frac',
                   'std_err', 'avg_rate_with_reserve', 'mean_serving_sinr_db', 'n_clusters',
                   'max_cluster_size', 'n_iterations']
POINT_COLUMNS = ['algorithm', 'metric', 'precoder', 'K', 'rho', 'psat']


def _ensure_dir(path: str):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise ResultsIOError(f"no se puede crear el directorio '{path}': {e}") from e


def _write_json(path: str, data: dict):
    try:
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(data, handle, indent=2, ensure_ascii=False)
    except OSError as e:
        raise ResultsIOError(f"no se puede escribir '{path}': {e}") from e


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ResultsIOError(f"no se puede leer '{path}': {e}") from e


def _write_csv(frame: pd.DataFrame, path: str):
    try:
        frame.to_csv(path, index=False, lineterminator='\n')
    except OSError as e:
        raise ResultsIOError(f"no se puede escribir '{path}': {e}") from e


# ==================== PUNTOS INDIVIDUALES ====================

def point_path(out_dir: str, point: GridPoint) -> str:
    return os.path.join(out_dir, POINTS_DIR, f"{point.key()}.json")


def write_point(out_dir: str, report: RateReport) -> str:
    _ensure_dir(os.path.join(out_dir, POINTS_DIR))
    path = point_path(out_dir, report.point)
    _write_json(path, report.to_dict())
    return path


def read_point(out_dir: str, point: GridPoint) -> RateReport:
    return RateReport.from_dict(_read_json(point_path(out_dir, point)))


def point_done(out_dir: str, point: GridPoint) -> bool:
    return os.path.isfile(point_path(out_dir, point))


# ==================== RESULTADOS COMBINADOS ====================

def summary_frame(reports: Sequence[RateReport]) -> pd.DataFrame:
    return pd.DataFrame([report.summary() for report in reports], columns=SUMMARY_COLUMNS)


def write_results(out_dir: str, config: SimConfig, reports: Sequence[RateReport],
                  failures: Sequence = ()) -> List[str]:
    """Escribir ``results.json`` y ``results.csv`` en el orden del barrido"""
    _ensure_dir(out_dir)
    order = {point: i for i, point in enumerate(config.grid())}
    ordered = sorted(reports, key=lambda report: order.get(report.point, len(order)))
    document = {
        'config': config.to_dict(),
        'grid': [point.to_dict() for point in config.grid()],
        'points': [report.to_dict() for report in ordered],
        'failures': [{'point': point.to_dict(), 'message': message} for point, message in failures],
    }
    json_path = os.path.join(out_dir, RESULTS_JSON)
    csv_path = os.path.join(out_dir, RESULTS_CSV)
    _write_json(json_path, document)
    _write_csv(summary_frame(ordered), csv_path)
    logger.info("Resultados escritos en %s (%d puntos)", out_dir, len(ordered))
    return [json_path, csv_path]


def read_results(out_dir: str) -> List[RateReport]:
    document = _read_json(os.path.join(out_dir, RESULTS_JSON))
    return [RateReport.from_dict(item) for item in document.get('points', [])]


def read_summary_csv(path: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError) as e:
        raise ResultsIOError(f"no se puede leer '{path}': {e}") from e


# ==================== TABLAS PARA GRÁFICAS ====================

def _sample_rows(reports: Sequence[RateReport], attribute: str) -> List[dict]:
    rows = []
    for report in reports:
        values, probabilities = RateReport.cdf(getattr(report, attribute))
        for value, probability in zip(values, probabilities):
            rows.append({**report.point.to_dict(), 'value_db': float(value), 'probability': float(probability)})
    return rows


def rate_gain_frame(reports: Sequence[RateReport]) -> Optional[pd.DataFrame]:
    """η̄_channel − η̄_euclidean2d por (algoritmo, precodificador, K, ρ, P_sat)"""
    frame = summary_frame(reports)
    if set(frame['metric']) < {'channel', 'euclidean2d'}:
        return None
    keys = ['algorithm', 'precoder', 'K', 'rho', 'psat']
    channel = frame[frame['metric'] == 'channel'][keys + ['avg_rate']]
    euclidean = frame[frame['metric'] == 'euclidean2d'][keys + ['avg_rate']]
    merged = channel.merge(euclidean, on=keys, suffixes=('_channel', '_euclidean'))
    merged['gain'] = merged['avg_rate_channel'] - merged['avg_rate_euclidean']
    return merged.sort_values(keys, kind='stable').reset_index(drop=True)


def emit_plots(out_dir: str, plots_dir: Optional[str] = None) -> List[str]:
    """
    Generar las tablas de formato largo a partir de los resultados de un
    barrido. Si faltan puntos de la rejilla se lanza ``ResultsIOError``
    con la lista de puntos ausentes.
    """
    json_path = os.path.join(out_dir, RESULTS_JSON)
    if not os.path.isfile(json_path):
        raise ResultsIOError(f"no existe '{json_path}'; ejecuta run o sweep primero")
    document = _read_json(json_path)
    reports = [RateReport.from_dict(item) for item in document.get('points', [])]
    present = {report.point for report in reports}
    missing = [GridPoint.from_dict(item) for item in document.get('grid', [])
               if GridPoint.from_dict(item) not in present]
    if missing:
        raise ResultsIOError("faltan puntos del barrido: " + ", ".join(point.key() for point in missing))

    plots_dir = plots_dir or os.path.join(out_dir, 'plots')
    _ensure_dir(plots_dir)
    summary = summary_frame(reports)
    tables: Dict[str, pd.DataFrame] = {
        'rate_vs_k.csv': summary.sort_values(['algorithm', 'metric', 'precoder', 'rho', 'psat', 'K'],
                                             kind='stable')[
            ['algorithm', 'metric', 'precoder', 'rho', 'psat', 'K', 'avg_rate', 'std_err', 'outage_frac']],
        'rate_vs_psat.csv': summary.sort_values(['algorithm', 'metric', 'precoder', 'rho', 'K', 'psat'],
                                                kind='stable')[
            ['algorithm', 'metric', 'precoder', 'rho', 'K', 'psat', 'avg_rate', 'std_err']],
        'cdf_serving_sinr.csv': pd.DataFrame(_sample_rows(reports, 'serving_sinr_db'),
                                             columns=POINT_COLUMNS + ['value_db', 'probability']),
        'cdf_sigma_loss.csv': pd.DataFrame(_sample_rows(reports, 'sigma_loss_db'),
                                           columns=POINT_COLUMNS + ['value_db', 'probability']),
        'cluster_size_hist.csv': pd.DataFrame(
            [{**report.point.to_dict(), 'size': size, 'frequency': frequency}
             for report in reports for size, frequency in sorted(report.size_histogram.items())],
            columns=POINT_COLUMNS + ['size', 'frequency']),
    }
    gain = rate_gain_frame(reports)
    if gain is None:
        logger.warning("Sólo hay una métrica de similitud; no se genera rate_gain.csv")
    else:
        tables['rate_gain.csv'] = gain

    written = []
    for name, frame in tables.items():
        path = os.path.join(plots_dir, name)
        _write_csv(frame, path)
        written.append(path)
    return written
