"""
Servicio de configuración
=========================

Lee archivos INI (``configparser``) y overrides ``seccion.clave=valor`` y
construye un ``SimConfig`` validado. Los tipos se toman de las anotaciones de
las dataclasses de cada sección; las tuplas se escriben como listas separadas
por comas (``cluster_size = 1, 2, 4``).
"""

import configparser
import dataclasses
import logging
import os
import typing
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple

from src.errors import ConfigError
from src.models.channel import LinkBudgetParams
from src.models.simulation import (AntennaSection, ChannelSection, ClusteringSection, DeploymentSection,
                                   LayoutSection, PowerSection, PrecodingSection, RateSection, SimConfig,
                                   SimulationSection, SweepSection)

logger = logging.getLogger(__name__)

SECTIONS = {
    'layout': LayoutSection,
    'deployment': DeploymentSection,
    'link': LinkBudgetParams,
    'antenna': AntennaSection,
    'channel': ChannelSection,
    'clustering': ClusteringSection,
    'precoding': PrecodingSection,
    'power': PowerSection,
    'rate': RateSection,
    'simulation': SimulationSection,
    'sweep': SweepSection,
}

# claves que son rutas: relativas al directorio del archivo de configuración
PATH_KEYS = {('layout', 'path'), ('antenna', 'gain_table'), ('rate', 'modcod_table')}


def default_config() -> SimConfig:
    return SimConfig().validate()


def split_override(text: str) -> Tuple[str, str, str]:
    """``seccion.clave=valor`` → (seccion, clave, valor)"""
    key, sep, value = text.partition('=')
    section, dot, name = key.strip().partition('.')
    if not sep or not dot or not section or not name:
        raise ConfigError(f"override mal formado '{text}', se espera seccion.clave=valor", key=key.strip())
    return section, name.strip(), value.strip()


def _field_types(section: str) -> Dict[str, Any]:
    if section not in SECTIONS:
        raise ConfigError("sección desconocida", key=section)
    cls = SECTIONS[section]
    hints = typing.get_type_hints(cls)
    return {f.name: hints[f.name] for f in dataclasses.fields(cls)}


def _convert_scalar(value: str, target: type, key: str):
    text = value.strip()
    try:
        if target is bool:
            lowered = text.lower()
            if lowered not in configparser.ConfigParser.BOOLEAN_STATES:
                raise ValueError(f"'{value}' no es booleano")
            return configparser.ConfigParser.BOOLEAN_STATES[lowered]
        if target is int:
            return int(text)
        if target is float:
            return float(text)
        return text
    except ValueError as e:
        raise ConfigError(f"valor '{value}' no es de tipo {target.__name__}", key=key) from e


def convert_value(value: str, annotation: Any, key: str):
    """Convertir el texto según la anotación (escalares, Optional[Tuple[T, ...]])"""
    origin = typing.get_origin(annotation)
    if origin is typing.Union:
        inner = [arg for arg in typing.get_args(annotation) if arg is not type(None)]
        return convert_value(value, inner[0], key)
    if origin is tuple:
        item_type = typing.get_args(annotation)[0]
        items = [item for item in (part.strip() for part in value.split(',')) if item]
        return tuple(_convert_scalar(item, item_type, key) for item in items)
    return _convert_scalar(value, annotation, key)


def _as_text(value: Any) -> str:
    """Valores JSON de la API (números, listas, booleanos) al formato INI"""
    if isinstance(value, (list, tuple)):
        return ", ".join(str(item) for item in value)
    return str(value)


def build_config(raw: Mapping[str, Mapping[str, Any]]) -> SimConfig:
    """``{seccion: {clave: texto}}`` → SimConfig sin validar"""
    sections = {}
    for section, values in raw.items():
        types = _field_types(section)
        kwargs = {}
        for name, value in values.items():
            key = f"{section}.{name}"
            if name not in types:
                raise ConfigError("clave desconocida", key=key)
            kwargs[name] = convert_value(_as_text(value), types[name], key)
        sections[section] = SECTIONS[section](**kwargs)
    return SimConfig(**sections)


def read_ini(path: str) -> Dict[str, Dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    parser.optionxform = str
    try:
        with open(path, encoding='utf-8') as handle:
            parser.read_file(handle)
    except OSError as e:
        raise ConfigError(f"no se puede leer el archivo: {e}", key=path) from e
    except configparser.Error as e:
        raise ConfigError(f"INI mal formado: {e}", key=path) from e

    base = os.path.dirname(os.path.abspath(path))
    raw: Dict[str, Dict[str, str]] = {}
    for section in parser.sections():
        raw[section] = {}
        for name, value in parser.items(section):
            if (section, name) in PATH_KEYS and value and not os.path.isabs(value):
                value = os.path.join(base, value)
            raw[section][name] = value
    return raw


def parse_config(path: Optional[str] = None, overrides: Iterable[str] = (), seed: Optional[int] = None) -> SimConfig:
    """
    Archivo (opcional) → overrides → ``--seed`` → validación. Sin archivo se
    parte de los valores por defecto.
    """
    raw: Dict[str, Dict[str, Any]] = read_ini(path) if path else {}
    for override in overrides:
        section, name, value = split_override(override)
        raw.setdefault(section, {})[name] = value
    if seed is not None:
        raw.setdefault('simulation', {})['seed'] = str(seed)
    config = build_config(raw)
    logger.debug("Configuración cargada desde %s con %d secciones", path or "<defecto>", len(raw))
    return config.validate()


def config_from_overrides(overrides: Mapping[str, Any]) -> SimConfig:
    """Overrides como diccionario ``{"power.psat": 45}`` (API)"""
    return parse_config(None, [f"{key}={_as_text(value)}" for key, value in overrides.items()])
