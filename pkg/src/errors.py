"""
Jerarquía de errores del simulador
==================================

Todas las operaciones de los servicios lanzan subclases de ``SimulatorError``.
Cada clase lleva el código de salida que la interfaz de consola devuelve al
sistema operativo:

- 2: error de configuración o de archivo de entrada mal formado
- 3: error en tiempo de ejecución (geometría, numérico, clustering)
- 4: error de entrada/salida al escribir o leer resultados
"""


class SimulatorError(Exception):
    """Error base del simulador"""

    exit_code = 3


class ConfigError(SimulatorError):
    """Configuración inválida: clave desconocida, tipo incorrecto, valor fuera de rango"""

    exit_code = 2

    def __init__(self, message: str, key: str = ""):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class LayoutParseError(ConfigError):
    """Archivo CSV de entrada mal formado; el mensaje indica la línea"""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}, línea {line}: {message}")


class ModCodError(ConfigError):
    """Tabla ModCod no monótona o mal formada"""


class GeometryError(SimulatorError):
    """Posición fuera de la visibilidad del satélite GEO o geometría inválida"""


class InterpolationError(SimulatorError):
    """Usuario fuera de la rejilla de una tabla de ganancias"""


class ClusteringError(SimulatorError):
    """Precondición violada en un algoritmo de clustering"""


class NumericalError(SimulatorError):
    """Fallo numérico (factorización, matriz nula, normalización imposible)"""


class PrecodingError(SimulatorError):
    """Precondición violada en la precodificación (cluster vacío, dimensiones)"""


class ResultsIOError(SimulatorError):
    """Error al escribir o leer archivos de resultados"""

    exit_code = 4
