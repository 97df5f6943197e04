#!/usr/bin/env python3
"""
Simulador Monte Carlo del enlace directo de un satélite GEO multi-haz
=====================================================================

Precodificación MMSE multicast con cuatro estrategias de agrupación de
usuarios (UpperBound, Random, MaxDist, k-means++):
- Simular un punto de configuración (run) o un barrido completo (sweep)
- Validar archivos de configuración (validate)
- Generar tablas CSV para gráficas (emit-plots)
- Medir el coste de los algoritmos de clustering (benchmark)

Uso: python main.py run --config experimento.ini --out results
"""

import sys

from src.ui.console_ui import ConsoleUI


def main() -> int:
    """Función principal que inicia la aplicación"""
    try:
        return ConsoleUI().run()
    except KeyboardInterrupt:
        print("\n\n¡Simulación interrumpida por el usuario!", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
