#!/usr/bin/env python3
"""
Servidor de Desarrollo del Simulador
====================================

Servidor Flask que expone la validación de configuraciones y la simulación
de un punto a través de una API JSON.
"""

import logging

from src.api.routes import app

if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    print("🛰️  Iniciando Simulador Multi-haz...")
    print("=" * 60)
    print("🌐 Servidor disponible en: http://localhost:5000")
    print("📡 API endpoints disponibles en: http://localhost:5000/api/")
    print("=" * 60)

    app.run(debug=True, host='0.0.0.0', port=5000)
