"""
API REST del Simulador Multi-haz
================================

Endpoints:
- GET  /api/health    estado del servicio
- GET  /api/defaults  configuración por defecto
- POST /api/validate  validar overrides ``{"overrides": {"power.psat": 45}}``
- POST /api/run       simular el punto base y devolver los agregados
- GET  /api/modcod    escalera ModCod incluida

Todas las respuestas usan el sobre ``{"success", "message", "data"}``.
"""

import logging

from flask import Flask, jsonify, request
from flask_cors import CORS

from src.errors import ConfigError, SimulatorError
from src.services import config_service, link_service
from src.services.montecarlo_service import SimulationService

logger = logging.getLogger(__name__)

# Crear aplicación Flask
app = Flask(__name__)
CORS(app)

# ==================== UTILIDADES ====================

def success_response(data, message="Operación exitosa"):
    """Respuesta exitosa estándar"""
    return jsonify({
        'success': True,
        'message': str(message) if message else "Operación exitosa",
        'data': data if data is not None else {}
    }), 200


def error_response(message, status_code=400):
    """Respuesta de error estándar"""
    return jsonify({
        'success': False,
        'message': str(message) if message else "Error desconocido",
        'data': None
    }), status_code


def handle_exception(e):
    """
    Manejo centralizado de excepciones: configuración → 400, simulación → 500,
    cualquier otra → 500 genérico
    """
    if isinstance(e, ConfigError):
        return error_response(str(e), 400)
    if isinstance(e, SimulatorError):
        logger.error("Error de simulación: %s", e)
        return error_response(str(e), 500)
    logger.exception("Error inesperado")
    return error_response("Error interno del servidor", 500)


def validate_json_request():
    """Validar que la request tenga un objeto JSON"""
    if not request.is_json:
        return error_response("Content-Type debe ser application/json", 400), None
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        return error_response("Body JSON requerido", 400), None
    overrides = data.get('overrides', {})
    if not isinstance(overrides, dict):
        return error_response("'overrides' debe ser un objeto", 400), None
    return None, overrides

# ==================== ENDPOINTS ====================

@app.route('/api/health', methods=['GET'])
def health_check():
    return success_response({'status': 'ok'}, "Simulador funcionando correctamente")


@app.route('/api/defaults', methods=['GET'])
def get_defaults():
    try:
        return success_response(config_service.default_config().to_dict(), "Configuración por defecto")
    except Exception as e:
        return handle_exception(e)


@app.route('/api/validate', methods=['POST'])
def validate_config():
    """
    Validar overrides con el mismo camino que la CLI: parse_config +
    construcción del layout
    """
    error, overrides = validate_json_request()
    if error:
        return error
    try:
        config = config_service.config_from_overrides(overrides)
        SimulationService(config)
        return success_response(config.to_dict(), f"Configuración válida ({len(config.grid())} puntos)")
    except Exception as e:
        return handle_exception(e)


@app.route('/api/run', methods=['POST'])
def run_point():
    """Simular el punto base; se devuelven sólo los agregados"""
    error, overrides = validate_json_request()
    if error:
        return error
    try:
        config = config_service.config_from_overrides(overrides)
        report = SimulationService(config).run_point(config.base_point())
        logger.info("POST /api/run - %s", report)
        return success_response(report.summary(), str(report))
    except Exception as e:
        return handle_exception(e)


@app.route('/api/modcod', methods=['GET'])
def get_modcod():
    try:
        table = link_service.default_modcod_table()
        return success_response(table.to_dict(), f"{len(table)} ModCods")
    except Exception as e:
        return handle_exception(e)

# ==================== MANEJO GLOBAL DE ERRORES ====================

@app.errorhandler(404)
def not_found(error):
    return error_response("Endpoint no encontrado", 404)


@app.errorhandler(405)
def method_not_allowed(error):
    return error_response("Método HTTP no permitido", 405)


@app.errorhandler(500)
def internal_error(error):
    return error_response("Error interno del servidor", 500)
