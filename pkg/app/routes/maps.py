from flask import Blueprint, request, jsonify

from app.extensions import limiter
from app.models.map_store import MapStore
from app.models.piecewise_map import PiecewiseMap
from app.models.schemas import APIResponse, MapSourceRequest, SelectionPolicy
from app.routes.errors import error_response
from app.services.map_analyzer import MapAnalyzer
from app.services.map_file import serialize_map

# Create blueprint
maps_bp = Blueprint('maps', __name__)

store = MapStore()
analyzer = MapAnalyzer()


def load_source(source: MapSourceRequest) -> PiecewiseMap:
    if source.source is not None:
        return store.load(source.source)
    return store.loads(source.map_text)


def _map_payload(F: PiecewiseMap) -> dict:
    return {
        'map_text': serialize_map(F),
        'multi_valued_points': analyzer.multi_valued_points(F),
    }


@maps_bp.route('/classify', methods=['POST'])
@limiter.limit("100 per hour")
def classify_map():
    """Classify a map as usco / minimal usco / cusco / minimal cusco"""
    try:
        F = load_source(MapSourceRequest(**(request.json or {})))
        report = analyzer.classify(F)
        response = APIResponse(
            success=True,
            message=report.flags_line(),
            data=report.model_dump(mode='json')
        )
        return jsonify(response.model_dump(mode='json')), 200
    except Exception as e:
        return error_response(e, "CLASSIFY_ERROR")


@maps_bp.route('/phi', methods=['POST'])
@limiter.limit("100 per hour")
def phi_map():
    """Fiberwise convex hull of a minimal usco map"""
    try:
        F = load_source(MapSourceRequest(**(request.json or {})))
        response = APIResponse(success=True, data=_map_payload(analyzer.phi(F)))
        return jsonify(response.model_dump(mode='json')), 200
    except Exception as e:
        return error_response(e, "PHI_ERROR")


@maps_bp.route('/phi-inverse', methods=['POST'])
@limiter.limit("100 per hour")
def phi_inverse_map():
    """Minimal usco map inside a minimal cusco map"""
    try:
        G = load_source(MapSourceRequest(**(request.json or {})))
        response = APIResponse(success=True, data=_map_payload(analyzer.phi_inverse(G)))
        return jsonify(response.model_dump(mode='json')), 200
    except Exception as e:
        return error_response(e, "PHI_INVERSE_ERROR")


@maps_bp.route('/selection', methods=['POST'])
@limiter.limit("100 per hour")
def select_map():
    """Selection of a map by policy (inf, sup or mid), optionally with its graph closure"""
    try:
        payload = request.json or {}
        policy = SelectionPolicy(payload.pop('policy', 'sup'))
        closed = bool(payload.pop('closure', False))
        F = load_source(MapSourceRequest(**payload))
        selected = analyzer.selection(F, policy)
        if closed:
            selected = analyzer.graph_closure(selected)
        response = APIResponse(success=True, data=_map_payload(selected))
        return jsonify(response.model_dump(mode='json')), 200
    except Exception as e:
        return error_response(e, "SELECTION_ERROR")
