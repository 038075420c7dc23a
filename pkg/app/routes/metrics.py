from flask import Blueprint, request, jsonify

from app.extensions import limiter
from app.models.schemas import APIResponse, ConvergeRequest, DistanceRequest
from app.routes.errors import error_response
from app.routes.maps import load_source, store
from app.services.map_metrics import MapMetricCalculator, parse_metric, parse_ns

# Create blueprint
metrics_bp = Blueprint('metrics', __name__)

calculator = MapMetricCalculator()


@metrics_bp.route('/distance', methods=['POST'])
@limiter.limit("60 per hour")
def distance():
    """Bracket around the distance of two maps"""
    try:
        distance_request = DistanceRequest(**(request.json or {}))
        bracket = calculator.distance(
            load_source(distance_request.first),
            load_source(distance_request.second),
            parse_metric(distance_request.metric),
            distance_request.tol
        )
        response = APIResponse(success=True, message=str(bracket), data=bracket.model_dump(mode='json'))
        return jsonify(response.model_dump(mode='json')), 200
    except Exception as e:
        return error_response(e, "DISTANCE_ERROR")


@metrics_bp.route('/converge', methods=['POST'])
@limiter.limit("20 per hour")
def converge():
    """Distance table of a corpus family against a limit map"""
    try:
        converge_request = ConvergeRequest(**(request.json or {}))
        report = calculator.converge(
            store.corpus.family(converge_request.family),
            load_source(converge_request.limit),
            parse_metric(converge_request.metric),
            parse_ns(converge_request.ns),
            converge_request.tol
        )
        response = APIResponse(success=True, message=report.verdict.describe(),
                               data=report.model_dump(mode='json'))
        return jsonify(response.model_dump(mode='json')), 200
    except Exception as e:
        return error_response(e, "CONVERGE_ERROR")
