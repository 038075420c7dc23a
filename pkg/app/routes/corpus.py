from flask import Blueprint, request, jsonify

from app.extensions import limiter
from app.models.schemas import APIResponse
from app.routes.errors import error_response
from app.routes.maps import store

# Create blueprint
corpus_bp = Blueprint('corpus', __name__)


@corpus_bp.route('/', methods=['GET'])
@limiter.limit("100 per hour")
def list_examples():
    """Names and descriptions of the built-in maps"""
    try:
        names = [{'name': name, 'description': description} for name, description in store.corpus.names()]
        response = APIResponse(success=True, message=f"Found {len(names)} examples", data=names)
        return jsonify(response.model_dump(mode='json')), 200
    except Exception as e:
        return error_response(e, "CORPUS_LIST_ERROR")


@corpus_bp.route('/<name>', methods=['GET'])
@limiter.limit("100 per hour")
def get_example(name: str):
    """Map file text of a built-in map; families take ?n="""
    try:
        n = request.args.get('n', type=int)
        text = store.corpus.export_example(name, n)
        response = APIResponse(success=True, data={'name': name, 'n': n, 'map_text': text})
        return jsonify(response.model_dump(mode='json')), 200
    except Exception as e:
        return error_response(e, "CORPUS_GET_ERROR")
