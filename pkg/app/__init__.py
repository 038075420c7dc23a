from flask import Flask, jsonify
from flask_cors import CORS
import logging
import os


def create_app(config_name=None):
    """Application factory pattern"""
    from config import config

    if config_name is None:
        config_name = os.environ.get('FLASK_CONFIG', 'default')

    app = Flask(__name__)
    app.config.from_object(config[config_name])
    app.config['SETMAPS_CONFIG'] = config[config_name]

    logging.basicConfig(level=app.config.get('LOG_LEVEL', 'INFO'))

    # Initialize extensions
    CORS(app, resources={r"/api/*": {"origins": "*"}})
    from app.extensions import limiter
    limiter.init_app(app)

    # Register blueprints
    from app.routes.maps import maps_bp
    from app.routes.metrics import metrics_bp
    from app.routes.corpus import corpus_bp

    app.register_blueprint(maps_bp, url_prefix='/api/maps')
    app.register_blueprint(metrics_bp, url_prefix='/api/metrics')
    app.register_blueprint(corpus_bp, url_prefix='/api/corpus')

    # flask setmaps ...
    from app.cli import setmaps
    app.cli.add_command(setmaps)

    @app.errorhandler(404)
    def not_found(error):
        return jsonify({'success': False, 'error': 'Not found'}), 404

    @app.errorhandler(429)
    def rate_limited(error):
        return jsonify({'success': False, 'error': 'Rate limit exceeded', 'error_code': 'RATE_LIMITED'}), 429

    @app.errorhandler(500)
    def internal_error(error):
        return jsonify({'success': False, 'error': 'Internal server error'}), 500

    return app
