import os
from dotenv import load_dotenv

load_dotenv()


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value else default


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value else default


class Config:
    # Set arithmetic
    SET_TOLERANCE = _env_float('SETMAPS_SET_TOLERANCE', 1e-12)
    MERGE_GAP = _env_float('SETMAPS_MERGE_GAP', 1e-12)

    # Distances and enclosures
    DEFAULT_TOL = _env_float('SETMAPS_DEFAULT_TOL', 1e-6)
    CONVERGENCE_ACCURACY = _env_float('SETMAPS_CONVERGENCE_ACCURACY', 1e-2)
    MAX_REFINEMENTS = _env_int('SETMAPS_MAX_REFINEMENTS', 200000)
    MAX_CLOUD_POINTS = _env_int('SETMAPS_MAX_CLOUD_POINTS', 5000000)

    # Plotting
    PLOT_SPACING = _env_float('SETMAPS_PLOT_SPACING', 2e-3)

    LOG_LEVEL = os.environ.get('SETMAPS_LOG_LEVEL', 'WARNING')
    CLI_LOG_LEVEL = os.environ.get('SETMAPS_CLI_LOG_LEVEL', 'WARNING')

    # Rate limiting
    RATELIMIT_STORAGE_URI = "memory://"


class DevelopmentConfig(Config):
    DEBUG = True
    LOG_LEVEL = os.environ.get('SETMAPS_LOG_LEVEL', 'INFO')


class ProductionConfig(Config):
    DEBUG = False


class TestingConfig(Config):
    TESTING = True
    DEBUG = False
    RATELIMIT_ENABLED = False
    MAX_REFINEMENTS = 400000


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(config_name=None):
    """Resolve a config class by name, falling back to SETMAPS_CONFIG or the default"""
    if config_name is None:
        config_name = os.environ.get('SETMAPS_CONFIG', 'default')
    return config.get(config_name, config['default'])
