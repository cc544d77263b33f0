"""Configuration settings for kgcred."""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

_PACKAGE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'kgcred')


class Config:
    """Base configuration class."""

    # Reproducibility
    SEED = int(os.getenv('KGCRED_SEED', '0'))
    THREADS = int(os.getenv('KGCRED_THREADS', '1'))

    # Output and logging
    OUTPUT_DIR = os.getenv('KGCRED_OUTPUT_DIR', 'out')
    LOG_LEVEL = os.getenv('KGCRED_LOG_LEVEL', 'WARNING')

    # Credibility settings
    DOMAINS_FILE = os.getenv('KGCRED_DOMAINS_FILE', os.path.join(_PACKAGE_DIR, 'resources', 'domains.json'))
    BREADTH_THRESHOLD = float(os.getenv('KGCRED_BREADTH_THRESHOLD', '0.95'))
    REPETITION_THRESHOLD = float(os.getenv('KGCRED_REPETITION_THRESHOLD', '0.5'))

    # Training defaults
    SEARCH_SPACE_FILE = os.getenv('KGCRED_SEARCH_SPACE_FILE', os.path.join(_PACKAGE_DIR, 'resources', 'search_space.json'))
    DEFAULT_K = int(os.getenv('KGCRED_DEFAULT_K', '100'))
    DEFAULT_EPOCHS = int(os.getenv('KGCRED_DEFAULT_EPOCHS', '100'))
    DEFAULT_BATCHES = int(os.getenv('KGCRED_DEFAULT_BATCHES', '10'))

    # Split ratios (train, valid, test)
    SPLIT_RATIOS = (0.8, 0.1, 0.1)


class DevelopmentConfig(Config):
    """Development configuration."""
    LOG_LEVEL = 'INFO'


class ProductionConfig(Config):
    """Production configuration."""
    LOG_LEVEL = 'WARNING'


class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    SEED = 0
    THREADS = 1
    DEFAULT_K = 16
    DEFAULT_EPOCHS = 20


# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': ProductionConfig
}


def get_config(config_name=None):
    """Get configuration class by name."""
    if config_name is None:
        config_name = os.getenv('KGCRED_ENV', 'default')

    return config.get(config_name, config['default'])
