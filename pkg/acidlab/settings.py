import os
import logging

# Környezeti beállítások
LOG_LEVEL = os.environ.get('ACIDLAB_LOG_LEVEL', 'INFO')
WORKERS = int(os.environ.get('ACIDLAB_WORKERS', 1))
OUT_ROOT = os.environ.get('ACIDLAB_OUT', 'runs')
DEFAULT_SEED = int(os.environ.get('ACIDLAB_SEED', 0))

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(level=None):
    """
    Beállítjuk a naplózást az egész folyamatra.

    :param level: szint neve, alapértelmezetten ACIDLAB_LOG_LEVEL
    """
    logging.basicConfig(level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
                        format=LOG_FORMAT)
