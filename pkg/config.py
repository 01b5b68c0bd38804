import os
from dotenv import load_dotenv

load_dotenv('./.env')

_ROOT = os.path.dirname(os.path.abspath(__file__))


class Config(object):
    # engine parallelism, capped by the environment
    THREADS = int(os.environ.get('PLYFORGE_THREADS', 1))

    # largest grid the sampled oracle may evaluate
    GRID_BUDGET = int(os.environ.get('PLYFORGE_GRID_BUDGET', 16_000_000))

    # strict containment: dist < r * (1 - TOLERANCE)
    TOLERANCE = float(os.environ.get('PLYFORGE_TOLERANCE', 1e-9))

    # intersection candidates are nudged by PERTURBATION * local radius
    PERTURBATION = float(os.environ.get('PLYFORGE_PERTURBATION', 1e-6))

    LOGGING_INI = os.environ.get(
        'PLYFORGE_LOGGING_INI', os.path.join(_ROOT, 'logging.ini')
    )
