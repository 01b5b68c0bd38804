import logging

from config import Config

config: type[Config] = Config

logging.getLogger(__name__).addHandler(logging.NullHandler())
