import logging
import sys

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level=logging.INFO):
    """Attach a single stderr handler to the package logger."""
    logger = logging.getLogger('src')
    logger.setLevel(level)
    for handler in logger.handlers:
        if getattr(handler, '_edgecamo', False):
            handler.setStream(sys.stderr)
            return logger
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._edgecamo = True
    logger.addHandler(handler)
    return logger
