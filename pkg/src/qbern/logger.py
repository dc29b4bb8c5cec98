import logging

def setup_logging():
    logger = logging.getLogger("qbern")
    logger.addHandler(logging.NullHandler())
    return logger
