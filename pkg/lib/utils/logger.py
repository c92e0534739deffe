import logging
import sys
from pathlib import Path
from typing import Optional

logger = logging.getLogger("finiteqp")

FORMAT = "%(asctime)s: %(message)s"


def setup_logger(save_path: Optional[Path], filename: str = "log.txt", console_level: int = logging.INFO) -> None:
    """Console at `console_level`; the log file in `save_path` also keeps per-restart DEBUG lines."""
    logger.propagate = False
    logger.setLevel(logging.DEBUG)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(FORMAT, datefmt="%d.%m %H:%M:%S")
    console = logging.StreamHandler(stream=sys.stdout)
    console.setLevel(console_level)
    console.setFormatter(formatter)
    logger.addHandler(console)

    if save_path:
        log_file = logging.FileHandler(Path(save_path) / filename)
        log_file.setLevel(logging.DEBUG)
        log_file.setFormatter(formatter)
        logger.addHandler(log_file)
