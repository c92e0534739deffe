from .utils import save_config, collect_env_info, logger, setup_logger
from .config import config
