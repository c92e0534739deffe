from .environment import save_config, collect_env_info, re_seed, split_seed, make_generator, resolve_num_workers
from .logger import logger, setup_logger
from .metric_logger import MetricLogger
from .parallel import parallel_map
from . import exceptions
