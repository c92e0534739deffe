import os
from pathlib import Path
from typing import Optional

import numpy as np
import scipy
import torch
from torch.utils.collect_env import get_pretty_env_info
from yacs.config import CfgNode as Node

THREADS_VARIABLE = "FINITEQP_THREADS"


def save_config(config: Node, save_path: Path) -> None:
    with open(save_path, "w") as file:
        file.write(config.dump())


def get_scipy_version() -> str:
    return "\n        SciPy ({})".format(scipy.__version__)


def collect_env_info() -> str:
    env_str = get_pretty_env_info()
    env_str += get_scipy_version()
    return env_str


def re_seed(seed: int = 0) -> None:
    import random
    random.seed(seed)

    np.random.seed(seed % 2 ** 32)
    torch.manual_seed(seed)


def split_seed(seed: int, *counters: int) -> int:
    """Derive an independent 63-bit seed for the work item addressed by ``counters``."""
    sequence = np.random.SeedSequence([int(seed) % 2 ** 64, *[int(c) for c in counters]])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def make_generator(seed: int) -> torch.Generator:
    generator = torch.Generator()
    generator.manual_seed(int(seed) % 2 ** 63)
    return generator


def resolve_num_workers(requested: Optional[int] = None) -> int:
    """Worker count from the request, capped by FINITEQP_THREADS."""
    if requested is None:
        from lib.config import config
        requested = config.RUNTIME.NUM_WORKERS

    workers = max(1, int(requested))
    cap = os.environ.get(THREADS_VARIABLE)
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise ValueError(f"{THREADS_VARIABLE} must be an integer, got {cap!r}")
    return workers
