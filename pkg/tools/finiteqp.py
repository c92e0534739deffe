import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from yacs.config import CfgNode as Node

from lib import utils, config, logger
from lib.engine import EXIT_INVALID, RunConfig, Runner


def parse_dims(text: str) -> Tuple[int, ...]:
    """"5", "3-12" or "3,5,7"."""
    try:
        if "-" in text:
            lower, upper = (int(v) for v in text.split("-", 1))
            dims = tuple(range(lower, upper + 1))
        else:
            dims = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimension list {text!r}")
    if not dims:
        raise argparse.ArgumentTypeError(f"empty dimension list {text!r}")
    return dims


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config-file", type=str, default=None, help="YAML file merged over the defaults")
    common.add_argument("--output-path", type=str, default=None, help="output directory (OUTPUT_DIR)")
    common.add_argument("--seed", type=int, default=None, help=f"base seed (default {config.RUNTIME.SEED})")
    common.add_argument("--restarts", type=int, default=None,
                        help=f"optimizer restarts (default {config.SOLVER.RESTARTS})")
    common.add_argument("--workers", type=int, default=None,
                        help=f"worker processes, capped by FINITEQP_THREADS (default {config.RUNTIME.NUM_WORKERS})")
    common.add_argument("--format", type=str, choices=("csv", "json"), default=None,
                        help=f"table format (default {config.OUTPUT.FORMAT})")
    common.add_argument("--dim", type=parse_dims, default=(3,), help="dimension, range a-b or list a,b,c")
    common.add_argument("opts", default=None, nargs=argparse.REMAINDER, help="KEY VALUE config overrides")

    parser = argparse.ArgumentParser(description="Uncertainty geometry of the finite-dimensional canonical pair")
    commands = parser.add_subparsers(dest="command", required=True)

    ops = commands.add_parser("ops", parents=[common], help="build Q, P, F and the quadratic observables")
    ops.add_argument("--dump", action="store_true", help="log the Q and P matrices")

    region = commands.add_parser("region", help="covariance regions")
    region_actions = region.add_subparsers(dest="action", required=True)
    trace_det = region_actions.add_parser("trace-det", parents=[common], help="(tr, det) region samples")
    trace_det.add_argument("--rank", type=int, default=1)
    trace_det.add_argument("--samples", type=int, default=40)
    trace_det.add_argument("--quantity", choices=("hermitian", "symmetric"), default="hermitian")
    region_actions.add_parser("extremes", parents=[common], help="least and largest sum of variances")

    jnr = commands.add_parser("jnr", help="joint numerical range")
    jnr_actions = jnr.add_subparsers(dest="action", required=True)
    support = jnr_actions.add_parser("support", parents=[common], help="supporting points of the (Q, P, T) range")
    support.add_argument("--directions", type=int, default=200)
    cross = jnr_actions.add_parser("cross", parents=[common], help="cross section at <T> = t, <Q> = <P> = 0")
    cross.add_argument("--t", type=float, default=None, help="slice value, default mid range")
    cross.add_argument("--directions", type=int, default=64)

    minunc = commands.add_parser("minunc", help="minimum-uncertainty states")
    minunc_actions = minunc.add_subparsers(dest="action", required=True)
    solve = minunc_actions.add_parser("solve", parents=[common], help="eigenstates of lambda Q + i P")
    solve.add_argument("--lam-re", type=float, default=1.0)
    solve.add_argument("--lam-im", type=float, default=0.0)

    def add_sim_arguments(sim_parser: argparse.ArgumentParser) -> None:
        sim_parser.add_argument("--shots", type=int, default=None)
        sim_parser.add_argument("--trials", type=int, default=None)
        sim_parser.add_argument("--theta", type=float, default=0.0)
        sim_parser.add_argument("--measured", choices=("q", "p"), default="q")
        sim_parser.add_argument("--generator", choices=("q", "p"), default="p")
        sim_parser.add_argument("--state", choices=("vacuum3", "min-variance"), default="vacuum3",
                                help="input state")
        sim_parser.add_argument("--multi", action="store_true", help="estimate (r1, r2) measuring Q and P")

    metrology = commands.add_parser("metrology", help="estimation bounds")
    metrology_actions = metrology.add_subparsers(dest="action", required=True)
    metrology_actions.add_parser("scan", parents=[common], help="A_d, A_d^c, A_d^M over a dimension range")
    add_sim_arguments(metrology_actions.add_parser("sim", parents=[common], help="method-of-moments Monte Carlo"))
    add_sim_arguments(commands.add_parser("mom-sim", parents=[common], help="alias of metrology sim"))

    entangle = commands.add_parser("entangle", help="separability witness")
    entangle_actions = entangle.add_subparsers(dest="action", required=True)
    witness = entangle_actions.add_parser("witness", parents=[common], help="two-mode squeezed scan")
    witness.add_argument("--a", type=float, default=None)
    witness.add_argument("--b-min", type=float, default=None)
    witness.add_argument("--b-max", type=float, default=None)
    thermal = entangle_actions.add_parser("thermal", parents=[common], help="thermal threshold scan")
    thermal.add_argument("--step", type=float, default=None)

    return parser


COMMON_KEYS = ("command", "action", "config_file", "output_path", "seed", "restarts", "workers", "format", "dim",
               "opts")


def apply_flags(args: argparse.Namespace) -> None:
    """Precedence: flags > opts > config file > defaults."""
    if args.config_file:
        config.merge_from_file(args.config_file)
    if args.opts:
        opts = args.opts[1:] if args.opts[0] == "--" else args.opts
        config.merge_from_list(opts)

    if args.output_path is not None:
        config.OUTPUT_DIR = args.output_path
    if args.seed is not None:
        config.RUNTIME.SEED = args.seed
    if args.restarts is not None:
        config.SOLVER.RESTARTS = args.restarts
    if args.workers is not None:
        config.RUNTIME.NUM_WORKERS = args.workers
    if args.format is not None:
        config.OUTPUT.FORMAT = args.format
    if getattr(args, "step", None) is not None:
        config.ENTANGLEMENT.T_STEP = args.step


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    snapshot: Node = config.clone()
    try:
        try:
            apply_flags(args)
        except (KeyError, ValueError, AssertionError, FileNotFoundError) as error:
            logger.error(f"invalid configuration: {error}")
            return EXIT_INVALID
        config.freeze()

        # basic paths
        output_path = Path(config.OUTPUT_DIR)
        output_config_path = output_path / "config.yaml"
        try:
            output_path.mkdir(exist_ok=True, parents=True)
            utils.save_config(config, output_config_path)
            utils.setup_logger(output_path, "log.txt")
        except OSError as error:
            logger.error(f"cannot use output directory {output_path}: {error}")
            return EXIT_INVALID

        # output some basic information
        logger.info(args)
        logger.debug("Collecting environment information...")
        logger.debug(f"\n{utils.collect_env_info()}")
        logger.info(f"Running with config:\n{config}")
        logger.info(f"Saving config at {output_config_path}")

        # make sure it's deterministic
        utils.re_seed(config.RUNTIME.SEED)

        options = {k: v for k, v in vars(args).items() if k not in COMMON_KEYS}
        run_config = RunConfig(command=args.command, action=getattr(args, "action", None), dims=tuple(args.dim),
                               options=options)
        return Runner(run_config).run()
    finally:
        config.defrost()
        config.merge_from_other_cfg(snapshot)


if __name__ == '__main__':
    sys.exit(main())
