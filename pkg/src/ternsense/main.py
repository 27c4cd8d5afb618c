"""
Command-line entry point.

Exit codes: 0 success, 1 runtime failure, 2 usage error (bad flag, invalid
configuration, missing input path).
"""
import sys
import logging
import argparse
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from ternsense.baseline import BpConfig
from ternsense.commands import cmd_evaluate, cmd_export_matrix, cmd_reconstruct, cmd_sense, cmd_train
from ternsense.config import DataConfig, RunConfig, field_default, load_run_config, load_settings, resolve, setup_logging
from ternsense.network import NetworkConfig
from ternsense.training import TrainConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# (attribute, must be a directory) per subcommand
REQUIRED_INPUTS = {
    "train": [("images", True), ("config", False)],
    "export-matrix": [("model", False)],
    "sense": [("matrix", False), ("model", False), ("image", False)],
    "reconstruct": [("model", False), ("measurements", False)],
    "evaluate": [("model", False), ("images", True), ("config", False)],
}


def _default(model, name: str) -> str:
    return f"(default: {field_default(model, name)})"


def _add_network_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--patch', type=int, dest='patch_side', help=f"Patch side S {_default(NetworkConfig, 'patch_side')}")
    parser.add_argument('--rate', type=float, help=f"Sensing rate R {_default(NetworkConfig, 'sensing_rate')}")
    parser.add_argument('--gamma', type=float, help=f"Sparsity ratio {_default(NetworkConfig, 'sparsity_ratio')}")
    parser.add_argument('--hidden-layers', type=int, help=f"Hidden layers L {_default(NetworkConfig, 'hidden_layers')}")
    parser.add_argument('--hidden-units', type=int, help=f"Units per hidden layer {_default(NetworkConfig, 'hidden_units')}")


def _add_training_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--patches', type=int, help=f"Random training patches {_default(DataConfig, 'patches')}")
    parser.add_argument('--epochs', type=int, help=f"Training epochs {_default(TrainConfig, 'epochs')}")
    parser.add_argument('--batch', type=int, help=f"Batch size {_default(TrainConfig, 'batch_size')}")
    parser.add_argument('--lr', type=float, help=f"Base learning rate {_default(TrainConfig, 'base_lr')}")
    parser.add_argument('--decay', type=float, help=f"Learning rate decay factor {_default(TrainConfig, 'lr_decay_factor')}")
    parser.add_argument('--decay-every', type=int, help=f"Epochs between decays {_default(TrainConfig, 'lr_decay_every')}")
    parser.add_argument('--l2', type=float, help=f"l2 weight on dense weights {_default(TrainConfig, 'weight_decay')}")
    parser.add_argument('--seed', type=int, help=f"Random seed {_default(TrainConfig, 'seed')}")


def _add_stride_flag(parser: argparse.ArgumentParser):
    parser.add_argument('--stride', type=int, help=f"Patch stride {_default(DataConfig, 'stride')}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ternsense',
        description='Train and run learned sparse ternary compressive sensing',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  ternsense train --images train/ --out model.tcsm
  ternsense export-matrix --model model.tcsm --out phi.stpm
  ternsense sense --matrix phi.stpm --model model.tcsm --image in.pgm --out y.bin
  ternsense reconstruct --model model.tcsm --measurements y.bin --out rec.pgm
  ternsense evaluate --model model.tcsm --images test/ --baseline bp --report psnr.csv

  # Environment variables (or a .env file):
  LOG_LEVEL=DEBUG LOG_TO_FILE=true ternsense train ...
        """
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    train = subparsers.add_parser('train', help='Train sensing matrix and reconstruction network')
    train.add_argument('--images', required=True, help='Directory of training images')
    train.add_argument('--out', required=True, help='Checkpoint to write')
    train.add_argument('--config', help='YAML run file; flags override its values')
    train.add_argument('--loss-log', help='Per-step loss CSV (default: <out>.loss.csv)')
    _add_network_flags(train)
    _add_training_flags(train)

    export = subparsers.add_parser('export-matrix', help='Write the ternary sensing matrix')
    export.add_argument('--model', required=True, help='Trained checkpoint')
    export.add_argument('--out', required=True, help='STP matrix file to write')

    sense = subparsers.add_parser('sense', help='Measure an image with an exported matrix')
    sense.add_argument('--matrix', required=True, help='STP matrix file')
    sense.add_argument('--model', required=True, help='Checkpoint providing normalization statistics')
    sense.add_argument('--image', required=True, help='Image to measure')
    sense.add_argument('--out', required=True, help='Measurement file to write')
    _add_stride_flag(sense)

    reconstruct = subparsers.add_parser('reconstruct', help='Rebuild an image from a measurement file')
    reconstruct.add_argument('--model', required=True, help='Trained checkpoint')
    reconstruct.add_argument('--measurements', required=True, help='Measurement file')
    reconstruct.add_argument('--out', required=True, help='PGM image to write')

    evaluate = subparsers.add_parser('evaluate', help='PSNR report over a directory of images')
    evaluate.add_argument('--model', required=True, help='Trained checkpoint')
    evaluate.add_argument('--images', required=True, help='Directory of reference images')
    evaluate.add_argument('--report', required=True, help='CSV report to write')
    evaluate.add_argument('--config', help='YAML run file (data and baseline sections)')
    evaluate.add_argument('--baseline', choices=['none', 'bp'], default='none', help='Comparison method (default: none)')
    evaluate.add_argument('--identity', action='store_true', help='Bypass sensing and reconstruction (reference check)')
    evaluate.add_argument('--bp-seed', type=int, default=0, help='Seed of the baseline random matrix (default: 0)')
    _add_stride_flag(evaluate)

    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    return build_parser().parse_args(argv)


def check_inputs(args: argparse.Namespace):
    """Raise ValueError naming the first input path that does not exist."""
    for attribute, is_directory in REQUIRED_INPUTS[args.command]:
        value = getattr(args, attribute, None)
        if value is None:
            continue
        path = Path(value)
        if is_directory and not path.is_dir():
            raise ValueError(f"--{attribute}: no such directory: {path}")
        if not is_directory and not path.is_file():
            raise ValueError(f"--{attribute}: no such file: {path}")


def _run_config(args: argparse.Namespace) -> RunConfig:
    return load_run_config(args.config) if args.config else RunConfig()


def prepare_train(args: argparse.Namespace) -> Callable[[], object]:
    run = _run_config(args)
    network = resolve(NetworkConfig, run.network, {
        "patch_side": args.patch_side,
        "sensing_rate": args.rate,
        "sparsity_ratio": args.gamma,
        "hidden_layers": args.hidden_layers,
        "hidden_units": args.hidden_units,
    })
    training = resolve(TrainConfig, run.training, {
        "epochs": args.epochs,
        "batch_size": args.batch,
        "base_lr": args.lr,
        "lr_decay_factor": args.decay,
        "lr_decay_every": args.decay_every,
        "weight_decay": args.l2,
        "seed": args.seed,
    })
    data = resolve(DataConfig, run.data, {"patches": args.patches})
    return partial(cmd_train, args.images, network, training, data.patches, args.out, args.loss_log)


def prepare_export(args: argparse.Namespace) -> Callable[[], object]:
    return partial(cmd_export_matrix, args.model, args.out)


def prepare_sense(args: argparse.Namespace) -> Callable[[], object]:
    data = resolve(DataConfig, None, {"stride": args.stride})
    return partial(cmd_sense, args.matrix, args.model, args.image, data.stride, args.out)


def prepare_reconstruct(args: argparse.Namespace) -> Callable[[], object]:
    return partial(cmd_reconstruct, args.model, args.measurements, args.out)


def prepare_evaluate(args: argparse.Namespace) -> Callable[[], object]:
    run = _run_config(args)
    data = resolve(DataConfig, run.data, {"stride": args.stride})
    bp_config = resolve(BpConfig, run.baseline, {})
    return partial(
        cmd_evaluate, args.model, args.images, data.stride, args.baseline, args.report,
        identity=args.identity, bp_config=bp_config, bp_seed=args.bp_seed,
    )


COMMANDS: Dict[str, Callable[[argparse.Namespace], Callable[[], object]]] = {
    "train": prepare_train,
    "export-matrix": prepare_export,
    "sense": prepare_sense,
    "reconstruct": prepare_reconstruct,
    "evaluate": prepare_evaluate,
}


def _first_line(error: Exception) -> str:
    if isinstance(error, ValidationError):
        first = error.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "configuration"
        return f"invalid {location}: {first['msg']}"
    return str(error).splitlines()[0]


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse, validate and run one subcommand.

    Every flag and input path is validated before any work starts.

    Returns:
        Process exit code
    """
    args = parse_args(argv)
    try:
        settings = load_settings()
    except ValueError as error:
        print(f"ternsense: {error}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(settings)

    try:
        check_inputs(args)
        command = COMMANDS[args.command](args)
    except (ValidationError, ValueError) as error:
        logger.error(f"{args.command}: {_first_line(error)}")
        return EXIT_USAGE

    try:
        command()
    except (ValueError, RuntimeError, OSError) as error:
        logger.error(f"{args.command} failed: {error}")
        return EXIT_FAILURE
    except Exception as error:
        logger.error(f"Unexpected error in {args.command}: {error}", exc_info=True)
        return EXIT_FAILURE

    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
