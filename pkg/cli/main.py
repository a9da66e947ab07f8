# cli/main.py
import argparse
import sys
from typing import List, Optional

from cli import commands
from cli.exit_codes import exit_code_for
from config.logging_config import get_logger, setup_logging
from config.settings import Settings
from gradcheck.suite import DEFAULT_PAIRS
from optimdemo.phantoms import PhantomKind


LOSS_CHOICES = [
    "dice", "dicefocal", "tversky", "hausdorffdt", "dicefocal-hausdorffdt", "tversky-hausdorffdt",
]


def _seed_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="Random seed")
    return parent


def _descent_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="DescentConfig JSON file; flags override its values")
    parser.add_argument("--phantom", choices=[k.value for k in PhantomKind], default="sphere")
    parser.add_argument("--dims", default="32,32,32", help="Phantom dims X,Y,Z")
    parser.add_argument("--target", help="Target mask .mha instead of a phantom")
    parser.add_argument("--steps", type=int)
    parser.add_argument("--step-size", dest="step_size", type=float)
    parser.add_argument("--clip", type=float, help="Gradient max norm")
    parser.add_argument("--rescale", choices=["normalize", "clip"])
    parser.add_argument("--log-every", dest="log_every", type=int)
    parser.add_argument("--tau", type=float, help="NSD tolerance in mm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loss_bench",
        description="Segmentation loss family, metrics and volume pipeline for small lesion masks",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-dir", default=None, help="Directory for log files")
    parser.add_argument("--log-file", action="store_true", help="Also log to files in --log-dir")
    sub = parser.add_subparsers(dest="command", required=True)
    seed = _seed_parent()

    p = sub.add_parser("preprocess", help="Resample, normalize and stack one case")
    p.add_argument("--adc", required=True)
    p.add_argument("--zadc", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dims", default=None, help="Target dims X,Y,Z (default 192,192,32)")
    p.add_argument("--compress", action="store_true", help="zlib-compress the written volumes")
    p.set_defaults(handler=commands.cmd_preprocess)

    p = sub.add_parser("eval", help="Score predicted masks against ground truth")
    p.add_argument("--pred", required=True, help="Directory of predicted .mha masks")
    p.add_argument("--truth", required=True, help="Directory of ground-truth .mha masks")
    p.add_argument("--tau", type=float, default=None, help="NSD tolerance in mm (default 1.0)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", required=True)
    p.add_argument("--label", default="all", help="Row label of the aggregate")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(handler=commands.cmd_eval)

    p = sub.add_parser("loss", help="Evaluate one loss and its gradient")
    p.add_argument("--spec", required=True, help="LossSpec JSON file")
    p.add_argument("--pred", required=True, help="Probability volume .mha")
    p.add_argument("--truth", required=True, help="Ground-truth mask .mha")
    p.add_argument("--grad", default=None, help="Write dL/dp to this .mha")
    p.set_defaults(handler=commands.cmd_loss)

    p = sub.add_parser("gradcheck", parents=[seed], help="Finite-difference check of every loss gradient")
    p.add_argument("--sizes", nargs="+", default=["8,8,4"])
    p.add_argument("--loss", nargs="+", choices=LOSS_CHOICES, default=None)
    p.add_argument("--pairs", type=int, default=DEFAULT_PAIRS)
    p.add_argument("--h", type=float, default=1e-4)
    p.add_argument("--empty-truth", dest="empty_truth", action="store_true")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(handler=commands.cmd_gradcheck)

    p = sub.add_parser("demo-optimize", parents=[seed], help="Gradient descent toward a phantom")
    p.add_argument("--loss", choices=LOSS_CHOICES, default=None)
    p.add_argument("--out", required=True, help="Output directory")
    _descent_arguments(p)
    p.set_defaults(handler=commands.cmd_demo_optimize)

    p = sub.add_parser("compare", parents=[seed], help="Run the descent demo for several losses")
    p.add_argument("--loss", nargs="+", choices=LOSS_CHOICES, default=None)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out", required=True)
    p.add_argument("--progress", action="store_true")
    _descent_arguments(p)
    p.set_defaults(handler=commands.cmd_compare)

    p = sub.add_parser("edt", parents=[seed], help="Distance transform of a mask")
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--signed", action="store_true")
    p.set_defaults(handler=commands.cmd_edt)

    p = sub.add_parser("augment", parents=[seed], help="Augment a preprocessed case")
    p.add_argument("--input", required=True, help="Directory written by preprocess")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="AugmentConfig JSON file")
    p.set_defaults(handler=commands.cmd_augment)

    p = sub.add_parser("restore", help="Resample a prediction back to its native grid")
    p.add_argument("--pred", required=True)
    p.add_argument("--meta", required=True, help="meta.json written by preprocess")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=commands.cmd_restore)

    p = sub.add_parser("schema", help="Print the JSON schemas of the config files")
    p.set_defaults(handler=commands.cmd_schema)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code"""
    args = build_parser().parse_args(argv)
    logger = get_logger(__name__)

    try:
        settings = Settings.from_env()
        setup_logging(
            log_level=args.log_level or settings.log_level,
            log_dir=args.log_dir or settings.log_dir,
            enable_file_logging=args.log_file or settings.log_to_file,
        )
        return int(args.handler(args, settings))
    except Exception as e:
        code = exit_code_for(e)
        logger.error("command_failed", command=args.command, error=str(e), exit_code=int(code))
        sys.stderr.write(f"error: {e}\n")
        return int(code)


if __name__ == "__main__":
    sys.exit(main())
