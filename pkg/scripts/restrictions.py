import argparse
import sys

from loguru import logger
from pydantic import ValidationError
from rich.console import Console

from symplectic_restrictions.cli import Command, OutputFormat, RunConfig, run
from symplectic_restrictions.errors import RestrictionError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Algebraic restrictions of symplectic forms to quasi-homogeneous curves."
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--germ", default="W8", help="Built-in germ name (W8, W9) or path of a .germ file.")
    common.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], default="text")
    common.add_argument("--cutoff", type=int, default=None, help="Largest quasi-degree examined for stabilization.")
    common.add_argument("--degree-cap", type=int, default=20, help="Degree cap of the generating functions.")
    common.add_argument("--seed", type=int, default=0, help="Seed of the sampled orbit checks.")
    common.add_argument("--log-level", default="WARNING", help="Level of the log messages written to stderr.")

    commands = parser.add_subparsers(dest="command", required=True)
    basis = commands.add_parser(Command.BASIS.value, parents=[common], help="Basis of the restriction space.")
    basis.add_argument("--all-forms", action="store_true", help="Restrictions of all forms, not only closed ones.")
    basis.add_argument("--form-degree", type=int, choices=[1, 2], default=2)

    actions = commands.add_parser(Command.ACTIONS.value, parents=[common], help="Infinitesimal action grid.")
    actions.add_argument("--field", default=None, help="A single field, for example 'x1*x3*E'.")
    actions.add_argument("--verify-paper", action="store_true", help="Diff against the golden action tables.")

    classify = commands.add_parser(Command.CLASSIFY.value, parents=[common], help="Normal form of a class.")
    classify.add_argument("--form", default=None, help="A closed 2-form, for example 'dx2^dx3 + 2*dx1^dx3'.")
    classify.add_argument("--coords", default=None, help="Comma separated coordinates over the basis.")
    classify.add_argument("--table", action="store_true", help="Classify one representative per class.")
    classify.add_argument("--ruleset", default=None, help="Path of a ruleset file.")
    classify.add_argument("--verify-paper", action="store_true", help="Diff the sweep against the golden table.")

    invariants = commands.add_parser(Command.INVARIANTS.value, parents=[common], help="Tangency orders per class.")
    invariants.add_argument("--class", dest="class_label", default=None, help="Class label or its suffix, e.g. 3.")
    invariants.add_argument("--experimental-multibranch", action="store_true")

    geometry = commands.add_parser(Command.GEOMETRY.value, parents=[common], help="Geometric conditions.")
    geometry.add_argument("--omega", default=None, help="Symplectic form on the ambient space.")
    geometry.add_argument(
        "--experimental-multibranch", action="store_true", help="L_N of multi-branch germs through 1-forms."
    )

    verify = commands.add_parser(Command.VERIFY.value, parents=[common], help="Run every check suite.")
    verify.add_argument("--resume", action="store_true", help="Skip instances whose latest run passed.")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = vars(build_parser().parse_args(argv))
    logger.remove()
    logger.add(sys.stderr, level=args.pop("log_level").upper())
    try:
        cfg = RunConfig(**args)
    except ValidationError as e:
        logger.error(f"Invalid options: {e}")
        return 2
    try:
        run(cfg, Console(highlight=False, soft_wrap=True))
    except RestrictionError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
