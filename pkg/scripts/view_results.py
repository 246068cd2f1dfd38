"""Prints the latest outcome of every recorded check instance to the console."""

import argparse
from collections import defaultdict
from enum import Enum

from rich.console import Console
from rich.padding import Padding
from tinydb import TinyDB

from symplectic_restrictions.check import CheckBaseOutput
from symplectic_restrictions.tinydb_helpers.db_path import TINYDB_PATH


class VerbosityLevel(Enum):
    BASIC = 0  # Pass counts per germ
    NORMAL = 1  # Plus pass counts per suite
    DETAILED = 2  # Plus one line per check instance
    DEBUG = 3  # Everything including mismatching cells


def latest_results(documents: list[dict]) -> dict[str, dict[str, CheckBaseOutput]]:
    """Latest output per suite, keyed by `module (germ)` and then by check instance name."""
    latest: dict[str, dict[str, CheckBaseOutput]] = defaultdict(dict)
    for doc in documents:
        output = CheckBaseOutput.load_class(doc["module_name"], doc["class_name"], doc)
        suite_key = f"{output.module_name} ({output.germ})"
        instance_key = output.check_instance.name
        previous = latest[suite_key].get(instance_key)
        if previous is None or output.execution_date > previous.execution_date:
            latest[suite_key][instance_key] = output
    return dict(latest)


def germ_totals(results: dict[str, dict[str, CheckBaseOutput]]) -> dict[str, tuple[int, int]]:
    """(passed, total) check instances per germ."""
    outcomes: dict[str, list[bool]] = defaultdict(list)
    for per_suite in results.values():
        for output in per_suite.values():
            outcomes[output.germ].append(output.passed)
    return {germ: (sum(passed), len(passed)) for germ, passed in outcomes.items()}


def main(argv: list[str] | None = None) -> None:
    console = Console(highlight=False)

    parser = argparse.ArgumentParser()
    parser.add_argument(
        "-v",
        "--verbosity",
        type=int,
        choices=[level.value for level in VerbosityLevel],
        default=VerbosityLevel.NORMAL.value,
        help="Verbosity level: 0 (basic), 1 (normal), 2 (detailed), 3 (debug)",
    )
    args = parser.parse_args(argv)

    results = latest_results(TinyDB(TINYDB_PATH).all())

    if args.verbosity >= VerbosityLevel.DETAILED.value:
        for suite_key, per_suite in results.items():
            console.print(f"[bold]{suite_key}[/bold]")
            for instance_key, output in per_suite.items():
                status = "[green]PASS[/green]" if output.passed else "[red]FAIL[/red]"
                console.print(f"[italic]{instance_key}[/italic]: {status} {output.summary}")
                if args.verbosity >= VerbosityLevel.DEBUG.value:
                    for mismatch in output.mismatches:
                        console.print(Padding(mismatch, (0, 0, 0, 2)), style="bright_black", markup=False)
            console.print()

    if args.verbosity >= VerbosityLevel.NORMAL.value:
        console.print("[bold]Suites[/bold]")
        for suite_key, per_suite in results.items():
            passed = sum(o.passed for o in per_suite.values())
            console.print(f"[italic]{suite_key}[/italic]: [blue]{passed}/{len(per_suite)}[/blue] passed")
        console.print()

    console.print("[bold]Germs[/bold]")
    for germ, (passed, total) in germ_totals(results).items():
        console.print(f"[italic]{germ}[/italic] ({total} checks): [blue]{passed}/{total}[/blue]")


if __name__ == "__main__":
    main()
