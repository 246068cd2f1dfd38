"""Defines abstractions for the golden-table checks run by `restrictions verify`."""

from abc import ABC, abstractmethod
import importlib
from pathlib import Path
from typing import Literal

from loguru import logger
import pendulum
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_extra_types.pendulum_dt import DateTime
from rich.progress import Progress
from tinydb import TinyDB
import yaml

from symplectic_restrictions.errors import RestrictionError, VerificationMismatch
from symplectic_restrictions.germ import GermDefinition
from symplectic_restrictions.paths import GOLDEN_DIR
from symplectic_restrictions.tables import Table
from symplectic_restrictions.tinydb_helpers.db_path import TINYDB_PATH


class CheckRunConfig(BaseModel):
    """Identifies the check implementation that a suite file configures."""

    module_name: str = Field(metadata={"description": "The name of the module in symplectic_restrictions.checks."})
    class_name: str = Field(metadata={"description": "The name of the Check class in the module."})


class CheckInstance(BaseModel):
    """One golden table compared against one germ.

    Suites extend this with their own parameters.
    """

    model_config = ConfigDict(extra="allow")

    name: str = Field(description="Identifies the instance; unique within its suite.")
    germ: str = Field(description="Name of the germ whose rows of the golden table are compared.")
    golden: str = Field(description="File name of the golden table in data/golden.")


class CheckConfig(BaseModel):
    run_config: CheckRunConfig
    check_instances: list[CheckInstance]

    @classmethod
    def load(cls, path: Path) -> "CheckConfig | None":
        """Load and validate a suite file.

        Notes:
            Logs error messages instead of raising exceptions; None signals a broken suite file.
        """
        try:
            with path.open(encoding="utf-8") as file:
                data = yaml.safe_load(file)
            return cls(run_config=data.get("run_config", {}), check_instances=data.get("check_instances", []))
        except FileNotFoundError:
            logger.error(f"The file {path} does not exist.")
        except ValidationError as e:
            logger.error(f"Validation error for the YAML file {path}: {e}")
        except Exception as e:
            logger.error(f"An unexpected error occurred while loading the file {path}: {e}")
        return None


class CheckBaseOutput(BaseModel):
    output_type: Literal["instance"] = Field(default="instance", description="The type of output.")
    module_name: str = Field(description="The name of the module the check is in.")
    class_name: str = Field(description="The name of the check output class in the module.")
    germ: str = Field(description="Name of the germ that was checked.")
    germ_source: str = Field(default="", description="Built-in name or path the germ was loaded from.")
    passed: bool = Field(description="Whether every compared cell matched.")
    summary: str = Field(default="", description="Short description of what was computed.")
    mismatches: list[str] = Field(default_factory=list, description="One line per disagreeing cell.")
    execution_date: DateTime = Field(
        default_factory=pendulum.now, description="The datetime the check instance was executed."
    )

    def save_to_db(self) -> None:
        db = TinyDB(TINYDB_PATH)
        db.insert(self.model_dump(mode="json"))

    @staticmethod
    def load_class(module_name: str, class_name: str, data: dict) -> "CheckBaseOutput":
        module = importlib.import_module(f"symplectic_restrictions.checks.{module_name}")
        class_ = getattr(module, class_name)
        return class_(**data)


class CheckInstanceOutput(CheckBaseOutput):
    """Outcome of one check instance. check_instance is overwritten with the suite's instance class."""

    check_instance: CheckInstance = Field(description="The check instance that was executed.")


def golden_records(instance: CheckInstance, germ_name: str, golden: str | None = None) -> list[dict[str, str]]:
    """Rows of a golden table that belong to the germ.

    Raises:
        VerificationMismatch: the table has no rows for the germ.
    """
    table = Table.load(GOLDEN_DIR / (golden or instance.golden))
    records = [record for record in table.records() if record["germ"] == germ_name]
    if not records:
        raise VerificationMismatch(f"{table.title} has no rows for germ {germ_name}")
    return records


class Check(ABC):
    instance_class: type[CheckInstance] = CheckInstance

    def __init__(self, config: dict | CheckConfig, seed: int = 0) -> None:
        self.seed = seed
        data = config.model_dump() if isinstance(config, CheckConfig) else config
        self.run_config = CheckRunConfig(**data["run_config"])
        self.instances: list[CheckInstance] = [self.instance_class(**i) for i in data.get("check_instances", [])]

    @abstractmethod
    def _get_output_class(self) -> type[CheckInstanceOutput]:
        """Return the CheckInstanceOutput class used by this check."""

    @abstractmethod
    def _check(self, instance: CheckInstance, germ: GermDefinition) -> tuple[list[str], str]:
        """Compare the germ against the instance's golden rows.

        Returns:
            tuple[list[str], str]: The mismatching cells and a one-line summary.
        """

    def key(self, instance: CheckInstance) -> tuple[str, str, str]:
        return (self._get_output_class().__name__, instance.germ, instance.name)

    def selected(self, germ_name: str, keys_to_skip: set) -> list[CheckInstance]:
        return [i for i in self.instances if i.germ == germ_name and self.key(i) not in keys_to_skip]

    def num_instances(self, germ_name: str, keys_to_skip: set) -> int:
        return len(self.selected(germ_name, keys_to_skip))

    def execute(
        self, progress: Progress | None, germ: GermDefinition, keys_to_skip: set, save: bool = True
    ) -> list[CheckInstanceOutput]:
        """Run every instance configured for the germ, advancing task 0 of the progress bar after each one."""
        outputs = []
        output_class = self._get_output_class()
        for instance in self.selected(germ.name, keys_to_skip):
            try:
                mismatches, summary = self._check(instance, germ)
            except RestrictionError as e:
                logger.error(f"{instance.name}: {type(e).__name__}: {e}")
                mismatches, summary = [f"{type(e).__name__}: {e}"], "check aborted"
            output = output_class(
                module_name=self.run_config.module_name,
                class_name=output_class.__name__,
                germ=germ.name,
                germ_source=germ.source,
                passed=not mismatches,
                summary=summary,
                mismatches=mismatches,
                check_instance=instance,
            )
            logger.info(f"{instance.name}: {'PASS' if output.passed else 'FAIL'} {summary}")
            if save:
                output.save_to_db()
            outputs.append(output)
            if progress is not None:
                progress.advance(0)
        return outputs

    @staticmethod
    def load_class(module_name: str, class_name: str, config: dict | CheckConfig, seed: int = 0) -> "Check":
        module = importlib.import_module(f"symplectic_restrictions.checks.{module_name}")
        class_ = getattr(module, class_name)
        return class_(config=config, seed=seed)
