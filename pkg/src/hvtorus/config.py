"""
Run configuration documents.

:class:`ConstructionDescriptor` names a module and its parameters;
:class:`RunConfig` is the JSON document the CLI reads. Both validate on
construction, so a config that loads is complete for its command.
"""

import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

from pydantic import Field, field_validator, model_validator

from hvtorus.exppoly import RhoSpec
from hvtorus.gradmod import ModuleAlgebra, Truncation
from hvtorus.lattice import STANDARD_BASIS, BasisPair
from hvtorus.model import FrozenModel, RationalValue, generate_digest


class ConstructionName(str, Enum):
    TRIVIAL = "trivial"
    LAURENT_T = "laurent_T"
    FOCK = "fock"
    VERMA_H = "verma_H"
    GENERIC_VERMA_H = "generic_verma_H"
    TENSOR_M_RHO = "tensor_M_rho"
    VERMA_V_RHO = "verma_V_rho"
    V_RHO = "V_rho"
    HAT_V = "hat_V"
    INDUCED_LAURENT = "induced_laurent"
    INDUCED_VERMA = "induced_verma"


ONE_SIDED = frozenset(
    {
        ConstructionName.FOCK,
        ConstructionName.VERMA_H,
        ConstructionName.GENERIC_VERMA_H,
        ConstructionName.TENSOR_M_RHO,
        ConstructionName.INDUCED_VERMA,
    }
)
NEEDS_C = frozenset(
    {
        ConstructionName.VERMA_H,
        ConstructionName.GENERIC_VERMA_H,
        ConstructionName.TENSOR_M_RHO,
        ConstructionName.INDUCED_VERMA,
    }
)
NEEDS_RHO = frozenset(
    {
        ConstructionName.LAURENT_T,
        ConstructionName.VERMA_V_RHO,
        ConstructionName.V_RHO,
        ConstructionName.HAT_V,
        ConstructionName.INDUCED_LAURENT,
    }
)

DEFAULT_TRUNCATION = Truncation(depth=4, window=4)


class ConstructionDescriptor(FrozenModel):
    """
    A module to build.

    Example:
        ConstructionDescriptor.model_validate({
            "construction": "verma_H",
            "c": ["1", "1", "0", "0"],
            "epsilon": "+",
            "basis": {"b1": [1, 0], "b2": [0, 1]},
            "truncation": {"depth": 4, "window": 8, "raising_bound": 16},
        })
    """

    construction: ConstructionName
    c: Optional[Tuple[RationalValue, RationalValue, RationalValue, RationalValue]] = None
    a: Optional[RationalValue] = None
    epsilon: Optional[str] = None
    rho: Optional[RhoSpec] = None
    lam: Tuple[RationalValue, RationalValue] = (Fraction(0), Fraction(0))
    index: Optional[int] = None
    algebra: ModuleAlgebra = ModuleAlgebra.H_B1
    generated: bool = False
    quotient: bool = False
    basis: BasisPair = STANDARD_BASIS
    truncation: Truncation = DEFAULT_TRUNCATION

    @field_validator("epsilon")
    @classmethod
    def _check_epsilon(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in ("+", "-"):
            raise ValueError(f"epsilon must be '+' or '-', got {value!r}")
        return value

    @model_validator(mode="after")
    def _check_parameters(self) -> "ConstructionDescriptor":
        name = self.construction
        if name in ONE_SIDED and self.epsilon is None:
            raise ValueError(f"{name.value} is one-sided and needs epsilon")
        if name not in ONE_SIDED and self.epsilon is not None:
            raise ValueError(f"{name.value} is not one-sided; epsilon must be omitted")
        if name in NEEDS_C and self.c is None:
            raise ValueError(f"{name.value} needs the level tuple c")
        if name in NEEDS_RHO and self.rho is None:
            raise ValueError(f"{name.value} needs rho")
        if name is ConstructionName.FOCK and self.a is None:
            raise ValueError("fock needs the level a")
        if self.index is not None and name is not ConstructionName.HAT_V:
            raise ValueError("index selects W(i) and only applies to hat_V")
        if self.quotient and name not in (
            ConstructionName.FOCK,
            ConstructionName.VERMA_H,
            ConstructionName.GENERIC_VERMA_H,
        ):
            raise ValueError(f"quotient flag does not apply to {name.value}")
        return self

    def level_tuple(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        if self.c is None:
            raise ValueError(f"{self.construction.value} has no level tuple")
        return self.c


class Command(str, Enum):
    BRACKET = "bracket"
    JACOBI_FUZZ = "jacobi-fuzz"
    DIMS = "dims"
    EXPERIMENT = "experiment"


class ExperimentName(str, Enum):
    STABILIZATION = "stabilization"
    GROWTH = "growth"
    WITNESS_RANK = "witness_rank"
    HEISENBERG_PROBE = "heisenberg_probe"
    SUPPORT = "support"
    DECOMPOSITION = "decomposition"
    GHW_SCAN = "ghw_scan"
    UNIFORM_BOUND = "uniform_bound"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class OutputSpec(FrozenModel):
    path: Optional[Path] = None
    format: OutputFormat = OutputFormat.JSON


class RunConfig(FrozenModel):
    """
    One CLI run.

    Required fields depend on ``command``: ``bracket`` needs ``left`` and
    ``right``; ``jacobi-fuzz`` needs ``trials`` >= 1; ``dims`` needs
    ``construction``; ``experiment`` needs ``experiment`` plus that
    experiment's inputs.
    """

    command: Command
    construction: Optional[ConstructionDescriptor] = None
    experiment: Optional[ExperimentName] = None
    rho: Optional[RhoSpec] = None
    c: Optional[Tuple[RationalValue, RationalValue, RationalValue, RationalValue]] = None
    epsilon: str = "+"
    basis: BasisPair = STANDARD_BASIS
    bases: List[BasisPair] = Field(default_factory=list)
    levels: int = 1
    depth: int = 1
    n: Optional[int] = None
    sweep: Optional[List[int]] = None
    left: Optional[str] = None
    right: Optional[str] = None
    window: int = 5
    trials: int = 1000
    seed: int = 0
    output: OutputSpec = Field(default_factory=OutputSpec)

    @field_validator("sweep")
    @classmethod
    def _check_sweep(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None:
            if not value:
                raise ValueError("sweep must not be empty")
            if any(b <= a for a, b in zip(value, value[1:])):
                raise ValueError(f"sweep must be strictly increasing, got {value}")
            if value[0] < 0:
                raise ValueError("sweep settings must be non-negative")
        return value

    @model_validator(mode="after")
    def _check_required(self) -> "RunConfig":
        cmd = self.command
        if cmd is Command.BRACKET and (self.left is None or self.right is None):
            raise ValueError("bracket needs both 'left' and 'right' expressions")
        if cmd is Command.JACOBI_FUZZ:
            if self.trials < 1:
                raise ValueError(f"jacobi-fuzz needs trials >= 1, got {self.trials}")
            if self.window < 1:
                raise ValueError(f"jacobi-fuzz needs window >= 1, got {self.window}")
        if cmd is Command.DIMS and self.construction is None:
            raise ValueError("dims needs a 'construction' descriptor")
        if cmd is Command.EXPERIMENT:
            self._check_experiment()
        return self

    def _check_experiment(self) -> None:
        exp = self.experiment
        if exp is None:
            raise ValueError("experiment needs an 'experiment' name")
        if exp in (ExperimentName.STABILIZATION, ExperimentName.GROWTH):
            if self.sweep is None or len(self.sweep) < 3:
                raise ValueError(f"{exp.value} needs a sweep of at least 3 settings")
        if exp in (ExperimentName.STABILIZATION, ExperimentName.DECOMPOSITION) and self.rho is None:
            raise ValueError(f"{exp.value} needs rho")
        if exp is ExperimentName.GROWTH and self.c is None:
            raise ValueError("growth needs the level tuple c")
        if exp is ExperimentName.WITNESS_RANK and (self.n is None or not 1 <= self.n <= self.window):
            raise ValueError("witness_rank needs 1 <= n <= window")
        needs_module = (
            ExperimentName.HEISENBERG_PROBE,
            ExperimentName.SUPPORT,
            ExperimentName.GHW_SCAN,
            ExperimentName.UNIFORM_BOUND,
        )
        if exp in needs_module and self.construction is None:
            raise ValueError(f"{exp.value} needs a 'construction' descriptor")
        if exp is ExperimentName.GHW_SCAN and not self.bases:
            raise ValueError("ghw_scan needs at least one candidate basis in 'bases'")
        if self.epsilon not in ("+", "-"):
            raise ValueError(f"epsilon must be '+' or '-', got {self.epsilon!r}")

    def digest(self) -> str:
        """Digest of the canonical JSON form of this config, output location excluded."""
        return generate_digest([self.model_dump_json(exclude={"output"})])


def load_config(source: Union[str, Path, dict]) -> RunConfig:
    """
    Load a RunConfig from a JSON file path, a JSON string or a dict.

    Raises:
        OSError: If the file cannot be read
        pydantic.ValidationError: If the document is invalid
    """
    data: Any
    if isinstance(source, dict):
        data = source
    elif isinstance(source, Path) or not str(source).lstrip().startswith("{"):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = json.loads(str(source))
    return RunConfig.model_validate(data)
