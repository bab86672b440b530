"""Validated run description built from a plain-text config file plus flags."""
import configparser
import logging
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ValidationError, field_validator, model_validator

from src.benchmark_suite import PROBLEMS, STUDIES
from src.config import Config
from src.hyperbolic_solver import CflRule
from src.weight_engine import SchemeId, SchemeParams, scheme_names

logger = logging.getLogger(__name__)

COMMANDS = ("run", "sweep", "table", "list")

# config-file key -> RunConfig field, per section
_SECTIONS = {
    "run": {
        "problem": "problem",
        "study": "study",
        "n": "n",
        "nx": "n",
        "ny": "ny",
        "t_end": "t_end",
        "cfl": "cfl",
        "cfl_rule": "cfl_rule",
        "resolutions": "resolutions",
        "snapshot_times": "snapshot_times",
        "times": "times",
        "workers": "workers",
        "gamma": "gamma",
    },
    "scheme": {
        "names": "schemes",
        "scheme": "schemes",
        "epsilon": "epsilon",
        "p": "p",
        "theta": "theta",
        "nip_exponent": "nip_exponent",
        "characteristic": "characteristic",
    },
    "output": {
        "dir": "output_dir",
        "output_dir": "output_dir",
        "imr": "imr",
    },
}

_LIST_FIELDS = {"schemes", "resolutions", "snapshot_times", "times"}


class UsageError(ValueError):
    """Raised for unknown ids, conflicting flags and unreadable config files."""


class RunConfig(BaseModel):
    """Fully resolved description of one CLI invocation."""

    command: str = "run"
    problem: Optional[str] = None
    study: Optional[str] = None
    schemes: List[str] = []
    n: Optional[int] = None
    ny: Optional[int] = None
    resolutions: List[int] = []
    t_end: Optional[float] = None
    cfl: Optional[float] = None
    cfl_rule: Optional[CflRule] = None
    epsilon: float = Config.EPSILON
    p: float = Config.P
    theta: float = Config.THETA
    nip_exponent: float = Config.NIP_EXPONENT
    gamma: float = Config.GAMMA
    characteristic: bool = True
    imr: bool = False
    snapshot_times: List[float] = []
    times: List[float] = []
    output_dir: Path = Config.OUTPUT_DIR
    workers: int = Config.WORKERS

    @field_validator("command")
    @classmethod
    def known_command(cls, value):
        if value not in COMMANDS:
            raise ValueError(f"unknown command '{value}'; valid commands: {', '.join(COMMANDS)}")
        return value

    @field_validator("problem")
    @classmethod
    def known_problem(cls, value):
        if value is not None and value not in PROBLEMS:
            raise ValueError(f"unknown problem '{value}'; valid problems: {', '.join(PROBLEMS)}")
        return value

    @field_validator("study")
    @classmethod
    def known_study(cls, value):
        if value is not None and value not in STUDIES:
            raise ValueError(f"unknown study '{value}'; valid studies: {', '.join(STUDIES)}")
        return value

    @field_validator("schemes")
    @classmethod
    def known_schemes(cls, value):
        return [SchemeId.parse(name).name for name in value]

    @field_validator("n", "ny", "workers")
    @classmethod
    def positive(cls, value):
        if value is not None and value < 1:
            raise ValueError(f"must be >= 1, got {value}")
        return value

    @field_validator("epsilon")
    @classmethod
    def positive_epsilon(cls, value):
        if not value > 0:
            raise ValueError(f"epsilon must be > 0, got {value}")
        return value

    @model_validator(mode="after")
    def consistent(self):
        if self.cfl is not None and self.cfl_rule is CflRule.DX_TO_TWO_THIRDS:
            raise ValueError("--cfl conflicts with --cfl-rule dx_to_two_thirds")
        if self.cfl is not None and not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"CFL must lie in (0, 1], got {self.cfl}")
        if self.command in ("run", "sweep") and self.problem is None:
            raise ValueError(f"'{self.command}' needs --problem")
        if self.command in ("run", "sweep") and not self.schemes:
            raise ValueError(f"'{self.command}' needs at least one --scheme")
        if self.command in ("run", "sweep") and not PROBLEMS[self.problem].evolvable:
            raise ValueError(f"problem '{self.problem}' is reconstruction-only; use 'table --study critical'")
        if self.command == "table" and self.study is None:
            raise ValueError("'table' needs --study")
        if self.times and self.command != "table":
            raise ValueError("--times belongs to 'table'; use --t-end or --snapshot for a run")
        if any(not t > 0.0 for t in self.times):
            raise ValueError(f"output times must be > 0, got {self.times}")
        if self.times and self.study is not None and STUDIES[self.study].kind != "longrun":
            raise ValueError(f"study '{self.study}' has no output times; --times applies to long-run studies")
        if self.command == "run" and self.resolutions:
            raise ValueError("--resolutions belongs to 'sweep'; use --n for a single run")
        if self.command == "sweep" and self.n is not None:
            raise ValueError("--n conflicts with --resolutions in 'sweep'")
        if self.command == "sweep" and not self.resolutions:
            raise ValueError("'sweep' needs --resolutions")
        if self.problem is not None and self.ny is not None and PROBLEMS[self.problem].ndim == 1:
            raise ValueError(f"--ny given for the 1D problem '{self.problem}'")
        if (
            self.cfl is None
            and self.cfl_rule is CflRule.FIXED
            and self.problem is not None
            and not PROBLEMS[self.problem].cfl > 0.0
        ):
            raise ValueError(f"--cfl-rule fixed needs --cfl; problem '{self.problem}' has no default CFL number")
        return self

    def scheme_params(self) -> SchemeParams:
        return SchemeParams(epsilon=self.epsilon, p=self.p, theta=self.theta, nip_exponent=self.nip_exponent)

    def resolved_n(self) -> int:
        return self.n if self.n is not None else PROBLEMS[self.problem].default_n


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.replace(";", ",").split(",") if item.strip()]


def read_config_file(path) -> Dict:
    """``key = value`` lines under [run], [scheme] and [output] sections."""
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except (OSError, configparser.Error) as e:
        raise UsageError(f"cannot read config file {path}: {e}") from e

    values: Dict = {}
    for section in parser.sections():
        keys = _SECTIONS.get(section)
        if keys is None:
            raise UsageError(f"unknown section [{section}] in {path}; valid sections: {', '.join(_SECTIONS)}")
        for key, raw in parser.items(section):
            target = keys.get(key)
            if target is None:
                raise UsageError(f"unknown key '{key}' in [{section}] of {path}")
            values[target] = _split(raw) if target in _LIST_FIELDS else raw.strip()
    logger.debug("Read %d setting(s) from %s", len(values), path)
    return values


def parse_config(flags: Dict, path=None) -> RunConfig:
    """
    Merge a config file (if any) with command-line flags; flags win. Flags
    left as None or empty lists do not override file values.
    """
    values = read_config_file(path) if path is not None else {}
    for key, value in flags.items():
        if value is None or (isinstance(value, (list, tuple)) and not value):
            continue
        values[key] = value
    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(map(str, err['loc'])) or 'config'}: {err['msg']}" for err in e.errors())
        raise UsageError(problems) from None


def describe_ids() -> Dict[str, List[str]]:
    """Valid scheme, problem and study ids for the ``list`` command."""
    return {
        "schemes": scheme_names(),
        "problems": list(PROBLEMS),
        "studies": list(STUDIES),
    }
