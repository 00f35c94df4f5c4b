"""Experiment configuration and the desk / paper presets."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

from ..errors import ConfigError
from ..neural import TrainConfig
from ..stringology import SCHEMAS

TASKS = ("distinguish", "rounds", "variants", "null")
RNG_MODES = ("seeded", "os")

PRESETS = {
    "desk": {"sequences_per_class": 1000, "n_bits": 1 << 13},
    "paper": {"sequences_per_class": 50_000, "n_bits": 1 << 16},
}

DEFAULT_ROUNDS = {"distinguish": (20,), "rounds": (2, 4, 8, 12, 20), "variants": (20,), "null": ()}


@dataclass(frozen=True)
class ExperimentConfig:
    task: str = "distinguish"
    sequences_per_class: int = 1000
    n_bits: int = 1 << 13
    rounds_list: tuple[int, ...] = (20,)
    schema_version: str = "v1"
    train: TrainConfig = field(default_factory=TrainConfig)
    global_seed: int = 42
    key_seed: int | None = None
    uniform_seed: int | None = None
    split_seed: int | None = None
    rng_mode: str = "seeded"

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; choose from {TASKS}")
        if self.sequences_per_class < 20:
            raise ConfigError("sequences_per_class must be at least 20")
        if self.n_bits < 1 << 12 or self.n_bits % 8:
            raise ConfigError("n_bits must be a multiple of 8 and at least 4096")
        for r in self.rounds_list:
            if r < 2 or r % 2:
                raise ConfigError(f"rounds must be even and >= 2, got {r}")
        if self.task != "null" and not self.rounds_list:
            raise ConfigError(f"task {self.task!r} needs at least one round count")
        if self.schema_version not in SCHEMAS:
            raise ConfigError(f"unknown schema {self.schema_version!r}")
        if self.rng_mode not in RNG_MODES:
            raise ConfigError(f"rng mode must be one of {RNG_MODES}")

    @classmethod
    def preset(cls, name: str = "desk", task: str = "distinguish", **overrides) -> "ExperimentConfig":
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        values = {"task": task, "rounds_list": DEFAULT_ROUNDS.get(task, (20,)), **PRESETS[name]}
        values.update({k: v for k, v in overrides.items() if v is not None})
        if "rounds_list" in values:
            values["rounds_list"] = tuple(int(r) for r in values["rounds_list"])
        return cls(**values)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    @property
    def seeds(self) -> dict[str, int]:
        """Effective seeds; unset ones are derived from ``global_seed``."""
        g = self.global_seed
        return {
            "global": g,
            "keys": g if self.key_seed is None else self.key_seed,
            "uniform": g + 1 if self.uniform_seed is None else self.uniform_seed,
            "split": g + 2 if self.split_seed is None else self.split_seed,
            "init": self.train.seed,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rounds_list"] = list(self.rounds_list)
        d["effective_seeds"] = self.seeds
        return d
