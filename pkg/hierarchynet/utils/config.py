"""
Run configuration: optimizer, training loop and the fully resolved RunConfig.

Resolution order, highest first: command-line flags, JSON config file (only the
keys it names), preset, environment (HIERARCHYNET_SEED, HIERARCHYNET_DTYPE),
dataclass defaults.
"""
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from hierarchynet.modules.model.modelConfig import ModelConfig, full_size_config
from hierarchynet.utils.env import env_int, env_str
from hierarchynet.utils.errors import ConfigError

LR_DECAYS = ("none", "inverse_sqrt")
DTYPES = ("float64", "float32")


def _from_dict(cls, data: Dict[str, Any], what: str):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown {what} keys: {sorted(unknown)}")
    return cls(**data)


@dataclass
class OptimConfig:
    lr: float = 3e-3                   # peak learning rate after warm-up
    warmup_steps: int = 50
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    weight_decay: float = 0.01
    lr_decay: str = "none"

    def validate(self) -> None:
        if self.lr <= 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
        if self.warmup_steps < 0:
            raise ConfigError(f"warmup_steps must be >= 0, got {self.warmup_steps}")
        if not all(0.0 <= b < 1.0 for b in self.betas):
            raise ConfigError(f"betas must lie in [0, 1), got {self.betas}")
        if self.lr_decay not in LR_DECAYS:
            raise ConfigError(f"lr_decay must be one of {LR_DECAYS}, got '{self.lr_decay}'")

    @classmethod
    def from_dict(cls, data: dict) -> "OptimConfig":
        data = dict(data)
        if "betas" in data:
            data["betas"] = tuple(data["betas"])
        return _from_dict(cls, data, "optim")


@dataclass
class TrainConfig:
    batch_size: int = 8
    epochs: int = 300
    patience: int = 20
    seed: int = 0
    deterministic: bool = False
    src_vocab_size: int = 400
    tgt_vocab_size: int = 300
    max_summary_len: Optional[int] = None
    valid_split: str = "valid"
    eval_split: str = "test"
    eval_every: int = 1
    dtype: str = "float64"

    def validate(self) -> None:
        if self.batch_size < 1 or self.epochs < 1 or self.eval_every < 1:
            raise ConfigError("batch_size, epochs and eval_every must be >= 1")
        if self.patience < 0:
            raise ConfigError(f"patience must be >= 0, got {self.patience}")
        if self.dtype not in DTYPES:
            raise ConfigError(f"dtype must be one of {DTYPES}, got '{self.dtype}'")

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        return _from_dict(cls, data, "train")


@dataclass
class RunConfig:
    corpus: Optional[str] = None
    run_dir: Optional[str] = None
    preset: Optional[str] = None
    model: ModelConfig = field(default_factory=ModelConfig)
    optim: OptimConfig = field(default_factory=OptimConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def validate(self) -> "RunConfig":
        self.model.validate()
        self.optim.validate()
        self.train.validate()
        return self

    def to_dict(self) -> dict:
        return {
            "corpus": self.corpus,
            "run_dir": self.run_dir,
            "preset": self.preset,
            "model": self.model.to_dict(),
            "optim": asdict(self.optim),
            "train": asdict(self.train),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - {"corpus", "run_dir", "preset", "model", "optim", "train"}
        if unknown:
            raise ConfigError(f"unknown run config keys: {sorted(unknown)}")
        return cls(
            corpus=data.get("corpus"),
            run_dir=data.get("run_dir"),
            preset=data.get("preset"),
            model=ModelConfig.from_dict(data.get("model", {})),
            optim=OptimConfig.from_dict(data.get("optim", {})),
            train=TrainConfig.from_dict(data.get("train", {})),
        )

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunConfig":
        return cls.from_dict(read_config_file(path))


def read_config_file(path: Union[str, Path]) -> dict:
    """The JSON object of a config file, checked for unknown keys but not filled with defaults."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    RunConfig.from_dict(data)
    return data


# ---------------------------------------------------------------------------------------
# presets

def _dataset_preset(batch, warmup, lr, epochs, src_vocab, tgt_vocab, summary_len) -> dict:
    return {
        "model": full_size_config(max_tgt_len=summary_len + 1).to_dict(),
        "optim": {"lr": lr, "warmup_steps": warmup},
        "train": {"batch_size": batch, "epochs": epochs, "src_vocab_size": src_vocab,
                  "tgt_vocab_size": tgt_vocab, "max_summary_len": summary_len},
    }


PRESETS: Dict[str, dict] = {
    "tl-codesum": _dataset_preset(16, 30000, 1e-4, 70, 30000, 18535, 50),
    "deepcom": _dataset_preset(384, 6400, 1.2e-4, 50, 30000, 30000, 30),
    "funcom-50": _dataset_preset(256, 28000, 1.5e-4, 60, 32000, 30000, 40),
    "funcom": _dataset_preset(352, 32400, 1.2e-4, 60, 30000, 30000, 20),
    "toy": {
        "model": {"d": 64, "enc_layers": 2, "dec_layers": 2, "tbcnn_layers": 1, "hgt_layers": 2,
                  "heads": 4, "max_src_len": 512, "max_tgt_len": 24},
        "optim": {"lr": 3e-3, "warmup_steps": 50},
        "train": {"batch_size": 8, "epochs": 300, "src_vocab_size": 400, "tgt_vocab_size": 300},
    },
    "full-size": {"model": full_size_config().to_dict()},
}


def _merge(base: dict, update: dict) -> dict:
    out = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def resolve_run_config(preset: Optional[str] = None, config_path: Optional[Union[str, Path]] = None,
                       overrides: Optional[dict] = None) -> RunConfig:
    """
    defaults < environment < preset < JSON file < `overrides` (nested dict built
    from command-line flags; None values are ignored).
    """
    data: dict = {"model": {}, "optim": {}, "train": {}}
    seed = env_int("HIERARCHYNET_SEED")
    if seed is not None:
        data["train"]["seed"] = seed
        data["model"]["seed"] = seed
    dtype = env_str("HIERARCHYNET_DTYPE")
    if dtype:
        data["train"]["dtype"] = dtype
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}'; choose from {sorted(PRESETS)}")
        data = _merge(data, PRESETS[preset])
        data["preset"] = preset
    if config_path is not None:
        data = _merge(data, read_config_file(config_path))
    if overrides:
        data = _merge(data, _drop_none(overrides))
    if "edges" in data.get("model", {}) and not isinstance(data["model"]["edges"], dict):
        data["model"]["edges"] = data["model"]["edges"].to_dict()
    return RunConfig.from_dict(data).validate()


def _drop_none(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            inner = _drop_none(v)
            if inner:
                out[k] = inner
        elif v is not None:
            out[k] = v
    return out
