import math
from pathlib import Path
from typing import Dict, Any, List, Optional, Literal

import yaml
from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings


# 预设的测试函数: 搜索范围半宽 (None 表示使用 DEFAULT_BOUND) 与全局最优值
PRESET_PROBLEMS: Dict[str, Dict[str, Any]] = {
    "ackley": {"bound": 30.0, "optimum_value": 0.0},
    "bent_cigar": {"bound": None, "optimum_value": 0.0},
    "griewank": {"bound": None, "optimum_value": 0.0},
    "rastrigin": {"bound": None, "optimum_value": 0.0},
    "rosenbrock": {"bound": None, "optimum_value": 0.0},
    "sphere": {"bound": None, "optimum_value": 0.0},
}

# 按维度预设的 MaxFES
PRESET_BUDGETS: Dict[int, int] = {
    10: 200_000,
    20: 1_000_000,
}


class Settings(BaseSettings):
    # Experiment defaults
    DEFAULT_TRIALS: int = 30
    DEFAULT_SEED: int = 0
    OUTPUT_DIR: str = "results"
    MAX_WORKERS: int = 1
    ALGORITHM_NAME: str = "SNO"

    # Search range [-DEFAULT_BOUND, DEFAULT_BOUND]^d unless the preset overrides it
    DEFAULT_BOUND: float = 100.0
    ERROR_THRESHOLD: float = 1e-8

    # Convergence samples per run (cadence = fes_max // SAMPLES_PER_RUN)
    SAMPLES_PER_RUN: int = 200

    LOG_LEVEL: str = "INFO"

    def budget_for(self, dimension: int) -> int:
        """获取指定维度的默认 MaxFES"""
        return PRESET_BUDGETS.get(dimension, 10_000 * dimension)

    class Config:
        env_file = ".env"
        extra = "ignore"


settings = Settings()


class SnoConfig(BaseModel):
    """SNO 参数设置，派生的默认值在校验时补全"""

    model_config = {"extra": "forbid", "validate_assignment": False}

    n_s_init: int = Field(190, ge=3)
    n_s_end: Optional[int] = Field(None, ge=3)
    n_x_init: Optional[int] = Field(None, ge=3)
    n_x_end: Optional[int] = Field(None, ge=3)
    n_p: int = Field(81, ge=4)
    alpha_init: float = Field(0.5, ge=0.0, le=1.0)
    beta_init: float = Field(0.1, gt=0.0)
    c_s: float = Field(2.0, gt=0.0)
    c_x: float = Field(2.5, gt=0.0)
    rho_max: float = Field(0.7, gt=0.0, le=1.0)
    n_a_max: int = Field(5, ge=1)
    tournament_size: int = Field(2, ge=1, le=4)
    fes_max: int = Field(200_000, gt=0)
    error_threshold: float = Field(default_factory=lambda: settings.ERROR_THRESHOLD)
    seed: int = 0
    t_max: Optional[int] = Field(None, gt=0)

    # "shrink": 候选区域数从 h 递减到 0.1h; "grow": 按公式 λ(δ) 从 0.1 到 1.0
    region_schedule: Literal["shrink", "grow"] = "shrink"
    adapt_parameters: bool = False
    adapt_rate: float = Field(0.1, gt=0.0, le=1.0)

    sample_every: Optional[int] = Field(None, gt=0)
    snapshots: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _resolve_defaults(self) -> "SnoConfig":
        side = math.isqrt(self.n_p)
        if side * side != self.n_p:
            raise ValueError(f"n_p must be a perfect square >= 4, got {self.n_p}")
        if self.n_s_end is None:
            self.n_s_end = max(3, int(0.2 * self.n_s_init))
        if self.n_x_init is None:
            self.n_x_init = max(3, int(0.1 * self.n_s_init))
        if self.n_x_end is None:
            self.n_x_end = max(3, int(0.2 * self.n_s_init))
        if self.n_s_end > self.n_s_init:
            raise ValueError("explorers only shrink: n_s_end must not exceed n_s_init")
        if self.n_x_end < self.n_x_init:
            raise ValueError("miners only grow: n_x_end must not be below n_x_init")
        if self.sample_every is None:
            self.sample_every = max(1, self.fes_max // settings.SAMPLES_PER_RUN)
        if any(c <= 0 or c > self.fes_max for c in self.snapshots):
            raise ValueError(f"snapshot checkpoints must lie in [1, fes_max={self.fes_max}]")
        self.snapshots = sorted(set(self.snapshots))
        return self

    @property
    def initial_cost(self) -> int:
        """初始化阶段消耗的评估次数"""
        return self.n_s_init + self.n_x_init + self.n_p

    @classmethod
    def from_overrides(cls, overrides: Optional[Dict[str, Any]] = None, **kwargs: Any) -> "SnoConfig":
        """从覆盖项构建配置，kwargs 优先于 overrides"""
        values: Dict[str, Any] = dict(overrides or {})
        values.update({k: v for k, v in kwargs.items() if v is not None})
        return cls(**values)


class ConfigFileError(ValueError):
    """--config 文件无法解析"""
    pass


def load_config_file(path: str) -> Dict[str, Any]:
    """读取 SnoConfig 覆盖项

    .yaml / .yml 文件按 YAML 映射解析; 其它文件按 `key = value` 行解析,
    `#` 开头为注释, value 按 YAML 标量解析 (0.5 → float, true → bool, [1, 2] → list)。
    """
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigFileError(f"config file not found: {path}")

    text = config_path.read_text(encoding="utf-8")
    if config_path.suffix.lower() in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigFileError(f"{path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigFileError(f"{path}: expected a mapping of SnoConfig fields")
        return {str(k): v for k, v in data.items()}

    overrides: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigFileError(f"{path}:{lineno}: expected 'key = value', got '{raw.strip()}'")
        try:
            overrides[key] = yaml.safe_load(value.strip()) if value.strip() else None
        except yaml.YAMLError as e:
            raise ConfigFileError(f"{path}:{lineno}: {e}") from e
    return overrides
