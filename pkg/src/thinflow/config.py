"""Run configuration: one nested key/value file, strict validation.

The on-disk format is YAML restricted to plain scalars and lists, grouped
into three sections (geometry / tolerances / run).  Round-trips are
lossless: floats are written with full precision and parsed back to the
identical double.
"""

from __future__ import annotations

from dataclasses import dataclass

import yaml

from .errors import ConfigError
from .kernel import Grid, QuadConfig


@dataclass
class RunConfig:
    dimension: int = 1
    h: float = 0.05
    R: float = 22.0
    quad_tol: float = 1e-6
    tail_tol: float = 1e-4
    resid_tol: float = 1e-4
    kmax: int = 5
    n_list: tuple[float, ...] = (0.2, 0.1, 0.05)
    out_dir: str = "out"
    deterministic: bool = True

    # -- validation ---------------------------------------------------------

    def validate(self) -> "RunConfig":
        """Raise ConfigError naming the offending field on any violation."""
        if self.dimension not in (1, 2):
            raise ConfigError(f"dimension: must be 1 or 2, got {self.dimension!r}")
        if not (isinstance(self.h, (int, float)) and self.h > 0):
            raise ConfigError(f"h: must be a positive number, got {self.h!r}")
        if not (isinstance(self.R, (int, float)) and self.R > 0):
            raise ConfigError(f"R: must be a positive number, got {self.R!r}")
        if self.R / self.h < 32:
            raise ConfigError(
                f"R/h: grid too coarse ({self.R / self.h:.0f} nodes per side, "
                "need >= 32)")
        for name in ("quad_tol", "tail_tol", "resid_tol"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and 0 < val < 1):
                raise ConfigError(f"{name}: must be in (0, 1), got {val!r}")
        if not (isinstance(self.kmax, int) and 0 <= self.kmax <= 8):
            raise ConfigError(f"kmax: must be an integer in [0, 8], got {self.kmax!r}")
        if not self.n_list:
            raise ConfigError("n_list: must not be empty")
        for i, n in enumerate(self.n_list):
            if not (isinstance(n, (int, float)) and 0 < n < 3):
                raise ConfigError(f"n_list[{i}]: must be in (0, 3), got {n!r}")
        if not isinstance(self.out_dir, str) or not self.out_dir:
            raise ConfigError(f"out_dir: must be a non-empty string, got {self.out_dir!r}")
        if not isinstance(self.deterministic, bool):
            raise ConfigError(
                f"deterministic: must be true or false, got {self.deterministic!r}")
        return self

    # -- derived objects ----------------------------------------------------

    def grid(self, radial: bool = False) -> Grid:
        return Grid(self.dimension, self.h, self.R, radial=radial)

    def quad(self) -> QuadConfig:
        return QuadConfig(tail_tol=self.tail_tol, quad_tol=self.quad_tol)

    # -- (de)serialization ---------------------------------------------------

    def to_mapping(self) -> dict:
        return {
            "geometry": {"dimension": self.dimension, "h": self.h, "R": self.R},
            "tolerances": {"quad_tol": self.quad_tol, "tail_tol": self.tail_tol,
                           "resid_tol": self.resid_tol},
            "run": {"kmax": self.kmax, "n_list": list(self.n_list),
                    "out_dir": self.out_dir,
                    "deterministic": self.deterministic},
        }

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root: expected a mapping of sections")
        known = {"geometry", "tolerances", "run"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"config: unknown section(s) {sorted(extra)}")
        fields: dict = {}
        sections = {
            "geometry": ("dimension", "h", "R"),
            "tolerances": ("quad_tol", "tail_tol", "resid_tol"),
            "run": ("kmax", "n_list", "out_dir", "deterministic"),
        }
        for sec, keys in sections.items():
            block = data.get(sec, {})
            if not isinstance(block, dict):
                raise ConfigError(f"{sec}: expected a mapping")
            unknown = set(block) - set(keys)
            if unknown:
                raise ConfigError(f"{sec}: unknown key(s) {sorted(unknown)}")
            fields.update(block)
        if "n_list" in fields:
            if not isinstance(fields["n_list"], (list, tuple)):
                raise ConfigError("n_list: expected a list of numbers")
            fields["n_list"] = tuple(float(n) for n in fields["n_list"])
        cfg = cls(**fields)
        return cfg.validate()

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_mapping(), sort_keys=False,
                              default_flow_style=False)

    @classmethod
    def from_yaml(cls, text: str) -> "RunConfig":
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config: malformed file ({exc})") from exc
        return cls.from_mapping(data or {})

    def to_file(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_yaml())

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_yaml(fh.read())
        except FileNotFoundError as exc:
            raise ConfigError(f"config: file not found: {path}") from exc
