"""Pipeline configuration: defaults, ``key = value`` files, flags, environment.

Precedence, lowest first: built-in defaults, config file, command-line
flags. Variables named ``FRACMOLLIFY_<KEY>`` (e.g. ``FRACMOLLIFY_GAMMA``) are
ignored unless ``env_override`` is set, in which case they win over both the
file and the flags.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError, DomainError
from .grid import make_grid
from .mittag_leffler import build_psi_approx
from .operators import DiffusionModel, MollifierParams
from .parameter_choice import MorozovConfig

__all__ = ["PipelineConfig", "parse_config", "ENV_PREFIX", "RNG_NAME"]

ENV_PREFIX = "FRACMOLLIFY_"
RNG_NAME = "numpy.random.Philox"


@dataclass(frozen=True)
class PipelineConfig:
    gamma: float = 0.8
    T: float = 1.0
    L: float = 10.0
    N: int = 256
    tau: float = 0.5
    s: float = 4.0
    theta: float = 1.01
    q: float = 0.99
    alpha0: float = 10.0
    max_iters: int = 5000
    seed: int = 0
    output_dir: str = "output"
    # relative perturbation of the Mittag-Leffler evaluator; 0 is exact
    h: float = 0.0

    def __post_init__(self):
        checks = [
            # each key checked with the others at known-good values
            ("gamma", lambda: DiffusionModel(self.gamma, 1.0)),
            ("T", lambda: DiffusionModel(0.5, self.T)),
            ("L", lambda: make_grid(2, self.L, 8)),
            ("N", lambda: make_grid(2, 1.0, self.N)),
            ("tau", lambda: MollifierParams(self.tau, 1.0)),
            ("s", lambda: MollifierParams(1.0, self.s)),
            ("theta", lambda: MorozovConfig(theta=self.theta)),
            ("q", lambda: MorozovConfig(q=self.q)),
            ("alpha0", lambda: MorozovConfig(alpha0=self.alpha0)),
            ("max_iters", lambda: MorozovConfig(max_iters=self.max_iters)),
            ("h", lambda: build_psi_approx(0.5, self.h)),
        ]
        for key, check in checks:
            try:
                check()
            except DomainError as exc:
                raise ConfigError(f"invalid value for {key!r}: {exc}", key=key) from exc
        if self.seed < 0:
            raise ConfigError(f"invalid value for 'seed': must be >= 0, got {self.seed}", key="seed")
        if not self.output_dir:
            raise ConfigError("invalid value for 'output_dir': empty", key="output_dir")

    @property
    def grid(self):
        return make_grid(2, self.L, self.N)

    @property
    def model(self):
        psi = build_psi_approx(self.gamma, self.h) if self.h > 0 else None
        return DiffusionModel(self.gamma, self.T, psi)

    @property
    def exact_model(self):
        return DiffusionModel(self.gamma, self.T)

    @property
    def mollifier(self):
        return MollifierParams(self.tau, self.s)

    @property
    def morozov(self):
        return MorozovConfig(self.theta, self.q, self.alpha0, self.max_iters)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_text(self):
        """Config echo; parses back to an equal config."""
        lines = [
            "# schema=1",
            f"# rng = {RNG_NAME} (numpy {np.__version__})",
        ]
        for f in fields(self):
            lines.append(f"{f.name} = {_format(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _convert(key, raw, line=None):
    kind = _TYPES.get(key)
    if kind is None:
        raise ConfigError(f"unknown config key {key!r}", key=key, line=line)
    raw = str(raw).strip()
    try:
        if kind == "int":
            value = int(raw)
        elif kind == "float":
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError(raw)
        else:
            value = raw
    except ValueError:
        where = f" (line {line})" if line is not None else ""
        raise ConfigError(f"cannot parse {key!r}={raw!r} as {kind}{where}", key=key, line=line)
    return value


def read_config_file(path):
    """Parse a ``key = value`` file with ``#`` comments into a dict."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'", line=lineno)
            key, raw = (part.strip() for part in text.split("=", 1))
            if not key:
                raise ConfigError(f"{path}:{lineno}: missing key", line=lineno)
            values[key] = _convert(key, raw, lineno)
    return values


def parse_config(path=None, flags=None, env=None, env_override=False):
    """Build a validated :class:`PipelineConfig`.

    Parameters
    ----------
    path : str or None
        Optional ``key = value`` file.
    flags : dict or None
        Command-line values; ``None`` entries are treated as unset.
    env : mapping or None
        Environment to read ``FRACMOLLIFY_*`` from (defaults to ``os.environ``).
    env_override : bool
        Let environment variables override file and flags.
    """
    values = {}
    if path is not None:
        values.update(read_config_file(path))
    for key, raw in (flags or {}).items():
        if raw is not None:
            values[key] = _convert(key, raw)
    if env_override:
        env = os.environ if env is None else env
        for name, raw in env.items():
            if name.startswith(ENV_PREFIX):
                key = name[len(ENV_PREFIX):].lower()
                if key == "t":
                    key = "T"
                elif key == "l":
                    key = "L"
                elif key == "n":
                    key = "N"
                values[key] = _convert(key, raw)
    return PipelineConfig(**values)
