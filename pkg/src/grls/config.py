"""Flat key = value run configuration.

One key per line, ``#`` starts a comment. Vectors are comma separated; an
n x k basis for ``y_hat`` is written as columns separated by ``;``.
``y_hat`` also accepts the presets ``e1`` (span of the first k standard
basis vectors) and ``random``; ``b`` accepts ``random``. Random presets
draw from ``instance_seed``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, RankDeficiencyError
from .geometry import GrassmannPoint, random_point
from .objective import PenaltyParams, ProblemInstance
from .solver import SolverConfig


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    k: int = 1
    b: str | tuple = (math.cos(math.pi / 16), math.sin(math.pi / 16))
    y_hat: str | tuple = "e1"
    rho: float = math.sin(math.pi / 8)
    instance_seed: int = 0
    lam: float = 70.0
    u: float = 0.01
    eta_x: float = 0.01
    eta_y: float = 0.1
    max_iters: int = 50_000
    grad_tol: float = 1e-6
    seed: int = 0
    record_every: int = 1
    output_dir: str = "out"
    plot_range: float = 1.5

    def instance(self) -> ProblemInstance:
        rng = np.random.default_rng(self.instance_seed)
        if self.y_hat == "e1":
            y_hat = GrassmannPoint.from_matrix(np.eye(self.n)[:, : self.k])
        elif self.y_hat == "random":
            y_hat = random_point(self.n, self.k, rng)
        else:
            y_hat = GrassmannPoint.span(np.array(self.y_hat, dtype=float).T)
        b = rng.standard_normal(self.n) if self.b == "random" else np.array(self.b, dtype=float)
        return ProblemInstance(b, y_hat, self.rho)

    def penalty(self) -> PenaltyParams:
        return PenaltyParams(self.lam, self.u)

    def solver(self) -> SolverConfig:
        return SolverConfig(self.eta_x, self.eta_y, self.max_iters, self.grad_tol, self.seed, self.record_every)


# config key -> dataclass field
KEYS = {f.name: f.name for f in dataclasses.fields(RunConfig)}
KEYS["lambda"] = "lam"
del KEYS["lam"]
FIELD_KEY = {v: k for k, v in KEYS.items()}

_INTS = {"n", "k", "instance_seed", "max_iters", "seed", "record_every"}
_FLOATS = {"rho", "lam", "u", "eta_x", "eta_y", "grad_tol", "plot_range"}


def _vector(text):
    return tuple(float(v) for v in text.split(","))


def _parse_value(field, text):
    if field in _INTS:
        return int(text)
    if field in _FLOATS:
        v = float(text)
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v
    if field == "b":
        return "random" if text == "random" else _vector(text)
    if field == "y_hat":
        if text in ("e1", "random"):
            return text
        return tuple(_vector(col) for col in text.split(";"))
    return text


def _format_value(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        if v and isinstance(v[0], tuple):
            return "; ".join(_format_value(c) for c in v)
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def validate(cfg: RunConfig) -> list[str]:
    """Every field-level problem with ``cfg``; empty when valid."""
    errs = []

    def bad(field, msg):
        errs.append(f"{FIELD_KEY[field]}: {msg}")

    if cfg.n < 1:
        bad("n", f"must be >= 1, got {cfg.n}")
    if not 1 <= cfg.k <= max(cfg.n, 1):
        bad("k", f"must satisfy 1 <= k <= n, got k={cfg.k}, n={cfg.n}")
    if cfg.k >= 1 and not 0 < cfg.rho < math.sqrt(cfg.k):
        bad("rho", f"must satisfy 0 < rho < sqrt(k) = {math.sqrt(cfg.k):.6g}, got {cfg.rho}")
    if cfg.b != "random" and len(cfg.b) != cfg.n:
        bad("b", f"has {len(cfg.b)} entries, expected n = {cfg.n}")
    if isinstance(cfg.y_hat, tuple):
        if len(cfg.y_hat) != cfg.k or any(len(c) != cfg.n for c in cfg.y_hat):
            bad("y_hat", f"expected k = {cfg.k} columns of length n = {cfg.n}")
        else:
            try:
                GrassmannPoint.span(np.array(cfg.y_hat).T)
            except RankDeficiencyError:
                bad("y_hat", "columns are linearly dependent")
    if cfg.lam < 0:
        bad("lam", f"must be >= 0, got {cfg.lam}")
    for name in ("u", "eta_x", "eta_y", "grad_tol", "plot_range"):
        if not getattr(cfg, name) > 0:
            bad(name, f"must be > 0, got {getattr(cfg, name)}")
    if cfg.max_iters < 1:
        bad("max_iters", f"must be >= 1, got {cfg.max_iters}")
    if cfg.record_every < 1:
        bad("record_every", f"must be >= 1, got {cfg.record_every}")
    return errs


def parse_config(text: str, base: RunConfig = RunConfig()) -> RunConfig:
    """Parse config text on top of ``base``; raises ConfigError listing all problems."""
    errs = []
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errs.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            errs.append(f"line {lineno}: unknown key {key!r}")
            continue
        if KEYS[key] in values:
            errs.append(f"line {lineno}: duplicate key {key!r}")
            continue
        try:
            values[KEYS[key]] = _parse_value(KEYS[key], val)
        except ValueError as exc:
            errs.append(f"line {lineno}: key {key!r}: cannot parse {val!r} ({exc})")
    if errs:
        raise ConfigError(errs)
    cfg = dataclasses.replace(base, **values)
    errs = validate(cfg)
    if errs:
        raise ConfigError(errs)
    return cfg


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def dump_config(cfg: RunConfig) -> str:
    return "".join(f"{FIELD_KEY[f.name]} = {_format_value(getattr(cfg, f.name))}\n"
                   for f in dataclasses.fields(cfg))
