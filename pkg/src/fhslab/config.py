"""Run configuration: TOML files with sections, validated with line-precise messages."""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

import tomli

from .params import ParameterError, ProblemParams, make_params
from .profiles import Grid, ProfileError

OUTPUT_ENV = "FHSLAB_OUTPUT_DIR"
CONFIG_SCHEMA = "fhs-config/1"

KNOWN = {
    "params": {"N", "p", "s", "alpha"},
    "grid": {"r_min", "r_max", "M"},
    "optimizer": {"max_iter", "tol", "init", "window", "pin_every", "level"},
    "checks": {"names"},
    "run": {"seed", "threads", "output_dir"},
}
INITS = ("extremal-guess", "gaussian-like", "random")


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        loc = f"{source}:{line}: " if line else f"{source}: "
        super().__init__(loc + message)


@dataclass
class OptimizerBlock:
    max_iter: int = 3000
    tol: float = 1e-8
    init: str = "extremal-guess"
    window: int = 50
    pin_every: int = 25
    level: float = 1.0


@dataclass
class RunConfig:
    params: dict
    grid: dict = field(default_factory=lambda: {"r_min": 1e-3, "r_max": 1e4, "M": 512})
    optimizer: OptimizerBlock = field(default_factory=OptimizerBlock)
    checks: list | None = None  # None: the default list
    check_overrides: dict = field(default_factory=dict)
    output_dir: str = ""
    seed: int = 0
    threads: int = 1

    def problem(self) -> ProblemParams:
        return make_params(int(self.params["N"]), float(self.params["p"]), float(self.params["s"]),
                             float(self.params.get("alpha", 0.0)))

    def make_grid(self) -> Grid:
        return Grid(float(self.grid["r_min"]), float(self.grid["r_max"]), int(self.grid["M"]))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = CONFIG_SCHEMA
        return d

    def digest(self) -> str:
        """Digest of everything that influences results (the output directory does not)."""
        d = self.to_dict()
        d.pop("output_dir")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def _key_lines(text: str) -> dict:
    """Map 'section.key' (and 'section') to the source line where it is defined."""
    lines = {}
    section = ""
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        m = re.match(r"^\[\s*([A-Za-z0-9_.\-]+)\s*\]$", line)
        if m:
            section = m.group(1)
            lines.setdefault(section, n)
            continue
        m = re.match(r"^([A-Za-z0-9_\-]+)\s*=", line)
        if m:
            lines.setdefault(f"{section}.{m.group(1)}" if section else m.group(1), n)
    return lines


def parse_override(item: str):
    """'section.key=value' with a TOML value (bare words are taken as strings)."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form section.key=value", source="<command line>")
    key, val = item.split("=", 1)
    key = key.strip()
    try:
        value = tomli.loads(f"v = {val}")["v"]
    except tomli.TOMLDecodeError:
        value = val.strip()
    parts = key.split(".")
    if len(parts) < 2:
        raise ConfigError(f"override key {key!r} needs a section", source="<command line>")
    return parts, value


def load_config(path=None, text: str | None = None, overrides=()) -> RunConfig:
    source = str(path) if path is not None else "<config>"
    if text is None:
        if path is None:
            text = ""
        else:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc.strerror}", source=source) from exc
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(str(exc), int(m.group(1)) if m else None, source) from exc
    lines = _key_lines(text)
    for item in overrides:
        parts, value = parse_override(item)
        node = data
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r} targets a non-table", source="<command line>")
        node[parts[-1]] = value
        lines[".".join(parts)] = "cli"
    return build_config(data, lines, source)


def build_config(data: dict, lines: dict | None = None, source: str = "<config>") -> RunConfig:
    lines = lines or {}

    def fail(msg, key):
        where = lines.get(key)
        if where == "cli":
            raise ConfigError(f"{msg} (from --set {key})", None, "<command line>")
        raise ConfigError(msg, where, source)

    for sec, body in data.items():
        if sec not in KNOWN:
            fail(f"unknown section [{sec}]", sec)
        if not isinstance(body, dict):
            fail(f"[{sec}] must be a table", sec)
        for k, v in body.items():
            if sec == "checks" and isinstance(v, dict):
                continue  # per-check overrides
            if k not in KNOWN[sec]:
                fail(f"unknown key '{k}' in [{sec}]", f"{sec}.{k}")

    def get(sec, key, kind, default):
        v = data.get(sec, {}).get(key, default)
        if v is None:
            fail(f"missing required key '{key}' in [{sec}]", sec)
        ok = isinstance(v, (int, float)) and not isinstance(v, bool) if kind is float else isinstance(v, kind) and not isinstance(v, bool)
        if not ok:
            fail(f"'{sec}.{key}' must be {kind.__name__}, got {v!r}", f"{sec}.{key}")
        return kind(v)

    if "params" not in data:
        raise ConfigError("missing [params] section", None, source)
    params = {"N": get("params", "N", int, None), "p": get("params", "p", float, None),
              "s": get("params", "s", float, None), "alpha": get("params", "alpha", float, 0.0)}
    try:
        make_params(params["N"], params["p"], params["s"], params["alpha"])
    except ParameterError as exc:
        # point at the key named first in the message ("need N > p*s" blames s)
        msg = str(exc)
        named = [k for k in ("alpha", "N", "p", "s") if msg.startswith((k + " ", f"only {k} "))]
        key = "params.s" if msg.startswith("need N > p*s") else f"params.{named[0]}" if named else "params"
        fail(str(exc), key)
    grid = {"r_min": get("grid", "r_min", float, 1e-3), "r_max": get("grid", "r_max", float, 1e4),
            "M": get("grid", "M", int, 512)}
    for k in ("r_min", "r_max", "M"):
        if grid[k] <= 0:
            fail(f"grid.{k} must be positive", f"grid.{k}")
    if grid["M"] < 64:
        fail("grid.M must be at least 64", "grid.M")
    try:
        Grid(grid["r_min"], grid["r_max"], grid["M"])
    except ProfileError as exc:
        fail(str(exc), "grid")
    opt = OptimizerBlock(
        max_iter=get("optimizer", "max_iter", int, 3000), tol=get("optimizer", "tol", float, 1e-8),
        init=get("optimizer", "init", str, "extremal-guess"), window=get("optimizer", "window", int, 50),
        pin_every=get("optimizer", "pin_every", int, 25), level=get("optimizer", "level", float, 1.0))
    if opt.init not in INITS:
        fail(f"optimizer.init must be one of {', '.join(INITS)}", "optimizer.init")
    if opt.max_iter < 1 or opt.tol <= 0 or opt.window < 1 or opt.level <= 0:
        fail("optimizer settings must be positive", "optimizer")
    from .verification import CHECKS

    checks = None
    chk = data.get("checks", {})
    if "names" in chk:
        checks = chk["names"]
        if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
            fail("checks.names must be a list of strings", "checks.names")
    overrides = {k: v for k, v in chk.items() if isinstance(v, dict)}
    for name in list(checks or []) + list(overrides):
        if name not in CHECKS:
            fail(f"unknown check '{name}' (known: {', '.join(sorted(CHECKS))})",
                 f"checks.{name}" if name in overrides else "checks.names")
    seed = get("run", "seed", int, 0)
    threads = get("run", "threads", int, 1)
    if threads < 1:
        fail("run.threads must be >= 1", "run.threads")
    out = data.get("run", {}).get("output_dir") or os.environ.get(OUTPUT_ENV) or "fhslab-out"
    cfg = RunConfig(params, grid, opt, checks, overrides, str(out), seed, threads)
    cfg.source, cfg.key_lines = source, dict(lines)
    return cfg


def config_error(cfg: RunConfig, message: str, key: str) -> ConfigError:
    """A ConfigError pointing at the line where ``key`` was set."""
    where = getattr(cfg, "key_lines", {}).get(key)
    if where == "cli":
        return ConfigError(f"{message} (from --set {key})", None, "<command line>")
    return ConfigError(message, where, getattr(cfg, "source", "<config>"))
