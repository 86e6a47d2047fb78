"""Run configuration: YAML loading with line-aware validation, and emission.

A config file is a mapping with optional top-level keys ``experiment``,
``seed``, ``threads``, ``out`` and ``settings``; ``settings`` holds the
experiment's own fields (nested mappings for ``graph`` and ``optimizer``).
Precedence, highest first: command-line flags, file values, defaults.
"""
from __future__ import annotations

import dataclasses
import types
import typing
from dataclasses import dataclass, field

import yaml

from .experiments import ClusterConfig, DynamicsConfig, GhzConfig, IsoConfig

EXPERIMENTS: dict[str, type] = {
    "dynamics": DynamicsConfig,
    "ghz": GhzConfig,
    "cluster": ClusterConfig,
    "isomorphism": IsoConfig,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    experiment: str = field(metadata={"choices": tuple(EXPERIMENTS)})
    seed: int = field(default=0, metadata={"min": 0})
    threads: int = field(default=1, metadata={"min": 0})
    out: str = "runs"
    settings: typing.Any = None

    def __post_init__(self):
        if self.settings is None and self.experiment in EXPERIMENTS:
            self.settings = EXPERIMENTS[self.experiment]()


_META = {f.name: f.metadata for f in dataclasses.fields(RunConfig)}


def _where(node: yaml.Node | None) -> str:
    return f"line {node.start_mark.line + 1}" if node is not None else "defaults"


def _scalar(node: yaml.Node, name: str):
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError(f"{_where(node)}: field '{name}' must be a scalar")
    return yaml.SafeLoader("").construct_object(node)


def _plain(node: yaml.Node):
    loader = yaml.SafeLoader("")
    return loader.construct_object(node, deep=True)


def _check_type(value, tp, name: str, node) -> object:
    if tp is bool:
        ok = isinstance(value, bool)
    elif tp is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif tp is float:
        if isinstance(value, str):
            # YAML 1.1 reads "1e-8" (no dot) as a string
            try:
                value = float(value)
            except ValueError:
                pass
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif tp is str:
        ok = isinstance(value, str)
    elif tp is list:
        ok = isinstance(value, list)
    else:
        ok = True
    if not ok:
        raise ConfigError(f"{_where(node)}: field '{name}' expects {tp.__name__}, "
                          f"got {value!r}")
    return value


def check_range(value, meta, name: str, node=None) -> None:
    where = _where(node)
    if "choices" in meta and value not in meta["choices"]:
        raise ConfigError(f"{where}: field '{name}' must be one of {list(meta['choices'])}, "
                          f"got {value!r}")
    if "min" in meta and value < meta["min"]:
        raise ConfigError(f"{where}: field '{name}' must be >= {meta['min']}, got {value!r}")
    if "max" in meta and value > meta["max"]:
        raise ConfigError(f"{where}: field '{name}' must be <= {meta['max']}, got {value!r}")
    if "gt" in meta and not value > meta["gt"]:
        raise ConfigError(f"{where}: field '{name}' must be > {meta['gt']}, got {value!r}")
    if "lt" in meta and not value < meta["lt"]:
        raise ConfigError(f"{where}: field '{name}' must be < {meta['lt']}, got {value!r}")


def _resolve(tp):
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        return _resolve(args[0]) if len(args) == 1 else tp
    return origin or tp


def _build(cls, node: yaml.Node | None, prefix: str, base=None):
    """Instantiate dataclass ``cls`` from a mapping node, starting from ``base``."""
    obj = base if base is not None else cls()
    if node is None:
        return obj
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{_where(node)}: section '{prefix or 'root'}' must be a mapping")
    hints = typing.get_type_hints(cls)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    seen = set()
    for key_node, value_node in node.value:
        key = _scalar(key_node, prefix or "root")
        name = f"{prefix}.{key}" if prefix else str(key)
        if key not in fields:
            raise ConfigError(f"{_where(key_node)}: unknown key '{name}'")
        if key in seen:
            raise ConfigError(f"{_where(key_node)}: duplicate key '{name}'")
        seen.add(key)
        tp = _resolve(hints[key])
        if dataclasses.is_dataclass(tp):
            setattr(obj, key, _build(tp, value_node, name, getattr(obj, key)))
            continue
        value = _plain(value_node) if tp is list else _scalar(value_node, name)
        value = _check_type(value, tp, name, value_node)
        check_range(value, fields[key].metadata, name, value_node)
        setattr(obj, key, value)
    return obj


def parse_config(text: str = "", experiment: str | None = None, seed: int | None = None,
                 out: str | None = None, threads: int | None = None) -> RunConfig:
    """Validate a YAML document and apply flag overrides."""
    try:
        root = yaml.compose(text) if text.strip() else None
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if root is not None and not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"{_where(root)}: config must be a mapping")
    top = {}
    for key_node, value_node in (root.value if root is not None else []):
        key = _scalar(key_node, "root")
        if key not in _META:
            raise ConfigError(f"{_where(key_node)}: unknown key '{key}'")
        if key in top:
            raise ConfigError(f"{_where(key_node)}: duplicate key '{key}'")
        top[key] = (key_node, value_node)

    file_exp = _scalar(top["experiment"][1], "experiment") if "experiment" in top else None
    if experiment is not None and file_exp is not None and experiment != file_exp:
        raise ConfigError(f"{_where(top['experiment'][1])}: field 'experiment' is "
                          f"{file_exp!r} in the file but {experiment!r} on the command line")
    name = experiment if experiment is not None else file_exp
    if name is None:
        raise ConfigError("missing required field 'experiment'")
    check_range(name, {"choices": tuple(EXPERIMENTS)}, "experiment",
                top.get("experiment", (None, None))[1])

    rc = RunConfig(name)
    for key in ("seed", "threads", "out"):
        if key in top:
            node = top[key][1]
            tp = typing.get_type_hints(RunConfig)[key]
            value = _check_type(_scalar(node, key), tp, key, node)
            check_range(value, _META[key], key, node)
            setattr(rc, key, value)
    if "settings" in top:
        rc.settings = _build(EXPERIMENTS[name], top["settings"][1], "settings")
    for key, value in (("seed", seed), ("threads", threads), ("out", out)):
        if value is not None:
            setattr(rc, key, value)
    validate(rc)
    return rc


def validate(rc: RunConfig) -> None:
    """Range-check every field (including flag overrides) of a RunConfig."""
    _validate_obj(rc, "")


def _validate_obj(obj, prefix: str) -> None:
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        name = f"{prefix}.{f.name}" if prefix else f.name
        if dataclasses.is_dataclass(value):
            _validate_obj(value, name)
        elif value is not None:
            check_range(value, f.metadata, name)


def load_config(path, **overrides) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read(), **overrides)


def config_dict(rc: RunConfig) -> dict:
    return dataclasses.asdict(rc)


def emit_config(rc: RunConfig) -> str:
    """YAML text of the full effective configuration; ``parse_config`` reads it back."""
    return yaml.safe_dump(config_dict(rc), sort_keys=False, default_flow_style=False)
