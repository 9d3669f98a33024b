"""
Experiment configuration: JSON schema, exhaustive validation, and
construction of a :class:`~jscc.scheme.SchemeInstance`.

Configuration files are JSON objects.  Unknown keys anywhere are
rejected, and validation collects every problem before raising
:class:`~jscc.errors.ConfigError`.
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import jsonschema

from ..algebra import is_prime
from ..codes import CodeEnsemble, LinearCode, read_matrix
from ..errors import DEFAULT_BUDGET, ConfigError, UsageError, check_budget
from ..scheme import (
    PRESETS as QUANT_PRESETS,
    ChannelModel,
    SchemeInstance,
    SourceModel,
    preset_quantization,
    read_quantization,
)

CHANNEL_KINDS = ("bsc", "bec", "qsc", "noiseless", "pure-noise", "dmc")
SWEEP_KEYS = ("n", "l", "m", "rate", "gamma", "param")
GOODNESS_READINGS = ("ensemble", "sampled", "none")

_num_list = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_int_list = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["q", "n", "l", "m", "source", "channel", "code", "quant", "gamma"],
    "properties": {
        "q": {"type": "integer", "minimum": 2},
        "n": {"type": "integer", "minimum": 1},
        "l": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "source": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["iid", "uniform", "explicit"]},
                "p": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "pmf": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
            },
        },
        "channel": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": list(CHANNEL_KINDS)},
                "param": {"type": "number", "minimum": 0, "maximum": 1},
                "matrix": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
                },
            },
        },
        "code": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["uniform", "matrix", "file", "identity"]},
                "rows": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                "path": {"type": "string"},
            },
        },
        "quant": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "preset": {"enum": list(QUANT_PRESETS)},
                "mix": {"type": "number", "minimum": 0, "maximum": 1},
                "file": {"type": "string"},
                "x_size": {"type": "integer", "minimum": 2},
            },
        },
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "rate_target": {"type": ["number", "null"]},
        "budget": {"type": "integer", "minimum": 1},
        "threads": {"type": "integer", "minimum": 1},
        "randomize": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "perm_in": {"type": "boolean"},
                "perm_out": {"type": "boolean"},
                "dilution": {"type": "boolean"},
            },
        },
        "goodness": {"enum": list(GOODNESS_READINGS)},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": _int_list,
                "l": _int_list,
                "m": _int_list,
                "rate": _num_list,
                "gamma": _num_list,
                "param": _num_list,
            },
        },
    },
}


def _default_randomize() -> dict:
    return {"perm_in": True, "perm_out": True, "dilution": True}


@dataclass
class ExperimentConfig:
    """Fully resolved experiment settings (plain JSON-compatible values)."""

    q: int
    n: int
    l: int
    m: int
    source: dict
    channel: dict
    code: dict
    quant: dict
    gamma: float
    trials: int = 10_000
    seed: int = 0
    rate_target: float | None = None
    budget: int = DEFAULT_BUDGET
    threads: int = 1
    randomize: dict = field(default_factory=_default_randomize)
    goodness: str = "ensemble"
    sweep: dict = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.n / self.m

    def to_dict(self) -> dict:
        return copy.deepcopy(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def replace(self, **changes) -> "ExperimentConfig":
        data = self.to_dict()
        data.update(changes)
        return config_from_dict(data)


def _channel_inputs(cfg: dict) -> int | None:
    ch = cfg["channel"]
    kind = ch["kind"]
    if kind == "bsc":
        return 2
    if kind == "dmc":
        return len(ch.get("matrix") or []) or None
    return cfg["q"]


def _semantic_problems(cfg: dict) -> list[str]:
    problems = []
    q, n, l, m = cfg["q"], cfg["n"], cfg["l"], cfg["m"]
    if not is_prime(q):
        problems.append(f"q={q} is not prime; only prime fields GF(q) are supported")

    src = cfg["source"]
    if src["kind"] == "iid":
        p = src.get("p")
        if p is None:
            problems.append("source: iid needs 'p'")
        else:
            if len(p) != q:
                problems.append(f"source.p has {len(p)} entries, expected q={q}")
            if abs(sum(p) - 1) > 1e-9:
                problems.append(f"source.p sums to {sum(p)!r}, not 1")
    elif src["kind"] == "explicit":
        pmf = src.get("pmf")
        if not pmf:
            problems.append("source: explicit needs a non-empty 'pmf'")
        else:
            for key in pmf:
                if len(key) != n or not key.isdigit() or any(int(c) >= q for c in key):
                    problems.append(f"source.pmf key {key!r} is not a length-{n} block over GF({q})")
            if abs(sum(pmf.values()) - 1) > 1e-9:
                problems.append(f"source.pmf sums to {sum(pmf.values())!r}, not 1")
    extra = set(src) - {"kind", {"iid": "p", "explicit": "pmf"}.get(src["kind"], "")}
    if extra:
        problems.append(f"source: keys {sorted(extra)} do not apply to kind {src['kind']!r}")

    ch = cfg["channel"]
    kind = ch["kind"]
    if kind in ("bsc", "bec", "qsc") and "param" not in ch:
        problems.append(f"channel: {kind} needs 'param'")
    if kind != "dmc" and "matrix" in ch:
        problems.append("channel: 'matrix' only applies to kind 'dmc'")
    if kind == "dmc":
        mat = ch.get("matrix")
        if not mat:
            problems.append("channel: dmc needs 'matrix'")
        else:
            width = len(mat[0])
            for i, row in enumerate(mat):
                if len(row) != width:
                    problems.append(f"channel.matrix row {i} has {len(row)} entries, expected {width}")
                s = sum(row)
                if abs(s - 1) > 1e-9:
                    problems.append(f"channel.matrix row {i} sums to {s!r}, not 1")
    if kind in ("noiseless", "pure-noise", "dmc") and "param" in ch:
        problems.append(f"channel: 'param' does not apply to kind {kind!r}")

    code = cfg["code"]
    ck = code["kind"]
    if ck == "matrix":
        rows = code.get("rows")
        if rows is None:
            problems.append("code: matrix needs 'rows'")
        else:
            if len(rows) != n or any(len(r) != l for r in rows):
                problems.append(f"code.rows must be an {n} x {l} matrix")
            if any(a >= q for r in rows for a in r):
                problems.append(f"code.rows has entries outside [0, {q})")
    elif ck == "file":
        path = code.get("path")
        if not path:
            problems.append("code: file needs 'path'")
        else:
            try:
                c = read_matrix(path)
                if (c.n, c.l, c.q) != (n, l, q):
                    problems.append(f"code file {path} is {c.n}x{c.l} over GF({c.q}), expected {n}x{l} over GF({q})")
            except ConfigError as exc:
                problems.extend(f"code file {path}: {p}" for p in exc.problems)
    elif ck == "identity" and n != l:
        problems.append("code: identity needs n == l")
    if ck != "matrix" and "rows" in code or ck != "file" and "path" in code:
        problems.append(f"code: extra keys for kind {ck!r}")

    quant = cfg["quant"]
    if ("preset" in quant) == ("file" in quant):
        problems.append("quant: give exactly one of 'preset' or 'file'")
    x_size = quant.get("x_size", q)
    preset = quant.get("preset")
    if preset in ("channel-coding", "source-coding") and m != l:
        problems.append(f"quant preset {preset} needs m == l (got m={m}, l={l})")
    if preset == "deterministic" and m != n:
        problems.append(f"quant preset deterministic needs m == n (got m={m}, n={n})")
    if preset == "jscc-default" and m > l:
        problems.append(f"quant preset jscc-default needs m <= l (got m={m}, l={l})")
    if preset is not None and "x_size" in quant and quant["x_size"] != q:
        problems.append("quant: presets use the code alphabet; 'x_size' must equal q")
    if "mix" in quant and preset != "jscc-default":
        problems.append("quant: 'mix' only applies to preset jscc-default")
    n_in = _channel_inputs(cfg)
    if n_in is not None and n_in != x_size:
        problems.append(f"channel has {n_in} inputs but the quantization emits {x_size} symbols")

    return problems


def _resolve_paths(data: dict, base: Path | None) -> None:
    def fix(p: str) -> str:
        path = Path(p)
        if base is not None and not path.is_absolute():
            path = base / path
        return str(path.resolve())

    if isinstance(data.get("code"), dict) and isinstance(data["code"].get("path"), str):
        data["code"]["path"] = fix(data["code"]["path"])
    if isinstance(data.get("quant"), dict) and isinstance(data["quant"].get("file"), str):
        data["quant"]["file"] = fix(data["quant"]["file"])


def validate(data: dict, source: str | None = None) -> list[str]:
    """Every structural and semantic problem of a raw config dict."""
    if not isinstance(data, dict):
        return ["configuration must be a JSON object"]
    validator = jsonschema.Draft202012Validator(SCHEMA)
    problems = []
    for err in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path))):
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        problems.append(f"{where}: {err.message}")
    try:
        semantic = _semantic_problems(data)
    except (KeyError, TypeError, ValueError, AttributeError, IndexError):
        # structure too broken for semantic checks; the schema errors say why
        semantic = []
    problems.extend(p for p in semantic if p not in problems)
    return problems


def config_from_dict(data: dict, source: str | None = None, base: Path | None = None) -> ExperimentConfig:
    data = copy.deepcopy(data)
    _resolve_paths(data, base)
    problems = validate(data, source)
    if problems:
        raise ConfigError(problems, source)
    names = {f.name for f in fields(ExperimentConfig)}
    cfg = ExperimentConfig(**{k: v for k, v in data.items() if k in names})
    rz = _default_randomize()
    rz.update(cfg.randomize)
    cfg.randomize = rz
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read, validate and resolve a JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", str(path)) from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}", str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path)) from None
    return config_from_dict(data, str(path), path.parent)


def dump_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(cfg.to_json(), encoding="utf-8")


# construction


def build_source(cfg: ExperimentConfig) -> SourceModel:
    src = cfg.source
    if src["kind"] == "uniform":
        return SourceModel.uniform(cfg.n, cfg.q)
    if src["kind"] == "iid":
        return SourceModel.iid(tuple(src["p"]), cfg.n)
    pmf = {tuple(int(c) for c in k): v for k, v in src["pmf"].items()}
    return SourceModel.explicit(pmf, cfg.n, cfg.q)


def build_channel(cfg: ExperimentConfig) -> ChannelModel:
    ch, m, q = cfg.channel, cfg.m, cfg.q
    kind = ch["kind"]
    if kind == "bsc":
        return ChannelModel.bsc(ch["param"], m)
    if kind == "bec":
        return ChannelModel.bec(ch["param"], m, q)
    if kind == "qsc":
        return ChannelModel.qsc(q, ch["param"], m)
    if kind == "noiseless":
        return ChannelModel.noiseless(q, m)
    if kind == "pure-noise":
        return ChannelModel.pure_noise(q, m)
    return ChannelModel(tuple(map(tuple, ch["matrix"])), m, "dmc")


def build_code(cfg: ExperimentConfig):
    c = cfg.code
    if c["kind"] == "uniform":
        return CodeEnsemble.uniform(cfg.n, cfg.l, cfg.q)
    if c["kind"] == "identity":
        return LinearCode.identity(cfg.n, cfg.q)
    if c["kind"] == "matrix":
        return LinearCode(tuple(map(tuple, c["rows"])), cfg.q)
    return read_matrix(c["path"])


def build_instance(cfg: ExperimentConfig) -> SchemeInstance:
    """Assemble the scheme described by ``cfg``."""
    check_budget("quantization table", cfg.q ** (cfg.n + cfg.l), cfg.budget)
    try:
        return _assemble(cfg)
    except UsageError as exc:
        raise ConfigError(str(exc)) from None


def _assemble(cfg: ExperimentConfig) -> SchemeInstance:
    source = build_source(cfg)
    channel = build_channel(cfg)
    quant_cfg = cfg.quant
    if "file" in quant_cfg:
        quant = read_quantization(
            quant_cfg["file"], cfg.n, cfg.l, cfg.q, cfg.m, quant_cfg.get("x_size", cfg.q)
        )
    else:
        source_p = source.p if source.kind == "iid" else None
        quant = preset_quantization(
            quant_cfg["preset"], cfg.n, cfg.l, cfg.q, cfg.m,
            source_p=source_p, mix=quant_cfg.get("mix", 0.5),
        )
    rz = cfg.randomize
    return SchemeInstance(
        source,
        build_code(cfg),
        quant,
        channel,
        gamma=cfg.gamma,
        permute_in=rz.get("perm_in", True),
        permute_out=rz.get("perm_out", True),
        dilute=rz.get("dilution", True),
        budget=cfg.budget,
    )
