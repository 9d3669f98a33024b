"""Ready-made configurations for the two classical special cases and the joint scheme."""

from __future__ import annotations

import copy

from ..errors import UsageError
from .config import ExperimentConfig, config_from_dict

_PRESETS = {
    # Uniform source, quantization ignores v: plain linear channel coding.
    "channel-coding": {
        "q": 2, "n": 3, "l": 6, "m": 6,
        "source": {"kind": "uniform"},
        "channel": {"kind": "bsc", "param": 0.05},
        "code": {"kind": "uniform"},
        "quant": {"preset": "channel-coding"},
        "gamma": 0.1,
    },
    # Noiseless channel carrying the code output: fixed-rate compression via F.
    "source-coding": {
        "q": 2, "n": 8, "l": 6, "m": 6,
        "source": {"kind": "iid", "p": [0.9, 0.1]},
        "channel": {"kind": "noiseless"},
        "code": {"kind": "uniform"},
        "quant": {"preset": "source-coding"},
        "gamma": 0.1,
    },
    "jscc-default": {
        "q": 2, "n": 6, "l": 6, "m": 6,
        "source": {"kind": "iid", "p": [0.9, 0.1]},
        "channel": {"kind": "bsc", "param": 0.05},
        "code": {"kind": "uniform"},
        "quant": {"preset": "jscc-default", "mix": 0.5},
        "gamma": 0.1,
    },
}

PRESET_NAMES = tuple(_PRESETS)

DESCRIPTIONS = {
    "channel-coding": "uniform source, q(v,u)=u, BSC(0.05), n=3, l=m=6",
    "source-coding": "iid(0.9,0.1) source, noiseless channel, q(v,u)=u, n=8, l=m=6",
    "jscc-default": "iid(0.9,0.1) source, source-correlated quantization, BSC(0.05), n=l=m=6",
}


def preset_dict(name: str) -> dict:
    if name not in _PRESETS:
        raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return copy.deepcopy(_PRESETS[name])


def preset(name: str, **overrides) -> ExperimentConfig:
    """Validated configuration for a named preset, with optional top-level overrides."""
    data = preset_dict(name)
    data.update(overrides)
    return config_from_dict(data, source=f"preset {name}")
