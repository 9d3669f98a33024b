"""The joint source-channel coding chain and its decoders."""

from .decoders import (
    decode_map,
    decode_threshold,
    map_decisions,
    threshold_decisions,
    threshold_members,
)
from .instance import (
    Encoder,
    SchemeInstance,
    beta,
    beta_prime,
    encode_sample,
    encode_with,
    encoder_joint_law,
    encoder_marginal_law,
    encoder_space,
    encoder_table,
    realize_encoder,
    sn_margin,
)
from .models import ChannelModel, SourceModel, block_digits
from .quantization import (
    PRESETS,
    Quantization,
    build_quantization,
    parse_quantization,
    preset_quantization,
    read_quantization,
)


def information_density(inst, v, x, y) -> float:
    return inst.information_density(v, x, y)


def sn_member(inst, v, x, y) -> bool:
    return inst.sn_member(v, x, y)


__all__ = [
    "ChannelModel",
    "Encoder",
    "PRESETS",
    "Quantization",
    "SchemeInstance",
    "SourceModel",
    "beta",
    "beta_prime",
    "block_digits",
    "build_quantization",
    "decode_map",
    "decode_threshold",
    "encode_sample",
    "encode_with",
    "encoder_joint_law",
    "encoder_marginal_law",
    "encoder_space",
    "encoder_table",
    "information_density",
    "map_decisions",
    "parse_quantization",
    "preset_quantization",
    "read_quantization",
    "realize_encoder",
    "sn_margin",
    "sn_member",
    "threshold_decisions",
    "threshold_members",
]
