"""
Exhaustive decoders for a realized encoder.

Both decoders search all ``q**n`` source blocks.  The batch functions
take encoder tables of shape ``(B, q**n)`` (channel-input index per source
block, one row per trial) and received blocks as digit arrays of shape
``(B, m)``, and return decided source-block indices.
"""

from __future__ import annotations

import numpy as np

from ..algebra import from_index, to_index
from ..errors import UsageError, check_budget
from .instance import Encoder, SchemeInstance, sn_margin
from .models import block_digits

# Relative slack under which two MAP scores count as tied.
MAP_TIE_TOL = 1e-9


def _block_log_likelihood(inst: SchemeInstance, tables: np.ndarray, y_digits: np.ndarray) -> np.ndarray:
    x_digits = block_digits(tables, inst.m, inst.channel.n_in)
    return inst.channel.block_log_prob(x_digits, y_digits[:, None, :])


def map_decisions(inst: SchemeInstance, tables: np.ndarray, y_digits: np.ndarray) -> np.ndarray:
    """
    Maximize ``P_V(v) W^m(y | phi(v))``; ties go to the smallest index,
    i.e. the lexicographically smallest block.
    """
    check_budget("MAP search", inst.n_blocks, inst.budget)
    score = inst.source.log_pmf[None, :] + _block_log_likelihood(inst, tables, y_digits)
    best = score.max(axis=1, keepdims=True)
    finite = np.isfinite(best)
    slack = MAP_TIE_TOL * np.maximum(1.0, np.abs(np.where(finite, best, 0.0)))
    near = score >= best - slack
    out = np.argmax(near, axis=1)
    return np.where(finite[:, 0], out, 0)


def threshold_members(inst: SchemeInstance, tables: np.ndarray, y_digits: np.ndarray) -> np.ndarray:
    """Boolean ``(B, q**n)``: does ``(v, phi(v), y)`` lie in the decoding set."""
    check_budget("threshold search", inst.n_blocks, inst.budget)
    lw = _block_log_likelihood(inst, tables, y_digits)
    y_idx = y_digits @ (inst.channel.n_out ** np.arange(inst.m - 1, -1, -1))
    log_py = inst.log_output_law[y_idx][:, None]
    log_beta = inst.log_beta_prime_table[np.arange(inst.n_blocks)[None, :], tables]
    margin = sn_margin(lw, log_py, inst.source.log_pmf[None, :], log_beta, inst.n, inst.gamma)
    return margin > 0


def threshold_decisions(inst: SchemeInstance, tables: np.ndarray, y_digits: np.ndarray) -> np.ndarray:
    """The unique member block if there is exactly one, else block 0 (the all-zero block)."""
    members = threshold_members(inst, tables, y_digits)
    unique = members.sum(axis=1) == 1
    return np.where(unique, np.argmax(members, axis=1), 0)


def _as_table(inst: SchemeInstance, phi) -> np.ndarray:
    if isinstance(phi, Encoder):
        return np.asarray(phi.table)
    if callable(phi):
        return np.array([
            to_index(phi(from_index(vi, inst.n, inst.q)), inst.channel.n_in)
            for vi in range(inst.n_blocks)
        ])
    table = np.asarray(phi)
    if table.shape != (inst.n_blocks,):
        raise UsageError(f"encoder table must have shape ({inst.n_blocks},)")
    return table


def _y_digits(inst: SchemeInstance, y) -> np.ndarray:
    y = np.asarray(tuple(y), dtype=np.int64)
    if y.shape != (inst.m,) or y.min() < 0 or y.max() >= inst.channel.n_out:
        raise UsageError(f"received block must be {inst.m} symbols below {inst.channel.n_out}")
    return y[None, :]


def decode_map(inst: SchemeInstance, phi, y) -> tuple:
    vi = map_decisions(inst, _as_table(inst, phi)[None, :], _y_digits(inst, y))[0]
    return from_index(int(vi), inst.n, inst.q)


def decode_threshold(inst: SchemeInstance, phi, y) -> tuple:
    vi = threshold_decisions(inst, _as_table(inst, phi)[None, :], _y_digits(inst, y))[0]
    return from_index(int(vi), inst.n, inst.q)
