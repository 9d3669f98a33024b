"""
The complete coding chain: source block -> randomized linear code ->
quantization -> channel.

:class:`SchemeInstance` bundles the pieces, checks that alphabets and
block lengths line up, and caches the exact tables the decoders and the
error bound need (source and output laws, the alpha table, and the
pairwise-dependence coefficient for every ``(v, x)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from ..algebra import (
    GF,
    all_vectors,
    as_generator,
    from_index,
    index_weights,
    to_index,
)
from ..codes import (
    AlphaTable,
    CodeEnsemble,
    LinearCode,
    RandomizedCode,
    alpha_of_ensemble,
    apply_randomized,
    as_ensemble,
    randomization_space,
    randomize,
    sample_code,
    type_index_table,
)
from ..errors import DomainError, UsageError, check_budget
from ..spectra import type_of
from .models import ChannelModel, SourceModel
from .quantization import Quantization


@dataclass(frozen=True, eq=False)
class SchemeInstance:
    """
    Parameters
    ----------
    source : SourceModel
    code : LinearCode or CodeEnsemble
        A fixed code is treated as a point-mass ensemble.
    quant : Quantization
    channel : ChannelModel
    gamma : float
        Positive slack in the decoding threshold.
    permute_in, permute_out, dilute : bool
        Switch off parts of the encoder randomization (ablation only).
    budget : int, optional
        Cap on exact enumeration sizes.
    """

    source: SourceModel
    code: object
    quant: Quantization
    channel: ChannelModel
    gamma: float = 0.1
    permute_in: bool = True
    permute_out: bool = True
    dilute: bool = True
    budget: int | None = None

    def __post_init__(self):
        e = as_ensemble(self.code)
        problems = []
        if not self.gamma > 0:
            problems.append(f"gamma must be positive, got {self.gamma!r}")
        if self.source.q != e.q or self.quant.q != e.q:
            problems.append("source, code and quantization must share one field")
        if self.source.n != e.n or self.quant.n != e.n:
            problems.append(f"source length {self.source.n}, code input length {e.n} "
                            f"and quantization source length {self.quant.n} differ")
        if self.quant.l != e.l:
            problems.append(f"code output length {e.l} != quantization code length {self.quant.l}")
        if self.quant.m != self.channel.m:
            problems.append(f"quantization output length {self.quant.m} != channel length {self.channel.m}")
        if self.quant.x_size != self.channel.n_in:
            problems.append(f"quantization input alphabet {self.quant.x_size} != channel input alphabet {self.channel.n_in}")
        if problems:
            raise UsageError("; ".join(problems))

    @property
    def ensemble(self) -> CodeEnsemble:
        return as_ensemble(self.code)

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def l(self) -> int:
        return self.quant.l

    @property
    def m(self) -> int:
        return self.channel.m

    @property
    def q(self) -> int:
        return self.source.q

    @property
    def field(self) -> GF:
        return GF(self.q)

    @property
    def n_blocks(self) -> int:
        return self.q**self.n

    @property
    def n_inputs(self) -> int:
        return self.channel.n_in**self.m

    @property
    def n_outputs(self) -> int:
        return self.channel.n_out**self.m

    @property
    def rate(self) -> float:
        return self.n / self.m

    # cached exact quantities

    @cached_property
    def alpha(self) -> AlphaTable:
        return alpha_of_ensemble(self.code, budget=self.budget)

    @cached_property
    def input_law(self) -> np.ndarray:
        """``P(x)`` induced by the source and the quantization."""
        return self.source.pmf @ self.quant.conditional_matrix()

    @cached_property
    def output_law(self) -> np.ndarray:
        check_budget("output law", self.n_inputs * self.n_outputs, self.budget)
        return self.channel.output_law(self.input_law)

    @cached_property
    def log_output_law(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.output_law)

    @cached_property
    def beta_prime_table(self) -> np.ndarray:
        """Float pairwise-dependence bound for every ``(v, x)``; NaN on empty preimages."""
        return _beta_prime_table(self)

    @cached_property
    def log_beta_prime_table(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self.beta_prime_table)

    # single-point operations

    def _check_v(self, v) -> tuple:
        v = tuple(int(a) for a in v)
        if len(v) != self.n:
            raise UsageError(f"source block length {len(v)} != {self.n}")
        return v

    def information_density(self, v, x, y) -> float:
        """``(1/n) ln W^m(y|x) / P_Y(y)`` in nats."""
        x, y = tuple(x), tuple(y)
        yi = to_index(y, self.channel.n_out)
        py = self.output_law[yi]
        if py <= 0:
            raise DomainError(f"output block {y} has zero probability")
        lw = self.channel.block_log_prob(np.array(x), np.array(y))
        return float((lw - self.log_output_law[yi]) / self.n)

    def sn_member(self, v, x, y) -> bool:
        """Membership of ``(v, x, y)`` in the decoding set."""
        v = self._check_v(v)
        x, y = tuple(x), tuple(y)
        yi = to_index(y, self.channel.n_out)
        if self.output_law[yi] <= 0:
            raise DomainError(f"output block {y} has zero probability")
        vi, xi = to_index(v, self.q), to_index(x, self.channel.n_in)
        lw = self.channel.block_log_prob(np.array(x), np.array(y))
        margin = sn_margin(
            lw,
            self.log_output_law[yi],
            self.source.log_pmf[vi],
            self.log_beta_prime_table[vi, xi],
            self.n,
            self.gamma,
        )
        return bool(margin > 0)


def sn_margin(log_w, log_py, log_pv, log_beta, n: int, gamma: float):
    """
    ``n`` times the gap between the information density and its threshold;
    a triple is in the decoding set iff the margin is positive.  Every
    caller uses this one expression so decisions and the bound agree
    bit for bit.
    """
    return (log_w - log_py) - (-log_pv + log_beta + n * gamma)


# encoder


@dataclass(frozen=True, eq=False)
class Encoder:
    """A realized encoder: one draw of the code and its randomization."""

    randomized: RandomizedCode
    table: np.ndarray
    inst: SchemeInstance

    def __call__(self, v: Sequence[int]) -> tuple:
        xi = int(self.table[to_index(tuple(v), self.inst.q)])
        return from_index(xi, self.inst.m, self.inst.channel.n_in)


def encoder_table(inst: SchemeInstance, rc: RandomizedCode) -> np.ndarray:
    """Channel-input index of every source block under the randomized code ``rc``."""
    q = inst.q
    vs = all_vectors(inst.n, q)
    u = (vs[:, list(rc.sigma_in.image)] @ rc.base.as_array()) % q
    u = (u[:, list(rc.sigma_out.image)] + np.array(rc.dilution)) % q
    ui = u @ index_weights(inst.l, q)
    return inst.quant.table[np.arange(len(vs)), ui]


def realize_encoder(inst: SchemeInstance, rng) -> Encoder:
    """Draw a code (for ensembles), both permutations and the dilution."""
    gen = as_generator(rng)
    code = inst.code if isinstance(inst.code, LinearCode) else sample_code(inst.code, gen)
    rc = randomize(code, gen, inst.permute_in, inst.permute_out, inst.dilute)
    return Encoder(rc, encoder_table(inst, rc), inst)


def encode_with(inst: SchemeInstance, rc: RandomizedCode, v: Sequence[int]) -> tuple:
    """``q(v, Fhat(v))`` for fixed randomness."""
    v = inst._check_v(v)
    return inst.quant(v, apply_randomized(rc, v))


def encode_sample(inst: SchemeInstance, v: Sequence[int], rng) -> tuple:
    """One draw of the random encoder at source block ``v``."""
    v = inst._check_v(v)
    return realize_encoder(inst, rng)(v)


def encoder_space(inst: SchemeInstance):
    """Every realized encoder with its probability (exhaustive; honours the budget)."""
    scale = 1
    if not inst.permute_in:
        scale *= math.factorial(inst.n)
    if not inst.permute_out:
        scale *= math.factorial(inst.l)
    if not inst.dilute:
        scale *= inst.q**inst.l
    for rc, w in randomization_space(inst.ensemble, inst.budget):
        if not inst.permute_in and not rc.sigma_in.is_identity:
            continue
        if not inst.permute_out and not rc.sigma_out.is_identity:
            continue
        if not inst.dilute and any(rc.dilution):
            continue
        yield rc, w * scale


def encoder_marginal_law(inst: SchemeInstance, v) -> dict:
    """Exact ``Pr{Phi(v) = x}`` over all encoder randomness."""
    v = inst._check_v(v)
    law: dict = {}
    for rc, w in encoder_space(inst):
        x = encode_with(inst, rc, v)
        law[x] = law.get(x, 0) + w
    return law


def encoder_joint_law(inst: SchemeInstance, v1, v2) -> dict:
    """Exact ``Pr{Phi(v1) = x1, Phi(v2) = x2}`` over all encoder randomness."""
    v1, v2 = inst._check_v(v1), inst._check_v(v2)
    law: dict = {}
    for rc, w in encoder_space(inst):
        key = (encode_with(inst, rc, v1), encode_with(inst, rc, v2))
        law[key] = law.get(key, 0) + w
    return law


# pairwise-dependence coefficients


def beta(inst: SchemeInstance, v1, v2, x1, x2) -> Fraction:
    """Average of ``alpha(type(v2-v1), type(u2-u1))`` over both preimages."""
    v1, v2 = inst._check_v(v1), inst._check_v(v2)
    if v1 == v2:
        raise UsageError("beta needs distinct source blocks")
    pre1 = inst.quant.preimage(v1, x1)
    pre2 = inst.quant.preimage(v2, x2)
    if not pre1 or not pre2:
        raise DomainError("beta is undefined on an empty preimage")
    q = inst.q
    dv = type_of(tuple((b - a) % q for a, b in zip(v1, v2)), q)
    a = inst.alpha
    total = sum(
        a[(dv, type_of(tuple((b - c) % q for c, b in zip(u1, u2)), q))]
        for u1 in pre1
        for u2 in pre2
    )
    return Fraction(total) / (len(pre1) * len(pre2))


def beta_prime(inst: SchemeInstance, v, x) -> Fraction:
    """
    Max over nonzero input types ``P`` and all ``u1`` of the average of
    ``alpha(P, type(u2 - u1))`` over ``u2`` in the preimage of ``(v, x)``.
    """
    v = inst._check_v(v)
    pre = inst.quant.preimage(v, x)
    if not pre:
        raise DomainError("beta' is undefined on an empty preimage")
    q, l = inst.q, inst.l
    check_budget("beta' evaluation", q**l * len(pre), inst.budget)
    a = inst.alpha
    tidx, types = type_index_table(l, q)
    w = index_weights(l, q)
    pre_arr = np.array(pre)
    best = None
    for u1 in all_vectors(l, q):
        diffs = tidx[((pre_arr - u1) % q) @ w]
        hist = np.bincount(diffs, minlength=len(types))
        for p in a.in_types:
            if p.is_zero_type:
                continue
            s = sum(int(c) * a[(p, types[k])] for k, c in enumerate(hist) if c)
            if best is None or s > best:
                best = s
    return Fraction(best) / len(pre)


def _beta_prime_table(inst: SchemeInstance) -> np.ndarray:
    nv, nx = inst.n_blocks, inst.n_inputs
    counts = inst.quant.counts
    out = np.full((nv, nx), np.nan)
    nonempty = counts > 0
    e = inst.ensemble
    if e.kind == "uniform":
        out[nonempty] = 1.0
        return out
    q, l = inst.q, inst.l
    table = inst.quant.table
    # distinct preimage sets, as indicator columns over u
    keys: dict = {}
    cols = []
    where = []
    for vi in range(nv):
        row = table[vi]
        for xi in np.flatnonzero(nonempty[vi]):
            ind = row == xi
            k = ind.tobytes()
            if k not in keys:
                keys[k] = len(cols)
                cols.append(ind)
            where.append((vi, xi, keys[k]))
    M = np.array(cols, dtype=float).T  # (q**l, K)
    sizes = M.sum(axis=0)
    check_budget("beta' table", (q**l) ** 2 * M.shape[1], inst.budget)
    A = inst.alpha.as_array()
    nonzero_rows = [i for i, p in enumerate(inst.alpha.in_types) if not p.is_zero_type]
    tidx, _ = type_index_table(l, q)
    vecs = all_vectors(l, q)
    w = index_weights(l, q)
    best = np.full(M.shape[1], -np.inf)
    chunk = max(1, 2**20 // max(1, q**l * l))
    for start in range(0, q**l, chunk):
        u1 = vecs[start:start + chunk]
        D = tidx[((vecs[None, :, :] - u1[:, None, :]) % q) @ w]  # (chunk, q**l)
        for r in nonzero_rows:
            S = A[r][D] @ M
            best = np.maximum(best, S.max(axis=0))
    vals = best / sizes
    for vi, xi, k in where:
        out[vi, xi] = vals[k]
    return out
