"""Source and channel models at a fixed block length."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from ..algebra import GF, all_vectors, as_generator, from_index, to_index
from ..errors import UsageError, check_budget

_TOL = 1e-9


def _check_distribution(p: Sequence, what: str) -> tuple:
    p = tuple(p)
    if not p:
        raise UsageError(f"{what}: empty distribution")
    if any(x < 0 for x in p):
        raise UsageError(f"{what}: negative probability")
    total = sum(p)
    exact = all(isinstance(x, (int, Fraction)) for x in p)
    if (exact and total != 1) or (not exact and abs(total - 1) > _TOL):
        raise UsageError(f"{what}: probabilities sum to {float(total)!r}, not 1")
    return p


def _log(x) -> float:
    return math.log(x) if x > 0 else -math.inf


@dataclass(frozen=True, eq=False)
class SourceModel:
    """
    Distribution of a length-``n`` source block over GF(q)^n.

    ``kind="iid"`` uses the per-letter law ``p``; ``kind="explicit"``
    lists ``(block, probability)`` pairs, with unlisted blocks at zero.
    Probabilities may be floats or :class:`~fractions.Fraction`.
    """

    n: int
    q: int
    kind: str = "iid"
    p: tuple = ()
    table: tuple = ()

    def __post_init__(self):
        GF(self.q)
        if self.n < 1:
            raise UsageError("source block length must be >= 1")
        if self.kind == "iid":
            p = _check_distribution(self.p, "source letter law")
            if len(p) != self.q:
                raise UsageError(f"source letter law has {len(p)} entries, expected {self.q}")
            object.__setattr__(self, "p", p)
        elif self.kind == "explicit":
            table = tuple((tuple(int(a) for a in v), w) for v, w in self.table)
            for v, _ in table:
                if len(v) != self.n or any(not 0 <= a < self.q for a in v):
                    raise UsageError(f"explicit source block {v!r} is not in GF({self.q})^{self.n}")
            if len({v for v, _ in table}) != len(table):
                raise UsageError("explicit source lists a block twice")
            _check_distribution([w for _, w in table], "explicit source")
            object.__setattr__(self, "table", table)
        else:
            raise UsageError(f"unknown source kind {self.kind!r}")

    @classmethod
    def iid(cls, p: Sequence, n: int) -> "SourceModel":
        return cls(n, len(p), "iid", tuple(p))

    @classmethod
    def uniform(cls, n: int, q: int) -> "SourceModel":
        return cls(n, q, "iid", tuple(Fraction(1, q) for _ in range(q)))

    @classmethod
    def explicit(cls, pmf: Mapping, n: int, q: int) -> "SourceModel":
        return cls(n, q, "explicit", table=tuple(sorted(pmf.items())))

    def prob(self, v: Sequence[int]):
        v = tuple(v)
        if len(v) != self.n:
            raise UsageError(f"block length {len(v)} != {self.n}")
        if self.kind == "iid":
            out = 1
            for a in v:
                out = out * self.p[a]
            return out
        return dict(self.table).get(v, 0)

    @property
    def size(self) -> int:
        return self.q**self.n

    @cached_property
    def pmf(self) -> np.ndarray:
        """Float probabilities of all blocks in lexicographic order."""
        if self.kind == "iid":
            vecs = all_vectors(self.n, self.q)
            p = np.array([float(x) for x in self.p])
            out = p[vecs[:, 0]].copy()
            for i in range(1, self.n):
                out = out * p[vecs[:, i]]
        else:
            out = np.zeros(self.size)
            for v, w in self.table:
                out[to_index(v, self.q)] = float(w)
        out.setflags(write=False)
        return out

    @cached_property
    def log_pmf(self) -> np.ndarray:
        """Natural log of :attr:`pmf`, built letter by letter for iid sources."""
        if self.kind == "iid":
            vecs = all_vectors(self.n, self.q)
            lp = np.array([_log(float(x)) for x in self.p])
            out = lp[vecs[:, 0]].copy()
            for i in range(1, self.n):
                out = out + lp[vecs[:, i]]
        else:
            with np.errstate(divide="ignore"):
                out = np.log(self.pmf)
        out.setflags(write=False)
        return out

    def sample(self, size: int, rng) -> np.ndarray:
        """Block indices drawn from the source."""
        pmf = self.pmf
        return as_generator(rng).choice(self.size, size=size, p=pmf / pmf.sum())

    def entropy_rate(self) -> float:
        """Per-letter entropy of the block law, in nats."""
        pmf = self.pmf[self.pmf > 0]
        return float(-(pmf * np.log(pmf)).sum() / self.n)


@dataclass(frozen=True, eq=False)
class ChannelModel:
    """
    Memoryless channel used ``m`` times with per-letter matrix ``W``
    (rows: inputs, columns: outputs).
    """

    W: tuple
    m: int
    name: str = "dmc"
    param: float | None = None

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.W)
        if not rows or not rows[0]:
            raise UsageError("channel matrix must be non-empty")
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise UsageError(f"channel row {i} has {len(r)} entries, expected {width}")
            try:
                _check_distribution(r, f"channel row {i}")
            except UsageError as exc:
                raise UsageError(str(exc)) from None
        if self.m < 1:
            raise UsageError("channel block length must be >= 1")
        object.__setattr__(self, "W", rows)

    # presets

    @classmethod
    def bsc(cls, eps: float, m: int) -> "ChannelModel":
        return cls(((1 - eps, eps), (eps, 1 - eps)), m, "bsc", eps)

    @classmethod
    def qsc(cls, q: int, eps: float, m: int) -> "ChannelModel":
        """q-ary symmetric channel: a wrong symbol is uniform over the other q-1."""
        off = eps / (q - 1)
        W = tuple(tuple(1 - eps if a == b else off for b in range(q)) for a in range(q))
        return cls(W, m, "qsc", eps)

    @classmethod
    def bec(cls, eps: float, m: int, q: int = 2) -> "ChannelModel":
        """Erasure channel; output symbol ``q`` is the erasure."""
        W = tuple(
            tuple((1 - eps) if b == a else (eps if b == q else 0.0) for b in range(q + 1))
            for a in range(q)
        )
        return cls(W, m, "bec", eps)

    @classmethod
    def noiseless(cls, q: int, m: int) -> "ChannelModel":
        W = tuple(tuple(Fraction(int(a == b)) for b in range(q)) for a in range(q))
        return cls(W, m, "noiseless", 0.0)

    @classmethod
    def pure_noise(cls, q: int, m: int, n_out: int | None = None) -> "ChannelModel":
        """Every row is uniform over the outputs, so ``Y`` is independent of ``X``."""
        n_out = n_out or q
        W = tuple(tuple(Fraction(1, n_out) for _ in range(n_out)) for _ in range(q))
        return cls(W, m, "pure-noise", None)

    @property
    def n_in(self) -> int:
        return len(self.W)

    @property
    def n_out(self) -> int:
        return len(self.W[0])

    @cached_property
    def matrix(self) -> np.ndarray:
        out = np.array([[float(w) for w in r] for r in self.W])
        out.setflags(write=False)
        return out

    @cached_property
    def log_matrix(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            out = np.log(self.matrix)
        out.setflags(write=False)
        return out

    def prob(self, x: Sequence[int], y: Sequence[int]):
        """``W^m(y|x)`` as a product of per-letter probabilities."""
        if len(x) != self.m or len(y) != self.m:
            raise UsageError(f"channel blocks must have length {self.m}")
        out = 1
        for a, b in zip(x, y):
            out = out * self.W[a][b]
        return out

    def block_log_prob(self, x_digits: np.ndarray, y_digits: np.ndarray) -> np.ndarray:
        """
        ``ln W^m(y|x)`` for broadcast-compatible digit arrays (last axis is
        the block).  Letters are accumulated left to right so the result is
        bit-identical to :meth:`log_matrix_m`.
        """
        L = self.log_matrix
        acc = L[x_digits[..., 0], y_digits[..., 0]]
        for i in range(1, self.m):
            acc = acc + L[x_digits[..., i], y_digits[..., i]]
        return acc

    def log_matrix_m(self, budget: int | None = None) -> np.ndarray:
        """Dense ``ln W^m`` over all input and output blocks."""
        check_budget("block channel matrix", self.n_in**self.m * self.n_out**self.m, budget)
        xd = all_vectors(self.m, self.n_in)
        yd = all_vectors(self.m, self.n_out)
        return self.block_log_prob(xd[:, None, :], yd[None, :, :])

    def matrix_m(self, budget: int | None = None) -> np.ndarray:
        return np.exp(self.log_matrix_m(budget))

    def output_law(self, px: np.ndarray) -> np.ndarray:
        """Output block law for an input block law ``px`` (lexicographic order)."""
        t = np.asarray(px, dtype=float).reshape((self.n_in,) * self.m)
        W = self.matrix
        for axis in range(self.m):
            t = np.moveaxis(np.tensordot(t, W, axes=([axis], [0])), -1, axis)
        return t.reshape(-1)

    def sample(self, x_digits: np.ndarray, rng) -> np.ndarray:
        """Output digits for input digits of any shape."""
        return self.transmit(x_digits, as_generator(rng).random(np.shape(x_digits)))

    def transmit(self, x_digits: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
        """Inverse-CDF channel use driven by pre-drawn uniforms in [0, 1)."""
        cum = np.cumsum(self.matrix, axis=1)
        y = (uniforms[..., None] >= cum[x_digits]).sum(axis=-1)
        return np.minimum(y, self.n_out - 1)

    def describe(self) -> str:
        return self.name if self.param is None else f"{self.name}({self.param})"


def block_digits(indices: np.ndarray, length: int, base: int) -> np.ndarray:
    """Lexicographic digits of block indices (last axis is the block)."""
    indices = np.asarray(indices)
    out = np.empty(indices.shape + (length,), dtype=np.int64)
    rest = indices.astype(np.int64)
    for i in range(length - 1, -1, -1):
        rest, out[..., i] = np.divmod(rest, base)
    return out


__all__ = ["SourceModel", "ChannelModel", "block_digits", "from_index", "to_index"]
