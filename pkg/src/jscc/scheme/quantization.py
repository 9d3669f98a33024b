"""
The quantization map from (source block, code output) to channel input.

A :class:`Quantization` is stored as a dense table indexed by the
lexicographic indices of ``v`` (length ``n``) and ``u`` (length ``l``),
each entry the lexicographic index of ``x`` (length ``m`` over an input
alphabet of size ``x_size``).  Preimage sizes are cached per ``(v, x)``.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..algebra import all_vectors, from_index, to_index
from ..errors import ConfigError, UsageError, check_budget

PRESETS = ("channel-coding", "source-coding", "deterministic", "jscc-default")


class Quantization:
    """
    Parameters
    ----------
    table : ndarray of shape (q**n, q**l)
        Channel-input index for every ``(v, u)`` pair.
    n, l, q : int
        Source length, code length and field size.
    m, x_size : int
        Channel block length and channel input alphabet size.
    """

    def __init__(self, table, n: int, l: int, q: int, m: int, x_size: int, name: str = "custom"):
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (q**n, q**l):
            raise UsageError(f"quantization table shape {table.shape} != {(q**n, q**l)}")
        if table.size and (table.min() < 0 or table.max() >= x_size**m):
            raise UsageError("quantization table has out-of-range channel inputs")
        table.setflags(write=False)
        self.table = table
        self.n, self.l, self.q, self.m, self.x_size = n, l, q, m, x_size
        self.name = name
        self.counts = self._count()
        self.counts.setflags(write=False)

    def _count(self) -> np.ndarray:
        nv, nx = self.q**self.n, self.x_size**self.m
        counts = np.zeros((nv, nx), dtype=np.int64)
        rows = np.repeat(np.arange(nv), self.table.shape[1])
        np.add.at(counts, (rows, self.table.ravel()), 1)
        return counts

    def __repr__(self) -> str:
        return f"Quantization({self.name!r}, n={self.n}, l={self.l}, m={self.m}, q={self.q})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Quantization):
            return NotImplemented
        return (self.n, self.l, self.q, self.m, self.x_size) == (
            other.n, other.l, other.q, other.m, other.x_size
        ) and np.array_equal(self.table, other.table)

    __hash__ = None

    def __call__(self, v: Sequence[int], u: Sequence[int]) -> tuple:
        x = self.table[to_index(v, self.q), to_index(u, self.q)]
        return from_index(int(x), self.m, self.x_size)

    def preimage(self, v: Sequence[int], x: Sequence[int]) -> list[tuple]:
        """All ``u`` with ``q(v, u) = x``, lexicographically ordered."""
        row = self.table[to_index(v, self.q)]
        us = np.flatnonzero(row == to_index(x, self.x_size))
        return [from_index(int(u), self.l, self.q) for u in us]

    def preimage_size(self, v: Sequence[int], x: Sequence[int]) -> int:
        return int(self.counts[to_index(v, self.q), to_index(x, self.x_size)])

    def conditional(self, v: Sequence[int], x: Sequence[int]) -> Fraction:
        """``P(x | v) = |preimage(v, x)| / q**l``."""
        return Fraction(self.preimage_size(v, x), self.q**self.l)

    def conditional_matrix(self) -> np.ndarray:
        """Float ``P(x|v)`` with rows indexed by ``v`` and columns by ``x``."""
        return self.counts / float(self.q**self.l)

    def consistent(self) -> bool:
        """Cached preimage sizes match a fresh count and every row sums to ``q**l``."""
        return bool(
            np.array_equal(self.counts, self._count())
            and np.all(self.counts.sum(axis=1) == self.q**self.l)
        )

    def to_text(self) -> str:
        """One ``v_digits u_digits x_digits`` line per table entry."""
        vs = all_vectors(self.n, self.q)
        us = all_vectors(self.l, self.q)
        lines = []
        for vi, v in enumerate(vs):
            vs_ = "".join(map(str, v))
            for ui, u in enumerate(us):
                x = from_index(int(self.table[vi, ui]), self.m, self.x_size)
                lines.append(f"{vs_} {''.join(map(str, u))} {''.join(map(str, x))}")
        return "\n".join(lines) + "\n"


def parse_quantization(text: str, n: int, l: int, q: int, m: int, x_size: int, source: str | None = None) -> Quantization:
    """Parse the ``v_digits u_digits x_digits`` line format; every (v, u) must appear once."""
    if max(q, x_size) > 10:
        raise ConfigError("digit-string quantization files need alphabets of size <= 10", source)
    table = np.full((q**n, q**l), -1, dtype=np.int64)
    problems = []
    for k, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            problems.append(f"line {k}: expected 3 fields")
            continue
        vs, us, xs = parts
        if len(vs) != n or len(us) != l or len(xs) != m:
            problems.append(f"line {k}: digit strings must have lengths {n}, {l}, {m}")
            continue
        try:
            v = [int(c) for c in vs]
            u = [int(c) for c in us]
            x = [int(c) for c in xs]
        except ValueError:
            problems.append(f"line {k}: non-digit character")
            continue
        if max(v + u) >= q or max(x) >= x_size:
            problems.append(f"line {k}: digit outside its alphabet")
            continue
        vi, ui = to_index(v, q), to_index(u, q)
        if table[vi, ui] >= 0:
            problems.append(f"line {k}: duplicate entry for ({vs}, {us})")
            continue
        table[vi, ui] = to_index(x, x_size)
    missing = int((table < 0).sum())
    if missing:
        problems.append(f"{missing} (v, u) pairs have no entry")
    if problems:
        raise ConfigError(problems, source)
    return Quantization(table, n, l, q, m, x_size, name="file")


def read_quantization(path, n, l, q, m, x_size) -> Quantization:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read quantization file {path}: {exc.strerror}", str(path)) from None
    return parse_quantization(text, n, l, q, m, x_size, str(path))


def _allocate(probs: np.ndarray, slots: int, strict: bool, exact=None) -> np.ndarray:
    """Integer preimage sizes summing to ``slots`` for one conditional law."""
    if exact is not None:
        scaled = [Fraction(p) * slots for p in exact]
        if all(s.denominator == 1 for s in scaled) and sum(scaled) == slots:
            return np.array([int(s) for s in scaled], dtype=np.int64)
        if strict:
            raise UsageError("target law is not representable with the available code outputs")
    scaled = probs * slots
    rounded = np.rint(scaled)
    if np.all(np.abs(scaled - rounded) < 1e-9) and rounded.sum() == slots:
        return rounded.astype(np.int64)
    if strict:
        raise UsageError("target law is not representable with the available code outputs")
    # largest remainder; ties go to the lexicographically smaller x
    base = np.floor(scaled + 1e-12).astype(np.int64)
    short = slots - int(base.sum())
    order = np.lexsort((np.arange(len(probs)), -(scaled - base)))
    base[order[:short]] += 1
    return base


def build_quantization(
    target,
    n: int,
    l: int,
    q: int,
    m: int,
    x_size: int | None = None,
    strict: bool = True,
    name: str = "custom",
) -> Quantization:
    """
    Realize a conditional law ``target(x | v)`` through preimage sizes.

    ``target`` is either a callable ``v -> {x: prob}`` or an array of
    shape ``(q**n, x_size**m)``.  For each ``v`` the code outputs ``u`` are
    handed out in lexicographic order: the first block goes to the
    smallest ``x``, the next to the following ``x``, and so on.

    With ``strict=True`` a law that does not scale to integers over the
    ``q**l`` code outputs raises :class:`UsageError`; otherwise sizes are
    rounded by largest remainder.
    """
    x_size = x_size or q
    nv, nx, slots = q**n, x_size**m, q**l
    check_budget("quantization table", nv * max(slots, nx), None)
    table = np.empty((nv, slots), dtype=np.int64)
    for vi in range(nv):
        exact = None
        if callable(target):
            law = target(from_index(vi, n, q))
            probs = np.zeros(nx)
            exact_list = [0] * nx
            for x, p in law.items():
                xi = to_index(x, x_size)
                probs[xi] += float(p)
                exact_list[xi] += p
            if all(isinstance(p, (int, Fraction)) for p in law.values()):
                exact = exact_list
        else:
            probs = np.asarray(target[vi], dtype=float)
        if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
            raise UsageError(f"target law for block {from_index(vi, n, q)} is not a distribution")
        sizes = _allocate(probs, slots, strict, exact)
        table[vi] = np.repeat(np.arange(nx), sizes)
    return Quantization(table, n, l, q, m, x_size, name=name)


def identity_on_code(n: int, l: int, q: int, name: str = "channel-coding") -> Quantization:
    """``q(v, u) = u``: the channel sees the randomized codeword directly."""
    table = np.broadcast_to(np.arange(q**l), (q**n, q**l))
    return Quantization(table, n, l, q, l, q, name=name)


def deterministic(xmap: Callable | None, n: int, l: int, q: int, m: int | None = None, x_size: int | None = None) -> Quantization:
    """``q(v, u) = xmap(v)`` for every ``u``; defaults to uncoded ``x = v``."""
    if xmap is None:
        xmap, m, x_size = (lambda v: v), n, q
    x_size = x_size or q
    xs = np.array([to_index(xmap(from_index(vi, n, q)), x_size) for vi in range(q**n)])
    table = np.broadcast_to(xs[:, None], (q**n, q**l))
    return Quantization(table, n, l, q, m, x_size, name="deterministic")


def letterwise_target(source_p: Sequence | None, n: int, m: int, q: int, mix: float) -> np.ndarray:
    """
    Per-letter law mixing the uniform distribution with a copy of the
    source letter: ``w(a | b) = (1 - lam)/q + lam * [a == b]`` on the first
    ``min(n, m)`` positions and uniform beyond.  ``lam`` is ``mix`` scaled
    by how far the source letter law is from uniform, so a uniform source
    gives the uniform target.
    """
    if source_p is None:
        lam = mix
    else:
        p = np.array([float(x) for x in source_p])
        lam = mix * max(0.0, 1.0 - q * float(p.min()))
    xs = all_vectors(m, q)
    vs = all_vectors(n, q)
    out = np.ones((len(vs), len(xs)))
    for i in range(m):
        if i < n:
            same = vs[:, i][:, None] == xs[:, i][None, :]
            out = out * np.where(same, (1 - lam) / q + lam, (1 - lam) / q)
        else:
            out = out / q
    return out


def preset_quantization(
    name: str,
    n: int,
    l: int,
    q: int,
    m: int | None = None,
    source_p: Sequence | None = None,
    mix: float = 0.5,
) -> Quantization:
    """Quantizations for the named scheme presets."""
    if name in ("channel-coding", "source-coding"):
        if m is not None and m != l:
            raise UsageError(f"{name} quantization needs m == l")
        return identity_on_code(n, l, q, name=name)
    if name == "deterministic":
        if m is not None and m != n:
            raise UsageError("deterministic (uncoded) quantization needs m == n")
        return deterministic(None, n, l, q)
    if name == "jscc-default":
        m = l if m is None else m
        if m > l:
            raise UsageError("jscc-default quantization needs m <= l")
        target = letterwise_target(source_p, n, m, q, mix)
        quant = build_quantization(target, n, l, q, m, q, strict=False, name=name)
        return quant
    raise UsageError(f"unknown quantization preset {name!r}; choose from {', '.join(PRESETS)}")


__all__ = [
    "Quantization",
    "PRESETS",
    "build_quantization",
    "parse_quantization",
    "read_quantization",
    "identity_on_code",
    "deterministic",
    "letterwise_target",
    "preset_quantization",
]
