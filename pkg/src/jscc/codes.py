"""
Linear codes over GF(q), code ensembles and their joint-spectrum ratios.

A :class:`LinearCode` is the homomorphism ``x -> x G`` given by an
``n x l`` generator matrix.  Ensembles are either the uniform-matrix
ensemble (every entry i.i.d. uniform) or an explicit weighted list of
codes; a single code is treated as a point-mass ensemble.

The alpha table of an ensemble is the expected joint spectrum divided
by the joint spectrum of the full product space.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import spectra
from .algebra import (
    GF,
    Permutation,
    all_permutations,
    all_vectors,
    apply_perm,
    as_generator,
    index_weights,
    sample_uniform_perm,
    sample_uniform_vec,
)
from .errors import ConfigError, UsageError, check_budget
from .spectra import TypeDist, enumerate_types, multinomial, type_of


@dataclass(frozen=True)
class LinearCode:
    """Generator matrix ``G`` (``n`` rows, ``l`` columns) over GF(q)."""

    G: tuple
    q: int

    def __post_init__(self):
        GF(self.q)
        rows = tuple(tuple(int(a) for a in row) for row in self.G)
        if not rows or not rows[0]:
            raise UsageError("generator matrix must be non-empty")
        width = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != width:
                raise UsageError(f"row {i} has {len(row)} entries, expected {width}")
            if any(not 0 <= a < self.q for a in row):
                raise UsageError(f"row {i} has entries outside [0, {self.q})")
        object.__setattr__(self, "G", rows)

    @property
    def n(self) -> int:
        return len(self.G)

    @property
    def l(self) -> int:
        return len(self.G[0])

    @property
    def field(self) -> GF:
        return GF(self.q)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.G, dtype=np.int64)

    @classmethod
    def from_array(cls, G, q: int) -> "LinearCode":
        return cls(tuple(map(tuple, np.asarray(G).tolist())), q)

    @classmethod
    def identity(cls, n: int, q: int) -> "LinearCode":
        return cls.from_array(np.eye(n, dtype=np.int64), q)

    @classmethod
    def zero(cls, n: int, l: int, q: int) -> "LinearCode":
        return cls.from_array(np.zeros((n, l), dtype=np.int64), q)

    def encode(self, x: Sequence[int]) -> tuple:
        if len(x) != self.n:
            raise UsageError(f"input length {len(x)} != code dimension {self.n}")
        return self.field.vec_matmul(tuple(x), self.G)

    __call__ = encode

    def encode_all(self) -> np.ndarray:
        """Codewords of all ``q**n`` inputs, rows in lexicographic input order."""
        return (all_vectors(self.n, self.q) @ self.as_array()) % self.q

    def joint_counts(self) -> Counter:
        """Number of inputs with each (input type, output type) pair."""
        return _joint_counts(all_vectors(self.n, self.q), self.encode_all(), self.q)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.l} {self.q}"]
        lines += [" ".join(str(a) for a in row) for row in self.G]
        return "\n".join(lines) + "\n"


def _joint_counts(inputs: np.ndarray, outputs: np.ndarray, q: int) -> Counter:
    cin = np.stack([(inputs == a).sum(axis=1) for a in range(q)], axis=1)
    cout = np.stack([(outputs == a).sum(axis=1) for a in range(q)], axis=1)
    return Counter(zip(map(tuple, cin.tolist()), map(tuple, cout.tolist())))


def parse_matrix(text: str, source: str | None = None) -> LinearCode:
    """
    Parse the matrix file format: ``n l q`` on the first line, then ``n``
    rows of ``l`` integers in ``[0, q)``.  Trailing whitespace and a final
    newline are tolerated; anything else malformed is rejected.
    """
    lines = text.split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise ConfigError("empty matrix file", source)
    head = lines[0].split()
    if len(head) != 3 or not all(h.isdigit() for h in head):
        raise ConfigError(f"line 1: expected 'n l q', got {lines[0]!r}", source)
    n, l, q = (int(h) for h in head)
    problems = []
    if len(lines) - 1 != n:
        problems.append(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        if line != line.lstrip():
            problems.append(f"line {k}: leading whitespace")
        parts = line.split()
        if len(parts) != l:
            problems.append(f"line {k}: expected {l} entries, found {len(parts)}")
            continue
        if not all(p.isdigit() for p in parts):
            problems.append(f"line {k}: non-integer entry")
            continue
        row = [int(p) for p in parts]
        if any(a >= q for a in row):
            problems.append(f"line {k}: entry outside [0, {q})")
        rows.append(row)
    if problems:
        raise ConfigError(problems, source)
    try:
        return LinearCode(tuple(map(tuple, rows)), q)
    except UsageError as exc:
        raise ConfigError(str(exc), source) from None


def read_matrix(path) -> LinearCode:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file {path}: {exc.strerror}", str(path)) from None
    return parse_matrix(text, str(path))


def write_matrix(code: LinearCode, path) -> None:
    Path(path).write_text(code.to_text(), encoding="utf-8")


@dataclass(frozen=True)
class CodeEnsemble:
    """
    A random linear code ``F: GF(q)^n -> GF(q)^l``.

    ``kind`` is ``"uniform"`` (all ``q**(n*l)`` matrices equally likely)
    or ``"explicit"`` (``members`` holds ``(LinearCode, weight)`` pairs
    whose weights sum to one).
    """

    n: int
    l: int
    q: int
    kind: str = "uniform"
    members: tuple = ()

    def __post_init__(self):
        GF(self.q)
        if self.n < 1 or self.l < 1:
            raise UsageError("code lengths must be positive")
        if self.kind == "uniform":
            if self.members:
                raise UsageError("the uniform ensemble takes no explicit members")
        elif self.kind == "explicit":
            if not self.members:
                raise UsageError("explicit ensembles need at least one member")
            members = tuple((c, Fraction(w)) for c, w in self.members)
            for c, w in members:
                if (c.n, c.l, c.q) != (self.n, self.l, self.q):
                    raise UsageError("ensemble member has the wrong shape or field")
                if w < 0:
                    raise UsageError("ensemble weights must be non-negative")
            if sum(w for _, w in members) != 1:
                raise UsageError("ensemble weights must sum to 1")
            object.__setattr__(self, "members", members)
        else:
            raise UsageError(f"unknown ensemble kind {self.kind!r}")

    @classmethod
    def uniform(cls, n: int, l: int, q: int) -> "CodeEnsemble":
        return cls(n, l, q, "uniform")

    @classmethod
    def point(cls, code: LinearCode) -> "CodeEnsemble":
        return cls(code.n, code.l, code.q, "explicit", ((code, Fraction(1)),))

    @classmethod
    def explicit(cls, members) -> "CodeEnsemble":
        members = tuple(members)
        c0 = members[0][0]
        return cls(c0.n, c0.l, c0.q, "explicit", members)

    @property
    def support_size(self) -> int:
        if self.kind == "uniform":
            return self.q ** (self.n * self.l)
        return len(self.members)

    def support(self, budget: int | None = None) -> Iterator[tuple[LinearCode, Fraction]]:
        """Every code of the ensemble with its probability."""
        if self.kind == "explicit":
            yield from self.members
            return
        check_budget("uniform ensemble enumeration", self.support_size, budget)
        w = Fraction(1, self.support_size)
        for entries in product(range(self.q), repeat=self.n * self.l):
            G = tuple(
                entries[i * self.l:(i + 1) * self.l] for i in range(self.n)
            )
            yield LinearCode(G, self.q), w


def as_ensemble(obj) -> CodeEnsemble:
    if isinstance(obj, CodeEnsemble):
        return obj
    if isinstance(obj, LinearCode):
        return CodeEnsemble.point(obj)
    raise UsageError(f"expected a LinearCode or CodeEnsemble, got {type(obj).__name__}")


@dataclass(frozen=True)
class RandomizedCode:
    """A code composed with input/output permutations plus an additive dilution."""

    base: LinearCode
    sigma_in: Permutation
    sigma_out: Permutation
    dilution: tuple

    def __post_init__(self):
        if len(self.sigma_in) != self.base.n or len(self.sigma_out) != self.base.l:
            raise UsageError("permutation sizes do not match the code")
        if len(self.dilution) != self.base.l:
            raise UsageError("dilution length does not match the code")

    def __call__(self, x: Sequence[int]) -> tuple:
        return apply_randomized(self, x)


def sample_code(e: CodeEnsemble, rng) -> LinearCode:
    gen = as_generator(rng)
    if e.kind == "uniform":
        return LinearCode.from_array(gen.integers(0, e.q, size=(e.n, e.l)), e.q)
    weights = np.array([float(w) for _, w in e.members])
    k = int(gen.choice(len(e.members), p=weights / weights.sum()))
    return e.members[k][0]


def randomize(
    c: LinearCode,
    rng,
    permute_in: bool = True,
    permute_out: bool = True,
    dilute: bool = True,
) -> RandomizedCode:
    """Draw the permutations and dilution; disabled parts become identity / zero."""
    gen = as_generator(rng)
    s_in = sample_uniform_perm(c.n, gen) if permute_in else Permutation.identity(c.n)
    s_out = sample_uniform_perm(c.l, gen) if permute_out else Permutation.identity(c.l)
    d = sample_uniform_vec(c.l, c.q, gen) if dilute else (0,) * c.l
    return RandomizedCode(c, s_in, s_out, d)


def apply_randomized(rc: RandomizedCode, x: Sequence[int]) -> tuple:
    u = rc.base.encode(apply_perm(rc.sigma_in, tuple(x)))
    return rc.base.field.vec_add(apply_perm(rc.sigma_out, u), rc.dilution)


class AlphaTable(Mapping):
    """
    ``alpha(P, Q)`` for every input type ``P`` of length ``n`` and output
    type ``Q`` of length ``l``, as exact rationals.
    """

    def __init__(self, n: int, l: int, q: int, entries: Mapping):
        self.n, self.l, self.q = n, l, q
        self.in_types = enumerate_types(n, q)
        self.out_types = enumerate_types(l, q)
        self._entries = {
            (p, t): Fraction(entries.get((p, t), 0))
            for p in self.in_types
            for t in self.out_types
        }

    def __getitem__(self, key) -> Fraction:
        return self._entries[key]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        if isinstance(other, AlphaTable):
            return self._entries == other._entries
        return NotImplemented

    __hash__ = None

    def max_alpha(self) -> Fraction:
        """Largest entry over nonzero input types and all output types."""
        return max(v for (p, _), v in self._entries.items() if not p.is_zero_type)

    def total_probability_defects(self) -> dict:
        """Input types whose row fails ``sum_Q alpha(P,Q) * ambient(Q) == 1``."""
        amb = spectra.ambient_spectrum(self.l, self.q)
        bad = {}
        for p in self.in_types:
            s = sum(self._entries[(p, t)] * amb[t] for t in self.out_types)
            if s != 1:
                bad[p] = s
        return bad

    def as_array(self) -> np.ndarray:
        """Float matrix indexed by (input type position, output type position)."""
        return np.array(
            [[float(self._entries[(p, t)]) for t in self.out_types] for p in self.in_types]
        )

    def to_csv(self) -> str:
        lines = ["type_counts_in,type_counts_out,alpha_num,alpha_den"]
        for (p, t), v in self._entries.items():
            lines.append(f"{p.render()},{t.render()},{v.numerator},{v.denominator}")
        return "\n".join(lines) + "\n"


def expected_joint_counts(e: CodeEnsemble, budget: int | None = None) -> dict:
    """``E[#{x : type(x)=P, type(F(x))=Q}]`` by exact expectation over the ensemble."""
    check_budget("ensemble joint spectrum", e.support_size * e.q**e.n, budget)
    inputs = all_vectors(e.n, e.q)
    acc: dict = {}
    for code, w in e.support(budget=budget):
        outputs = (inputs @ code.as_array()) % e.q
        for key, c in _joint_counts(inputs, outputs, e.q).items():
            acc[key] = acc.get(key, 0) + w * c
    return {(TypeDist(a), TypeDist(b)): v for (a, b), v in acc.items()}


def alpha_from_counts(n: int, l: int, q: int, counts: Mapping) -> AlphaTable:
    """
    alpha(P, Q) = (counts / q**n) / (ambient_n(P) * ambient_l(Q))
                = counts * q**l / (multinomial(P) * multinomial(Q)).
    """
    entries = {
        (p, t): Fraction(c) * q**l / (multinomial(p.counts) * multinomial(t.counts))
        for (p, t), c in counts.items()
    }
    return AlphaTable(n, l, q, entries)


def uniform_alpha(n: int, l: int, q: int) -> AlphaTable:
    """Closed form for the uniform-matrix ensemble: one on every nonzero input type."""
    zero_in, zero_out = TypeDist.zero(n, q), TypeDist.zero(l, q)
    entries = {
        (p, t): Fraction(1) for p in enumerate_types(n, q) if not p.is_zero_type
        for t in enumerate_types(l, q)
    }
    entries[(zero_in, zero_out)] = Fraction(q**l)
    return AlphaTable(n, l, q, entries)


def alpha_of_ensemble(obj, method: str = "auto", budget: int | None = None) -> AlphaTable:
    """
    Alpha table of a code or ensemble.

    ``method="auto"`` uses the closed form for the uniform ensemble and
    exact expectation otherwise; ``"exact"`` always enumerates the
    ensemble support (subject to ``budget``).
    """
    e = as_ensemble(obj)
    if method not in ("auto", "exact", "closed-form"):
        raise UsageError(f"unknown method {method!r}")
    if e.kind == "uniform" and method in ("auto", "closed-form"):
        return uniform_alpha(e.n, e.l, e.q)
    if method == "closed-form":
        raise UsageError("closed form exists only for the uniform ensemble")
    return alpha_from_counts(e.n, e.l, e.q, expected_joint_counts(e, budget))


def goodness(obj, method: str = "auto", budget: int | None = None) -> tuple[Fraction, float]:
    """``(max_alpha, (1/n) ln max_alpha)`` over nonzero input types."""
    table = alpha_of_ensemble(obj, method=method, budget=budget)
    top = table.max_alpha()
    return top, math.log(top) / table.n


def code_output_law(e, x: Sequence[int], budget: int | None = None) -> dict:
    """``Pr{F(x) = y}`` for each reachable ``y``."""
    e = as_ensemble(e)
    law: dict = {}
    for code, w in e.support(budget=budget):
        y = code.encode(x)
        law[y] = law.get(y, 0) + w
    return law


def permuted_output_law(e, x: Sequence[int], budget: int | None = None) -> dict:
    """``Pr{sigma_out(F(sigma_in(x))) = y}`` over the ensemble and both permutations."""
    e = as_ensemble(e)
    check_budget(
        "permuted code law",
        e.support_size * math.factorial(e.n) * math.factorial(e.l),
        budget,
    )
    perms_in = list(all_permutations(e.n))
    perms_out = list(all_permutations(e.l))
    scale = Fraction(1, len(perms_in) * len(perms_out))
    law: dict = {}
    x = tuple(x)
    for code, w in e.support(budget=budget):
        for s_in in perms_in:
            u = code.encode(apply_perm(s_in, x))
            for s_out in perms_out:
                y = apply_perm(s_out, u)
                law[y] = law.get(y, 0) + w * scale
    return law


def randomization_space(e, budget: int | None = None) -> Iterator[tuple[RandomizedCode, Fraction]]:
    """Every realization of the fully randomized code with its probability."""
    e = as_ensemble(e)
    size = e.support_size * math.factorial(e.n) * math.factorial(e.l) * e.q**e.l
    check_budget("randomization space", size, budget)
    perms_in = list(all_permutations(e.n))
    perms_out = list(all_permutations(e.l))
    dilutions = list(product(range(e.q), repeat=e.l))
    scale = Fraction(1, len(perms_in) * len(perms_out) * len(dilutions))
    for code, w in e.support(budget=budget):
        for s_in in perms_in:
            for s_out in perms_out:
                for d in dilutions:
                    yield RandomizedCode(code, s_in, s_out, d), w * scale


def check_randomized_pairwise(e, x1, x2, y1, y2, budget: int | None = None) -> tuple[Fraction, Fraction]:
    """
    Exact ``Pr{Fhat(x1)=y1}`` and ``Pr{Fhat(x2)=y2 | Fhat(x1)=y1}`` by
    enumerating matrices, both permutations and the dilution.
    """
    x1, x2, y1, y2 = (tuple(v) for v in (x1, x2, y1, y2))
    if x1 == x2:
        raise UsageError("x1 and x2 must differ")
    p1 = Fraction(0)
    p12 = Fraction(0)
    for rc, w in randomization_space(e, budget):
        if apply_randomized(rc, x1) == y1:
            p1 += w
            if apply_randomized(rc, x2) == y2:
                p12 += w
    return p1, p12 / p1


def difference_type(a: Sequence[int], b: Sequence[int], q: int) -> TypeDist:
    """Type of ``b - a`` over GF(q)."""
    return type_of(tuple((y - x) % q for x, y in zip(a, b)), q)


def type_index_table(length: int, q: int) -> tuple[np.ndarray, list[TypeDist]]:
    """Position (in :func:`enumerate_types` order) of the type of every vector."""
    types = enumerate_types(length, q)
    pos = {t.counts: i for i, t in enumerate(types)}
    vecs = all_vectors(length, q)
    counts = np.stack([(vecs == a).sum(axis=1) for a in range(q)], axis=1)
    return np.array([pos[tuple(c)] for c in counts.tolist()], dtype=np.int64), types


def difference_type_matrix(length: int, q: int) -> np.ndarray:
    """``D[i, j]`` = type position of ``vec_j - vec_i`` for all pairs of vectors."""
    tidx, _ = type_index_table(length, q)
    vecs = all_vectors(length, q)
    w = index_weights(length, q)
    diff = (vecs[None, :, :] - vecs[:, None, :]) % q
    return tidx[diff @ w]
