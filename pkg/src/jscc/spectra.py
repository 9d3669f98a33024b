"""
Method-of-types machinery.

A type is keyed by its count vector, so spectra are finite maps from
hashable keys to exact :class:`~fractions.Fraction` masses.  Types are
iterated in the lexicographic order of their smallest representative
sequence, which puts the all-zero type first.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .algebra import as_generator, from_index
from .errors import DomainError, UsageError, check_budget

__all__ = [
    "TypeDist",
    "Spectrum",
    "JointSpectrum",
    "Conditionals",
    "type_of",
    "enumerate_types",
    "multinomial",
    "ambient_spectrum",
    "product_spectrum",
    "set_spectrum",
    "joint_set_spectrum",
    "function_spectrum",
    "marginals_and_conditionals",
    "total_variation",
]


@dataclass(frozen=True)
class TypeDist:
    """Empirical distribution of a length-``n`` sequence over ``q`` symbols."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 1 or any(c < 0 for c in counts):
            raise UsageError(f"invalid type counts {self.counts!r}")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def q(self) -> int:
        return len(self.counts)

    def prob(self, a: int) -> Fraction:
        return Fraction(self.counts[a], self.n)

    def probabilities(self) -> tuple:
        return tuple(Fraction(c, self.n) for c in self.counts)

    @property
    def is_zero_type(self) -> bool:
        """True for the type of the all-zero sequence."""
        return self.counts[0] == self.n

    @classmethod
    def zero(cls, n: int, q: int) -> "TypeDist":
        return cls((n,) + (0,) * (q - 1))

    def sort_key(self) -> tuple:
        return tuple(-c for c in self.counts)

    def __lt__(self, other: "TypeDist") -> bool:
        return (self.q, self.n, self.sort_key()) < (other.q, other.n, other.sort_key())

    def render(self) -> str:
        return "|".join(str(c) for c in self.counts)

    @classmethod
    def parse(cls, text: str) -> "TypeDist":
        return cls(tuple(int(c) for c in text.split("|")))

    def __repr__(self) -> str:
        return f"TypeDist({self.render()})"


def type_of(x: Sequence[int], q: int) -> TypeDist:
    if len(x) == 0:
        raise UsageError("type of an empty sequence is undefined")
    counts = [0] * q
    for a in x:
        a = int(a)
        if not 0 <= a < q:
            raise UsageError(f"symbol {a} outside alphabet of size {q}")
        counts[a] += 1
    return TypeDist(tuple(counts))


def _compositions(n: int, q: int) -> Iterator[tuple]:
    if q == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, q - 1):
            yield (first,) + rest


def enumerate_types(n: int, q: int) -> list[TypeDist]:
    """All ``C(n+q-1, q-1)`` types of length-``n`` sequences over ``q`` symbols."""
    if n < 1 or q < 2:
        raise UsageError(f"need n >= 1 and q >= 2, got n={n}, q={q}")
    return [TypeDist(c) for c in _compositions(n, q)]


def multinomial(counts: Sequence[int]) -> int:
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def _type_codes(vecs: np.ndarray, q: int) -> np.ndarray:
    """Integer code of each row's type; equal codes iff equal types."""
    n = vecs.shape[1]
    counts = np.stack([(vecs == a).sum(axis=1) for a in range(q)], axis=1)
    weights = (n + 1) ** np.arange(q - 1, -1, -1, dtype=np.int64)
    return counts @ weights, counts


class Spectrum(Mapping):
    """Distribution over types; missing types have mass zero."""

    def __init__(self, mass: Mapping[TypeDist, Fraction]):
        self._mass = {k: v for k, v in mass.items() if v != 0}

    def __getitem__(self, key: TypeDist):
        return self._mass.get(key, Fraction(0))

    def __iter__(self):
        return iter(sorted(self._mass))

    def __len__(self) -> int:
        return len(self._mass)

    def __contains__(self, key) -> bool:
        return key in self._mass

    def __eq__(self, other) -> bool:
        if isinstance(other, Spectrum):
            return self._mass == other._mass
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._mass.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k.render()}: {v}" for k, v in self.items())
        return f"Spectrum({{{body}}})"

    def total(self):
        return sum(self._mass.values(), Fraction(0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["type_counts", "mass_num", "mass_den"])
        for t, m in self.items():
            m = Fraction(m)
            w.writerow([t.render(), m.numerator, m.denominator])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Spectrum":
        rows = csv.DictReader(io.StringIO(text))
        return cls(
            {
                TypeDist.parse(r["type_counts"]): Fraction(
                    int(r["mass_num"]), int(r["mass_den"])
                )
                for r in rows
            }
        )


class JointSpectrum(Mapping):
    """
    Distribution over pairs of types.

    ``standard_error`` is only set for sampled estimates and maps each
    pair to the binomial standard error of its mass.
    """

    def __init__(self, mass: Mapping[tuple, Fraction], standard_error=None):
        self._mass = {k: v for k, v in mass.items() if v != 0}
        self.standard_error = standard_error

    def __getitem__(self, key):
        return self._mass.get(key, Fraction(0))

    def __iter__(self):
        return iter(sorted(self._mass, key=lambda pq: (pq[0], pq[1])))

    def __len__(self) -> int:
        return len(self._mass)

    def __contains__(self, key) -> bool:
        return key in self._mass

    def __eq__(self, other) -> bool:
        if isinstance(other, JointSpectrum):
            return self._mass == other._mass
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._mass.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"({p.render()}, {q.render()}): {v}" for (p, q), v in self.items())
        return f"JointSpectrum({{{body}}})"

    def total(self):
        return sum(self._mass.values(), Fraction(0))

    def marginal_in(self) -> Spectrum:
        acc: dict = {}
        for (p, _), v in self._mass.items():
            acc[p] = acc.get(p, 0) + v
        return Spectrum(acc)

    def marginal_out(self) -> Spectrum:
        acc: dict = {}
        for (_, q), v in self._mass.items():
            acc[q] = acc.get(q, 0) + v
        return Spectrum(acc)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["type_counts_in", "type_counts_out", "mass_num", "mass_den"])
        for (p, q), m in self.items():
            m = Fraction(m)
            w.writerow([p.render(), q.render(), m.numerator, m.denominator])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "JointSpectrum":
        rows = csv.DictReader(io.StringIO(text))
        return cls(
            {
                (TypeDist.parse(r["type_counts_in"]), TypeDist.parse(r["type_counts_out"])):
                Fraction(int(r["mass_num"]), int(r["mass_den"]))
                for r in rows
            }
        )


def ambient_spectrum(n: int, q: int) -> Spectrum:
    """Spectrum of the whole space GF(q)^n: multinomial(n; P) / q**n."""
    if n < 1:
        raise UsageError("n must be >= 1")
    total = q**n
    return Spectrum({t: Fraction(multinomial(t.counts), total) for t in enumerate_types(n, q)})


def product_spectrum(n: int, q_in: int, l: int, q_out: int) -> JointSpectrum:
    """Joint spectrum of the product set GF(q_in)^n x GF(q_out)^l."""
    a = ambient_spectrum(n, q_in)
    b = ambient_spectrum(l, q_out)
    return JointSpectrum({(p, q): a[p] * b[q] for p in a for q in b})


def set_spectrum(A: Iterable[Sequence[int]], q: int) -> Spectrum:
    counts: Counter = Counter()
    length = None
    size = 0
    for x in A:
        if length is None:
            length = len(x)
        elif len(x) != length:
            raise UsageError("set elements must share one length")
        counts[type_of(x, q)] += 1
        size += 1
    if size == 0:
        raise UsageError("spectrum of an empty set is undefined")
    return Spectrum({t: Fraction(c, size) for t, c in counts.items()})


def joint_set_spectrum(B: Iterable[tuple], q_in: int, q_out: int | None = None) -> JointSpectrum:
    if q_out is None:
        q_out = q_in
    counts: Counter = Counter()
    shape = None
    size = 0
    for x, y in B:
        if shape is None:
            shape = (len(x), len(y))
        elif (len(x), len(y)) != shape:
            raise UsageError("pair elements must share one shape")
        counts[(type_of(x, q_in), type_of(y, q_out))] += 1
        size += 1
    if size == 0:
        raise UsageError("spectrum of an empty set is undefined")
    return JointSpectrum({k: Fraction(c, size) for k, c in counts.items()})


def function_spectrum(
    f: Callable[[tuple], Sequence[int]],
    n: int,
    q: int,
    q_out: int | None = None,
    mode: str = "exact",
    trials: int = 100_000,
    rng=None,
    budget: int | None = None,
) -> JointSpectrum:
    """
    Joint spectrum of the graph ``{(x, f(x))}`` of ``f: GF(q)^n -> GF(q_out)^l``.

    ``mode="exact"`` enumerates all ``q**n`` inputs and refuses to run past
    ``budget``; it never falls back to sampling.  ``mode="sampled"`` draws
    ``trials`` uniform inputs and attaches per-cell standard errors.
    """
    if q_out is None:
        q_out = q
    if mode == "exact":
        check_budget("function spectrum", q**n, budget)
        return joint_set_spectrum(
            ((x, tuple(f(x))) for x in (from_index(i, n, q) for i in range(q**n))),
            q,
            q_out,
        )
    if mode != "sampled":
        raise UsageError(f"unknown mode {mode!r}")
    if trials < 1:
        raise UsageError("trials must be >= 1")
    gen = as_generator(rng)
    xs = gen.integers(0, q, size=(trials, n))
    counts: Counter = Counter()
    for row in xs:
        x = tuple(int(a) for a in row)
        counts[(type_of(x, q), type_of(tuple(f(x)), q_out))] += 1
    mass = {k: Fraction(c, trials) for k, c in counts.items()}
    stderr = {k: math.sqrt(float(v) * (1 - float(v)) / trials) for k, v in mass.items()}
    return JointSpectrum(mass, standard_error=stderr)


def array_function_spectrum(inputs: np.ndarray, outputs: np.ndarray, q: int, q_out: int | None = None) -> JointSpectrum:
    """Joint spectrum of a tabulated function given as aligned row arrays."""
    if q_out is None:
        q_out = q
    if len(inputs) == 0 or len(inputs) != len(outputs):
        raise UsageError("inputs and outputs must be non-empty and aligned")
    _, cin = _type_codes(np.asarray(inputs), q)
    _, cout = _type_codes(np.asarray(outputs), q_out)
    keys = Counter(zip(map(tuple, cin.tolist()), map(tuple, cout.tolist())))
    size = len(inputs)
    return JointSpectrum({(TypeDist(a), TypeDist(b)): Fraction(c, size) for (a, b), c in keys.items()})


class Conditionals:
    """Conditional spectra of a joint spectrum, defined only off zero-mass conditions."""

    def __init__(self, joint: JointSpectrum, marg_in: Spectrum, marg_out: Spectrum):
        self._joint = joint
        self._in = marg_in
        self._out = marg_out

    def forward(self, out_type: TypeDist, in_type: TypeDist) -> Fraction:
        """S_{out|in}(out_type | in_type)."""
        denom = self._in[in_type]
        if denom == 0:
            raise DomainError(f"conditional undefined: input type {in_type.render()} has zero mass")
        return self._joint[(in_type, out_type)] / denom

    def backward(self, in_type: TypeDist, out_type: TypeDist) -> Fraction:
        """S_{in|out}(in_type | out_type)."""
        denom = self._out[out_type]
        if denom == 0:
            raise DomainError(f"conditional undefined: output type {out_type.render()} has zero mass")
        return self._joint[(in_type, out_type)] / denom


def marginals_and_conditionals(J: JointSpectrum) -> tuple[Spectrum, Spectrum, Conditionals]:
    if J.total() != 1:
        raise UsageError("joint spectrum masses must sum to 1")
    a, b = J.marginal_in(), J.marginal_out()
    return a, b, Conditionals(J, a, b)


def total_variation(a: Mapping, b: Mapping) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(float(a.get(k, 0)) - float(b.get(k, 0))) for k in keys)
