"""
Arithmetic over prime fields GF(q), fixed-length vectors and permutations.

Vectors are plain tuples of ints in ``[0, q)``; the modulus lives on a
:class:`GF` context object so that vectors stay small and hashable.  The
same context doubles as the additive group Z_q.

Sequences are ordered lexicographically, first coordinate most
significant, and :meth:`GF.index` maps that order onto ``range(q**n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .errors import UsageError

Vec = tuple  # tuple[int, ...]


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def to_index(vec: Sequence[int], base: int) -> int:
    """Position of ``vec`` in the lexicographic order of ``base**len(vec)``."""
    idx = 0
    for a in vec:
        idx = idx * base + int(a)
    return idx


def from_index(idx: int, length: int, base: int) -> Vec:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        idx, out[i] = divmod(idx, base)
    return tuple(out)


@lru_cache(maxsize=64)
def _all_vectors(length: int, base: int) -> np.ndarray:
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((base,) * length).reshape(length, -1).T
    grids.setflags(write=False)
    return grids


def all_vectors(length: int, base: int) -> np.ndarray:
    """All ``base**length`` sequences as rows, in lexicographic order (read-only)."""
    return _all_vectors(length, base)


def index_weights(length: int, base: int) -> np.ndarray:
    """Weights ``w`` with ``vecs @ w`` equal to the lexicographic index."""
    return base ** np.arange(length - 1, -1, -1, dtype=np.int64)


class GF:
    """
    Prime field GF(q).

    Parameters
    ----------
    q : int
        Field size.  Must be prime; composite moduli are rejected.
    """

    def __init__(self, q: int):
        q = int(q)
        if not is_prime(q):
            raise UsageError(f"GF(q) needs a prime q, got {q}")
        self.q = q

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    # scalars

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise UsageError("zero has no multiplicative inverse")
        return pow(int(a), self.q - 2, self.q)

    # vectors

    def vec(self, values: Sequence[int]) -> Vec:
        """Validate ``values`` as a vector over this field."""
        out = tuple(int(a) for a in values)
        if not out:
            raise UsageError("vectors must have positive length")
        for a in out:
            if not 0 <= a < self.q:
                raise UsageError(f"element {a} is not in GF({self.q})")
        return out

    def zeros(self, n: int) -> Vec:
        return (0,) * n

    def _check_pair(self, a: Vec, b: Vec) -> None:
        if len(a) != len(b):
            raise UsageError(f"length mismatch: {len(a)} != {len(b)}")

    def vec_add(self, a: Vec, b: Vec) -> Vec:
        self._check_pair(a, b)
        q = self.q
        return tuple((x + y) % q for x, y in zip(a, b))

    def vec_sub(self, a: Vec, b: Vec) -> Vec:
        self._check_pair(a, b)
        q = self.q
        return tuple((x - y) % q for x, y in zip(a, b))

    def vec_neg(self, a: Vec) -> Vec:
        return tuple((-x) % self.q for x in a)

    def vec_scale(self, c: int, a: Vec) -> Vec:
        return tuple((c * x) % self.q for x in a)

    def vec_matmul(self, x: Vec, G: Sequence[Sequence[int]]) -> Vec:
        """Row vector times matrix, ``x G``."""
        if len(x) != len(G):
            raise UsageError(f"vector length {len(x)} != matrix rows {len(G)}")
        cols = len(G[0]) if G else 0
        q = self.q
        return tuple(
            sum(xi * row[j] for xi, row in zip(x, G)) % q for j in range(cols)
        )

    def vectors(self, n: int) -> Iterator[Vec]:
        """Iterate over all of GF(q)^n in lexicographic order."""
        return product(range(self.q), repeat=n)

    def index(self, vec: Sequence[int]) -> int:
        return to_index(vec, self.q)

    def unindex(self, idx: int, n: int) -> Vec:
        return from_index(idx, n, self.q)


@dataclass(frozen=True)
class Permutation:
    """
    A bijection on ``range(n)`` acting on sequences by
    ``apply(a)[i] = a[image[i]]``.
    """

    image: tuple

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if not image or sorted(image) != list(range(len(image))):
            raise UsageError(f"not a permutation of range(n): {self.image!r}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.image)

    def __call__(self, a: Sequence) -> tuple:
        return apply_perm(self, a)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.image)
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """The permutation applying ``other`` first, then ``self``."""
        if len(other) != len(self):
            raise UsageError("cannot compose permutations of different sizes")
        return Permutation(tuple(other.image[j] for j in self.image))

    @property
    def is_identity(self) -> bool:
        return self.image == tuple(range(len(self.image)))


def apply_perm(p: Permutation, a: Sequence) -> tuple:
    if len(p) != len(a):
        raise UsageError(f"permutation size {len(p)} != sequence length {len(a)}")
    return tuple(a[j] for j in p.image)


def all_permutations(n: int) -> Iterator[Permutation]:
    from itertools import permutations

    for image in permutations(range(n)):
        yield Permutation(image)


def make_rng(seed: int | None, *stream: int) -> np.random.Generator:
    """
    Generator for the substream ``(seed, *stream)``.

    Every random draw in the package flows from one master seed; trial
    blocks and other independent consumers take a counter-indexed
    substream so that their draws do not depend on scheduling.
    """
    if seed is None:
        return np.random.default_rng()
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(s) for s in stream)]
    return np.random.default_rng(np.random.SeedSequence(key))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(rng)


def sample_uniform_perm(n: int, rng) -> Permutation:
    if n < 1:
        raise UsageError("n must be >= 1")
    # numpy's permutation is a Fisher-Yates shuffle.
    return Permutation(tuple(int(i) for i in as_generator(rng).permutation(n)))


def sample_uniform_vec(n: int, q: int, rng) -> Vec:
    if n < 1:
        raise UsageError("n must be >= 1")
    return tuple(int(a) for a in as_generator(rng).integers(0, q, size=n))
