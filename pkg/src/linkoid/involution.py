"""Fixed-point-free involutions on endpoint labels and the dihedral action.

Labels are one-indexed (``1..2n``). An :class:`Involution` stores the image of
every label; cycle notation such as ``"(1 4)(2 3)"`` parses and prints
losslessly::

    >>> s = Involution.parse("(1 4)(2 3)")
    >>> s(1), s.n, str(s)
    (4, 2, '(1 4)(2 3)')
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import InvalidInvolution, SizeMismatch, TooLarge

__all__ = [
    "Involution",
    "SegmentCyclePartition",
    "MAX_ENUMERATION",
    "double_factorial",
    "iter_hn",
    "enumerate_hn",
    "segment_cycles",
    "burnside_count",
    "order_of_product",
]

MAX_ENUMERATION = 10
"""Largest ``n`` accepted by :func:`enumerate_hn`."""

_CYCLE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Involution:
    """A fixed-point-free involution of ``{1, ..., 2n}``.

    Attributes:
        image: ``image[i - 1]`` is the partner of label ``i``.
    """

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", image)
        size = len(image)
        if size == 0 or size % 2:
            raise InvalidInvolution(f"an involution on 2n labels needs even positive size, got {size}")
        for i, j in enumerate(image, start=1):
            if not 1 <= j <= size:
                raise InvalidInvolution(f"label {j} outside 1..{size}")
            if j == i:
                raise InvalidInvolution(f"label {i} is fixed")
            if image[j - 1] != i:
                raise InvalidInvolution(f"{i} -> {j} -> {image[j - 1]} is not an involution")

    # construction -------------------------------------------------------------
    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]], n: int | None = None) -> Involution:
        """Build from transpositions; ``n`` defaults to half the largest label span."""
        pairs = [tuple(p) for p in pairs]
        labels = [x for p in pairs for x in p]
        for p in pairs:
            if len(p) != 2:
                raise InvalidInvolution(f"cycle {p} is not a transposition")
        size = 2 * n if n is not None else len(labels)
        if sorted(labels) != list(range(1, size + 1)):
            raise InvalidInvolution(f"transpositions must cover 1..{size} exactly once")
        image = [0] * size
        for a, b in pairs:
            image[a - 1] = b
            image[b - 1] = a
        return cls(tuple(image))

    @classmethod
    def parse(cls, text: str) -> Involution:
        """Parse cycle notation, ignoring whitespace and commas.

        Raises:
            InvalidInvolution: On malformed text or a non-involution.
        """
        stripped = re.sub(r"\s+", " ", text.strip())
        if not stripped:
            raise InvalidInvolution("empty cycle notation")
        remainder = _CYCLE.sub("", stripped).strip()
        if remainder:
            raise InvalidInvolution(f"unexpected text {remainder!r} in cycle notation")
        pairs = []
        for body in _CYCLE.findall(stripped):
            tokens = [t for t in re.split(r"[\s,]+", body.strip()) if t]
            try:
                pairs.append(tuple(int(t) for t in tokens))
            except ValueError as exc:
                raise InvalidInvolution(f"non-integer label in ({body})") from exc
        return cls.from_pairs(pairs)

    @classmethod
    def identity_pairing(cls, n: int) -> Involution:
        """``(1 2)(3 4)...(2n-1 2n)``."""
        return cls.from_pairs([(2 * i - 1, 2 * i) for i in range(1, n + 1)])

    # queries --------------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.image) // 2

    @property
    def size(self) -> int:
        return len(self.image)

    def __call__(self, label: int) -> int:
        return self.image[label - 1]

    def pairs(self) -> list[tuple[int, int]]:
        """Transpositions ``(i, j)`` with ``i < j`` in ascending order of ``i``."""
        return [(i, j) for i, j in enumerate(self.image, start=1) if i < j]

    def __str__(self) -> str:
        return "".join(f"({i} {j})" for i, j in self.pairs())

    def __repr__(self) -> str:
        return f"Involution.parse({str(self)!r})"

    def relabel(self, mapping: dict[int, int]) -> Involution:
        """Conjugate by a bijective relabelling of ``{1..2n}``."""
        return Involution.from_pairs([(mapping[i], mapping[j]) for i, j in self.pairs()])


def compose(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    """Image tuple of ``f ∘ g`` (apply ``g`` first)."""
    return tuple(f[g[i] - 1] for i in range(len(g)))


def _check_same(tau: Involution, sigma: Involution) -> None:
    if tau.size != sigma.size:
        raise SizeMismatch(f"involutions act on {tau.size} and {sigma.size} labels")


def double_factorial(n: int) -> int:
    """``(2n - 1)!!``, the number of fixed-point-free involutions of ``2n`` labels."""
    out = 1
    for k in range(1, 2 * n, 2):
        out *= k
    return out


def iter_hn(n: int) -> Iterator[Involution]:
    """Yield every fixed-point-free involution of ``{1..2n}`` lexicographically.

    The smallest unpaired label is paired first, with partners tried in
    increasing order. This is lexicographic in the image tuple.
    """
    if n < 1:
        raise ValueError("n must be positive")
    size = 2 * n
    image = [0] * size

    def rec() -> Iterator[Involution]:
        try:
            first = image.index(0)
        except ValueError:
            yield Involution(tuple(image))
            return
        for partner in range(first + 1, size):
            if image[partner] == 0:
                image[first] = partner + 1
                image[partner] = first + 1
                yield from rec()
                image[first] = 0
                image[partner] = 0

    yield from rec()


def enumerate_hn(n: int) -> list[Involution]:
    """All of ``H_n`` in deterministic lexicographic order.

    Raises:
        TooLarge: If ``n > 10``.
    """
    if n > MAX_ENUMERATION:
        raise TooLarge(f"|H_{n}| = {double_factorial(n)} exceeds the enumeration guard (n <= {MAX_ENUMERATION})")
    return list(iter_hn(n))


@dataclass(frozen=True)
class SegmentCyclePartition:
    """Orbits of ``<tau, sigma>`` on the endpoint labels.

    Attributes:
        orbits: Sorted tuples of labels, ordered by their smallest element.
    """

    orbits: tuple[tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return len(self.orbits)

    def __len__(self) -> int:
        return len(self.orbits)

    def orbit_of(self, label: int) -> tuple[int, ...]:
        for orbit in self.orbits:
            if label in orbit:
                return orbit
        raise KeyError(label)


def segment_cycles(tau: Involution, sigma: Involution) -> SegmentCyclePartition:
    """Orbits of the group generated by ``tau`` and ``sigma``.

    Each orbit is traced by alternating ``tau`` and ``sigma`` from its smallest
    label until the walk returns.

    Raises:
        SizeMismatch: If the involutions act on different label sets.
    """
    _check_same(tau, sigma)
    seen = [False] * (tau.size + 1)
    orbits = []
    for start in range(1, tau.size + 1):
        if seen[start]:
            continue
        orbit = []
        label = start
        while True:
            orbit.append(label)
            seen[label] = True
            other = tau(label)
            orbit.append(other)
            seen[other] = True
            label = sigma(other)
            if label == start:
                break
        orbits.append(tuple(sorted(orbit)))
    return SegmentCyclePartition(tuple(orbits))


def order_of_product(tau: Involution, sigma: Involution) -> int:
    """Order of ``tau ∘ sigma`` found by iterated composition (capped at ``2n``)."""
    _check_same(tau, sigma)
    product = compose(tau.image, sigma.image)
    identity = tuple(range(1, tau.size + 1))
    power = product
    for m in range(1, tau.size + 1):
        if power == identity:
            return m
        power = compose(product, power)
    raise AssertionError("order of a product of two involutions exceeded 2n")


def burnside_count(tau: Involution, sigma: Involution) -> int:
    """Number of segment cycles via Burnside's lemma on the dihedral group.

    With ``m`` the order of ``tau ∘ sigma``, the group consists of the
    rotations ``(tau sigma)^k`` and reflections ``sigma (tau sigma)^k`` for
    ``0 <= k < m``. The orbit count is the average number of fixed labels.
    """
    _check_same(tau, sigma)
    m = order_of_product(tau, sigma)
    rho = compose(tau.image, sigma.image)
    identity = tuple(range(1, tau.size + 1))
    total = 0
    power = identity
    for _ in range(m):
        reflection = compose(sigma.image, power)
        total += sum(1 for i, x in enumerate(power, start=1) if i == x)
        total += sum(1 for i, x in enumerate(reflection, start=1) if i == x)
        power = compose(rho, power)
    count, remainder = divmod(total, 2 * m)
    assert remainder == 0, "Burnside sum must be divisible by the group order"
    return count
