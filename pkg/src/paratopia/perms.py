"""Permutations of {1..n}, cycle structures and their canonical forms.

Permutations act on the right: ``p * q`` first applies ``p`` and then ``q``,
so ``i ** (p * q) == (i ** p) ** q`` in the usual right-action notation.
"""

from __future__ import annotations

import re
from functools import reduce
from math import gcd
from typing import Iterable, Iterator, Sequence


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


class CycleStructure:
    """Multiset of cycle lengths, stored as ``((length, multiplicity), ...)``.

    Lengths are strictly decreasing.  Text form joins terms with ``.``, each
    term being ``c`` or ``c^m``, e.g. ``"4^2.2.1^6"``.
    """

    __slots__ = ("parts", "degree")

    def __init__(self, parts: Iterable[tuple[int, int]]):
        parts = tuple((int(c), int(m)) for c, m in parts)
        for k, (c, m) in enumerate(parts):
            if c < 1 or m < 1:
                raise ValueError(f"cycle lengths and multiplicities must be positive: {parts}")
            if k and parts[k - 1][0] <= c:
                raise ValueError(f"cycle lengths must be strictly decreasing: {parts}")
        if not parts:
            raise ValueError("empty cycle structure")
        self.parts = parts
        self.degree = sum(c * m for c, m in parts)

    @classmethod
    def from_lengths(cls, lengths: Iterable[int]) -> "CycleStructure":
        counts: dict[int, int] = {}
        for c in lengths:
            counts[c] = counts.get(c, 0) + 1
        return cls(sorted(counts.items(), reverse=True))

    @classmethod
    def parse(cls, text: str) -> "CycleStructure":
        text = text.strip()
        if not text:
            raise ValueError("empty cycle structure")
        parts = []
        for term in text.split("."):
            m = re.fullmatch(r"\s*(\d+)\s*(?:\^\s*(\d+))?\s*", term)
            if m is None:
                raise ValueError(f"bad cycle-structure term {term!r} in {text!r}")
            parts.append((int(m.group(1)), int(m.group(2) or 1)))
        return cls(parts)

    def lengths(self) -> list[int]:
        """Cycle lengths with repetition, longest first."""
        return [c for c, m in self.parts for _ in range(m)]

    def multiplicity(self, length: int) -> int:
        for c, m in self.parts:
            if c == length:
                return m
        return 0

    @property
    def fixed_points(self) -> int:
        return self.multiplicity(1)

    @property
    def order(self) -> int:
        return lcm(*(c for c, _ in self.parts))

    def restrict(self, keep) -> "CycleStructure | None":
        """Sub-structure on the cycles whose length satisfies ``keep``."""
        parts = [(c, m) for c, m in self.parts if keep(c)]
        return CycleStructure(parts) if parts else None

    def __str__(self) -> str:
        return ".".join(str(c) if m == 1 else f"{c}^{m}" for c, m in self.parts)

    def __repr__(self) -> str:
        return f"CycleStructure({str(self)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, CycleStructure) and self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def _key(self):
        return self.lengths()

    def __lt__(self, other: "CycleStructure") -> bool:
        # Larger (descending-lex) structures sort first.
        return self._key() > other._key()


class Permutation:
    """Bijection of {1..n} stored as its image table."""

    __slots__ = ("_img", "_cycles")

    def __init__(self, images: Sequence[int]):
        img = tuple(int(x) for x in images)
        n = len(img)
        if n == 0:
            raise ValueError("permutation degree must be positive")
        if sorted(img) != list(range(1, n + 1)):
            raise ValueError(f"{list(img)} is not a permutation of 1..{n}")
        self._img = img
        self._cycles = None

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(1, n + 1))
        seen = set()
        for cyc in cycles:
            for k, a in enumerate(cyc):
                if not 1 <= a <= n or a in seen:
                    raise ValueError(f"bad cycle {tuple(cyc)} for degree {n}")
                seen.add(a)
                img[a - 1] = cyc[(k + 1) % len(cyc)]
        return cls(img)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Permutation":
        """Parse one-line form ``"2 3 1"`` or cycle form ``"(1 2 3)(4)"``."""
        text = text.strip()
        if text.startswith("("):
            cycles = [
                [int(x) for x in re.split(r"[\s,]+", body.strip()) if x]
                for body in re.findall(r"\(([^()]*)\)", text)
            ]
            if re.sub(r"\([^()]*\)", "", text).strip():
                raise ValueError(f"bad cycle notation {text!r}")
            points = [a for c in cycles for a in c]
            degree = n if n is not None else (max(points) if points else 0)
            return cls.from_cycles(degree, [c for c in cycles if c])
        images = [int(x) for x in re.split(r"[\s,]+", text) if x]
        if n is not None and len(images) != n:
            raise ValueError(f"expected {n} images, got {len(images)}")
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def images(self) -> tuple[int, ...]:
        return self._img

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= len(self._img):
            raise IndexError(f"point {i} out of range 1..{len(self._img)}")
        return self._img[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __pow__(self, k: int) -> "Permutation":
        img = [0] * self.degree
        for cyc in self.cycles():
            c = len(cyc)
            for pos, a in enumerate(cyc):
                img[a - 1] = cyc[(pos + k) % c]
        return Permutation(img)

    def inverse(self) -> "Permutation":
        img = [0] * self.degree
        for i, a in enumerate(self._img, 1):
            img[a - 1] = i
        return Permutation(img)

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles (fixed points included), each starting at its least point."""
        if self._cycles is None:
            seen = [False] * (self.degree + 1)
            out = []
            for i in range(1, self.degree + 1):
                if seen[i]:
                    continue
                cyc = []
                j = i
                while not seen[j]:
                    seen[j] = True
                    cyc.append(j)
                    j = self._img[j - 1]
                out.append(tuple(cyc))
            self._cycles = out
        return self._cycles

    def cycle_structure(self) -> CycleStructure:
        return CycleStructure.from_lengths(len(c) for c in self.cycles())

    def cycle_length_of(self, i: int) -> int:
        return cycle_length_of(self, i)

    def order(self) -> int:
        return lcm(*(len(c) for c in self.cycles()))

    def fixed_points(self) -> list[int]:
        return [i for i, a in enumerate(self._img, 1) if i == a]

    def is_identity(self) -> bool:
        return all(i == a for i, a in enumerate(self._img, 1))

    def cycle_string(self) -> str:
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles())

    def __str__(self) -> str:
        return " ".join(map(str, self._img))

    def __repr__(self) -> str:
        return f"Permutation({self.cycle_string()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._img == other._img

    def __hash__(self) -> int:
        return hash(self._img)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """The permutation ``i -> (i p) q``."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} != {q.degree}")
    qi = q.images
    return Permutation([qi[a - 1] for a in p.images])


def cycle_structure(p: Permutation) -> CycleStructure:
    return p.cycle_structure()


def cycle_length_of(p: Permutation, i: int) -> int:
    if not 1 <= i <= p.degree:
        raise ValueError(f"point {i} out of range 1..{p.degree}")
    length, j = 1, p[i]
    while j != i:
        j = p[j]
        length += 1
    return length


def canonical_cycles(cs: CycleStructure) -> list[tuple[int, ...]]:
    out, start = [], 1
    for c in cs.lengths():
        out.append(tuple(range(start, start + c)))
        start += c
    return out


def canonical_permutation(cs: CycleStructure | str) -> Permutation:
    """Consecutive-integer cycles, longest first, leading symbols increasing."""
    if isinstance(cs, str):
        cs = CycleStructure.parse(cs)
    return Permutation.from_cycles(cs.degree, canonical_cycles(cs))


def conjugator(p: Permutation, q: Permutation) -> Permutation:
    """Some ``nu`` with ``nu^-1 * p * nu == q``; ``p`` and ``q`` must be conjugate."""
    if p.degree != q.degree:
        raise ValueError("degree mismatch")
    by_len: dict[int, list[tuple[int, ...]]] = {}
    for cyc in q.cycles():
        by_len.setdefault(len(cyc), []).append(cyc)
    img = [0] * p.degree
    for cyc in p.cycles():
        bucket = by_len.get(len(cyc))
        if not bucket:
            raise ValueError(f"{p!r} and {q!r} are not conjugate")
        target = bucket.pop(0)
        for a, b in zip(cyc, target):
            img[a - 1] = b
    if any(by_len.values()):
        raise ValueError(f"{p!r} and {q!r} are not conjugate")
    return Permutation(img)


def partitions(n: int) -> Iterator[CycleStructure]:
    """Every partition of ``n`` once, in descending-lexicographic order."""
    if n < 1:
        raise ValueError("n must be positive")

    def rec(remaining: int, largest: int) -> Iterator[list[int]]:
        if remaining == 0:
            yield []
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in rec(remaining - first, first):
                yield [first] + rest

    for parts in rec(n, n):
        yield CycleStructure.from_lengths(parts)
