"""Latin squares, partial Latin squares and a few standard families."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator, Sequence

Triple = tuple[int, int, int]


class LatinError(ValueError):
    """A violated Latin property, with the offending line and symbol."""

    def __init__(self, kind: str, index: int, symbol: int, message: str | None = None):
        self.kind = kind
        self.index = index
        self.symbol = symbol
        super().__init__(message or f"symbol {symbol} repeated in {kind} {index}")


class LatinSquare:
    """An n x n array over {1..n}; rows, columns and symbols are 1-based."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[int]], *, check: bool = True):
        self.rows = tuple(tuple(int(x) for x in row) for row in rows)
        if check:
            _check_latin(self.rows)

    @property
    def order(self) -> int:
        return len(self.rows)

    def __getitem__(self, cell: tuple[int, int]) -> int:
        i, j = cell
        return self.rows[i - 1][j - 1]

    def triples(self) -> Iterator[Triple]:
        for i, row in enumerate(self.rows, 1):
            for j, s in enumerate(row, 1):
                yield (i, j, s)

    @classmethod
    def from_triples(cls, n: int, triples: Iterable[Triple]) -> "LatinSquare":
        grid = [[0] * n for _ in range(n)]
        for i, j, s in triples:
            if grid[i - 1][j - 1]:
                raise LatinError("cell", i, s, f"cell ({i},{j}) assigned twice")
            grid[i - 1][j - 1] = s
        return cls(grid)

    def transpose(self) -> "LatinSquare":
        return LatinSquare(list(zip(*self.rows)), check=False)

    def to_text(self) -> str:
        return f"{self.order}\n" + "".join(" ".join(map(str, r)) + "\n" for r in self.rows)

    @classmethod
    def from_text(cls, text: str) -> "LatinSquare":
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or len(lines[0]) != 1:
            raise ValueError("first line must hold the order n")
        n = int(lines[0][0])
        rows = [[int(x) for x in ln] for ln in lines[1:]]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"expected {n} rows of {n} entries")
        return cls(rows)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: str | Path) -> "LatinSquare":
        return cls.from_text(Path(path).read_text())

    def __eq__(self, other) -> bool:
        return isinstance(other, LatinSquare) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"LatinSquare(order={self.order})"


def _check_latin(rows) -> None:
    n = len(rows)
    if n == 0:
        raise ValueError("empty square")
    for i, row in enumerate(rows, 1):
        if len(row) != n:
            raise ValueError(f"row {i} has {len(row)} entries, expected {n}")
        for s in row:
            if not 1 <= s <= n:
                raise LatinError("row", i, s, f"symbol {s} out of range in row {i}")
    for i, row in enumerate(rows, 1):
        seen = set()
        for s in row:
            if s in seen:
                raise LatinError("row", i, s)
            seen.add(s)
    for j in range(n):
        seen = set()
        for i in range(n):
            s = rows[i][j]
            if s in seen:
                raise LatinError("column", j + 1, s)
            seen.add(s)


def validate(cells: Sequence[Sequence[int]]) -> LatinSquare:
    return LatinSquare(cells)


class PartialLatinSquare:
    """Sparse partial Latin square: only filled cells are stored."""

    def __init__(self, n: int, filled: dict[tuple[int, int], int] | None = None):
        self.n = n
        self.filled: dict[tuple[int, int], int] = {}
        self._row_syms: dict[tuple[int, int], int] = {}
        self._col_syms: dict[tuple[int, int], int] = {}
        for (i, j), s in (filled or {}).items():
            self.place(i, j, s)

    @property
    def order(self) -> int:
        return self.n

    def clashes(self, i: int, j: int, s: int) -> str | None:
        if not (1 <= i <= self.n and 1 <= j <= self.n and 1 <= s <= self.n):
            return f"triple {(i, j, s)} out of range"
        old = self.filled.get((i, j))
        if old is not None:
            return None if old == s else f"cell ({i},{j}) holds {old}, not {s}"
        if (i, s) in self._row_syms:
            return f"symbol {s} already in row {i}"
        if (j, s) in self._col_syms:
            return f"symbol {s} already in column {j}"
        return None

    def place(self, i: int, j: int, s: int) -> None:
        problem = self.clashes(i, j, s)
        if problem:
            raise LatinError("cell", i, s, problem)
        self.filled[(i, j)] = s
        self._row_syms[(i, s)] = j
        self._col_syms[(j, s)] = i

    def remove(self, i: int, j: int) -> None:
        s = self.filled.pop((i, j))
        del self._row_syms[(i, s)]
        del self._col_syms[(j, s)]

    def get(self, i: int, j: int) -> int | None:
        return self.filled.get((i, j))

    def triples(self) -> Iterator[Triple]:
        for (i, j), s in sorted(self.filled.items()):
            yield (i, j, s)

    def is_complete(self) -> bool:
        return len(self.filled) == self.n * self.n

    def to_square(self) -> LatinSquare:
        if not self.is_complete():
            raise ValueError(f"{self.n * self.n - len(self.filled)} cells still empty")
        return LatinSquare.from_triples(self.n, self.triples())

    def __len__(self) -> int:
        return len(self.filled)

    def __repr__(self) -> str:
        return f"PartialLatinSquare(order={self.n}, filled={len(self.filled)})"


def cyclic_square(n: int) -> LatinSquare:
    return LatinSquare([[(i + j) % n + 1 for j in range(n)] for i in range(n)], check=False)


def totally_symmetric_square(n: int) -> LatinSquare:
    """The table of ``x * y = -x - y`` over Z_n, relabelled to 1..n (0 becomes n)."""
    rows = []
    for i in range(1, n + 1):
        rows.append([(-(i % n) - (j % n)) % n or n for j in range(1, n + 1)])
    return LatinSquare(rows, check=False)


def direct_product(a: LatinSquare, b: LatinSquare) -> LatinSquare:
    """Product on pairs ``(x, y)`` flattened to ``(x - 1) * |b| + y``."""
    m = b.order
    n = a.order * m
    rows = [[0] * n for _ in range(n)]
    for a1, a2, sa in a.triples():
        for b1, b2, sb in b.triples():
            rows[(a1 - 1) * m + b1 - 1][(a2 - 1) * m + b2 - 1] = (sa - 1) * m + sb
    return LatinSquare(rows, check=False)


def subsquare_on(sq: LatinSquare, rows: Iterable[int], cols: Iterable[int]) -> PartialLatinSquare:
    rows, cols = sorted(set(rows)), sorted(set(cols))
    if len(rows) != len(cols):
        raise ValueError("row and column sets differ in size")
    symbols = {sq[i, j] for i in rows for j in cols}
    if len(symbols) != len(rows):
        raise LatinError(
            "subsquare", len(rows), len(symbols),
            f"{len(symbols)} symbols in a {len(rows)}x{len(rows)} submatrix",
        )
    return PartialLatinSquare(sq.order, {(i, j): sq[i, j] for i in rows for j in cols})
