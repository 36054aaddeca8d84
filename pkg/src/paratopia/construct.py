"""Explicit witness builders.

Most builders describe a square by a *contour*: one filled cell per cell
orbit of a paratopism with ``delta = (12)``.  Closing every entry under the
paratopism recovers the full square.  Symbols are written with the usual
labels: ``t_k`` is the first point of the k-th cycle of the relevant
permutation and ``inf_k`` (``∞_k``) is its k-th fixed point, fixed points
coming last.

Every builder checks its output with :func:`is_autoparatopism` and raises
:class:`ConstructionError` instead of returning a bad square.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .latin import LatinError, LatinSquare, PartialLatinSquare, cyclic_square, direct_product
from .latin import totally_symmetric_square
from .paratopism import (
    S3,
    Paratopism,
    act_square,
    is_autoparatopism,
    standard_form_with_conjugator,
    triple_map,
)
from .perms import CycleStructure, Permutation

Cell = tuple[int, int]


class ContourError(ValueError):
    """Closing a contour under its paratopism produced a clash or left gaps."""


class ConstructionError(ValueError):
    """A builder was called outside its hypothesis, or its output failed verification."""


def cell_orbits(sigma: Paratopism) -> list[tuple[Cell, ...]]:
    """Orbits of the cells under ``(i, j) -> (j beta, i alpha)`` for ``delta = (12)``."""
    if sigma.delta is not S3.T12:
        raise ValueError("cell orbits are defined here for delta = (12) only")
    n = sigma.n
    a, b = sigma.alpha, sigma.beta
    seen: set[Cell] = set()
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if (i, j) in seen:
                continue
            orb, c = [], (i, j)
            while c not in seen:
                seen.add(c)
                orb.append(c)
                c = (b[c[1]], a[c[0]])
            out.append(tuple(orb))
    return out


@dataclass
class Contour:
    sigma: Paratopism
    entries: PartialLatinSquare

    @classmethod
    def from_dict(cls, sigma: Paratopism, cells: dict[Cell, int]) -> "Contour":
        return cls(sigma, PartialLatinSquare(sigma.n, cells))

    def check_one_per_orbit(self) -> None:
        for orb in cell_orbits(self.sigma):
            hits = [c for c in orb if self.entries.get(*c) is not None]
            if len(hits) != 1:
                raise ContourError(f"orbit of {orb[0]} holds {len(hits)} contour entries")


def close_entries(sigma: Paratopism, entries, n: Optional[int] = None) -> PartialLatinSquare:
    """Close a set of triples under ``sigma``; raise :class:`ContourError` on any clash."""
    f = triple_map(sigma)
    board = PartialLatinSquare(sigma.n)
    for t in entries:
        cur = t
        while True:
            i, j, s = cur
            old = board.get(i, j)
            if old == s:
                break
            if old is not None:
                raise ContourError(f"cell ({i},{j}) forced to hold both {old} and {s}")
            try:
                board.place(i, j, s)
            except LatinError as exc:
                raise ContourError(str(exc)) from None
            cur = f(cur)
    return board


def expand_contour(contour: Contour, *, extra=(), strict: bool = True) -> LatinSquare:
    """The square obtained by closing every contour entry under the paratopism.

    ``extra`` holds further triples (for example a subsquare built elsewhere)
    that are closed along with the contour.  With ``strict`` the contour must
    hold exactly one cell from every orbit not already covered by ``extra``.
    """
    sigma = contour.sigma
    if strict and not extra:
        contour.check_one_per_orbit()
    board = close_entries(sigma, list(extra) + list(contour.entries.triples()))
    if not board.is_complete():
        raise ContourError(f"{sigma.n ** 2 - len(board)} cells not reached by the contour")
    sq = board.to_square()
    if not is_autoparatopism(sigma, sq):
        raise ContourError("closure is not fixed by sigma")
    return sq


def _verified(sigma: Paratopism, sq: LatinSquare) -> tuple[Paratopism, LatinSquare]:
    if not is_autoparatopism(sigma, sq):
        raise ConstructionError("built square is not fixed by its paratopism")
    return sigma, sq


def _cycles_perm(n: int, lengths) -> Permutation:
    """Consecutive-integer cycles of the given lengths, in the given order."""
    cycles, start = [], 1
    for d in lengths:
        cycles.append(tuple(range(start, start + d)))
        start += d
    return Permutation.from_cycles(n, cycles)


def _fixed_block(n: int, f: int) -> list[tuple[int, int, int]]:
    """The cyclic table on the last ``f`` points of ``[n]``: a symmetric subquasigroup."""
    base = n - f
    return [(base + k, base + l, base + (k + l - 2) % f + 1)
            for k in range(1, f + 1) for l in range(1, f + 1)]


# --- gamma = 2^r 1^f with beta trivial: symbol-cycle surgery on C_n ------------------


@dataclass(frozen=True)
class SymbolCycleSection:
    cells: tuple[Cell, ...]

    @property
    def endpoints(self) -> tuple[Cell, Cell]:
        return self.cells[0], self.cells[-1]


def _symbol_cycle(grid, start: Cell, pair) -> frozenset:
    n = len(grid)
    seen, stack = {start}, [start]
    while stack:
        i, j = stack.pop()
        for c in [(i, k) for k in range(1, n + 1)] + [(k, j) for k in range(1, n + 1)]:
            if c not in seen and grid[c[0] - 1][c[1] - 1] in pair:
                seen.add(c)
                stack.append(c)
    return frozenset(seen)


def section_from(grid, pivot: Cell, pair) -> SymbolCycleSection:
    """Walk from a pivot, alternating row and column steps, to the next pivot."""
    n = len(grid)
    cells, cur, horizontal = [pivot], pivot, True
    while True:
        i, j = cur
        if horizontal:
            cur = next((i, k) for k in range(1, n + 1) if k != j and grid[i - 1][k - 1] in pair)
        else:
            cur = next((k, j) for k in range(1, n + 1) if k != i and grid[k - 1][j - 1] in pair)
        cells.append(cur)
        horizontal = not horizontal
        if cur[0] == cur[1]:
            return SymbolCycleSection(tuple(cells))


def _surgery(grid, n: int, a: int) -> None:
    s, t = a, n - a
    pair = (s, t)
    orig = [row[:] for row in grid]

    def switch(cells):
        for i, j in cells:
            grid[i - 1][j - 1] = t if orig[i - 1][j - 1] == s else s

    done: set[Cell] = set()
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if (i, j) in done or orig[i - 1][j - 1] not in pair:
                continue
            cyc = _symbol_cycle(orig, (i, j), pair)
            done |= cyc
            if any(x == y for x, y in cyc):
                continue
            mirror = frozenset((y, x) for x, y in cyc)
            done |= mirror
            # Of each transposed pair, switch the one holding the least cell.
            switch(cyc if min(cyc) < min(mirror) else mirror)
    pivots = []
    if n % 2:
        i = next(i for i in range(1, n + 1) if (2 * i - 1 - a) % n == 0)
        sec = section_from(orig, (i, i), pair)
        switch(sec.cells)
        pivots += sec.endpoints
        grid[n - i][i - 1] = a
        grid[i - 1][n - i] = n - a
    else:
        if a % 2 == 0:
            return
        i0 = (a + 1) // 2
        for p in (i0, n - (a - 1) // 2):
            sec = section_from(orig, (p, p), pair)
            switch(sec.cells)
            pivots += sec.endpoints
        grid[i0 - 1][n - i0] = n - a
        grid[n - i0][i0 - 1] = a
        p, q = (n + a + 1) // 2, (n - a + 1) // 2
        lo, hi = (a, n - a) if n % 4 == 0 else (n - a, a)
        grid[p - 1][q - 1] = lo
        grid[q - 1][p - 1] = hi
    for i, j in pivots:
        grid[i - 1][j - 1] = n


def build_betaid12(r: int, f: int) -> tuple[Paratopism, LatinSquare]:
    """``(e, e, (1, n-1)(2, n-2)...(r, n-r); (12))`` with a square made by surgery on C_n."""
    if f < 1 or r < 0:
        raise ConstructionError("surgery needs r >= 0 and at least one fixed point")
    n = 2 * r + f
    grid = [list(row) for row in cyclic_square(n).rows]
    for a in range(1, r + 1):
        _surgery(grid, n, a)
    gamma = Permutation.from_cycles(n, [(a, n - a) for a in range(1, r + 1)])
    e = Permutation.identity(n)
    try:
        sq = LatinSquare(grid)
    except LatinError as exc:
        raise ConstructionError(f"surgery broke the Latin property: {exc}") from None
    return _verified(Paratopism(e, e, gamma, S3.T12), sq)


# --- beta a single n-cycle ----------------------------------------------------------


def single_cycle_admissible(n: int, gamma_cs: CycleStructure) -> bool:
    lengths = gamma_cs.lengths()
    return all((2 * n) % d == 0 for d in lengths) and sum(d % 2 for d in lengths) <= 1


def build_single_cycle_12(n: int, gamma_cs: CycleStructure | str) -> tuple[Paratopism, LatinSquare]:
    """Witness for ``(e, (1 2 .. n), gamma; (12))``.

    ``gamma`` has consecutive cycles with any odd cycle first, so its cycle
    order can differ from canonical order.
    """
    if isinstance(gamma_cs, str):
        gamma_cs = CycleStructure.parse(gamma_cs)
    if gamma_cs.degree != n or not single_cycle_admissible(n, gamma_cs):
        raise ConstructionError(f"gamma = {gamma_cs} is not admitted with beta = {n}")
    lengths = gamma_cs.lengths()
    lengths.sort(key=lambda d: (d % 2 == 0, -d))
    gamma = _cycles_perm(n, lengths)
    beta = _cycles_perm(n, [n])
    sigma = Paratopism(Permutation.identity(n), beta, gamma, S3.T12)
    starts = [1]
    for d in lengths[:-1]:
        starts.append(starts[-1] + d)
    h = -(-n // 2) + 1
    cells, i = {}, 0
    for r, d in enumerate(lengths):
        for _ in range(-(-d // 2)):
            i += 1
            cells[i, (h - i - 1) % n + 1] = starts[r]
    try:
        sq = expand_contour(Contour.from_dict(sigma, cells))
    except (ContourError, LatinError) as exc:
        raise ConstructionError(str(exc)) from None
    return _verified(sigma, sq)


# --- (alpha, alpha, alpha; (12)) with alpha of type d 1^f ------------------------------


def build_1nontriv12(d: int, f: int) -> tuple[Paratopism, LatinSquare]:
    """Witness for ``(alpha, alpha, alpha; (12))``, ``alpha = (1 2 .. d)``, fixing ``d+1..d+f``.

    Covers ``d = 0 mod 4`` with ``f <= d/2`` and ``d = 2 mod 4`` with
    ``1 <= f <= d/2 + 1``.  Odd ``d`` is not handled here.
    """
    n = d + f
    t1 = 1

    def inf(k):
        return d + k

    cells: dict[Cell, int] = {}
    if d % 4 == 0 and 0 <= f <= d // 2:
        cells[d - 1, d] = t1
        for i in range(1, d // 2 - f + 1):
            cells[i, d - i] = t1
        for i in range(1, f + 1):
            cells[d // 2 - f + i, d // 2 + f - i] = inf(i)
            cells[d // 2 - f + i, inf(i)] = t1
            cells[d + i, d // 2 + f - i] = t1
        for i in range(1, d // 4):
            cells[d // 2 + 2 * i - 1, d // 2 - 2 * i] = t1
        for i in range(1, d // 4 + 1):
            cells[d // 2 + 2 * i, d // 2 + 1 - 2 * i] = t1
    elif d % 4 == 2 and 1 <= f <= d // 2 + 1:
        q = (d - 2) // 4
        cells[q + 1, d - q] = cells[d - q, q + 1] = inf(1)
        cells[d + 1, q + 1] = cells[q + 1, d + 1] = t1
        for i in range(1, q + 1):
            cells[i, d + 1 - i] = cells[d + 1 - i, i] = t1
        for i in range(2, f + 1):
            cells[q + i, d + i] = cells[d + i, d - q + 2 - i] = t1
            cells[q + i, d - q + 2 - i] = inf(i)
        for i in range(f + 1, d // 2 + 2):
            cells[q + i, d - q + 2 - i] = t1
    else:
        raise ConstructionError(f"no contour for d = {d}, f = {f}")
    alpha = _cycles_perm(n, [d] + [1] * f)
    sigma = Paratopism(alpha, alpha, alpha, S3.T12)
    try:
        # The contour repeats some orbits (the printed formulas list a few
        # cells twice); closure checks that the repeats agree.
        sq = expand_contour(Contour.from_dict(sigma, cells), extra=_fixed_block(n, f), strict=False)
    except (ContourError, LatinError) as exc:
        raise ConstructionError(str(exc)) from None
    return _verified(sigma, sq)


# --- beta = gamma of type d^2 1^f ---------------------------------------------------------


def build_dsq12(d: int, f: int) -> tuple[Paratopism, LatinSquare]:
    """Witness for ``(e, beta, beta; (12))`` with ``beta`` canonical of type ``d^2 1^f``."""
    n = 2 * d + f
    if d < 2:
        raise ConstructionError("d must exceed 1")
    if d % 2 == 0:
        if f:
            raise ConstructionError("even d needs f = 0")
        core = build_single_cycle_12(d, CycleStructure.from_lengths([d]))
        return lift_direct_product(core, 2)
    if f > d + 1:
        raise ConstructionError("odd d needs f <= d + 1")
    ff = min(f, d)
    g, h = ff // 2, (d + 1) // 2
    t1, t2 = 1, d + 1

    def inf(k):
        return 2 * d + k

    cells: dict[Cell, int] = {}
    for i in range(1, h + 1):
        cells[i, h + 1 - i] = t1
    for i in range(1, g + 1):
        cells[i + 1, 2 * d + i] = cells[d + 1 - i, 2 * d + g + i] = cells[d + 1 + i, d + h - i] = t2
        cells[d + 1 + i, 2 * d + i] = cells[2 * d + 1 - i, 2 * d + g + i] = t1
        cells[i + 1, d + h - i] = inf(i)
        cells[d + 1 - i, d + h + i] = inf(i + g)
    for i in range(g + 2, h + 1):
        cells[i, d + h + 1 - i] = cells[d + 2 - i, d + h - 1 + i] = t2
        cells[d + i, d + h + 1 - i] = t1
    last = 2 * d + ff
    if ff % 2:
        cells[1, d + h] = inf(ff)
        cells[d + 1, d + h] = cells[1, last] = t2
        cells[d + 1, last] = t1
    else:
        cells[1, d + h] = t2
        cells[d + 1, d + h] = t1
    if f == d + 1:
        cells[1, h] = cells[d + 1, d + h] = inf(d + 1)
        cells[1, n] = t1
        cells[d + 1, n] = t2
    beta = _cycles_perm(n, [d, d] + [1] * f)
    sigma = Paratopism(Permutation.identity(n), beta, beta, S3.T12)
    try:
        sq = expand_contour(Contour.from_dict(sigma, cells), extra=_fixed_block(n, f), strict=False)
    except (ContourError, LatinError) as exc:
        raise ConstructionError(str(exc)) from None
    return _verified(sigma, sq)


# --- beta = gamma with two cycle lengths -----------------------------------------------


def _shifted(sq: LatinSquare, offset: int) -> list[tuple[int, int, int]]:
    return [(i + offset, j + offset, s + offset) for i, j, s in sq.triples()]


def _two_lengths_square(cells, d1: int, d2: int, l: int) -> tuple[Paratopism, LatinSquare]:
    n = d1 + l * d2
    beta = _cycles_perm(n, [d1] + [d2] * l)
    sigma = Paratopism(Permutation.identity(n), beta, beta, S3.T12)
    extra = []
    if l:
        core = build_single_cycle_12(d2, CycleStructure.from_lengths([d2]))
        _, sub = lift_direct_product(core, l)
        extra = _shifted(sub, d1)
    try:
        sq = expand_contour(Contour.from_dict(sigma, cells), extra=extra, strict=False)
    except (ContourError, LatinError) as exc:
        raise ConstructionError(str(exc)) from None
    return _verified(sigma, sq)


def build_2diffcyc12(d1: int, d2: int) -> tuple[Paratopism, LatinSquare]:
    """Witness for ``(e, beta, beta; (12))`` with ``beta`` canonical of type ``d1 d2``."""
    if not (d1 > d2 > 1 and d1 % d2 == 0 and (d1 // d2) % 2 == 1):
        raise ConstructionError("need d1 > d2 > 1 with d1/d2 an odd integer")
    n = d1 + d2
    t1, t2 = 1, d1 + 1
    cells: dict[Cell, int] = {}
    if d1 % 2 == 0:
        for i in range(1, d2 // 2 + 1):
            cells[i, d1 + 1 - i] = t2
        for i in range(d2 // 2 + 1, d1 // 2 + 1):
            cells[i, d1 + 1 - i] = t1
        for i in range(1, d2 // 2 + 1):
            cells[i, n + 1 - i] = cells[d1 + i, d1 + 1 - i] = t1
    elif d1 % 4 == 1:
        for i in range((d1 + 2 * d2 + 5) // 4, (3 * d1 + 1) // 4 + 1):
            cells[i, d1 + 1 - i] = t1
        for i in range((d1 + 3) // 4, (d1 + 2 * d2 + 1) // 4 + 1):
            cells[i, d1 + 1 - i] = t2
        for i in range((d1 - 2 * d2 + 5) // 4, (d1 + 2 * d2 + 1) // 4 + 1):
            cells[i, (5 * d1 + 2 * d2 + 5) // 4 - i] = t1
    else:
        for i in range((d1 + 5) // 4, (3 * d1 - 2 * d2 + 1) // 4 + 1):
            cells[i, d1 + 1 - i] = t1
        for i in range((3 * d1 - 2 * d2 + 5) // 4, (3 * d1 + 3) // 4 + 1):
            cells[i, d1 + 1 - i] = t2
        for i in range((3 * d1 - 2 * d2 + 5) // 4, (3 * d1 + 2 * d2 + 1) // 4 + 1):
            cells[i, (7 * d1 + 2 * d2 + 5) // 4 - i] = t1
    return _two_lengths_square(cells, d1, d2, 1)


def build_k10(d1: int, d2: int, l: int) -> tuple[Paratopism, LatinSquare]:
    """Witness for ``(e, beta, beta; (12))`` with ``beta`` canonical of type ``d1 d2^l``.

    The index range ``(k-1) d2/2 < i <= k d2/2`` is applied to all four
    contour families: the first two have no other range for ``i``.
    """
    if not (d1 % 2 == 0 and d2 >= 1 and d1 % d2 == 0 and (d1 // d2) % 2 == 1 and 0 <= l <= d1 // d2):
        raise ConstructionError("need d1 even, d1/d2 odd and 0 <= l <= d1/d2")
    if d2 == 1 or d1 == d2:
        raise ConstructionError("need d1 > d2 > 1")
    half = d2 // 2
    cells: dict[Cell, int] = {}
    for k in range(1, d1 // d2 + 1):
        for i in range((k - 1) * half + 1, k * half + 1):
            if k <= l:
                cells[i, d1 + 1 - i] = d1 + (k - 1) * d2 + 1
                cells[i, d1 + (3 * k - 1) * half + 1 - i] = 1
                cells[d1 + (k - 1) * half + i, d1 + 1 - i] = 1
            else:
                cells[i, d1 + 1 - i] = 1
    return _two_lengths_square(cells, d1, d2, l)


# --- generic ------------------------------------------------------------------------


def build_totally_symmetric(n: int, delta: S3 | str = S3.T12) -> tuple[Paratopism, LatinSquare]:
    """``(e, e, e; delta)`` with the square ``L(i, j) = -i - j mod n``."""
    if isinstance(delta, str):
        delta = S3.parse(delta)
    sq = totally_symmetric_square(n)
    return _verified(Paratopism.identity(n, delta), sq)


def lift_direct_product(core: tuple[Paratopism, LatinSquare], r: int) -> tuple[Paratopism, LatinSquare]:
    """Product of C_r with a core witness whose paratopism has ``delta = (12)``.

    Point ``b`` of copy ``a`` becomes ``(a - 1) m + b``, so canonical
    component cycles of the core stay consecutive in the lift.
    """
    sigma, sq = core
    if r < 1:
        raise ConstructionError("r must be positive")
    if r == 1:
        return _verified(sigma, sq)
    if sigma.delta is not S3.T12:
        raise ConstructionError("lifting is implemented for delta = (12)")
    m = sigma.n
    n = m * r

    def lift(p: Permutation) -> Permutation:
        return Permutation([(a * m) + p[b] for a in range(r) for b in range(1, m + 1)])

    big = Paratopism(lift(sigma.alpha), lift(sigma.beta), lift(sigma.gamma), S3.T12)
    assert big.n == n
    return _verified(big, direct_product(cyclic_square(r), sq))


def normalize(sigma: Paratopism, sq: LatinSquare) -> tuple[Paratopism, LatinSquare]:
    """Move a witness to the standard form of its paratopism."""
    std, tau = standard_form_with_conjugator(sigma)
    return std, act_square(tau, sq)


# --- dispatch -------------------------------------------------------------------------


def _builder_for_12(n: int, beta: CycleStructure, gamma: CycleStructure):
    bl, gl = beta.lengths(), gamma.lengths()
    if bl == [1] * n:
        if gl == [1] * n:
            return lambda: build_totally_symmetric(n, S3.T12)
        if set(gl) <= {1, 2} and 1 in gl:
            return lambda: build_betaid12(gamma.multiplicity(2), gamma.fixed_points)
        return None
    if bl == [n]:
        if single_cycle_admissible(n, gamma):
            return lambda: build_single_cycle_12(n, gamma)
        return None
    # beta of type (d/2)^(2r) with gamma of type d^r: (alpha, alpha, alpha; (12)) lifted.
    if len(set(gl) - {1}) == 1:
        d = max(gl)
        f = gamma.fixed_points
        r = gamma.multiplicity(d)
        if d % 2 == 0 and beta == CycleStructure.from_lengths([d // 2] * (2 * r) + [1] * f):
            if r == 1 and ((d % 4 == 0 and f <= d // 2) or (d % 4 == 2 and 1 <= f <= d // 2 + 1)):
                return lambda: build_1nontriv12(d, f)
            if r > 1 and f == 0 and d % 4 == 0:
                return lambda: lift_direct_product(build_1nontriv12(d, 0), r)
    if beta != gamma:
        # beta of type d^r and gamma a lift of an admitted single-cycle gamma.
        if len(set(bl)) == 1:
            d, r = bl[0], len(bl)
            mult = {x: gamma.multiplicity(x) for x in set(gl)}
            if all(v % r == 0 for v in mult.values()):
                base = CycleStructure.from_lengths([x for x, v in mult.items() for _ in range(v // r)])
                if base.degree == d and single_cycle_admissible(d, base):
                    return lambda: lift_direct_product(build_single_cycle_12(d, base), r)
        return None
    distinct = sorted(set(bl), reverse=True)
    f = beta.fixed_points
    if len(distinct) == 1 or (len(distinct) == 2 and f and distinct[1] == 1):
        d = distinct[0]
        r = beta.multiplicity(d)
        if r == 2 and ((d % 2 == 1 and f <= d + 1) or f == 0):
            return lambda: build_dsq12(d, f)
        if f == 0:
            return lambda: lift_direct_product(build_single_cycle_12(d, CycleStructure.from_lengths([d])), r)
        return None
    if len(distinct) == 2 and f == 0:
        d1, d2 = distinct
        l = beta.multiplicity(d2)
        if beta.multiplicity(d1) == 1 and d1 % d2 == 0 and (d1 // d2) % 2 == 1:
            if l == 1:
                return lambda: build_2diffcyc12(d1, d2)
            if d1 % 2 == 0 and l <= d1 // d2:
                return lambda: build_k10(d1, d2, l)
    return None


def construct_for(std: Paratopism) -> Optional[LatinSquare]:
    """A witness fixed by the standard-form paratopism ``std``, or ``None``.

    ``None`` means no explicit construction applies (or a builder failed its
    own verification); it says nothing about membership.
    """
    n = std.n
    shape = std.delta.shape
    if shape == "e":
        if all(p.is_identity() for p in std.components):
            return totally_symmetric_square(n)
        return None
    if shape == "123":
        if std.gamma.is_identity():
            return totally_symmetric_square(n)
        return None
    build = _builder_for_12(n, std.beta.cycle_structure(), std.gamma.cycle_structure())
    if build is None:
        return None
    try:
        sigma, sq = build()
    except ConstructionError:
        return None
    got, out = normalize(sigma, sq)
    if got != std or not is_autoparatopism(std, out):
        return None
    return out
