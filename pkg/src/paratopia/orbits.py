"""Cell orbits of ``(e, beta, gamma; (12))`` and triple orbits of ``(e, e, gamma; (123))``."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .latin import Triple
from .perms import Permutation, lcm

Cell = tuple[int, int]


def _cycle_index(p: Permutation) -> dict[int, int]:
    return {a: k for k, cyc in enumerate(p.cycles()) for a in cyc}


@dataclass(frozen=True)
class CellOrbitDecomposition:
    beta: Permutation
    orbits: tuple[tuple[Cell, ...], ...]
    short_flags: tuple[bool, ...]
    block_index: tuple[tuple[int, int], ...]

    def representatives(self) -> list[Cell]:
        return [orb[0] for orb in self.orbits]

    def block_census(self) -> dict[tuple[int, int], list[tuple[int, bool]]]:
        """``(s, t) -> [(length, short), ...]`` with 0-based cycle indices ``s <= t``."""
        out: dict[tuple[int, int], list[tuple[int, bool]]] = {}
        for orb, short, blk in zip(self.orbits, self.short_flags, self.block_index):
            out.setdefault(blk, []).append((len(orb), short))
        return out

    def render(self) -> str:
        """Grid of orbit labels, one line per row."""
        n = self.beta.degree
        label = {}
        for k, orb in enumerate(self.orbits):
            for c in orb:
                label[c] = k
        width = len(str(len(self.orbits) - 1))
        return "\n".join(
            " ".join(str(label[i, j]).rjust(width) for j in range(1, n + 1)) for i in range(1, n + 1)
        )


def cell_map_12(beta: Permutation, cell: Cell) -> Cell:
    i, j = cell
    return (beta[j], i)


def cell_orbits_12(beta: Permutation) -> CellOrbitDecomposition:
    """Partition of the n x n cells into orbits of ``(i, j) -> (j beta, i)``.

    Each orbit is listed from its lexicographically least cell, and orbits are
    sorted by that representative.
    """
    n = beta.degree
    cyc = _cycle_index(beta)
    lengths = [len(c) for c in beta.cycles()]
    seen = set()
    orbits, shorts, blocks = [], [], []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if (i, j) in seen:
                continue
            orb = []
            c = (i, j)
            while c not in seen:
                seen.add(c)
                orb.append(c)
                c = cell_map_12(beta, c)
            s, t = sorted((cyc[i], cyc[j]))
            short = s == t and len(orb) < 2 * lengths[s]
            orbits.append(tuple(orb))
            shorts.append(short)
            blocks.append((s, t))
    return CellOrbitDecomposition(beta, tuple(orbits), tuple(shorts), tuple(blocks))


def predicted_census_12(beta: Permutation) -> dict[tuple[int, int], list[tuple[int, bool]]]:
    """Per-block orbit lengths predicted from the cycle lengths alone."""
    d = [len(c) for c in beta.cycles()]
    out = {}
    for s in range(len(d)):
        for t in range(s, len(d)):
            if s == t:
                if d[t] % 2:
                    out[s, t] = [(d[t], True)] + [(2 * d[t], False)] * ((d[t] - 1) // 2)
                else:
                    out[s, t] = [(2 * d[t], False)] * (d[t] // 2)
            else:
                out[s, t] = [(2 * lcm(d[s], d[t]), False)] * gcd(d[s], d[t])
    return out


@dataclass(frozen=True)
class TripleOrbit:
    gamma: Permutation
    triples: tuple[Triple, ...]
    short: bool


def triple_map_123(gamma: Permutation, t: Triple) -> Triple:
    x, y, z = t
    return (gamma[z], x, y)


def triple_orbit_123(gamma: Permutation, t: Triple) -> TripleOrbit:
    orb, seen = [], set()
    cur = t
    while cur not in seen:
        seen.add(cur)
        orb.append(cur)
        cur = triple_map_123(gamma, cur)
    generic = 3 * lcm(*(gamma.cycle_length_of(x) for x in t))
    return TripleOrbit(gamma, tuple(orb), len(orb) < generic)


def predicted_length_123(gamma: Permutation, t: Triple) -> int:
    cyc = _cycle_index(gamma)
    blocks = {cyc[x] for x in t}
    ds = [gamma.cycle_length_of(x) for x in t]
    if len(blocks) > 1:
        return 3 * lcm(*ds)
    d = ds[0]
    if d % 3 == 0:
        return 3 * d
    # The one short orbit of the block: (i, i g^(m-1), i g^-m) with d | 3m - 2.
    m = next(m for m in range(1, d + 1) if (3 * m - 2) % d == 0)
    i, j, k = t
    if j == (gamma ** (m - 1))[i] and k == (gamma ** (-m))[i]:
        return d
    return 3 * d


@dataclass(frozen=True)
class CycleCensus123:
    length: int
    short_available: bool
    generic_length: int


@dataclass(frozen=True)
class Census123:
    gamma: Permutation
    cycles: tuple[CycleCensus123, ...]
    mixed_lengths: dict
    sigma_cubed_orbits: int

    @property
    def max_short_orbits(self) -> int:
        return sum(c.short_available for c in self.cycles)

    def forced_short_residue(self) -> int:
        """Number of short orbits needed mod 3, from counting cubed-orbits of cells."""
        return self.sigma_cubed_orbits % 3


def orbit_census_123(gamma: Permutation) -> Census123:
    d = [len(c) for c in gamma.cycles()]
    cycles = tuple(CycleCensus123(x, x % 3 != 0, 3 * x) for x in d)
    mixed = {}
    p = len(d)
    for a in range(p):
        for b in range(p):
            for c in range(p):
                if len({a, b, c}) > 1:
                    mixed[a, b, c] = 3 * lcm(d[a], d[b], d[c])
    cubed = sum(gcd(d[a], d[b]) for a in range(p) for b in range(p))
    return Census123(gamma, cycles, mixed, cubed)
