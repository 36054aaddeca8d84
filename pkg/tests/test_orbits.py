from itertools import product

import pytest

from paratopia.orbits import (
    cell_map_12,
    cell_orbits_12,
    orbit_census_123,
    predicted_census_12,
    predicted_length_123,
    triple_orbit_123,
)
from paratopia.perms import Permutation, canonical_permutation, partitions


def brute_cell_partition(beta):
    n = beta.degree
    seen, parts = set(), set()
    for c in product(range(1, n + 1), repeat=2):
        if c in seen:
            continue
        orb, cur = set(), c
        while cur not in orb:
            orb.add(cur)
            cur = cell_map_12(beta, cur)
        seen |= orb
        parts.add(frozenset(orb))
    return parts


def test_identity_degree_two():
    dec = cell_orbits_12(Permutation.identity(2))
    # Two short diagonal orbits and one transposed pair: three orbits in all.
    assert [len(o) for o in dec.orbits] == [1, 2, 1]
    assert dec.short_flags == (True, False, True)


def test_two_five_cycles_match_figure():
    beta = canonical_permutation("5^2")
    dec = cell_orbits_12(beta)
    census = dec.block_census()
    assert sorted(census[0, 0]) == [(5, True), (10, False), (10, False)]
    assert census[0, 1] == [(10, False)] * 5
    orbit_of = {c: set(o) for o in dec.orbits for c in o}
    star = {(1, 3), (2, 4), (3, 5), (4, 1), (5, 2)}
    circle = {(1, 1), (1, 5), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3), (4, 4), (5, 4), (5, 5)}
    bullet = {(1, 9), (2, 10), (3, 6), (4, 7), (5, 8), (6, 2), (7, 3), (8, 4), (9, 5), (10, 1)}
    assert orbit_of[1, 3] == star
    assert orbit_of[1, 1] == circle
    assert orbit_of[1, 9] == bullet


def test_single_two_cycle():
    dec = cell_orbits_12(canonical_permutation("2"))
    assert dec.block_census() == {(0, 0): [(4, False)]}


@pytest.mark.parametrize("n", range(1, 9))
def test_cell_census_matches_formula(n):
    for cs in partitions(n):
        beta = canonical_permutation(cs)
        dec = cell_orbits_12(beta)
        assert {frozenset(o) for o in dec.orbits} == brute_cell_partition(beta)
        got = dec.block_census()
        want = predicted_census_12(beta)
        assert {k: sorted(v) for k, v in got.items()} == {k: sorted(v) for k, v in want.items()}
        for orb in dec.orbits:
            assert orb[0] == min(orb)


def test_short_orbits_per_cycle():
    beta = canonical_permutation("5.4.3.1")
    dec = cell_orbits_12(beta)
    shorts = [blk for blk, s in zip(dec.block_index, dec.short_flags) if s]
    assert shorts == sorted(shorts) and sorted(shorts) == [(0, 0), (2, 2), (3, 3)]


def test_render_shape():
    text = cell_orbits_12(canonical_permutation("2.1")).render()
    assert len(text.splitlines()) == 3


def test_triple_orbits_of_figure():
    gamma = canonical_permutation("5^2.1")
    left = triple_orbit_123(gamma, (1, 4, 2))
    assert len(left.triples) == 5 and left.short
    assert set(left.triples) == {(1, 4, 2), (2, 5, 3), (3, 1, 4), (4, 2, 5), (5, 3, 1)}
    right = triple_orbit_123(gamma, (1, 3, 6))
    assert len(right.triples) == 15 and not right.short
    assert {(1, 9, 3), (6, 5, 2), (4, 7, 1)} <= set(right.triples)


def test_identity_gamma_orbits():
    e = Permutation.identity(3)
    assert len(triple_orbit_123(e, (1, 1, 1)).triples) == 1
    assert len(triple_orbit_123(e, (1, 2, 3)).triples) == 3


@pytest.mark.parametrize("n", range(1, 7))
def test_triple_lengths_match_prediction(n):
    for cs in partitions(n):
        gamma = canonical_permutation(cs)
        for t in product(range(1, n + 1), repeat=3):
            orb = triple_orbit_123(gamma, t)
            assert len(orb.triples) == predicted_length_123(gamma, t)


def test_census_123():
    c = orbit_census_123(canonical_permutation("5^2"))
    assert c.max_short_orbits == 2
    assert c.sigma_cubed_orbits == 20 and c.forced_short_residue() == 2
    assert orbit_census_123(canonical_permutation("3")).max_short_orbits == 0
    ident = orbit_census_123(Permutation.identity(4))
    assert all(k.generic_length == 3 and k.short_available for k in ident.cycles)
