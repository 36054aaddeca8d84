"""Group-action laws checked on random inputs, 10^4 examples each.

The acceptance suite runs every law in this module and reports the outcome.
"""

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from paratopia.latin import LatinSquare, cyclic_square
from paratopia.paratopism import (
    S3,
    Paratopism,
    act_square,
    conjugacy_invariant,
    conjugate_par,
    inverse_par,
    standard_form,
    standard_form_with_conjugator,
)
from paratopia.perms import Permutation, cycle_structure

MAX_DEGREE = 20

law = settings(max_examples=10_000, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def perms(n):
    return st.permutations(range(1, n + 1)).map(Permutation)


@st.composite
def paratopisms(draw, n=None, max_degree=MAX_DEGREE):
    if n is None:
        n = draw(st.integers(1, max_degree))
    a, b, c = draw(perms(n)), draw(perms(n)), draw(perms(n))
    return Paratopism(a, b, c, draw(st.sampled_from(list(S3))))


@st.composite
def pairs(draw, max_degree=MAX_DEGREE):
    n = draw(st.integers(1, max_degree))
    return draw(paratopisms(n)), draw(paratopisms(n))


@st.composite
def triples_of_perms(draw):
    n = draw(st.integers(1, MAX_DEGREE))
    return draw(perms(n)), draw(perms(n)), draw(perms(n))


@law
@given(triples_of_perms())
def test_permutation_group_laws(ps):
    p, q, r = ps
    assert (p * q) * r == p * (q * r)
    e = Permutation.identity(p.degree)
    assert p * p.inverse() == e == p.inverse() * p
    # p * q is "p then q".
    assert all((p * q)[i] == q[p[i]] for i in range(1, p.degree + 1))


@law
@given(st.integers(1, MAX_DEGREE).flatmap(perms))
def test_cycle_structure_is_conjugation_invariant(p):
    q = Permutation(list(reversed(range(1, p.degree + 1))))
    assert cycle_structure(q.inverse() * p * q) == cycle_structure(p)
    assert cycle_structure(p).degree == p.degree


@law
@given(pairs(max_degree=8))
def test_action_is_a_right_action(pair):
    s1, s2 = pair
    sq = cyclic_square(s1.n)
    assert act_square(s1 * s2, sq) == act_square(s2, act_square(s1, sq))


@law
@given(paratopisms(max_degree=12))
def test_action_preserves_latin_property(s):
    sq = act_square(s, cyclic_square(s.n))
    # The constructor validates the Latin property.
    assert LatinSquare(sq.rows) == sq
    assert act_square(inverse_par(s), sq) == cyclic_square(s.n)


@law
@given(pairs())
def test_invariant_stable_under_conjugation(pair):
    s, tau = pair
    assert conjugacy_invariant(conjugate_par(s, tau)) == conjugacy_invariant(s)


@law
@given(paratopisms())
def test_standard_form_idempotent_and_conjugate(s):
    std, tau = standard_form_with_conjugator(s)
    assert standard_form(std) == std
    assert conjugacy_invariant(std) == conjugacy_invariant(s)
    assert inverse_par(tau) * s * tau == std


@law
@given(pairs())
def test_conjugates_share_standard_form(pair):
    s, tau = pair
    assert standard_form(conjugate_par(s, tau)) == standard_form(s)
