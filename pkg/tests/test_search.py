import json

import pytest

from paratopia.latin import LatinSquare, PartialLatinSquare
from paratopia.paratopism import (
    S3,
    Paratopism,
    act_square,
    conjugacy_invariant,
    is_autoparatopism,
    standard_12,
    standard_123,
    standard_form,
)
from paratopia.perms import Permutation
from paratopia.search import (
    BudgetExhausted,
    MembershipVerdict,
    _centralizer_size,
    all_latin_squares,
    brute_force_par,
    class_representatives,
    centralizer_elements,
    commuting_isotopisms,
    complete_backtrack,
    decide_membership,
    default_budget,
    fixing_squares,
)


# Counts of Latin squares by order: 1, 2, 12, 576.
@pytest.mark.parametrize("n, count", [(1, 1), (2, 2), (3, 12), (4, 576)])
def test_all_latin_squares_counts(n, count):
    assert sum(1 for _ in all_latin_squares(n)) == count


@pytest.mark.parametrize("n, shape, classes", [(3, "12", 9), (3, "123", 3), (4, "123", 5), (4, "12", 25)])
def test_class_representatives(n, shape, classes):
    reps = class_representatives(n, shape)
    assert len(reps) == classes
    assert len({conjugacy_invariant(s) for s in reps}) == classes


def test_class_representatives_other_transposition():
    reps = class_representatives(4, "12", S3.T23)
    assert all(s.delta is S3.T23 for s in reps)
    assert len(reps) == 25


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("delta", ["e", "12", "123", "13", "23", "132"])
def test_pipeline_agrees_with_brute_force(n, delta):
    for member, rep in brute_force_par(n, delta).values():
        v = decide_membership(rep, budget=None)
        assert v.member is member, (rep, v)
        if member:
            assert is_autoparatopism(rep, v.witness)


@pytest.mark.parametrize("delta", ["12", "123"])
def test_pipeline_agrees_with_brute_force_order_5(delta):
    oracle = brute_force_par(5, delta)
    members = 0
    for member, rep in oracle.values():
        v = decide_membership(rep, budget=None)
        assert v.member is member
        members += member
    assert members == {"12": 6, "123": 3}[delta]


def test_search_only_agrees_with_brute_force():
    for member, rep in brute_force_par(4, "12").values():
        v = decide_membership(rep, budget=None, use_filters=False, use_constructions=False)
        assert v.member is member


def test_search_refutes_five_squared():
    # Order 10, gamma of type 5^2: no square exists; the search proves it.
    v = complete_backtrack(standard_123(10, "5^2"))
    assert v.member is False
    assert v.nodes_explored > 0


def test_search_finds_witness_when_filters_off():
    std = standard_12(7, "7", "7")
    v = decide_membership(std, budget=None, use_filters=False, use_constructions=False)
    assert v.member and v.method == "search"
    assert is_autoparatopism(std, v.witness)


def test_budget_exhaustion_raises():
    with pytest.raises(BudgetExhausted) as info:
        complete_backtrack(standard_123(10, "5^2"), budget=5)
    assert info.value.nodes >= 5


def test_budget_exhaustion_is_undecided():
    std = standard_123(10, "5^2")
    v = decide_membership(std, budget=3, use_filters=False)
    assert v.undecided and v.member is None
    assert v.detail == "budget exhausted"


def test_seeded_search_extends_seed():
    n = 5
    sigma = Paratopism.identity(n, S3.T12)
    seed = PartialLatinSquare(n, {(1, 1): 1, (1, 2): 2})
    v = complete_backtrack(sigma, seed)
    assert v.member
    assert v.witness[1, 1] == 1 and v.witness[1, 2] == 2
    assert v.witness[2, 1] == 2


def test_seed_that_cannot_be_completed():
    # In a symmetric square of odd order every symbol sits once on the diagonal.
    sigma = Paratopism.identity(3, S3.T12)
    seed = PartialLatinSquare(3, {(1, 1): 1, (2, 2): 1, (3, 3): 2})
    v = complete_backtrack(sigma, seed)
    assert v.member is False


def test_seed_orbit_conflict_rejected():
    sigma = Paratopism.identity(3, S3.T12)
    # (1, 2, 3) forces (2, 1, 3); seeding (2, 1, 1) too is contradictory.
    with pytest.raises(ValueError):
        complete_backtrack(sigma, [(1, 2, 3), (2, 1, 1)])


def test_fixing_squares_matches_search():
    beta = Permutation.from_cycles(3, [(1, 2)])
    sigma = Paratopism(Permutation.identity(3), beta, beta, S3.T12)
    found = fixing_squares(sigma)
    assert bool(found.any()) is (complete_backtrack(sigma).member is True)


def test_decide_membership_witness_for_nonstandard_sigma():
    a = Permutation.from_cycles(6, [(2, 5)])
    b = Permutation.from_cycles(6, [(1, 3, 4, 6)])
    c = Permutation.from_cycles(6, [(1, 6)])
    sigma = Paratopism(a, b, c, S3.T12)
    v = decide_membership(sigma, budget=None)
    if v.member:
        assert is_autoparatopism(sigma, v.witness)
    assert v.member is not None


def test_verdict_to_dict_round_trip():
    std = standard_12(5, "5", "5")
    v = decide_membership(std)
    doc = json.loads(json.dumps(v.to_dict()))
    assert set(doc) == {"member", "method", "rule", "nodes_explored", "witness"}
    assert doc["member"] is True and len(doc["witness"]) == 5
    assert MembershipVerdict(False).to_dict()["witness"] is None


def test_default_budget(monkeypatch):
    monkeypatch.delenv("PARATOPIA_BUDGET", raising=False)
    assert default_budget(12) is None
    assert default_budget(13) == 10**9
    monkeypatch.setenv("PARATOPIA_BUDGET", "1000")
    assert default_budget(5) == 1000
    monkeypatch.setenv("PARATOPIA_BUDGET", "0")
    assert default_budget(17) is None


@pytest.mark.parametrize("cycles", ["(1 2 3)(4 5 6)", "(1 2)(3 4)(5 6 7)", "(1)", "(1 2 3 4 5 6)"])
def test_centralizer_elements(cycles):
    p = Permutation.parse(cycles, 7)
    elems = centralizer_elements(p)
    assert len(set(elems)) == len(elems) == _centralizer_size(p, False)
    for g in elems:
        c = Permutation(g[1:])
        assert c * p == p * c
    rot = centralizer_elements(p, rotations_only=True)
    assert set(rot) <= set(elems) and len(rot) == _centralizer_size(p, True)


@pytest.mark.parametrize("sigma", [standard_12(4, "2.1^2", "2^2"), standard_12(5, "2^2.1", "4.1"),
                                   standard_123(4, "1^4"), standard_123(5, "2^2.1")])
def test_commuting_isotopisms_permute_fixed_squares(sigma):
    squares = all_latin_squares(sigma.n)[fixing_squares(sigma)]
    fixed = {tuple(map(tuple, s)) for s in squares}
    group = commuting_isotopisms(sigma)
    assert len(group) > 1
    for a, b, c in group:
        tau = Paratopism(Permutation(a[1:]), Permutation(b[1:]), Permutation(c[1:]))
        for s in squares[:5]:
            img = act_square(tau, LatinSquare([[x + 1 for x in row] for row in s]))
            assert tuple(tuple(x - 1 for x in row) for row in img.rows) in fixed


def test_no_symmetry_for_nonstandard_sigma():
    p = Permutation.parse("(1 2)", 3)
    assert commuting_isotopisms(Paratopism(p, p, p, S3.T12)) == []


def test_symmetric_search_agrees_with_plain_search():
    for n in range(1, 6):
        for s in class_representatives(n, "12") + class_representatives(n, "123"):
            std = standard_form(s)
            assert complete_backtrack(std, symmetry=True).member == complete_backtrack(std).member


@pytest.mark.parametrize("delta", ["12", "123"])
def test_sat_backend_agrees_with_brute_force(delta):
    pytest.importorskip("pysat")
    for n in range(1, 6):
        for inv, (member, rep) in brute_force_par(n, delta).items():
            v = decide_membership(rep, None, use_filters=False, use_constructions=False, backend="sat")
            assert v.member == member, (n, inv)
            if member:
                assert is_autoparatopism(rep, v.witness)


def test_sat_backend_refutes_counting_obstruction():
    # Backtracking does not finish on this case in tens of millions of nodes.
    pytest.importorskip("pysat")
    v = decide_membership(standard_12(11, "3^3.1^2", "3^3.1^2"), None, disabled={"R7"}, backend="sat")
    assert v.member is False and v.method == "sat"


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        decide_membership(standard_12(3, "3", "3"), backend="dlx")
