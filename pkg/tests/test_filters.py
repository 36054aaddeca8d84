import json
import random
from functools import lru_cache

import pytest

from paratopia.catalogue import PaperTables, enumerate_candidates
from paratopia.filters import (
    RULES_12,
    RULES_123,
    RuleStats,
    StandardCase12,
    StandardCase123,
    _excluded_12,
    _r2,
    decide_characterized_12,
    decide_characterized_123,
    filters_12,
    filters_123,
)
from paratopia.paratopism import S3, Paratopism, conjugate_par, standard_form
from paratopia.perms import CycleStructure, Permutation
from paratopia.search import brute_force_par


def f12(beta, gamma, **kw):
    return filters_12(StandardCase12.parse(beta, gamma), **kw)


def f123(gamma, **kw):
    return filters_123(StandardCase123.parse(gamma), **kw)


@pytest.mark.parametrize(
    "beta, gamma, rule",
    [
        ("6^2", "3^4", "R4"),
        ("3^4", "6^2", "R5"),
        ("4^2", "2.1^6", "R6"),
        ("3^3.1^2", "3^3.1^2", "R7"),
        ("6.2^2", "4.3^2", "R8"),
        ("4", "3.1", "R4"),
    ],
)
def test_exclusion_examples_12(beta, gamma, rule):
    report = f12(beta, gamma)
    assert report.excluded
    assert report.rule == rule
    assert report.verdict.certificate


def test_order_26_fails_block_counting():
    # Hall counting (R1) runs before the subsquare rule and already kills this case.
    assert f12("18.6.2", "18.4^2").rule == "R1"
    # On its own the subsquare rule gives the 2 rows versus 8 symbols argument.
    alone = f12("18.6.2", "18.4^2", disabled=set(RULES_12) - {"R2"})
    assert alone.rule == "R2"
    assert "number 2" in alone.verdict.certificate and "number 8" in alone.verdict.certificate


def test_complementary_subsquare_branch():
    case = StandardCase12.parse("4^2.2^4", "8.2.1^6")
    assert filters_12(case).excluded
    B, G = dict(case.beta.parts), dict(case.gamma.parts)
    why = _r2(16, B, G, lambda m, b, g: _excluded_12(m, b, g, frozenset()))
    assert why is not None and why.startswith("complementary subsquare")
    assert why.endswith("R6")


@pytest.mark.parametrize(
    "beta, gamma, admitted",
    [
        ("1^10", "2^4.1^2", True),
        ("1^10", "2^5", False),
        ("7", "7", True),
        ("5^2.1^3", "5^2.1^3", True),
        ("4^2.1", "4^2.1", False),
        ("8", "8", True),
        ("6.2^4", "6.2^4", False),
    ],
)
def test_characterizations_12(beta, gamma, admitted):
    report = decide_characterized_12(StandardCase12.parse(beta, gamma))
    assert report.admitted is admitted
    assert report.excluded is not admitted


def test_uncharacterized_case_is_undecided():
    report = decide_characterized_12(StandardCase12.parse("3^2.2", "6.2"))
    assert report.verdict.kind == "undecided"


@pytest.mark.parametrize(
    "gamma, rule",
    [("5^2", "Q7"), ("6^2", "Q6"), ("6", "Q4"), ("4", "Q4"), ("11", "Q5"), ("9.1", "Q5")],
)
def test_exclusion_examples_123(gamma, rule):
    report = f123(gamma)
    assert report.excluded and report.rule == rule


@pytest.mark.parametrize("gamma", ["7", "3^3", "1^6", "13", "5^3"])
def test_characterizations_123_admit(gamma):
    assert decide_characterized_123(StandardCase123.parse(gamma)).admitted


def test_nine_cycle_with_fixed_point_not_in_table():
    # Three divides 9, so the one-cycle characterization does not apply, and
    # the catalogue agrees: order 10 lists no 9.1.
    tables = PaperTables.load()
    assert (None, "9.1") not in tables.members(10, "123")
    assert not decide_characterized_123(StandardCase123.parse("9.1")).admitted


@lru_cache(maxsize=None)
def _oracle(n, delta):
    return brute_force_par(n, delta)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("delta", ["12", "123"])
def test_soundness_against_brute_force(n, delta):
    for member, rep in _oracle(n, delta).values():
        std = standard_form(rep)
        if delta == "12":
            case = StandardCase12(n, std.beta.cycle_structure(), std.gamma.cycle_structure())
            report = filters_12(case)
        else:
            case = StandardCase123(n, std.gamma.cycle_structure())
            report = filters_123(case)
        if report.excluded:
            assert not member, (case, report.rule)
        if report.admitted:
            assert member, (case, report.rule)


@pytest.mark.parametrize("shape", ["12", "123"])
def test_no_table_member_excluded(shape):
    tables = PaperTables.load()
    for n in range(2, 18):
        members = tables.members(n, shape)
        for case in enumerate_candidates(n, shape):
            if (case.beta, case.gamma) not in members:
                continue
            if shape == "12":
                report = f12(case.beta, case.gamma)
            else:
                report = f123(case.gamma)
            assert not report.excluded, (n, case, report.rule)


def test_disabled_rules_are_skipped():
    report = f12("6^2", "3^4", disabled={"R4"})
    assert "R4" not in report.rules_run
    assert report.rule != "R4"
    assert f123("5^2", disabled=set(RULES_123)).verdict.kind == "undecided"


def test_stats_count_fires():
    stats = RuleStats()
    f12("6^2", "3^4", stats=stats)
    f12("6^2", "3^4", stats=stats)
    f123("5^2", stats=stats)
    assert stats.fires["R4", 12] == 2
    assert stats.total("Q7") == 1


def test_report_json_schema():
    doc = json.loads(f12("6^2", "3^4").to_json())
    assert set(doc) == {"verdict", "rule", "certificate", "rules_run"}
    assert doc["verdict"] == "excluded" and doc["rule"] == "R4"
    assert doc["rules_run"][-1] == "R4"
    doc = json.loads(f123("7").to_json())
    assert doc["verdict"] == "admitted" and doc["certificate"] is None


def _case_of(sigma):
    std = standard_form(sigma)
    return StandardCase12(sigma.n, std.beta.cycle_structure(), std.gamma.cycle_structure())


def test_verdict_stable_under_conjugation():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randint(3, 9)
        comps = []
        for _ in range(3):
            img = list(range(1, n + 1))
            rng.shuffle(img)
            comps.append(Permutation(img))
        sigma = Paratopism(*comps, S3.T12)
        tau_comps = []
        for _ in range(3):
            img = list(range(1, n + 1))
            rng.shuffle(img)
            tau_comps.append(Permutation(img))
        tau = Paratopism(*tau_comps, rng.choice(list(S3)))
        other = conjugate_par(sigma, tau)
        if other.delta is not S3.T12:
            continue
        assert filters_12(_case_of(sigma)) == filters_12(_case_of(other))


def test_degree_mismatch_rejected():
    with pytest.raises(ValueError):
        StandardCase12(5, CycleStructure.parse("4"), CycleStructure.parse("5"))
