import pytest

from paratopia.catalogue import PaperTables, enumerate_candidates
from paratopia.construct import (
    Contour,
    ContourError,
    ConstructionError,
    build_1nontriv12,
    build_2diffcyc12,
    build_betaid12,
    build_dsq12,
    build_k10,
    build_single_cycle_12,
    build_totally_symmetric,
    cell_orbits,
    construct_for,
    expand_contour,
    lift_direct_product,
    normalize,
    single_cycle_admissible,
)
from paratopia.paratopism import S3, Paratopism, is_autoparatopism, standard_12
from paratopia.perms import CycleStructure, Permutation, partitions


def cycles_of(sigma, which):
    return str(getattr(sigma, which).cycle_structure())


# --- printed squares ------------------------------------------------------------------


@pytest.mark.parametrize(
    "name, build",
    [
        ("betaid12_r4_f2", lambda: build_betaid12(4, 2)),
        ("betaid12_r3_f5", lambda: build_betaid12(3, 5)),
        ("onecycle12_d6_f1", lambda: build_1nontriv12(6, 1)),
        ("dsq12_d5_f1", lambda: build_dsq12(5, 1)),
    ],
)
def test_builder_reproduces_printed_square(golden, name, build):
    sigma, sq = build()
    assert sq == golden(name)
    assert is_autoparatopism(sigma, golden(name))


def test_one_cycle_d6_f4_differs_from_printed_square(golden):
    sigma, sq = build_1nontriv12(6, 4)
    printed = golden("onecycle12_d6_f4")
    diff = {
        (i, j)
        for i in range(1, 11)
        for j in range(1, 11)
        if sq[i, j] != printed[i, j]
    }
    expected = {(i, j) for i in (2, 4, 6) for j in (8, 10)} | {(i, j) for i in (8, 10) for j in (2, 4, 6)}
    assert diff == expected
    assert is_autoparatopism(sigma, sq)
    # The printed square is not fixed by the paratopism it illustrates.
    assert not is_autoparatopism(sigma, printed)


def test_printed_123_square_is_fixed(golden):
    sq = golden("aaa123_d9_f1")
    alpha = Permutation.from_cycles(10, [tuple(range(1, 10))])
    sigma = Paratopism(alpha, alpha, alpha, S3.C123)
    assert is_autoparatopism(sigma, sq)


# --- small examples ---------------------------------------------------------------


def test_one_nontrivial_cycle_small():
    sigma, sq = build_1nontriv12(4, 0)
    assert sq.order == 4 and is_autoparatopism(sigma, sq)
    assert cycles_of(sigma, "alpha") == "4"


@pytest.mark.parametrize("d, f", [(3, 4), (4, 0), (3, 0), (7, 8)])
def test_two_like_cycles(d, f):
    sigma, sq = build_dsq12(d, f)
    assert sq.order == 2 * d + f
    assert sigma.beta.cycle_structure() == sigma.gamma.cycle_structure()
    assert is_autoparatopism(sigma, sq)


@pytest.mark.parametrize("d1, d2", [(6, 2), (9, 3), (15, 5), (10, 2), (21, 3)])
def test_two_unlike_cycles(d1, d2):
    sigma, sq = build_2diffcyc12(d1, d2)
    assert cycles_of(sigma, "beta") == f"{d1}.{d2}"
    assert is_autoparatopism(sigma, sq)


@pytest.mark.parametrize("d1, d2, l", [(6, 2, 2), (6, 2, 3), (6, 2, 0), (18, 6, 3), (30, 10, 1)])
def test_long_and_short_cycles(d1, d2, l):
    sigma, sq = build_k10(d1, d2, l)
    assert sq.order == d1 + l * d2
    assert is_autoparatopism(sigma, sq)


@pytest.mark.parametrize("n, gamma", [(4, "4"), (4, "2^2"), (5, "5"), (6, "4.2"), (6, "6"), (9, "9"), (9, "6.3")])
def test_single_cycle_beta(n, gamma):
    sigma, sq = build_single_cycle_12(n, gamma)
    assert cycles_of(sigma, "beta") == str(n)
    assert cycles_of(sigma, "gamma") == gamma
    assert is_autoparatopism(sigma, sq)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
@pytest.mark.parametrize("delta", ["e", "12", "123"])
def test_totally_symmetric(n, delta):
    sigma, sq = build_totally_symmetric(n, delta)
    for d in S3:
        assert is_autoparatopism(Paratopism.identity(n, d), sq)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_lift(r):
    core = build_single_cycle_12(4, "2^2")
    sigma, sq = lift_direct_product(core, r)
    assert sq.order == 4 * r
    assert cycles_of(sigma, "beta") == ("4" if r == 1 else f"4^{r}")
    assert is_autoparatopism(sigma, sq)


# --- hypotheses are enforced ------------------------------------------------------


@pytest.mark.parametrize(
    "build",
    [
        lambda: build_2diffcyc12(8, 2),
        lambda: build_2diffcyc12(4, 4),
        lambda: build_k10(6, 2, 4),
        lambda: build_k10(9, 3, 1),
        lambda: build_betaid12(3, 0),
        lambda: build_single_cycle_12(5, "3.2"),
    ],
)
def test_builders_reject_bad_parameters(build):
    with pytest.raises(ConstructionError):
        build()


def test_single_cycle_admissibility():
    assert single_cycle_admissible(6, CycleStructure.parse("4.2"))
    assert not single_cycle_admissible(6, CycleStructure.parse("5.1"))
    assert not single_cycle_admissible(6, CycleStructure.parse("3^2"))


# --- contours ---------------------------------------------------------------------


def test_contour_two_entries_in_one_orbit():
    n = 3
    sigma = Paratopism.identity(n, S3.T12)
    cells = {(1, 2): 3, (2, 1): 3}
    cells.update({(i, i): i for i in range(1, n + 1)})
    cells[(1, 3)] = 2
    cells[(2, 3)] = 1
    contour = Contour.from_dict(sigma, cells)
    with pytest.raises(ContourError):
        expand_contour(contour)


def test_contour_clash_detected():
    sigma = Paratopism.identity(3, S3.T12)
    # Each entry is consistent alone; their mirror images put 1 twice in column 2.
    contour = Contour.from_dict(sigma, {(1, 2): 1, (2, 3): 1})
    with pytest.raises(ContourError):
        expand_contour(contour, strict=False)


def test_symmetric_contour_expands():
    # For (e, e, e; (12)) the orbits are diagonal cells and mirrored pairs,
    # so the upper triangle of a symmetric Latin square is a contour.
    n = 5
    sigma = Paratopism.identity(n, S3.T12)
    cells = {(i, j): ((i + j) % n) + 1 for i in range(1, n + 1) for j in range(i, n + 1)}
    sq = expand_contour(Contour.from_dict(sigma, cells))
    assert all(sq[i, j] == sq[j, i] for i in range(1, n + 1) for j in range(1, n + 1))


@pytest.mark.parametrize(
    "build",
    [
        lambda: build_dsq12(5, 3),
        lambda: build_2diffcyc12(9, 3),
        lambda: build_k10(6, 2, 2),
        lambda: build_single_cycle_12(8, "4^2"),
    ],
)
def test_contour_round_trip(build):
    sigma, sq = build()
    rep = {orb[0]: sq[orb[0]] for orb in cell_orbits(sigma)}
    again = expand_contour(Contour.from_dict(sigma, rep))
    assert again == sq


def test_cell_orbits_partition_the_grid():
    sigma, _ = build_dsq12(3, 2)
    orbs = cell_orbits(sigma)
    cells = [c for orb in orbs for c in orb]
    assert len(cells) == len(set(cells)) == sigma.n ** 2


# --- sweeps -----------------------------------------------------------------------


def test_one_nontrivial_sweep():
    for d in range(2, 21):
        for f in range(0, d // 2 + 2):
            ok = (d % 4 == 0 and f <= d // 2) or (d % 4 == 2 and 1 <= f <= d // 2 + 1)
            if ok:
                sigma, sq = build_1nontriv12(d, f)
                assert is_autoparatopism(sigma, sq)


def test_two_like_cycles_sweep():
    for d in range(2, 12):
        for f in range(0, d + 2):
            if (d % 2 == 0 and f == 0) or (d % 2 and f <= d + 1):
                sigma, sq = build_dsq12(d, f)
                assert is_autoparatopism(sigma, sq)


def test_two_lengths_sweep():
    for d2 in range(2, 14):
        for m in range(3, 22, 2):
            d1 = d2 * m
            if d1 > 40:
                break
            assert is_autoparatopism(*build_2diffcyc12(d1, d2))
            if d1 % 2 == 0:
                for l in range(0, m + 1):
                    assert is_autoparatopism(*build_k10(d1, d2, l))


def test_single_cycle_and_surgery_sweep():
    for n in range(1, 15):
        for cs in partitions(n):
            if single_cycle_admissible(n, cs):
                assert is_autoparatopism(*build_single_cycle_12(n, cs))
    for r in range(0, 12):
        for f in range(1, 8):
            assert is_autoparatopism(*build_betaid12(r, f))


# --- dispatch ---------------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 13))
def test_construct_for_only_members_and_fixed(n):
    tables = PaperTables.load()
    members = tables.members(n, "12")
    built = 0
    for case in enumerate_candidates(n, "12"):
        std = standard_12(n, case.beta, case.gamma)
        sq = construct_for(std)
        if sq is None:
            continue
        built += 1
        assert is_autoparatopism(std, sq)
        assert (case.beta, case.gamma) in members
    assert built > 0


def test_normalize_gives_standard_form():
    sigma, sq = build_2diffcyc12(6, 2)
    std, out = normalize(sigma, sq)
    assert std == standard_12(8, "6.2", "6.2")
    assert is_autoparatopism(std, out)
