"""Backtracking search for Latin squares with a prescribed autoparatopism.

The search works on whole orbits.  Every triple ``(r, c, s)`` of ``[n]^3``
generates an orbit under ``sigma``; an orbit is *usable* when no two of its
triples share a cell, a (row, symbol) pair or a (column, symbol) pair.
A Latin square fixed by ``sigma`` is exactly a set of usable orbits that
covers each cell, each (row, symbol) and each (column, symbol) once, so the
search is an exact-cover problem over orbits.  Placing one symbol therefore
places its whole orbit, and clashes show up immediately as dead items.

The solver keeps options and items as Python-int bitsets and branches on the
item with the fewest live options (first such item in a fixed order), trying
options in increasing order of their least triple, so node counts are
reproducible.  The final exhaustive run also skips branches that are images of
earlier ones under isotopisms commuting with ``sigma``.  An optional SAT
backend decides the same exact cover with clause learning.
"""

from __future__ import annotations

import os
import random
import sys
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Optional, Sequence

from .latin import LatinSquare, PartialLatinSquare, Triple
from .paratopism import (
    S3,
    Paratopism,
    conjugacy_invariant,
    conjugate_par,
    inverse_par,
    act_square,
    is_autoparatopism,
    standard_form_with_conjugator,
    triple_map,
)

DEFAULT_BUDGET_ENV = "PARATOPIA_BUDGET"


class BudgetExhausted(RuntimeError):
    def __init__(self, nodes: int):
        self.nodes = nodes
        super().__init__(f"node budget exhausted after {nodes} nodes")


@dataclass
class MembershipVerdict:
    """Outcome of a membership decision.

    ``member`` is ``None`` when the budget ran out before a definitive answer.
    """

    member: Optional[bool]
    witness: Optional[LatinSquare] = None
    nodes_explored: int = 0
    method: str = "search"
    rule: Optional[str] = None
    detail: str = ""

    @property
    def undecided(self) -> bool:
        return self.member is None

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "method": self.method,
            "rule": self.rule,
            "nodes_explored": self.nodes_explored,
            "witness": None if self.witness is None else [list(r) for r in self.witness.rows],
        }


def default_budget(n: int) -> Optional[int]:
    """Node budget: ``$PARATOPIA_BUDGET`` if set, unlimited up to n = 12, else 10^9."""
    env = os.environ.get(DEFAULT_BUDGET_ENV)
    if env:
        value = int(env)
        return value if value > 0 else None
    return None if n <= 12 else 10**9


class OrbitCover:
    """The exact-cover formulation of "Latin square fixed by sigma"."""

    def __init__(self, sigma: Paratopism, variant: int = 0):
        self.sigma = sigma
        n = self.n = sigma.n
        f = triple_map(sigma)
        seen: set[Triple] = set()
        self.options: list[tuple[Triple, ...]] = []
        self.option_items: list[tuple[int, ...]] = []
        self.triple_option: dict[Triple, int] = {}
        nn = n * n
        found = []
        for r in range(1, n + 1):
            for c in range(1, n + 1):
                for s in range(1, n + 1):
                    t = (r, c, s)
                    if t in seen:
                        continue
                    orb = []
                    while t not in seen:
                        seen.add(t)
                        orb.append(t)
                        t = f(t)
                    items = set()
                    ok = True
                    for (i, j, k) in orb:
                        trio = ((i - 1) * n + j - 1, nn + (i - 1) * n + k - 1, 2 * nn + (j - 1) * n + k - 1)
                        for it in trio:
                            if it in items:
                                ok = False
                                break
                            items.add(it)
                        if not ok:
                            break
                    if ok:
                        found.append((tuple(orb), tuple(sorted(items))))
        if variant:
            # A fixed reordering per variant: deterministic, but it changes
            # which branch the search explores first.
            random.Random(variant).shuffle(found)
        for idx, (orb, items) in enumerate(found):
            self.options.append(orb)
            self.option_items.append(items)
            for t2 in orb:
                self.triple_option[t2] = idx
        self.n_items = 3 * nn
        item_opts = [0] * self.n_items
        for idx, items in enumerate(self.option_items):
            bit = 1 << idx
            for it in items:
                item_opts[it] |= bit
        self.item_options = item_opts
        self.kill = []
        for items in self.option_items:
            m = 0
            for it in items:
                m |= item_opts[it]
            self.kill.append(m)

    def option_of(self, t: Triple) -> Optional[int]:
        return self.triple_option.get(tuple(t))


# ---------------------------------------------------------------------------
# Symmetry of the search space
#
# An isotopism that commutes with sigma permutes the squares fixed by sigma,
# so at each node only one option per orbit of the group fixing the partial
# solution (and the branching item) needs to be tried.  For the standard
# forms (e, beta, gamma; (12)) and (e, e, gamma; (123)) the isotopisms
# (a, a, c) with a in C(beta), c in C(gamma), respectively (a, a, a) with
# a in C(gamma), commute with sigma.

SYMMETRY_CAP = 200_000


def _centralizer_size(p, rotations_only: bool) -> int:
    size = 1
    by_len: dict[int, int] = {}
    for cyc in p.cycles():
        by_len[len(cyc)] = by_len.get(len(cyc), 0) + 1
    for d, m in by_len.items():
        size *= d**m
        if not rotations_only:
            for k in range(2, m + 1):
                size *= k
    return size


def centralizer_elements(p, rotations_only: bool = False) -> list[tuple[int, ...]]:
    """Every permutation commuting with ``p``, as 0-padded image tuples.

    With ``rotations_only`` only the elements that map each cycle of ``p``
    to itself are returned; they form a subgroup.
    """
    n = p.degree
    by_len: dict[int, list[tuple[int, ...]]] = {}
    for cyc in p.cycles():
        by_len.setdefault(len(cyc), []).append(cyc)
    factors = []
    for d, cycs in sorted(by_len.items()):
        m = len(cycs)
        choices = []
        arrangements = [tuple(range(m))] if rotations_only else list(permutations(range(m)))
        for pi in arrangements:
            for rot in product(range(d), repeat=m):
                choices.append([(c[t], cycs[pi[i]][(t + rot[i]) % d])
                                for i, c in enumerate(cycs) for t in range(d)])
        factors.append(choices)
    out = []
    for combo in product(*factors):
        img = [0] * (n + 1)
        for part in combo:
            for x, y in part:
                img[x] = y
        out.append(tuple(img))
    return out


def _factor_group(p, budget: int) -> tuple[list[tuple[int, ...]], int]:
    for rotations_only in (False, True):
        size = _centralizer_size(p, rotations_only)
        if size <= budget:
            return centralizer_elements(p, rotations_only), size
    return [tuple(range(p.degree + 1))], 1


def commuting_isotopisms(sigma: Paratopism, cap: int = SYMMETRY_CAP) -> list[tuple]:
    """A group of isotopisms ``(a, b, c)`` commuting with a standard-form ``sigma``.

    Returns an empty list when ``sigma`` is not in a supported standard form.
    The group is the full one described above when it has at most ``cap``
    elements, and a subgroup of it otherwise (possibly the trivial group).
    """
    n = sigma.n
    if not sigma.alpha.is_identity():
        return []
    if sigma.delta is S3.T12:
        big, small = sorted((sigma.beta, sigma.gamma), key=lambda q: _centralizer_size(q, False))[::-1]
        small_group, small_size = _factor_group(small, cap)
        big_group, _ = _factor_group(big, max(cap // small_size, 1))
        if big is sigma.beta:
            pairs = product(big_group, small_group)
        else:
            pairs = ((a, c) for c, a in product(big_group, small_group))
        return [(a, a, c) for a, c in pairs]
    if sigma.delta is S3.C123 and sigma.beta.is_identity():
        return [(a, a, a) for a in _factor_group(sigma.gamma, cap)[0]]
    return []


@dataclass
class _Search:
    cover: OrbitCover
    budget: Optional[int]
    nodes: int = 0
    solution: list[int] = field(default_factory=list)

    def _map_item(self, g, it: int) -> int:
        n = self.cover.n
        nn = n * n
        kind, rest = divmod(it, nn)
        x, y = divmod(rest, n)
        first, second = ((g[0], g[1]), (g[0], g[2]), (g[1], g[2]))[kind]
        return kind * nn + (first[x + 1] - 1) * n + second[y + 1] - 1

    def _map_option(self, g, o: int) -> int:
        r, c, s = self.cover.options[o][0]
        return self.cover.triple_option[(g[0][r], g[1][c], g[2][s])]

    def _branches(self, group: list, item: int, mask: int):
        """Orbit representatives among the options in ``mask``, with their stabilizers."""
        fixing = [g for g in group if self._map_item(g, item) == item]
        left = mask
        while left:
            low = left & -left
            o = low.bit_length() - 1
            orbit, stab = 0, []
            for g in fixing:
                img = self._map_option(g, o)
                orbit |= 1 << img
                if img == o:
                    stab.append(g)
            left &= ~orbit
            yield o, stab

    def run(self, active: int, uncovered: set[int], group: Optional[list] = None) -> bool:
        item_options = self.cover.item_options
        kill = self.cover.kill
        option_items = self.cover.option_items
        if not uncovered:
            return True
        best, best_count, best_mask = -1, 1 << 60, 0
        for it in uncovered:
            m = item_options[it] & active
            c = m.bit_count()
            if c < best_count:
                best, best_count, best_mask = it, c, m
                if c <= 1:
                    break
        if best_count == 0:
            return False
        if group is not None and len(group) > 1 and best_count > 1:
            return self._run_symmetric(active, uncovered, group, best, best_mask)
        m = best_mask
        while m:
            low = m & -m
            o = low.bit_length() - 1
            m ^= low
            self.nodes += 1
            if self.budget is not None and self.nodes > self.budget:
                raise BudgetExhausted(self.nodes)
            items = option_items[o]
            uncovered.difference_update(items)
            self.solution.append(o)
            if self.run(active & ~kill[o], uncovered):
                return True
            self.solution.pop()
            uncovered.update(items)
        return False

    def _run_symmetric(self, active: int, uncovered: set[int], group: list, item: int, mask: int) -> bool:
        for o, stab in self._branches(group, item, mask):
            self.nodes += 1
            if self.budget is not None and self.nodes > self.budget:
                raise BudgetExhausted(self.nodes)
            items = self.cover.option_items[o]
            uncovered.difference_update(items)
            self.solution.append(o)
            if self.run(active & ~self.cover.kill[o], uncovered, stab):
                return True
            self.solution.pop()
            uncovered.update(items)
        return False


def _square_from(cover: OrbitCover, chosen: Iterable[int]) -> LatinSquare:
    trip = [t for o in chosen for t in cover.options[o]]
    return LatinSquare.from_triples(cover.n, trip)


def complete_backtrack(
    sigma: Paratopism,
    seed: PartialLatinSquare | Iterable[Triple] | None = None,
    budget: Optional[int] = None,
    variant: int = 0,
    symmetry: bool = False,
) -> MembershipVerdict:
    """Find a Latin square fixed by ``sigma`` extending ``seed``.

    Without a budget the answer is definitive.  With a budget, running out
    raises :class:`BudgetExhausted`.  A ``False`` answer with a nonempty seed
    only says that this seed cannot be completed.

    With ``symmetry`` (and no seed) the search skips branches that an
    isotopism commuting with ``sigma`` maps onto branches already tried; see
    :func:`commuting_isotopisms`.  Both answers stay exact.
    """
    cover = OrbitCover(sigma, variant)
    active = (1 << len(cover.options)) - 1
    uncovered = set(range(cover.n_items))
    chosen: list[int] = []
    if seed is not None:
        triples = seed.triples() if isinstance(seed, PartialLatinSquare) else seed
        for t in triples:
            o = cover.option_of(t)
            if o is None:
                raise ValueError(f"seed triple {t} lies in an orbit that clashes with itself")
            if o in chosen:
                continue
            if not (active >> o) & 1:
                raise ValueError(f"seed triple {t} conflicts with earlier seed entries")
            chosen.append(o)
            active &= ~cover.kill[o]
            uncovered.difference_update(cover.option_items[o])
    limit = sys.getrecursionlimit()
    need = cover.n * cover.n + 100
    if limit < need:
        sys.setrecursionlimit(need)
    state = _Search(cover, budget)
    group = commuting_isotopisms(sigma) if symmetry and not chosen else None
    found = state.run(active, uncovered, group)
    if not found:
        return MembershipVerdict(False, None, state.nodes, "search")
    sq = _square_from(cover, chosen + state.solution)
    if not is_autoparatopism(sigma, sq):
        raise AssertionError("search produced a square that sigma does not fix")
    return MembershipVerdict(True, sq, state.nodes, "search")



BACKENDS = ("backtrack", "sat")


def sat_search(sigma: Paratopism) -> MembershipVerdict:
    """Decide ``sigma`` with a CDCL SAT solver on the same orbit exact cover.

    One variable per usable orbit, and an exactly-one constraint per item.
    Clause learning can refute cases whose obstruction is a counting
    argument, which plain backtracking only finds by exhausting the tree.
    Needs the optional ``python-sat`` package.  ``nodes_explored`` holds the
    solver's conflict count.
    """
    try:
        from pysat.card import CardEnc, EncType
        from pysat.solvers import Solver
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise ImportError("the sat backend needs the python-sat package") from exc

    cover = OrbitCover(sigma)
    top = len(cover.options)
    clauses: list[list[int]] = []
    seen: set[int] = set()
    for mask in cover.item_options:
        if mask in seen:
            continue  # items in one sigma-orbit carry the same options
        seen.add(mask)
        if not mask:
            return MembershipVerdict(False, None, 0, "sat")
        lits = []
        while mask:
            low = mask & -mask
            lits.append(low.bit_length())  # variable o + 1 for option o
            mask ^= low
        enc = CardEnc.equals(lits=lits, bound=1, top_id=top, encoding=EncType.seqcounter)
        top = max(top, enc.nv)
        clauses.extend(enc.clauses)
    with Solver(name="cadical153", bootstrap_with=clauses) as solver:
        found = solver.solve()
        conflicts = solver.accum_stats().get("conflicts", 0)
        model = solver.get_model() if found else None
    if not found:
        return MembershipVerdict(False, None, conflicts, "sat")
    chosen = [v - 1 for v in model if 0 < v <= len(cover.options)]
    sq = _square_from(cover, chosen)
    if not is_autoparatopism(sigma, sq):
        raise AssertionError("sat model is not a square fixed by sigma")
    return MembershipVerdict(True, sq, conflicts, "sat")

# ---------------------------------------------------------------------------
# Brute force over all Latin squares of small order


def all_latin_squares(n: int):
    """Every Latin square of order ``n <= 5`` as an int8 array of shape (N, n, n), 0-based."""
    import numpy as np

    if not 1 <= n <= 5:
        raise ValueError("brute force enumeration is limited to n <= 5")
    perms = list(permutations(range(n)))
    out: list[list[tuple[int, ...]]] = []

    def rec(rows: list[tuple[int, ...]], used: list[int]) -> None:
        if len(rows) == n:
            out.append(list(rows))
            return
        for p in perms:
            if all(not (used[j] >> p[j]) & 1 for j in range(n)):
                rows.append(p)
                for j in range(n):
                    used[j] |= 1 << p[j]
                rec(rows, used)
                for j in range(n):
                    used[j] &= ~(1 << p[j])
                rows.pop()

    rec([], [0] * n)
    return np.array(out, dtype=np.int8)


_SQUARE_CACHE: dict[int, object] = {}


def _squares(n: int):
    if n not in _SQUARE_CACHE:
        _SQUARE_CACHE[n] = all_latin_squares(n)
    return _SQUARE_CACHE[n]


def fixing_squares(sigma: Paratopism):
    """Boolean mask over ``all_latin_squares(n)`` of the squares fixed by ``sigma``."""
    import numpy as np

    n = sigma.n
    sq = _squares(n).reshape(-1, n * n).astype(np.int64)
    rows = np.repeat(np.arange(n), n)
    cols = np.tile(np.arange(n), n)
    coords = [np.broadcast_to(rows, sq.shape), np.broadcast_to(cols, sq.shape), sq]
    new = [None, None, None]
    for p, comp in enumerate(sigma.components):
        table = np.array(comp.images, dtype=np.int64) - 1
        new[sigma.delta.value[p] - 1] = table[coords[p]]
    got = np.take_along_axis(sq, new[0] * n + new[1], axis=1)
    return (got == new[2]).all(axis=1)


def class_representatives(n: int, shape: str, delta: S3 | None = None) -> list[Paratopism]:
    """One paratopism with the given delta for every conjugacy class of that shape."""
    from .perms import canonical_permutation, partitions

    parts = [canonical_permutation(p) for p in partitions(n)]
    e = parts[-1]
    if delta is None:
        delta = {"e": S3.E, "12": S3.T12, "123": S3.C123}[shape]
    reps: dict = {}
    if delta.shape != shape:
        raise ValueError(f"{delta.label} does not have shape {shape}")
    if shape == "e":
        cands = ((a, b, c) for i, a in enumerate(parts) for j, b in enumerate(parts[i:], i)
                 for c in parts[j:])
    else:
        # Vary one slot per delta-cycle; the invariant only sees cycle products.
        slots = [cyc[0] - 1 for cyc in delta.cycles()]

        def place(choice):
            comps = [e, e, e]
            for slot, p in zip(slots, choice):
                comps[slot] = p
            return tuple(comps)

        cands = (place(ch) for ch in product(parts, repeat=len(slots)))
    for a, b, c in cands:
        s = Paratopism(a, b, c, delta)
        reps.setdefault(conjugacy_invariant(s), s)
    return list(reps.values())


def brute_force_par(n: int, delta: S3 | str = "12") -> dict:
    """Exact membership for every conjugacy class with the given delta, n <= 5.

    Returns ``{invariant: (member, representative)}``.
    """
    if isinstance(delta, str):
        delta = S3.parse(delta) if delta not in ("e",) else S3.E
    out = {}
    for s in class_representatives(n, delta.shape, delta):
        out[conjugacy_invariant(s)] = (bool(fixing_squares(s).any()), s)
    return out


# ---------------------------------------------------------------------------
# The full pipeline


def transfer_witness(witness: LatinSquare, tau: Paratopism) -> LatinSquare:
    """Witness for ``sigma`` from a witness of ``tau^-1 sigma tau``."""
    return act_square(inverse_par(tau), witness)


def decide_membership(
    sigma: Paratopism,
    budget: Optional[int] | str = "default",
    *,
    use_filters: bool = True,
    use_constructions: bool = True,
    disabled: Iterable[str] = (),
    stats=None,
    backend: str = "backtrack",
) -> MembershipVerdict:
    """Filters, then explicit constructions, then orbit search.

    The returned witness (if any) is a square fixed by ``sigma`` itself.
    ``backend`` picks the exhaustive stage of the search (see
    :func:`search_standard`).
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    from . import construct, filters

    std, tau = standard_form_with_conjugator(sigma)
    n = sigma.n
    if budget == "default":
        budget = default_budget(n)
    shape = std.delta.shape
    report = None
    if use_filters and shape in ("12", "123"):
        if shape == "12":
            case = filters.StandardCase12(n, std.beta.cycle_structure(), std.gamma.cycle_structure())
            report = filters.filters_12(case, disabled=disabled, stats=stats)
        else:
            case = filters.StandardCase123(n, std.gamma.cycle_structure())
            report = filters.filters_123(case, disabled=disabled, stats=stats)
        if report.excluded:
            return MembershipVerdict(False, None, 0, "filter", report.rule, report.verdict.certificate)
    rule = report.rule if report is not None and report.admitted else None
    if use_constructions:
        built = construct.construct_for(std)
        if built is not None:
            return MembershipVerdict(True, transfer_witness(built, tau), 0, "construct", rule)
    try:
        verdict = search_standard(std, budget, backend)
    except BudgetExhausted as exc:
        return MembershipVerdict(None, None, exc.nodes, "search", rule, "budget exhausted")
    if verdict.member:
        verdict.witness = transfer_witness(verdict.witness, tau)
    elif rule is not None:
        raise AssertionError(f"search refuted a case admitted by {rule}")
    verdict.rule = rule
    return verdict


# (node quota, number of reorderings) for each round of short runs.
PORTFOLIO = ((2_000, 64), (20_000, 16))


def search_standard(std: Paratopism, budget: Optional[int], backend: str = "backtrack") -> MembershipVerdict:
    """Search for a witness of a standard-form paratopism.

    When the fixed points of ``beta`` (shape (12)) or ``gamma`` (shape (123))
    must carry a subsquare, a witness for that subsquare is found first and
    used as a seed; if the seeded search fails, the unseeded search decides.
    That last stage is exhaustive backtracking with symmetry reduction, or,
    for ``backend="sat"``, :func:`sat_search` (which ignores the node budget).
    """
    nodes = 0
    seed = _fixed_point_seed(std, budget)
    # Short runs under reordered options first: witnesses are often found in
    # a few dozen nodes by some ordering while the default one wanders.
    for quota, width in PORTFOLIO:
        for variant in range(1, width + 1):
            if budget is not None and nodes + quota > budget:
                break
            try:
                v = complete_backtrack(std, seed[0] if seed else None, quota, variant)
            except BudgetExhausted as exc:
                nodes += exc.nodes
                continue
            except ValueError:
                break
            nodes += v.nodes_explored
            if v.member:
                v.nodes_explored = nodes
                return v
            if seed is None:
                # A complete run without a seed is a refutation.
                v.nodes_explored = nodes
                return v
            seed = None  # this seed cannot be completed; carry on unseeded
    if seed is not None and backend != "sat":
        seed_triples, used = seed
        nodes += used
        try:
            v = complete_backtrack(std, seed_triples, None if budget is None else max(budget - nodes, 1))
            nodes += v.nodes_explored
            if v.member:
                v.nodes_explored = nodes
                return v
        except BudgetExhausted as exc:
            nodes += exc.nodes
    if backend == "sat":
        v = sat_search(std)
        v.nodes_explored += nodes
        return v
    try:
        v = complete_backtrack(std, None, None if budget is None else max(budget - nodes, 1), symmetry=True)
    except BudgetExhausted as exc:
        raise BudgetExhausted(nodes + exc.nodes) from None
    v.nodes_explored += nodes
    return v


def _fixed_point_seed(std: Paratopism, budget: Optional[int]):
    n = std.n
    if std.delta is S3.T12:
        rows = std.beta.fixed_points()
        if not rows or len(rows) == n:
            return None
        sym_points = [k for k in range(1, n + 1) if std.gamma.cycle_length_of(k) <= 2]
    elif std.delta is S3.C123:
        rows = std.gamma.fixed_points()
        if not rows or len(rows) == n:
            return None
        sym_points = rows
    else:
        return None
    if len(sym_points) != len(rows):
        return None
    f = len(rows)
    sym_index = {k: i + 1 for i, k in enumerate(sym_points)}
    sub_gamma = [sym_index[std.gamma[k]] for k in sym_points]
    from .perms import Permutation

    e = Permutation.identity(f)
    g = Permutation(sub_gamma)
    sub = Paratopism(e, e, g, std.delta) if std.delta is S3.C123 else Paratopism(e, e, g, S3.T12)
    try:
        v = complete_backtrack(sub, None, budget)
    except BudgetExhausted:
        return None
    if not v.member:
        return None
    triples = [(rows[i - 1], rows[j - 1], sym_points[s - 1]) for i, j, s in v.witness.triples()]
    return triples, v.nodes_explored
