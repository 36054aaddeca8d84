"""Necessary conditions and exact characterizations for standard-form paratopisms.

Two standard shapes are handled:

* ``(e, beta, gamma; (12))``, described by the cycle structures of ``beta``
  and ``gamma`` (:class:`StandardCase12`);
* ``(e, e, gamma; (123))``, described by the cycle structure of ``gamma``
  (:class:`StandardCase123`).

Every exclusion rule has a stable identifier (``R1`` .. ``R8`` for the first
shape, ``Q1`` .. ``Q7`` for the second).  Exact characterizations are named
``CHAR-<tag>``.  The functions here only look at cycle structures.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from typing import Callable, Iterable, Optional, Union

from .perms import CycleStructure, lcm


class FilterContradiction(RuntimeError):
    """An exclusion rule and an exact characterization disagree."""


@dataclass(frozen=True)
class Excluded:
    rule: str
    certificate: str

    kind = "excluded"


@dataclass(frozen=True)
class DefinitelyAdmitted:
    rule: str

    kind = "admitted"
    certificate = ""


@dataclass(frozen=True)
class Undecided:
    kind = "undecided"
    rule = None
    certificate = ""


Verdict = Union[Excluded, DefinitelyAdmitted, Undecided]


@dataclass(frozen=True)
class FilterReport:
    verdict: Verdict
    rules_run: tuple[str, ...]

    @property
    def excluded(self) -> bool:
        return isinstance(self.verdict, Excluded)

    @property
    def admitted(self) -> bool:
        return isinstance(self.verdict, DefinitelyAdmitted)

    @property
    def rule(self) -> Optional[str]:
        return self.verdict.rule

    def to_json(self) -> str:
        return json.dumps(
            {
                "verdict": self.verdict.kind,
                "rule": self.verdict.rule,
                "certificate": self.verdict.certificate or None,
                "rules_run": list(self.rules_run),
            }
        )


@dataclass(frozen=True)
class StandardCase12:
    n: int
    beta: CycleStructure
    gamma: CycleStructure

    def __post_init__(self):
        if self.beta.degree != self.n or self.gamma.degree != self.n:
            raise ValueError(f"cycle structures {self.beta}, {self.gamma} do not have degree {self.n}")

    @classmethod
    def parse(cls, beta: str, gamma: str) -> "StandardCase12":
        b, g = CycleStructure.parse(beta), CycleStructure.parse(gamma)
        return cls(b.degree, b, g)


@dataclass(frozen=True)
class StandardCase123:
    n: int
    gamma: CycleStructure

    def __post_init__(self):
        if self.gamma.degree != self.n:
            raise ValueError(f"cycle structure {self.gamma} does not have degree {self.n}")

    @classmethod
    def parse(cls, gamma: str) -> "StandardCase123":
        g = CycleStructure.parse(gamma)
        return cls(g.degree, g)


@dataclass
class RuleStats:
    """Fire counts per (rule_id, n), accumulated over many filter calls."""

    fires: Counter = field(default_factory=Counter)

    def record(self, rule: str, n: int) -> None:
        self.fires[rule, n] += 1

    def total(self, rule: str) -> int:
        return sum(v for (r, _), v in self.fires.items() if r == rule)

    def merge(self, other: "RuleStats") -> None:
        self.fires.update(other.fires)


RULES_12 = ("R3", "R4", "R5", "R6", "R7", "R8", "R1", "R2")
RULES_123 = ("Q3", "Q4", "Q5", "Q6", "Q7", "Q1", "Q2")

Mult = dict[int, int]


def _mult(cs: CycleStructure) -> Mult:
    return dict(cs.parts)


def _restrict(m: Mult, keep: Callable[[int], bool]) -> Mult:
    return {c: k for c, k in m.items() if keep(c)}


def _size(m: Mult) -> int:
    return sum(c * k for c, k in m.items())


def _order(m: Mult) -> int:
    return lcm(*m)


def _show(m: Mult) -> str:
    if not m:
        return "-"
    return str(CycleStructure(sorted(m.items(), reverse=True)))


def _hall(supply: Mult, demand: Mult, edge: Callable[[int, int], bool]) -> Optional[str]:
    """Feasibility of moving all of ``demand`` into ``supply`` along ``edge``.

    ``supply`` and ``demand`` map class labels to capacities with equal
    totals; returns a violated Hall inequality as text or ``None``.
    """
    labels = list(demand)
    for size in range(1, len(labels) + 1):
        for subset in combinations(labels, size):
            need = sum(demand[c] for c in subset)
            reach = [b for b in supply if any(edge(b, c) for c in subset)]
            have = sum(supply[b] for b in reach)
            if need > have:
                return f"classes {list(subset)} need {need} cells but only {have} are compatible"
    return None


# ---------------------------------------------------------------------------
# (e, beta, gamma; (12))


def _compatible_12(a: int, b: int, c: int) -> bool:
    return lcm(2 * a, 2 * b) == lcm(2 * a, c) == lcm(2 * b, c)


def _r1(n: int, B: Mult, G: Mult) -> Optional[str]:
    sym = {c: c * k for c, k in G.items()}
    cols = {b: b * k for b, k in B.items()}
    for a in B:
        bad = _hall(cols, sym, lambda b, c: _compatible_12(a, b, c))
        if bad:
            return f"row of a {a}-cycle of beta: {bad}"
    for c in G:
        bad = _hall(cols, cols, lambda b, a: _compatible_12(a, b, c))
        if bad:
            return f"symbol of a {c}-cycle of gamma: {bad}"
    return None


def _r3(n: int, B: Mult, G: Mult) -> Optional[str]:
    f = B.get(1, 0)
    if 1 <= f < n and 2 * f > n:
        return f"beta fixes {f} points, more than n/2 = {n / 2:g}"
    return None


def _r4(n: int, B: Mult, G: Mult) -> Optional[str]:
    b, c = _order(B), _order(G)
    if (2 * b) % c:
        return f"order of gamma ({c}) does not divide twice the order of beta ({2 * b})"
    if c % 2 and c != b:
        return f"order of gamma ({c}) is odd but differs from order of beta ({b})"
    return None


def _r5(n: int, B: Mult, G: Mult) -> Optional[str]:
    for d in B:
        if d % 2 and not any(d % c == 0 for c in G):
            return f"beta has a {d}-cycle but no cycle of gamma has length dividing {d}"
    return None


def _r6(n: int, B: Mult, G: Mult) -> Optional[str]:
    f = G.get(1, 0)
    for d, r in B.items():
        bound = (r - 1) * d + (d % 2)
        if f > bound:
            return f"gamma fixes {f} symbols, but beta has {r} cycle(s) of length {d} allowing at most {bound}"
    return None


def _r7(n: int, B: Mult, G: Mult) -> Optional[str]:
    fix_beta = B.get(1, 0)
    for d, r in B.items():
        if d == 1 or r % 2 == 0:
            continue
        gamma_set = 0
        for c, k in G.items():
            if c % 2 == 0 or d % c:
                continue
            if any(1 < e < d and lcm(c, e) == d for e in B):
                continue
            if fix_beta % 2 and c >= d:
                continue
            gamma_set += k
        if d % 2 == 0 and gamma_set:
            return f"{gamma_set} cycle(s) of gamma must fill short orbits of the {d}-cycles of beta, which have none"
        if d % 2 and gamma_set > r:
            return f"{gamma_set} cycle(s) of gamma need short orbits but beta has only {r} cycle(s) of length {d}"
    return None


def _two_adic(n: int) -> int:
    u = 0
    while n % 2 == 0:
        n //= 2
        u += 1
    return u


def _r8(n: int, B: Mult, G: Mult) -> Optional[str]:
    u = _two_adic(n)
    if any(d % (2 ** u) for d in B):
        return None
    odd_b = sum(k for d, k in B.items() if d % 2)
    odd_g = sum(k for c, k in G.items() if c % 2)
    if u >= 1 and odd_g:
        return f"every cycle of beta has length divisible by {2 ** u} but gamma has {odd_g} odd cycle(s)"
    if odd_b < odd_g:
        return f"gamma has {odd_g} odd cycle(s) but beta has only {odd_b}"
    return None


def _r2(n: int, B: Mult, G: Mult, recurse) -> Optional[str]:
    for d in sorted(B):
        rows = _restrict(B, lambda x: d % x == 0)
        syms = _restrict(G, lambda x: (2 * d) % x == 0)
        size = _size(rows)
        if size != _size(syms):
            return (
                f"rows of beta-cycles with length dividing {d} number {size} "
                f"but symbols of gamma-cycles with length dividing {2 * d} number {_size(syms)}"
            )
        if size == n:
            continue
        if 2 * size > n:
            return f"forced subsquare of order {size} exceeds n/2"
        sub = recurse(size, rows, syms)
        if sub:
            return f"forced subsquare ({_show(rows)}, {_show(syms)}) fails {sub[0]}"
        if 2 * size == n:
            other = _restrict(B, lambda x: d % x != 0)
            sub = recurse(size, other, syms)
            if sub:
                return f"complementary subsquare ({_show(other)}, {_show(syms)}) fails {sub[0]}"
    return None


_ARITH_12 = {"R3": _r3, "R4": _r4, "R5": _r5, "R6": _r6, "R7": _r7, "R8": _r8, "R1": _r1}


def _char12(n: int, B: Mult, G: Mult) -> Optional[tuple[bool, str]]:
    """Exact answer when some characterization covers the case, else ``None``."""
    if n == 1:
        return True, "CHAR-trivial"
    if B == {1: n}:
        ok = set(G) <= {1, 2} and G.get(1, 0) >= 1
        return ok, "CHAR-identity-beta"
    if B == {n: 1}:
        ok = all((2 * n) % c == 0 for c in G) and sum(k for c, k in G.items() if c % 2) <= 1
        return ok, "CHAR-single-cycle-beta"
    nontriv_b = {c: k for c, k in B.items() if c > 1}
    f = B.get(1, 0)
    if B == G:
        if len(nontriv_b) == 1 and set(nontriv_b.values()) == {1}:
            (d,) = nontriv_b
            return (f <= 1 if d % 2 else f == 0), "CHAR-equal-one-cycle"
        if len(nontriv_b) == 1 and set(nontriv_b.values()) == {2}:
            (d,) = nontriv_b
            return (f <= d + 1 if d % 2 else f == 0), "CHAR-equal-two-like-cycles"
        if len(nontriv_b) == 2 and set(nontriv_b.values()) == {1}:
            d1, d2 = sorted(nontriv_b, reverse=True)
            return (d1 % d2 == 0 and (d1 // d2) % 2 == 1 and f == 0), "CHAR-equal-two-unlike-cycles"
        if f == 0 and len(B) == 2:
            (d1, k1), (d2, l) = sorted(B.items(), reverse=True)
            if k1 == 1 and d1 % 2 == 0 and d1 % d2 == 0 and (d1 // d2) % 2 == 1:
                return l <= d1 // d2, "CHAR-equal-long-and-short-cycles"
        if len(B) == 1:
            (d,) = B
            if d % 2:
                return True, "CHAR-semiregular"
    if len(G) == 1 and len(B) == 1:
        (c, r), (b, s) = next(iter(G.items())), next(iter(B.items()))
        if c % 2 == 0 and b == c // 2 and s == 2 * r:
            return c % 4 == 0, "CHAR-semiregular"
    gf = G.get(1, 0)
    if gf == f and len(nontriv_b) == 1 and len(G) - (1 if gf else 0) == 1:
        (h, k) = next(iter(nontriv_b.items()))
        (d, m) = next((c, m) for c, m in G.items() if c > 1)
        if k == 2 and m == 1 and d == 2 * h:
            if d % 4 == 0:
                return f <= d // 2, "CHAR-square-root-one-cycle"
            return 1 <= f <= d // 2 + 1, "CHAR-square-root-one-cycle"
    if len(B) == 1:
        (d, r) = next(iter(B.items()))
        if r > 1 and all(k % r == 0 for k in G.values()):
            if all((2 * d) % c == 0 for c in G) and sum(k // r for c, k in G.items() if c % 2) <= 1:
                return True, "CHAR-lifted-single-cycle"
    return None


def _excluded_12(n, B, G, disabled) -> Optional[tuple[str, str]]:
    def recurse(m, b, g):
        return _excluded_12(m, b, g, disabled)

    for rule in RULES_12:
        if rule in disabled:
            continue
        if rule == "R2":
            why = _r2(n, B, G, recurse)
        else:
            why = _ARITH_12[rule](n, B, G)
        if why:
            return rule, why
    char = _char12(n, B, G)
    if char and not char[0]:
        return char[1], "characterized as non-member"
    return None


def filters_12(
    case: StandardCase12,
    *,
    disabled: Iterable[str] = (),
    stats: RuleStats | None = None,
    use_characterizations: bool = True,
) -> FilterReport:
    """Run the exclusion rules, then the characterizations, on ``case``."""
    disabled = frozenset(disabled)
    n, B, G = case.n, _mult(case.beta), _mult(case.gamma)
    run: list[str] = []
    excluded = None

    def recurse(m, b, g):
        return _excluded_12(m, b, g, disabled)

    for rule in RULES_12:
        if rule in disabled:
            continue
        run.append(rule)
        why = _r2(n, B, G, recurse) if rule == "R2" else _ARITH_12[rule](n, B, G)
        if why:
            excluded = Excluded(rule, why)
            break
    char = _char12(n, B, G) if use_characterizations else None
    if char:
        run.append(char[1])
    if excluded is not None:
        if char and char[0]:
            raise FilterContradiction(f"{case}: {excluded.rule} excludes but {char[1]} admits")
        if stats is not None:
            stats.record(excluded.rule, n)
        return FilterReport(excluded, tuple(run))
    if char:
        if stats is not None:
            stats.record(char[1], n)
        verdict = DefinitelyAdmitted(char[1]) if char[0] else Excluded(char[1], "characterized as non-member")
        return FilterReport(verdict, tuple(run))
    return FilterReport(Undecided(), tuple(run))


def decide_characterized_12(case: StandardCase12) -> FilterReport:
    char = _char12(case.n, _mult(case.beta), _mult(case.gamma))
    if char is None:
        return FilterReport(Undecided(), ())
    verdict = DefinitelyAdmitted(char[1]) if char[0] else Excluded(char[1], "characterized as non-member")
    return FilterReport(verdict, (char[1],))


# ---------------------------------------------------------------------------
# (e, e, gamma; (123))


def _compatible_123(a: int, b: int, c: int) -> bool:
    return lcm(a, b) == lcm(a, c) == lcm(b, c)


def _q1(n: int, G: Mult) -> Optional[str]:
    cls = {c: c * k for c, k in G.items()}
    for a in G:
        bad = _hall(cls, cls, lambda b, c: _compatible_123(a, b, c))
        if bad:
            return f"row of a {a}-cycle: {bad}"
    return None


def _q3(n: int, G: Mult) -> Optional[str]:
    f = G.get(1, 0)
    if f < n and 2 * f > n:
        return f"gamma fixes {f} points, more than n/2 = {n / 2:g}"
    return None


def _q4(n: int, G: Mult) -> Optional[str]:
    u = _two_adic(n)
    if u >= 1 and all(c % (2 ** u) == 0 for c in G):
        return f"every cycle length is divisible by {2 ** u}, the 2-part of n"
    return None


def _q5(n: int, G: Mult) -> Optional[str]:
    for d, r in G.items():
        others = [c for c in G if c != d]
        # Two points j, k may share one cycle, so a single cycle of length x
        # counts as the pair (x, x).
        pairs = list(combinations(others, 2)) + [(x, x) for x in others]
        if any(lcm(d, x) == lcm(d, y) == lcm(x, y) for x, y in pairs):
            continue
        if r == 1 and (n + d) % 3 == 1:
            return f"a single {d}-cycle with n + d = {n + d} = 1 mod 3"
        if d % 3 == 0 and (n * r) % 3:
            return f"{r} cycle(s) of length {d} with 3 not dividing n*r = {n * r}"
    return None


def _q6(n: int, G: Mult) -> Optional[str]:
    if len(G) != 1:
        return None
    (d, r), = G.items()
    if d % 3 == 0 and r % 3:
        return f"semi-regular {d}^{r} with 3 | {d} but 3 not dividing {r}"
    if d % 6 == 0 and r % 6:
        return f"semi-regular {d}^{r} with 6 | {d} but 6 not dividing {r}"
    return None


def _q7(n: int, G: Mult) -> Optional[str]:
    if n == 10 and G == {5: 2}:
        return "cycle structure 5^2 at order 10 admits no square (exhaustive argument)"
    return None


def _q2(n: int, G: Mult, recurse) -> Optional[str]:
    for d in sorted(G):
        part = _restrict(G, lambda x: d % x == 0)
        size = _size(part)
        if size == n:
            continue
        if 2 * size > n:
            return f"forced subsquare on the cycles of length dividing {d} has order {size} > n/2"
        sub = recurse(size, part)
        if sub:
            return f"forced subsquare {_show(part)} fails {sub[0]}"
    return None


_ARITH_123 = {"Q1": _q1, "Q3": _q3, "Q4": _q4, "Q5": _q5, "Q6": _q6, "Q7": _q7}


def _char123(n: int, G: Mult) -> Optional[tuple[bool, str]]:
    if G == {1: n}:
        return True, "CHAR-identity-gamma"
    f = G.get(1, 0)
    nontriv = {c: k for c, k in G.items() if c > 1}
    if len(nontriv) == 1:
        (d, r), = nontriv.items()
        if r == 1 and d % 3 and f <= d:
            if f % 3 == 0:
                ok = d % 3 == 1 and (f > 0 or d % 2 == 1)
            elif f % 3 == 1:
                ok = f != 1 or d % 6 != 5
            else:
                ok = d % 3 == 2
            return ok, ("CHAR-single-cycle" if f == 0 else "CHAR-one-cycle-and-fixed")
        if r == 3 and f <= 3 * d:
            if f == 0:
                return d % 2 == 1, "CHAR-three-like-cycles"
            return True, "CHAR-three-like-cycles-and-fixed"
    return None


def _excluded_123(n, G, disabled) -> Optional[tuple[str, str]]:
    def recurse(m, g):
        return _excluded_123(m, g, disabled)

    for rule in RULES_123:
        if rule in disabled:
            continue
        why = _q2(n, G, recurse) if rule == "Q2" else _ARITH_123[rule](n, G)
        if why:
            return rule, why
    char = _char123(n, G)
    if char and not char[0]:
        return char[1], "characterized as non-member"
    return None


def filters_123(
    case: StandardCase123,
    *,
    disabled: Iterable[str] = (),
    stats: RuleStats | None = None,
    use_characterizations: bool = True,
) -> FilterReport:
    disabled = frozenset(disabled)
    n, G = case.n, _mult(case.gamma)
    run: list[str] = []
    excluded = None

    def recurse(m, g):
        return _excluded_123(m, g, disabled)

    for rule in RULES_123:
        if rule in disabled:
            continue
        run.append(rule)
        why = _q2(n, G, recurse) if rule == "Q2" else _ARITH_123[rule](n, G)
        if why:
            excluded = Excluded(rule, why)
            break
    char = _char123(n, G) if use_characterizations else None
    if char:
        run.append(char[1])
    if excluded is not None:
        if char and char[0]:
            raise FilterContradiction(f"{case}: {excluded.rule} excludes but {char[1]} admits")
        if stats is not None:
            stats.record(excluded.rule, n)
        return FilterReport(excluded, tuple(run))
    if char:
        if stats is not None:
            stats.record(char[1], n)
        verdict = DefinitelyAdmitted(char[1]) if char[0] else Excluded(char[1], "characterized as non-member")
        return FilterReport(verdict, tuple(run))
    return FilterReport(Undecided(), tuple(run))


def decide_characterized_123(case: StandardCase123) -> FilterReport:
    char = _char123(case.n, _mult(case.gamma))
    if char is None:
        return FilterReport(Undecided(), ())
    verdict = DefinitelyAdmitted(char[1]) if char[0] else Excluded(char[1], "characterized as non-member")
    return FilterReport(verdict, (char[1],))
