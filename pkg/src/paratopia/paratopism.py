"""Paratopisms: elements of S_n wr S_3 acting on the triples of Latin squares.

``sigma = (alpha, beta, gamma; delta)`` sends a triple ``t`` to the triple
whose entry at position ``p delta`` is ``t[p] * component[p]``.  So for
``delta = (12)`` the triple ``(x, y, z)`` goes to ``(y beta, x alpha, z gamma)``
and for ``delta = (123)`` to ``(z gamma, x alpha, y beta)``.  Multiplication is
arranged so that ``L^(s1 * s2) == (L^s1)^s2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .latin import LatinSquare, Triple
from .perms import CycleStructure, Permutation, canonical_permutation, conjugator


class S3(Enum):
    """The six permutations of the triple positions, by image of (1, 2, 3)."""

    E = (1, 2, 3)
    T12 = (2, 1, 3)
    T13 = (3, 2, 1)
    T23 = (1, 3, 2)
    C123 = (2, 3, 1)
    C132 = (3, 1, 2)

    def image(self, p: int) -> int:
        return self.value[p - 1]

    def __mul__(self, other: "S3") -> "S3":
        return _S3_MUL[self, other]

    def inverse(self) -> "S3":
        return _S3_INV[self]

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for p in (1, 2, 3):
            if p in seen:
                continue
            cyc, q = [], p
            while q not in seen:
                seen.add(q)
                cyc.append(q)
                q = self.image(q)
            out.append(tuple(cyc))
        return out

    @property
    def label(self) -> str:
        return _S3_LABEL[self]

    @property
    def shape(self) -> str:
        """``"e"``, ``"12"`` or ``"123"``: the cycle type of the element."""
        return {1: "e", 2: "12", 3: "123"}[max(len(c) for c in self.cycles())]

    @classmethod
    def parse(cls, text: str) -> "S3":
        key = text.strip().strip("()").replace(" ", "")
        for member, label in _S3_LABEL.items():
            if key == label:
                return member
        if key in ("", "1", "id", "epsilon"):
            return cls.E
        raise ValueError(f"unknown element of S3: {text!r}")


_S3_LABEL = {S3.E: "e", S3.T12: "12", S3.T13: "13", S3.T23: "23", S3.C123: "123", S3.C132: "132"}
_S3_MUL = {
    (a, b): next(c for c in S3 if c.value == tuple(b.value[a.value[p] - 1] for p in range(3)))
    for a in S3
    for b in S3
}
_S3_INV = {a: next(b for b in S3 if _S3_MUL[a, b] is S3.E) for a in S3}


@dataclass(frozen=True)
class Paratopism:
    alpha: Permutation
    beta: Permutation
    gamma: Permutation
    delta: S3 = S3.E

    def __post_init__(self):
        if not self.alpha.degree == self.beta.degree == self.gamma.degree:
            raise ValueError("component permutations must share one degree")

    @property
    def n(self) -> int:
        return self.alpha.degree

    @property
    def components(self) -> tuple[Permutation, Permutation, Permutation]:
        return (self.alpha, self.beta, self.gamma)

    @classmethod
    def identity(cls, n: int, delta: S3 = S3.E) -> "Paratopism":
        e = Permutation.identity(n)
        return cls(e, e, e, delta)

    @classmethod
    def from_components(cls, comps, delta: S3) -> "Paratopism":
        return cls(comps[0], comps[1], comps[2], delta)

    def __mul__(self, other: "Paratopism") -> "Paratopism":
        return compose_par(self, other)

    def __pow__(self, k: int) -> "Paratopism":
        return power_par(self, k)

    def inverse(self) -> "Paratopism":
        return inverse_par(self)

    def __str__(self) -> str:
        a, b, c = (p.cycle_string() for p in self.components)
        return f"a={a}; b={b}; c={c}; d={self.delta.label}"

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Paratopism":
        """Parse ``"a=<perm>; b=<perm>; c=<perm>; d=<e|12|13|23|123|132>"``.

        A component may be ``e`` for the identity.  Without ``n`` the degree
        is the largest point named in cycle notation (or the one-line length).
        """
        fields = {}
        for chunk in text.split(";"):
            if not chunk.strip():
                continue
            m = re.fullmatch(r"\s*([abcd])\s*=\s*(.*?)\s*", chunk)
            if m is None:
                raise ValueError(f"bad paratopism field {chunk!r}")
            fields[m.group(1)] = m.group(2)
        if set(fields) != {"a", "b", "c", "d"}:
            raise ValueError(f"paratopism needs fields a, b, c, d; got {sorted(fields)}")
        delta = S3.parse(fields["d"])
        if n is None:
            n = max(_infer_degree(fields[k]) for k in "abc")
        comps = [Permutation.identity(n) if fields[k] in ("e", "id")
                 else Permutation.parse(fields[k], n) if fields[k].startswith("(")
                 else Permutation.parse(fields[k]) for k in "abc"]
        return cls(comps[0], comps[1], comps[2], delta)


def _infer_degree(text: str) -> int:
    nums = [int(x) for x in re.findall(r"\d+", text)]
    if text.strip().startswith("("):
        return max(nums) if nums else 1
    return len(nums)


def _check_degree(*items) -> int:
    degrees = {x.n if isinstance(x, Paratopism) else x.order for x in items}
    if len(degrees) != 1:
        raise ValueError(f"degree mismatch: {sorted(degrees)}")
    return degrees.pop()


def act_triple(sigma: Paratopism, t: Triple) -> Triple:
    comps = sigma.components
    out = [0, 0, 0]
    for p in range(3):
        out[sigma.delta.value[p] - 1] = comps[p][t[p]]
    return (out[0], out[1], out[2])


def triple_map(sigma: Paratopism):
    """A fast closure computing ``act_triple(sigma, .)`` on 1-based triples."""
    comps = [(0,) + c.images for c in sigma.components]
    dest = [sigma.delta.value[p] - 1 for p in range(3)]
    inv = [dest.index(q) for q in range(3)]
    c0, c1, c2 = (comps[inv[q]] for q in range(3))
    i0, i1, i2 = inv

    def apply(t):
        return (c0[t[i0]], c1[t[i1]], c2[t[i2]])

    return apply


def act_square(sigma: Paratopism, sq: LatinSquare) -> LatinSquare:
    _check_degree(sigma, sq)
    f = triple_map(sigma)
    n = sq.order
    grid = [[0] * n for _ in range(n)]
    for t in sq.triples():
        i, j, s = f(t)
        grid[i - 1][j - 1] = s
    return LatinSquare(grid, check=False)


def is_autoparatopism(sigma: Paratopism, sq: LatinSquare) -> bool:
    if sigma.n != sq.order:
        return False
    f = triple_map(sigma)
    rows = sq.rows
    for t in sq.triples():
        i, j, s = f(t)
        if rows[i - 1][j - 1] != s:
            return False
    return True


def compose_par(s1: Paratopism, s2: Paratopism) -> Paratopism:
    """``s1`` then ``s2``: component ``p`` is ``s1[p] * s2[p delta1]``."""
    _check_degree(s1, s2)
    c1, c2 = s1.components, s2.components
    comps = [c1[p] * c2[s1.delta.value[p] - 1] for p in range(3)]
    return Paratopism.from_components(comps, s1.delta * s2.delta)


def inverse_par(s: Paratopism) -> Paratopism:
    c = s.components
    comps = [None, None, None]
    for p in range(3):
        comps[s.delta.value[p] - 1] = c[p].inverse()
    return Paratopism.from_components(comps, s.delta.inverse())


def power_par(s: Paratopism, k: int) -> Paratopism:
    if k < 0:
        return power_par(inverse_par(s), -k)
    result, base = Paratopism.identity(s.n), s
    while k:
        if k & 1:
            result = result * base
        base = base * base
        k >>= 1
    return result


def conjugate_par(s: Paratopism, tau: Paratopism) -> Paratopism:
    """``tau^-1 * s * tau``."""
    return inverse_par(tau) * s * tau


def cycle_products(sigma: Paratopism) -> list[tuple[tuple[int, ...], Permutation]]:
    """For each cycle ``(a1 a2 .. ak)`` of delta, the product ``c[a1] c[a2] .. c[ak]``."""
    comps = sigma.components
    out = []
    for cyc in sigma.delta.cycles():
        prod = comps[cyc[0] - 1]
        for p in cyc[1:]:
            prod = prod * comps[p - 1]
        out.append((cyc, prod))
    return out


@dataclass(frozen=True)
class ConjugacyInvariant:
    delta_class: tuple[int, ...]
    per_cycle_structures: tuple[tuple[int, CycleStructure], ...]

    def __str__(self) -> str:
        body = ", ".join(f"{k}:{cs}" for k, cs in self.per_cycle_structures)
        return f"[{'.'.join(map(str, self.delta_class))}] {body}"


def _cs_key(cs: CycleStructure):
    return cs.lengths()


def conjugacy_invariant(sigma: Paratopism) -> ConjugacyInvariant:
    entries = sorted(
        ((len(cyc), prod.cycle_structure()) for cyc, prod in cycle_products(sigma)),
        key=lambda e: (-e[0], [-x for x in _cs_key(e[1])]),
    )
    return ConjugacyInvariant(
        tuple(sorted((len(c) for c in sigma.delta.cycles()), reverse=True)),
        tuple(entries),
    )


def _coordinate_conjugator(n: int, delta: S3) -> Paratopism:
    """A coordinate permutation ``(e, e, e; pi)`` moving ``delta`` to e, (12) or (123)."""
    target = {"e": S3.E, "12": S3.T12, "123": S3.C123}[delta.shape]
    for pi in S3:
        if pi.inverse() * delta * pi is target:
            return Paratopism.identity(n, pi)
    raise AssertionError("unreachable")


def standard_form_with_conjugator(sigma: Paratopism) -> tuple[Paratopism, Paratopism]:
    """Return ``(std, tau)`` with ``tau^-1 sigma tau == std`` in standard form.

    Standard forms are ``(a, b, c; e)`` with canonical components sorted by
    cycle structure, ``(e, b, c; (12))`` and ``(e, e, c; (123))``, always with
    canonical permutations.
    """
    n = sigma.n
    tau = _coordinate_conjugator(n, sigma.delta)
    s = conjugate_par(sigma, tau)
    a, b, c = s.components
    if s.delta is S3.E:
        # Reorder coordinates so the component cycle structures are sorted.
        def key(x):
            return [[-v for v in p.cycle_structure().lengths()] for p in x.components]

        pi = min(S3, key=lambda q: key(conjugate_par(s, Paratopism.identity(n, q))))
        tau = tau * Paratopism.identity(n, pi)
        s = conjugate_par(sigma, tau)
        mus = [conjugator(p, canonical_permutation(p.cycle_structure())) for p in s.components]
    elif s.delta is S3.T12:
        mu1 = conjugator(a * b, canonical_permutation((a * b).cycle_structure()))
        mus = [mu1, a.inverse() * mu1, conjugator(c, canonical_permutation(c.cycle_structure()))]
    else:
        abc = a * b * c
        mu1 = conjugator(abc, canonical_permutation(abc.cycle_structure()))
        mu2 = a.inverse() * mu1
        mus = [mu1, mu2, b.inverse() * mu2]
    iso = Paratopism(mus[0], mus[1], mus[2], S3.E)
    tau = tau * iso
    std = conjugate_par(sigma, tau)
    return std, tau


def standard_form(sigma: Paratopism) -> Paratopism:
    return standard_form_with_conjugator(sigma)[0]


def standard_12(n: int, beta_cs: CycleStructure | str, gamma_cs: CycleStructure | str) -> Paratopism:
    e = Permutation.identity(n)
    return Paratopism(e, _canon(beta_cs), _canon(gamma_cs), S3.T12)


def standard_123(n: int, gamma_cs: CycleStructure | str) -> Paratopism:
    e = Permutation.identity(n)
    return Paratopism(e, e, _canon(gamma_cs), S3.C123)


def _canon(cs) -> Permutation:
    return canonical_permutation(CycleStructure.parse(cs) if isinstance(cs, str) else cs)


def complete_to_member(alpha: Permutation, beta: Permutation | None, delta_shape: str) -> Paratopism:
    """Complete a partial paratopism to one that is known to lie in Par(n)."""
    n = alpha.degree
    if delta_shape == "12":
        full = Permutation([i % n + 1 for i in range(1, n + 1)])
        return Paratopism(alpha, alpha.inverse() * full, full, S3.T12)
    if delta_shape == "123":
        if beta is None:
            raise ValueError("the (123) completion needs both alpha and beta")
        return Paratopism(alpha, beta, (alpha * beta).inverse(), S3.C123)
    raise ValueError(f"delta shape must be '12' or '123', got {delta_shape!r}")


def find_conjugator(s1: Paratopism, s2: Paratopism) -> Paratopism | None:
    """Some ``tau`` with ``tau^-1 s1 tau == s2``, or None when the invariants differ."""
    if conjugacy_invariant(s1) != conjugacy_invariant(s2):
        return None
    std1, t1 = standard_form_with_conjugator(s1)
    std2, t2 = standard_form_with_conjugator(s2)
    if std1 != std2:
        return None
    return t1 * inverse_par(t2)
