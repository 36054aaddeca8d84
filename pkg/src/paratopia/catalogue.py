"""Catalogues of admissible cycle structures, with the published tables for comparison.

A catalogue run enumerates every standard-form case for one order and one
delta shape, decides each case with :func:`decide_membership`, stores one
JSON line per case and writes every witness square to disk.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .filters import RuleStats
from .latin import LatinSquare
from .paratopism import Paratopism, standard_123, standard_12, is_autoparatopism
from .perms import CycleStructure, partitions
from .search import decide_membership, default_budget

SHAPES = ("12", "123")


def _cs(text: str | CycleStructure) -> CycleStructure:
    return text if isinstance(text, CycleStructure) else CycleStructure.parse(text)


def _order_key(cs: CycleStructure):
    return cs.lengths()


# --- published tables -------------------------------------------------------------


class ChecksumMismatch(RuntimeError):
    pass


def _data_text(name: str) -> str:
    return resources.files("paratopia").joinpath("data").joinpath(name).read_text(encoding="utf-8")


def _verify_checksums() -> None:
    for line in _data_text("CHECKSUMS").splitlines():
        if not line.strip():
            continue
        digest, name = line.split()
        got = hashlib.sha256(_data_text(name).encode("utf-8")).hexdigest()
        if got != digest:
            raise ChecksumMismatch(f"{name}: expected {digest}, got {got}")


def parse_table_12(text: str) -> dict[int, set[tuple[str, str]]]:
    out: dict[int, set[tuple[str, str]]] = {}
    n = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("n="):
            n = int(line[2:])
            out[n] = set()
            continue
        beta, gammas = line.split("|")
        b = str(_cs(beta))
        for g in gammas.split(","):
            out[n].add((b, str(_cs(g))))
    return out


def parse_table_123(text: str) -> dict[int, set[str]]:
    out: dict[int, set[str]] = {}
    n = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("n="):
            n = int(line[2:])
            out[n] = set()
        else:
            out[n] |= {str(_cs(g)) for g in line.split(",")}
    return out


@dataclass
class PaperTables:
    """Member sets as published: ``table1``/``table2`` for (12), ``table3`` for (123)."""

    table1: dict[int, set[tuple[str, str]]]
    table2: dict[int, set[tuple[str, str]]]
    table3: dict[int, set[str]]

    @classmethod
    def load(cls, verify: bool = True) -> "PaperTables":
        if verify:
            _verify_checksums()
        return cls(
            parse_table_12(_data_text("table1.txt")),
            parse_table_12(_data_text("table2.txt")),
            parse_table_123(_data_text("table3.txt")),
        )

    def table_for(self, n: int, shape: str) -> int:
        if shape == "123":
            return 3
        return 1 if n in self.table1 else 2

    def members(self, n: int, shape: str) -> set:
        """Member keys ``(beta, gamma)``; ``beta`` is ``None`` for (123)."""
        if shape == "123":
            return {(None, g) for g in self.table3[n]}
        table = self.table1 if n in self.table1 else self.table2
        return set(table[n])

    def orders(self, table: int) -> list[int]:
        return sorted({1: self.table1, 2: self.table2, 3: self.table3}[table])


# --- entries --------------------------------------------------------------------------


@dataclass(frozen=True)
class Case:
    n: int
    delta: str
    beta: Optional[str]
    gamma: str

    @property
    def key(self) -> tuple:
        return (self.n, self.delta, self.beta, self.gamma)

    def paratopism(self) -> Paratopism:
        if self.delta == "12":
            return standard_12(self.n, self.beta, self.gamma)
        return standard_123(self.n, self.gamma)

    def witness_name(self) -> str:
        b = self.beta if self.beta is not None else "none"
        return f"n{self.n}_d{self.delta}_b{b}_g{self.gamma}.ls"


@dataclass
class CatalogueEntry:
    n: int
    delta: str
    beta: Optional[str]
    gamma: str
    member: Optional[bool]
    method: str
    rule: Optional[str] = None
    witness: Optional[str] = None
    nodes: int = 0

    @property
    def case(self) -> Case:
        return Case(self.n, self.delta, self.beta, self.gamma)

    @property
    def key(self) -> tuple:
        return self.case.key

    @property
    def undecided(self) -> bool:
        return self.member is None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "CatalogueEntry":
        return cls(**json.loads(line))


def enumerate_candidates(n: int, delta_shape: str) -> Iterator[Case]:
    """Every standard-form case of order ``n``: ordered partition pairs for (12), partitions for (123)."""
    if delta_shape not in SHAPES:
        raise ValueError(f"delta shape must be one of {SHAPES}")
    parts = [str(p) for p in partitions(n)]
    if delta_shape == "12":
        for b in parts:
            for g in parts:
                yield Case(n, "12", b, g)
    else:
        for g in parts:
            yield Case(n, "123", None, g)


def classify_case(
    case: Case,
    *,
    budget="default",
    witness_dir: Optional[Path] = None,
    disabled: Iterable[str] = (),
    stats: RuleStats | None = None,
    backend: str = "backtrack",
) -> CatalogueEntry:
    sigma = case.paratopism()
    v = decide_membership(sigma, budget, disabled=disabled, stats=stats, backend=backend)
    path = None
    if v.member:
        if not is_autoparatopism(sigma, v.witness):
            raise AssertionError(f"{case}: witness fails verification")
        if witness_dir is not None:
            witness_dir.mkdir(parents=True, exist_ok=True)
            p = witness_dir / case.witness_name()
            v.witness.save(p)
            path = str(p)
    return CatalogueEntry(case.n, case.delta, case.beta, case.gamma, v.member, v.method, v.rule, path, v.nodes_explored)


def _worker(args) -> tuple[CatalogueEntry, dict]:
    case, budget, witness_dir, disabled, backend = args
    stats = RuleStats()
    entry = classify_case(case, budget=budget, witness_dir=witness_dir, disabled=disabled, stats=stats,
                          backend=backend)
    return entry, dict(stats.fires)


def results_path(out_dir: Path, n: int, delta_shape: str) -> Path:
    return Path(out_dir) / f"n{n}_d{delta_shape}.jsonl"


def load_entries(path: Path) -> dict[tuple, CatalogueEntry]:
    """Entries from a JSON-lines file; a torn last line (from a crash) is ignored."""
    out = {}
    path = Path(path)
    if not path.exists():
        return out
    for line in path.read_text().splitlines():
        try:
            e = CatalogueEntry.from_json(line)
        except (json.JSONDecodeError, TypeError):
            continue
        out[e.key] = e
    return out


def _sort_key(e: CatalogueEntry):
    b = _order_key(_cs(e.beta)) if e.beta else []
    return (e.n, e.delta, b, _order_key(_cs(e.gamma)))


def classify(
    n: int,
    delta_shape: str,
    *,
    out_dir: str | Path | None = None,
    jobs: int = 1,
    resume: bool = False,
    budget="default",
    disabled: Iterable[str] = (),
    stats: RuleStats | None = None,
    backend: str = "backtrack",
) -> list[CatalogueEntry]:
    """Decide every candidate case; returns entries sorted in table order.

    With ``out_dir`` each entry is appended to a JSON-lines file as soon as
    it is known, and witnesses go to ``out_dir/witnesses``.  With ``resume``
    cases already in that file are not recomputed.  The file is rewritten
    in sorted order once the run completes.
    """
    disabled = tuple(disabled)
    done: dict[tuple, CatalogueEntry] = {}
    path = witness_dir = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = results_path(out_dir, n, delta_shape)
        witness_dir = out_dir / "witnesses"
        if resume:
            done = load_entries(path)
        elif path.exists():
            path.unlink()
    todo = [c for c in enumerate_candidates(n, delta_shape) if c.key not in done]
    if budget == "default":
        budget = default_budget(n)
    sink = open(path, "a") if path is not None else None
    try:
        args = [(c, budget, witness_dir, disabled, backend) for c in todo]
        if jobs > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = pool.map(_worker, args, chunksize=max(1, len(args) // (8 * jobs)))
                _collect(results, done, sink, stats)
        else:
            _collect(map(_worker, args), done, sink, stats)
    finally:
        if sink is not None:
            sink.close()
    entries = sorted(done.values(), key=_sort_key)
    if path is not None:
        tmp = path.with_suffix(".tmp")
        tmp.write_text("".join(e.to_json() + "\n" for e in entries))
        os.replace(tmp, path)
    return entries


def _collect(results, done, sink, stats) -> None:
    for entry, fires in results:
        done[entry.key] = entry
        if sink is not None:
            sink.write(entry.to_json() + "\n")
            sink.flush()
        if stats is not None:
            stats.fires.update(fires)


# --- comparison and output ----------------------------------------------------------


@dataclass
class DiffReport:
    """Per order: members found but not published, and published but not found."""

    extra: dict[int, list] = field(default_factory=dict)
    missing: dict[int, list] = field(default_factory=dict)
    undecided: dict[int, list] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not any(self.extra.values()) and not any(self.missing.values()) and not any(self.undecided.values())

    def to_dict(self) -> dict:
        def conv(d):
            return {str(n): [list(k) if isinstance(k, tuple) else k for k in v] for n, v in sorted(d.items()) if v}

        return {"empty": self.empty, "extra": conv(self.extra), "missing": conv(self.missing),
                "undecided": conv(self.undecided)}

    def render(self) -> str:
        if self.empty:
            return "no differences"
        lines = []
        for label, d in (("not in table", self.extra), ("in table, not found", self.missing),
                         ("undecided", self.undecided)):
            for n, keys in sorted(d.items()):
                for b, g in keys:
                    lines.append(f"n={n} {label}: " + (f"{b} | {g}" if b is not None else g))
        return "\n".join(lines)


def diff_against_paper(entries: Iterable[CatalogueEntry], tables: PaperTables, delta_shape: str | None = None) -> DiffReport:
    by_n: dict[tuple[int, str], list[CatalogueEntry]] = {}
    for e in entries:
        if delta_shape is None or e.delta == delta_shape:
            by_n.setdefault((e.n, e.delta), []).append(e)
    report = DiffReport()
    for (n, shape), group in sorted(by_n.items()):
        found = {(e.beta, e.gamma) for e in group if e.member}
        unknown = {(e.beta, e.gamma) for e in group if e.member is None}
        published = tables.members(n, shape)

        def order(keys):
            return sorted(keys, key=lambda k: (_order_key(_cs(k[0])) if k[0] else [], _order_key(_cs(k[1]))))

        # Both shapes may share an order; their keys differ (beta is None for (123)).
        report.extra.setdefault(n, []).extend(order(found - published))
        report.missing.setdefault(n, []).extend(order(published - found - unknown))
        report.undecided.setdefault(n, []).extend(order(unknown))
    return report


def emit(entries: Iterable[CatalogueEntry], fmt: str = "text", *, n: int | None = None, delta: str | None = None) -> str:
    """Serialize entries: JSON lines, or text laid out like the published tables (members only)."""
    entries = sorted(entries, key=_sort_key)
    if fmt == "json":
        return "".join(e.to_json() + "\n" for e in entries)
    if fmt != "text":
        raise ValueError("format must be 'json' or 'text'")
    out = []
    groups: dict[tuple[int, str], list[CatalogueEntry]] = {}
    for e in entries:
        groups.setdefault((e.n, e.delta), []).append(e)
    if not groups:
        head = "# order " + (str(n) if n is not None else "-") + ", delta " + (delta or "-")
        return head + "\n"
    for (order, shape), group in groups.items():
        out.append(f"# order {order}, delta {shape}")
        members = [e for e in group if e.member]
        if shape == "12":
            rows: dict[str, list[str]] = {}
            for e in members:
                rows.setdefault(e.beta, []).append(e.gamma)
            for b, gs in rows.items():
                out.append(f"{b} | " + ", ".join(gs))
        else:
            out.append(", ".join(e.gamma for e in members))
    return "\n".join(out) + "\n"


def entries_from_text(text: str) -> list[CatalogueEntry]:
    """Parse JSON-lines catalogue output."""
    return [CatalogueEntry.from_json(line) for line in text.splitlines() if line.strip()]
