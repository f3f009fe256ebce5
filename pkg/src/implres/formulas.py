"""Core propositional objects: literals, clauses, clause sets.

Literals are nonzero DIMACS-style integers: ``v`` for a positive
occurrence of variable ``v`` and ``-v`` for a negated one.  A clause is
a set of literals kept in a canonical sorted order so that equal
clauses compare and hash equal.  A clause set fixes the number of
variables ``n`` and owns an ordered tuple of clauses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional


class FormulaError(ValueError):
    """Raised for malformed clauses, clause sets, or DIMACS input."""


def check_literal(lit: int) -> int:
    if not isinstance(lit, int) or isinstance(lit, bool) or lit == 0:
        raise FormulaError(f"bad literal {lit!r}")
    return lit


def _canonical(literals: Iterable[int]) -> tuple[int, ...]:
    seen = set()
    out = []
    for lit in literals:
        check_literal(lit)
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    # negative literal sorts before the positive one of the same variable
    out.sort(key=lambda l: (abs(l), l > 0))
    return tuple(out)


@dataclass(frozen=True)
class Clause:
    """An immutable clause; literals are deduplicated and sorted."""

    literals: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "literals", _canonical(self.literals))

    def __iter__(self) -> Iterator[int]:
        return iter(self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    def __contains__(self, lit: int) -> bool:
        return lit in self.literals

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def variables(self) -> frozenset[int]:
        return frozenset(abs(l) for l in self.literals)

    def is_tautology(self) -> bool:
        lits = set(self.literals)
        return any(-l in lits for l in lits)

    def union(self, other: "Clause | Iterable[int]") -> "Clause":
        other_lits = other.literals if isinstance(other, Clause) else tuple(other)
        return Clause(self.literals + tuple(other_lits))

    def without(self, lit: int) -> "Clause":
        return Clause(tuple(l for l in self.literals if l != lit))

    def __str__(self) -> str:
        return "{" + ", ".join(str(l) for l in self.literals) + "}"


EMPTY_CLAUSE = Clause()


def is_weakening(base: Clause, candidate: Clause) -> bool:
    """True when ``candidate`` contains every literal of ``base``."""
    return set(base.literals) <= set(candidate.literals)


@dataclass(frozen=True)
class ClauseSet:
    """A CNF formula: ``n`` variables (numbered 1..n) plus clauses."""

    n: int
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise FormulaError(f"negative variable count {self.n}")
        norm = tuple(
            c if isinstance(c, Clause) else Clause(tuple(c)) for c in self.clauses
        )
        object.__setattr__(self, "clauses", norm)
        for c in norm:
            for lit in c:
                if abs(lit) > self.n:
                    raise FormulaError(f"variable {abs(lit)} out of range 1..{self.n}")

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __getitem__(self, i: int) -> Clause:
        return self.clauses[i]


def satisfies(assignment: dict[int, bool], clause: Clause) -> bool:
    """True when the (total) assignment makes at least one literal true."""
    for lit in clause:
        value = assignment[abs(lit)]
        if value == (lit > 0):
            return True
    return False


def brute_force_sat(cs: ClauseSet, limit: int = 25) -> Optional[dict[int, bool]]:
    """Exhaustive satisfiability oracle.

    Returns the lexicographically first model (False < True over
    variables 1..n) or None when unsatisfiable.  Guarded to small n so
    accidental misuse fails loudly instead of hanging.
    """
    if cs.n > limit:
        raise FormulaError(f"brute_force_sat limited to n <= {limit}, got n={cs.n}")
    for bits in itertools.product((False, True), repeat=cs.n):
        assignment = {v: bits[v - 1] for v in range(1, cs.n + 1)}
        if all(satisfies(assignment, c) for c in cs):
            return assignment
    return None


def parse_dimacs(text: str) -> ClauseSet:
    """Parse DIMACS CNF.  Strict: clause count must match the header."""
    n = None
    m = None
    clauses: list[Clause] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if n is not None:
                raise FormulaError("duplicate DIMACS header")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise FormulaError(f"malformed header {line!r}")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormulaError(f"malformed header {line!r}") from None
            if n < 0 or m < 0:
                raise FormulaError(f"malformed header {line!r}")
            continue
        if n is None:
            raise FormulaError("clause data before DIMACS header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormulaError(f"bad token {tok!r}") from None
            if lit == 0:
                clauses.append(Clause(tuple(pending)))
                pending.clear()
            else:
                pending.append(lit)
    if n is None:
        raise FormulaError("missing DIMACS header")
    if pending:
        raise FormulaError("truncated final clause (missing 0 terminator)")
    if len(clauses) != m:
        raise FormulaError(f"header declares {m} clauses, found {len(clauses)}")
    return ClauseSet(n, tuple(clauses))


def serialize_dimacs(cs: ClauseSet) -> str:
    lines = [f"p cnf {cs.n} {len(cs.clauses)}"]
    for c in cs:
        lines.append(" ".join(str(l) for l in c.literals) + " 0")
    return "\n".join(lines) + "\n"
