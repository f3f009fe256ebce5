"""Small named instance families used by the tests and the CLI.

Clause sets that are unsatisfiable for a crisp combinatorial reason,
search problems with a known-correct (or deliberately broken)
algorithm, and toy machine fixtures with hand-wired grid circuits.
"""

from __future__ import annotations

from itertools import combinations

from .circuits import Circuit, CircuitBuilder, Gate, VarAlloc
from .correctness import SearchProblem
from .formulas import Clause, ClauseSet
from .tableau import TMSpec, TableauInterface, decode_tau


def contradiction_pair() -> ClauseSet:
    """One variable asserted and denied."""
    return ClauseSet(1, (Clause((1,)), Clause((-1,))))


def two_var_unsat() -> ClauseSet:
    """Both branches force variable 2, which is denied."""
    return ClauseSet(2, (Clause((1, 2)), Clause((-1, 2)), Clause((-2,))))


def php(pigeons: int, holes: int) -> ClauseSet:
    """Every pigeon gets a hole, no hole gets two pigeons."""
    if pigeons < 1 or holes < 1:
        raise ValueError("need at least one pigeon and one hole")

    def v(i: int, j: int) -> int:
        return (i - 1) * holes + j

    clauses = [
        Clause(tuple(v(i, j) for j in range(1, holes + 1)))
        for i in range(1, pigeons + 1)
    ]
    for j in range(1, holes + 1):
        for i1, i2 in combinations(range(1, pigeons + 1), 2):
            clauses.append(Clause((-v(i1, j), -v(i2, j))))
    return ClauseSet(pigeons * holes, tuple(clauses))


def tseitin_cycle(k: int) -> ClauseSet:
    """Edge parities around a k-cycle with a single odd node."""
    if k < 2:
        raise ValueError("cycle needs at least two edges")
    clauses = []
    for i in range(1, k + 1):
        a, b = i, i % k + 1
        if i == 1:
            clauses.append(Clause((a, b)))
            clauses.append(Clause((-a, -b)))
        else:
            clauses.append(Clause((a, -b)))
            clauses.append(Clause((-a, b)))
    return ClauseSet(k, tuple(clauses))


def or_chain(k: int, start: int = 1) -> Circuit:
    """k-gate disjunction chain over k + 1 inputs."""
    al = VarAlloc(start)
    xs = tuple(al.fresh() for _ in range(k + 1))
    gates = [Gate(al.fresh(), (xs[0], xs[1]))]
    for i in range(1, k):
        gates.append(Gate(al.fresh(), (gates[-1].var, xs[i + 1])))
    return Circuit(xs, tuple(gates), (gates[-1].var,))


def not_search(n: int, buggy: bool = False) -> SearchProblem:
    """Compute the bitwise complement; the checker accepts exactly
    complements.  The buggy variant copies its input instead."""
    if n < 1:
        raise ValueError("need at least one bit")
    xs = tuple(range(1, n + 1))
    ys = tuple(range(n + 1, 2 * n + 1))
    algo_gates = tuple(
        Gate(y, (x, x) if buggy else (-x, -x)) for x, y in zip(xs, ys)
    )
    algo = Circuit(xs, algo_gates, ys)
    al = VarAlloc(2 * n + 1)
    gates = []
    body = []
    for x, y in zip(xs, ys):
        a = al.fresh()
        gates.append(Gate(a, (-x, -y)))  # not both set
        bb = al.fresh()
        gates.append(Gate(bb, (x, y)))   # not both clear
        body += [-a, -bb]
    d = al.fresh()
    gates.append(Gate(d, tuple(body)))
    delta = al.fresh()
    gates.append(Gate(delta, (-d,)))
    checker = Circuit(xs + ys, tuple(gates), (delta,))
    return SearchProblem(n, xs, ys, algo, checker)


# ---------------------------------------------------------------------------
# Machine fixtures: (machine, target bits, grid circuit, interface).


def tm_halt() -> tuple[TMSpec, tuple[int, ...], Circuit, TableauInterface]:
    """One accepting state; every row repeats the start row 1 0."""
    tm = TMSpec(1, 2, {}, frozenset({0}))
    beta = Circuit((1, 2), (Gate(3, (-2,)), Gate(4, (-2,)), Gate(5, (-2,))), (3, 4, 5))
    iface = TableauInterface(1, (1, 2), (3, 4, 5))
    return tm, decode_tau("2", 2), beta, iface


def tm_write_stay() -> tuple[TMSpec, tuple[int, ...], Circuit, TableauInterface]:
    """On (state 0, symbol 0): write 1, stay, accept.  Input 0 1."""
    tm = TMSpec(2, 2, {(0, 0): (1, 1, "S")}, frozenset({1}))
    beta = Circuit(
        (1, 2),
        (
            Gate(3, (1, 2)),                  # symbol: j or k
            Gate(4, (-2,)),                   # head on column 0
            Gate(5, (1, 2)), Gate(6, (-5,)),  # state 0 only at (0,0)
            Gate(7, (-1, 2)), Gate(8, (-7,)), # state 1 from row 1 on
        ),
        (3, 4, 6, 8),
    )
    iface = TableauInterface(1, (1, 2), (3, 4, 6, 8))
    return tm, decode_tau("3", 2), beta, iface


def tm_right_writer() -> tuple[TMSpec, tuple[int, ...], Circuit, TableauInterface]:
    """Write 1 and move right over zeros, stop and accept on a 1.
    4x4 grid over input 0 1 0 1, output 1 1 0 1."""
    tm = TMSpec(2, 2, {(0, 0): (0, 1, "R"), (0, 1): (1, 1, "S")}, frozenset({1}))
    b = CircuitBuilder(VarAlloc(5))
    j1, j2, k1, k2 = (b.free(v) for v in (1, 2, 3, 4))
    up = b.or_(j1, j2)                    # row >= 1
    home = b.and_(-j1, -j2, -k1, -k2)     # address (0,0)
    sym = b.or_(k1, b.and_(-k1, -k2, up))
    head = b.or_(home, b.and_(up, k1, -k2))
    q0 = b.or_(home, b.and_(j1, -j2, k1, -k2))
    q1 = b.and_(j2, k1, -k2)
    beta = b.build((sym, head, q0, q1))
    iface = TableauInterface(2, (1, 2, 3, 4), beta.outputs)
    return tm, decode_tau("d", 4), beta, iface


def tm_left_runner(vanishing: bool = False) -> tuple[TMSpec, tuple[int, ...], Circuit, TableauInterface]:
    """Walks left off the tape on the first step; no grid is ever
    valid.  The vanishing variant shows the head only at (0,0), the
    grid that would slip through without the off-tape detector."""
    tm = TMSpec(2, 2, {(0, 0): (0, 0, "L"), (0, 1): (0, 1, "L")}, frozenset({1}))
    b = CircuitBuilder(VarAlloc(3))
    jv, kv = b.free(1), b.free(2)
    tt = b.const_true(kv)
    sym = b.not_(tt)
    if vanishing:
        head = b.and_(-jv, -kv)
        q0 = b.and_(-jv, -kv)
    else:
        head = b.not_(kv)
        q0 = b.not_(kv)
    q1 = b.not_(tt)
    beta = b.build((sym, head, q0, q1))
    iface = TableauInterface(1, (1, 2), beta.outputs)
    return tm, (0, 0), beta, iface
