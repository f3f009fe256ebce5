"""Generators for the correctness clause sets.

The central artifact is the clause set C over a clause set Omega and a
tree-describing circuit: it is unsatisfiable exactly when every leaf
clause extracted from the circuit weakens some member of Omega, i.e.
when the described refutation is correct.

Canonical variable layout (normative for proof portability):
  1..n                      branch variables z_1..z_n
  lambda block              tt, then the window grid u_{i,j} row-major
  w grid                    w_{i,m} row-major (defined by copy outputs)
  delta block               weakening-checker gates, delta last
  copy gates                copy i of the t-th non-output gate at
                            copy_base + (t-1)*n + (i-1)
Interleaving copies by gate position and placing the delta block
before them keeps every variable that does not belong to the described
circuit itself at an id depending only on (n, Omega), so clause sets
for grown circuits literally contain the originals.

Clause order: delta-block clauses, the unit {-delta}, lambda clauses,
then copy clauses for i = 1..n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .circuits import (
    Circuit,
    CircuitBuilder,
    CircuitReport,
    Gate,
    VarAlloc,
    circuit_clauses,
    gate_clauses,
    map_literal,
)
from .encoding import TreeInterface, bit, check_interface, output_width
from .formulas import Clause, ClauseSet


class CorrectnessError(ValueError):
    pass


def _or_chain(b: CircuitBuilder, lits: tuple[int, ...], binary: bool) -> int:
    """One wide gate, or a left-deep fan-in-2 chain in binary mode."""
    if not binary or len(lits) <= 2:
        return b.gate(lits)
    cur = b.gate(lits[:2])
    for lit in lits[2:]:
        cur = b.gate((cur, lit))
    return cur


@dataclass(frozen=True)
class DeltaBundle:
    """Checker circuit: given n encoded literals (sign bit x_i plus
    index bits y_{i,m}), the output is true iff the clause they spell
    weakens some member of Omega."""

    circuit: Circuit
    x_vars: tuple[int, ...]
    y_vars: tuple[tuple[int, ...], ...]
    s_vars: dict[tuple[int, int, int], int]
    l_vars: dict[tuple[int, int], int]
    w_vars: tuple[int, ...]
    delta: int
    const: Optional[int]


def gen_delta(
    omega: ClauseSet,
    n: int,
    fresh: Optional[VarAlloc] = None,
    x_vars: Optional[tuple[int, ...]] = None,
    y_vars: Optional[tuple[tuple[int, ...], ...]] = None,
    binary: bool = False,
) -> DeltaBundle:
    if omega.n > n:
        raise CorrectnessError(f"clause set over {omega.n} variables, limit {n}")
    if n < 1:
        raise CorrectnessError("need at least one variable")
    if fresh is None:
        fresh = VarAlloc(1)
    width = output_width(n)
    b = CircuitBuilder(fresh)
    if x_vars is None:
        x_vars = tuple(b.free() for _ in range(n))
    else:
        for v in x_vars:
            b.free(v)
    if y_vars is None:
        y_vars = tuple(tuple(b.free() for _ in range(width)) for _ in range(n))
    else:
        for row in y_vars:
            for v in row:
                b.free(v)
    if len(x_vars) != n or len(y_vars) != n or any(len(r) != width for r in y_vars):
        raise CorrectnessError("input layout does not match n")

    need_const = len(omega.clauses) == 0 or any(not c.literals for c in omega)
    const = b.const_true(x_vars[0]) if need_const else None

    s_vars: dict[tuple[int, int, int], int] = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in (0, 1):
                body = (x_vars[i - 1] if k == 0 else -x_vars[i - 1],) + tuple(
                    -y_vars[i - 1][m - 1] if bit(m, j) else y_vars[i - 1][m - 1]
                    for m in range(1, width + 1)
                )
                s_vars[(i, j, k)] = _or_chain(b, body, binary)
    l_vars: dict[tuple[int, int], int] = {}
    for j in range(1, n + 1):
        for k in (0, 1):
            l_vars[(j, k)] = _or_chain(
                b, tuple(-s_vars[(i, j, k)] for i in range(1, n + 1)), binary
            )
    w_list = []
    for c in omega:
        if not c.literals:
            w_list.append(b.not_(const))
            continue
        body = tuple(
            -l_vars[(abs(lit), 1 if lit > 0 else 0)] for lit in c
        )
        w_list.append(_or_chain(b, body, binary))
    if omega.clauses:
        delta = _or_chain(b, tuple(-w for w in w_list), binary)
    else:
        delta = b.not_(const)
    return DeltaBundle(
        b.build([delta]), x_vars, y_vars, s_vars, l_vars, tuple(w_list), delta, const
    )


@dataclass(frozen=True)
class LambdaBundle:
    """Window grid: row i of u_{i,j} spells the depth-i window over
    branch bits z: zeros, a single one at column n-i+1, then z_1.."""

    circuit: Circuit
    z_vars: tuple[int, ...]
    grid: dict[tuple[int, int], int]
    const_true: int


def gen_lambda(
    n: int, fresh: Optional[VarAlloc] = None, z_vars: Optional[tuple[int, ...]] = None
) -> LambdaBundle:
    if n < 1:
        raise CorrectnessError("need at least one variable")
    if fresh is None:
        fresh = VarAlloc(1)
    b = CircuitBuilder(fresh)
    if z_vars is None:
        z_vars = tuple(b.free() for _ in range(n))
    else:
        for v in z_vars:
            b.free(v)
    tt = b.const_true(z_vars[0])
    grid: dict[tuple[int, int], int] = {}
    for i in range(1, n + 1):
        for j in range(0, n + 1):
            if j <= n - i:
                grid[(i, j)] = b.not_(tt)
            elif j == n - i + 1:
                grid[(i, j)] = b.gate((tt,))
            else:
                grid[(i, j)] = b.gate((z_vars[j - (n - i + 1) - 1],))
    outputs = [grid[(i, j)] for i in range(1, n + 1) for j in range(0, n + 1)]
    return LambdaBundle(b.build(outputs), z_vars, grid, tt)


@dataclass(frozen=True)
class CorrectnessBundle:
    n: int
    clauses: ClauseSet
    circuit: Circuit  # all gates over frees z_1..z_n, output delta
    z_vars: tuple[int, ...]
    u_grid: dict[tuple[int, int], int]
    w_grid: dict[tuple[int, int], int]
    delta: int
    neg_delta_index: int
    copy_maps: tuple[dict[int, int], ...]
    delta_bundle: DeltaBundle
    lambda_bundle: LambdaBundle
    copy_base: int
    clause_index: dict[Clause, int] = field(repr=False)

    def find_clause(self, clause: Clause) -> int:
        if clause not in self.clause_index:
            raise CorrectnessError(f"clause {clause} not in the bundle")
        return self.clause_index[clause]


def gen_C(omega: ClauseSet, beta: Circuit, iface: TreeInterface) -> CorrectnessBundle:
    """Correctness clause set for the refutation described by beta.

    Satisfiable exactly when some branch-bit vector x yields a leaf
    clause that weakens no member of omega.  Extra frees of beta (ids
    within 1..n) are left in place in every copy, so they alias the
    branch variables.
    """
    n = iface.n
    if omega.n != n:
        raise CorrectnessError(f"omega over {omega.n} variables, interface says {n}")
    rep = check_interface(beta, iface, extra_free_limit=n)
    if not rep:
        raise CorrectnessError(f"bad interface: {rep.reason}")
    width = output_width(n)

    z_vars = tuple(range(1, n + 1))
    lam = gen_lambda(n, VarAlloc(n + 1), z_vars=z_vars)
    w_base = n + 2 + n * (n + 1)
    w_grid = {
        (i, m): w_base + (i - 1) * width + (m - 1)
        for i in range(1, n + 1)
        for m in range(1, width + 1)
    }
    delta_base = w_base + n * width
    delta = gen_delta(
        omega,
        n,
        VarAlloc(delta_base),
        x_vars=z_vars,
        y_vars=tuple(
            tuple(w_grid[(i, m)] for m in range(1, width + 1)) for i in range(1, n + 1)
        ),
    )
    copy_base = delta_base + len(delta.circuit.gates)

    outputs_pos = {v: m for m, v in enumerate(iface.outputs, start=1)}
    non_output = [g for g in beta.gates if g.var not in outputs_pos]
    pos_of = {g.var: t for t, g in enumerate(non_output, start=1)}
    copy_maps = []
    copy_gate_lists = []
    for i in range(1, n + 1):
        varmap = {x: lam.grid[(i, j)] for j, x in enumerate(iface.inputs)}
        for v, m in outputs_pos.items():
            varmap[v] = w_grid[(i, m)]
        for v, t in pos_of.items():
            varmap[v] = copy_base + (t - 1) * n + (i - 1)
        for v in beta.free:
            varmap.setdefault(v, v)  # extra frees alias the branch bits
        gates = []
        for g in beta.gates:
            gates.append(
                Gate(varmap[g.var], tuple(map_literal(l, varmap) for l in g.body))
            )
        copy_maps.append(varmap)
        copy_gate_lists.append(gates)

    all_gates = list(lam.circuit.gates)
    for gates in copy_gate_lists:
        all_gates.extend(gates)
    all_gates.extend(delta.circuit.gates)
    circuit = Circuit(z_vars, tuple(all_gates), (delta.delta,))

    clauses: list[Clause] = []
    for g in delta.circuit.gates:
        clauses.extend(gate_clauses(g))
    neg_delta_index = len(clauses)
    clauses.append(Clause((-delta.delta,)))
    for g in lam.circuit.gates:
        clauses.extend(gate_clauses(g))
    for gates in copy_gate_lists:
        for g in gates:
            clauses.extend(gate_clauses(g))
    top = max(v for v in (copy_base + len(non_output) * n - 1, delta_base - 1, n))
    cs = ClauseSet(max(top, delta.delta), clauses)
    index: dict[Clause, int] = {}
    for pos, c in enumerate(cs.clauses):
        index.setdefault(c, pos)
    return CorrectnessBundle(
        n=n,
        clauses=cs,
        circuit=circuit,
        z_vars=z_vars,
        u_grid=lam.grid,
        w_grid=w_grid,
        delta=delta.delta,
        neg_delta_index=neg_delta_index,
        copy_maps=tuple(copy_maps),
        delta_bundle=delta,
        lambda_bundle=lam,
        copy_base=copy_base,
        clause_index=index,
    )


def serialize_sidecar(bundle: CorrectnessBundle) -> str:
    lines = []
    for i, v in enumerate(bundle.z_vars, start=1):
        lines.append(f"zvar {i} {v}")
    width = output_width(bundle.n)
    for i in range(1, bundle.n + 1):
        for m in range(1, width + 1):
            lines.append(f"wvar {i} {m} {bundle.w_grid[(i, m)]}")
    lines.append(f"delta {bundle.delta}")
    lines.append(f"neg-delta-clause {bundle.neg_delta_index}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SearchProblem:
    """A total search relation: the checker accepts (x, y) pairs, the
    algorithm proposes y from x; shared variables are exactly x and y."""

    n: int
    xs: tuple[int, ...]
    ys: tuple[int, ...]
    algorithm: Circuit
    checker: Circuit


def check_search_problem(sp: SearchProblem) -> CircuitReport:
    if len(sp.xs) != sp.n or len(set(sp.xs)) != sp.n:
        return CircuitReport(False, "bad input block")
    if tuple(sp.algorithm.free) != sp.xs:
        return CircuitReport(False, "algorithm frees are not the inputs")
    if tuple(sp.algorithm.outputs) != sp.ys:
        return CircuitReport(False, "algorithm outputs are not the y block")
    if set(sp.checker.free) != set(sp.xs) | set(sp.ys):
        return CircuitReport(False, "checker frees are not exactly inputs plus y block")
    if len(sp.checker.outputs) != 1:
        return CircuitReport(False, "checker must have a single verdict output")
    shared = set(sp.algorithm.variables()) & set(sp.checker.variables())
    if shared != set(sp.xs) | set(sp.ys):
        return CircuitReport(
            False, f"shared variables {sorted(shared)} beyond the interface"
        )
    return CircuitReport(True)


def gen_correct(sp: SearchProblem) -> ClauseSet:
    """Clauses asserting the algorithm errs on some input: algorithm
    gates, checker gates, and the negated verdict."""
    rep = check_search_problem(sp)
    if not rep:
        raise CorrectnessError(f"bad search problem: {rep.reason}")
    a = circuit_clauses(sp.algorithm)
    c = circuit_clauses(sp.checker)
    verdict = sp.checker.outputs[0]
    n = max(a.n, c.n, verdict)
    return ClauseSet(n, a.clauses + c.clauses + (Clause((-verdict,)),))
