"""Extension-gate circuits.

A gate defines an extension variable as the disjunction of 1..k
literals; a circuit is an acyclic, topologically ordered sequence of
such gates over a set of free input variables, plus an ordered list of
output variables.  Circuits expand to CNF via the standard clause
group of each gate, evaluate deterministically on any total input
assignment, and can be duplicated with fresh extension variables and
chosen input substitutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .formulas import Clause, ClauseSet, check_literal


class CircuitError(ValueError):
    """Raised for structurally invalid circuits or bad parse input."""


@dataclass(frozen=True)
class Gate:
    """Extension gate: ``var`` is equivalent to the OR of ``body``."""

    var: int
    body: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.var, int) or self.var < 1:
            raise CircuitError(f"bad gate variable {self.var!r}")
        body = tuple(self.body)
        if not body:
            raise CircuitError(f"gate {self.var} has empty body")
        for lit in body:
            check_literal(lit)
        object.__setattr__(self, "body", body)


@dataclass(frozen=True)
class Circuit:
    """Free inputs, topologically ordered gates, labeled outputs."""

    free: tuple[int, ...] = ()
    gates: tuple[Gate, ...] = ()
    outputs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(self.free))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "outputs", tuple(self.outputs))

    def gate_map(self) -> dict[int, Gate]:
        return {g.var: g for g in self.gates}

    def variables(self) -> set[int]:
        vars_ = set(self.free)
        for g in self.gates:
            vars_.add(g.var)
            vars_.update(abs(l) for l in g.body)
        vars_.update(self.outputs)
        return vars_

    def extension_vars(self) -> set[int]:
        return {g.var for g in self.gates}


@dataclass(frozen=True)
class CircuitReport:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_circuit(c: Circuit, fan_in: Optional[int] = None) -> CircuitReport:
    """Check all circuit invariants; reports the first violation.

    Topological order doubles as the acyclicity check: every body
    variable must be free or defined by an earlier gate.
    """
    seen = set()
    for v in c.free:
        if v < 1:
            return CircuitReport(False, f"bad free variable {v}")
        if v in seen:
            return CircuitReport(False, f"duplicate free variable {v}")
        seen.add(v)
    for g in c.gates:
        if g.var in seen:
            return CircuitReport(False, f"variable {g.var} defined twice or shadows a free")
        if fan_in is not None and len(g.body) > fan_in:
            return CircuitReport(False, f"gate {g.var} has fan-in {len(g.body)} > {fan_in}")
        for lit in g.body:
            if abs(lit) not in seen:
                return CircuitReport(
                    False,
                    f"gate {g.var}: body references {abs(lit)} which is not free "
                    f"or defined earlier (undefined or cyclic)",
                )
        seen.add(g.var)
    for v in c.outputs:
        if v not in seen:
            return CircuitReport(False, f"output {v} is not a variable of the circuit")
    return CircuitReport(True)


def gate_clauses(g: Gate) -> tuple[Clause, ...]:
    """The defining clause group, exact duplicates collapsed.

    Order is fixed: the wide clause first, then one two-literal clause
    per body literal in body order.
    """
    out = [Clause((-g.var,) + g.body)]
    seen = {out[0]}
    for lit in g.body:
        cl = Clause((g.var, -lit))
        if cl not in seen:
            seen.add(cl)
            out.append(cl)
    return tuple(out)


def max_var(c: Circuit) -> int:
    vs = c.variables()
    return max(vs) if vs else 0


def circuit_size(c: Circuit) -> int:
    """Size measure: total literal occurrences across gate bodies."""
    return sum(len(g.body) for g in c.gates)


def circuit_clauses(c: Circuit) -> ClauseSet:
    clauses: list[Clause] = []
    for g in c.gates:
        clauses.extend(gate_clauses(g))
    return ClauseSet(max_var(c), tuple(clauses))


def evaluate(c: Circuit, free_vals: dict[int, bool]) -> dict[int, bool]:
    """Extend an assignment of the free variables over all gates."""
    vals: dict[int, bool] = {}
    for v in c.free:
        if v not in free_vals:
            raise CircuitError(f"free variable {v} unassigned")
        vals[v] = bool(free_vals[v])
    for g in c.gates:
        acc = False
        for lit in g.body:
            val = vals[abs(lit)]
            if val == (lit > 0):
                acc = True
                break
        vals[g.var] = acc
    return vals


class VarAlloc:
    """Monotone fresh-variable counter, threaded explicitly."""

    def __init__(self, start: int = 1):
        if start < 1:
            raise CircuitError(f"allocator must start at >= 1, got {start}")
        self._next = start
        self._floor = start

    @property
    def next_var(self) -> int:
        return self._next

    def fresh(self) -> int:
        v = self._next
        self._next += 1
        return v

    def issued(self, v: int) -> bool:
        return self._floor <= v < self._next


def map_literal(lit: int, varmap: dict[int, int]) -> int:
    v = varmap[abs(lit)]
    return v if lit > 0 else -v


def copy_gates(
    gates: Sequence[Gate],
    base_map: dict[int, int],
    id_for: Callable[[int, Gate], int],
) -> tuple[tuple[Gate, ...], dict[int, int]]:
    """Remap a gate sequence; ``id_for(position, gate)`` names each copy.

    Variables not in ``base_map`` and not defined by an earlier gate of
    the sequence are treated as fixed (mapped to themselves).
    """
    varmap = dict(base_map)
    out = []
    for idx, g in enumerate(gates):
        body = tuple(
            l if abs(l) not in varmap else map_literal(l, varmap) for l in g.body
        )
        new_var = id_for(idx, g)
        varmap[g.var] = new_var
        out.append(Gate(new_var, body))
    return tuple(out), varmap


def duplicate(
    c: Circuit, subs: Iterable[tuple[int, int]], fresh: VarAlloc
) -> tuple[Circuit, dict[int, int]]:
    """Isomorphic copy: fresh extension vars, substituted inputs.

    Returns the copy and the witnessing variable map.  Free variables
    not mentioned in ``subs`` are fixed; the map is bijective onto the
    copy's variables.
    """
    sub_map = dict(subs)
    all_vars = c.variables()
    for src in sub_map:
        if src not in all_vars:
            raise CircuitError(f"substitution source {src} not in circuit")
    varmap = {v: sub_map.get(v, v) for v in c.free}
    start = fresh.next_var
    gates = []
    for g in c.gates:
        if g.var in sub_map:
            raise CircuitError(f"substitution source {g.var} is an extension var")
        body = tuple(map_literal(l, varmap) for l in g.body)
        nv = fresh.fresh()
        varmap[g.var] = nv
        gates.append(Gate(nv, body))
    for tgt in sub_map.values():
        if start <= tgt < fresh.next_var:
            raise CircuitError(f"substitution target {tgt} collides with fresh vars")
    if len(set(varmap.values())) != len(varmap):
        raise CircuitError("substitution targets collide; map not injective")
    dup = Circuit(
        free=tuple(varmap[v] for v in c.free),
        gates=tuple(gates),
        outputs=tuple(varmap[v] for v in c.outputs),
    )
    return dup, varmap


def check_embedding(c: Circuit, d: Circuit, f: dict[int, int]) -> CircuitReport:
    """Is ``f`` a gate-preserving injection of ``c`` into ``d``?"""
    cvars = c.variables()
    for v in cvars:
        if v not in f:
            return CircuitReport(False, f"map undefined on {v}")
    img = [f[v] for v in cvars]
    if len(set(img)) != len(img):
        return CircuitReport(False, "map not injective")
    dfree = set(d.free)
    for v in c.free:
        if f[v] not in dfree:
            return CircuitReport(False, f"free {v} maps to non-free {f[v]}")
    dmap = d.gate_map()
    for g in c.gates:
        tgt = dmap.get(f[g.var])
        if tgt is None:
            return CircuitReport(False, f"gate {g.var} maps to non-gate {f[g.var]}")
        want = frozenset(map_literal(l, f) for l in g.body)
        have = frozenset(tgt.body)
        if want != have:
            return CircuitReport(False, f"gate {g.var}: body mismatch under map")
    return CircuitReport(True)


def normalize_outputs(c: Circuit, desired: Sequence[int], fresh: VarAlloc) -> Circuit:
    """Expand ``c`` so its sinks are exactly aliases of ``desired``.

    Non-sink desired vars get a pass-through alias; leftover sinks are
    absorbed into the last output through a constant-true gadget so
    they are no longer sinks.
    """
    all_vars = c.variables()
    for v in desired:
        if v not in all_vars:
            raise CircuitError(f"desired output {v} not in circuit")
    referenced = set()
    for g in c.gates:
        referenced.update(abs(l) for l in g.body)
    sinks = [g.var for g in c.gates if g.var not in referenced]
    if list(desired) == sinks:
        return Circuit(c.free, c.gates, tuple(desired))
    gates = list(c.gates)
    outs = []
    for v in desired:
        if v in referenced or v in outs:
            alias = fresh.fresh()
            gates.append(Gate(alias, (v, v)))
            outs.append(alias)
        else:
            outs.append(v)
        referenced.add(v)
    leftovers = [g.var for g in c.gates if g.var not in referenced and g.var not in outs]
    for v in leftovers:
        if not outs:
            raise CircuitError("cannot absorb leftover sinks without outputs")
        top = fresh.fresh()
        gates.append(Gate(top, (v, -v)))
        folded = fresh.fresh()
        gates.append(Gate(folded, (outs[-1], -top)))
        outs[-1] = folded
    return Circuit(c.free, tuple(gates), tuple(outs))


class CircuitBuilder:
    """Convenience layer for the generator modules."""

    def __init__(self, fresh: VarAlloc):
        self.fresh = fresh
        self.frees: list[int] = []
        self.gates: list[Gate] = []

    def free(self, var: Optional[int] = None) -> int:
        v = self.fresh.fresh() if var is None else var
        self.frees.append(v)
        return v

    def gate(self, body: Iterable[int], var: Optional[int] = None) -> int:
        v = self.fresh.fresh() if var is None else var
        self.gates.append(Gate(v, tuple(body)))
        return v

    def or_(self, *lits: int) -> int:
        return self.gate(lits)

    def not_(self, lit: int) -> int:
        return self.gate((-lit,))

    def and_(self, *lits: int) -> int:
        # d holds the negated conjunction; a second gate flips it
        d = self.gate(tuple(-l for l in lits))
        return self.gate((-d,))

    def const_true(self, over: int) -> int:
        return self.gate((over, -over))

    def build(self, outputs: Iterable[int] = ()) -> Circuit:
        return Circuit(tuple(self.frees), tuple(self.gates), tuple(outputs))


def serialize_circuit(c: Circuit) -> str:
    lines = [f"circ {max_var(c)}"]
    lines.append("free " + " ".join(str(v) for v in c.free))
    for g in c.gates:
        lines.append(f"gate {g.var} " + " ".join(str(l) for l in g.body) + " 0")
    lines.append("out " + " ".join(str(v) for v in c.outputs))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    free: list[int] = []
    gates: list[Gate] = []
    outputs: list[int] = []
    declared = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            args = [int(t) for t in parts[1:]]
        except ValueError:
            raise CircuitError(f"bad token in line {line!r}") from None
        if kind == "circ":
            if declared is not None or len(args) != 1:
                raise CircuitError("malformed circ header")
            declared = args[0]
        elif declared is None:
            raise CircuitError("data before circ header")
        elif kind == "free":
            free.extend(args)
        elif kind == "gate":
            if len(args) < 3 or args[-1] != 0:
                raise CircuitError(f"malformed gate line {line!r}")
            gates.append(Gate(args[0], tuple(args[1:-1])))
        elif kind == "out":
            outputs.extend(args)
        else:
            raise CircuitError(f"unknown line kind {kind!r}")
    if declared is None:
        raise CircuitError("missing circ header")
    c = Circuit(tuple(free), tuple(gates), tuple(outputs))
    if max_var(c) > declared:
        raise CircuitError(f"variable exceeds declared bound {declared}")
    report = validate_circuit(c)
    if not report:
        raise CircuitError(f"invalid circuit: {report.reason}")
    return c
