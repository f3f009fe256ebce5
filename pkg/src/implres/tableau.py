"""Machine-run grids as implicitly described clause sets.

A run of a deterministic single-tape machine is laid out on an n-by-n
grid (n = 2^m): row j is the tape after j steps, column k one cell.
A grid circuit maps a 2m-bit address (row bits then column bits,
least significant first) to one cell: symbol bits, a head flag, and a
one-hot state block.  The generated clause set leaves one address
pair free, reads the addressed cell and its three relevant
neighbours through four copies of the grid circuit, and raises a
verdict gate that is false exactly when something is locally wrong
there: a malformed cell, a bad start row, a next-row cell that
contradicts the transition table, a head walking off the tape, or a
last row that is not an accepting stop spelling the target bits.
With the negated verdict appended as a unit, the set is
unsatisfiable exactly when the grid is a valid accepting run with
the target output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .circuits import (
    Circuit,
    CircuitBuilder,
    CircuitReport,
    Gate,
    VarAlloc,
    evaluate,
    gate_clauses,
    map_literal,
    max_var,
    validate_circuit,
)
from .formulas import Clause, ClauseSet, EMPTY_CLAUSE, FormulaError
from .proofs import (
    CheckOptions,
    ERProof,
    ProofBuilder,
    ResolutionProof,
    check_er,
    check_proof,
    er_premises,
    lift_unit_axiom,
    rename_proof,
    strip_weakening,
)
from .prover import dpll_refute, proof_from_tree
from .translate import TranslateError, emb_premises, emb_refute


class TableauError(ValueError):
    pass


MOVES = ("L", "R", "S")


@dataclass(frozen=True)
class TMSpec:
    """Deterministic single-tape machine.  State 0 starts; a row whose
    head sits in an accepting state, or reads a pair with no table
    entry, repeats unchanged."""

    n_states: int
    n_symbols: int
    trans: dict[tuple[int, int], tuple[int, int, str]]
    accepting: frozenset[int]


def check_machine(tm: TMSpec) -> CircuitReport:
    if tm.n_states < 1:
        return CircuitReport(False, f"bad state count {tm.n_states}")
    if tm.n_symbols < 2:
        return CircuitReport(False, "alphabet must contain the two output symbols")
    for (q, s), (q2, s2, mv) in tm.trans.items():
        if not (0 <= q < tm.n_states and 0 <= s < tm.n_symbols):
            return CircuitReport(False, f"transition source ({q},{s}) out of range")
        if not (0 <= q2 < tm.n_states and 0 <= s2 < tm.n_symbols):
            return CircuitReport(False, f"transition target ({q2},{s2}) out of range")
        if mv not in MOVES:
            return CircuitReport(False, f"bad move {mv!r}")
    for q in tm.accepting:
        if not 0 <= q < tm.n_states:
            return CircuitReport(False, f"accepting state {q} out of range")
    return CircuitReport(True)


def parse_tm(text: str) -> TMSpec:
    n_states: Optional[int] = None
    n_symbols: Optional[int] = None
    trans: dict[tuple[int, int], tuple[int, int, str]] = {}
    accepting: set[int] = set()
    header = False

    def num(tok: str, lineno: int) -> int:
        try:
            return int(tok)
        except ValueError:
            raise TableauError(f"line {lineno}: bad number {tok!r}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not header:
            if parts != ["tm"]:
                raise TableauError(f"line {lineno}: expected 'tm' header")
            header = True
            continue
        kw = parts[0]
        if kw == "states" and len(parts) == 2:
            n_states = num(parts[1], lineno)
        elif kw == "alpha" and len(parts) == 2:
            n_symbols = num(parts[1], lineno)
        elif kw == "trans" and len(parts) == 6:
            q, s = num(parts[1], lineno), num(parts[2], lineno)
            q2, s2 = num(parts[3], lineno), num(parts[4], lineno)
            if (q, s) in trans:
                raise TableauError(f"line {lineno}: duplicate entry for ({q},{s})")
            trans[(q, s)] = (q2, s2, parts[5])
        elif kw == "accept" and len(parts) == 2:
            accepting.add(num(parts[1], lineno))
        else:
            raise TableauError(f"line {lineno}: cannot parse {line!r}")
    if not header:
        raise TableauError("missing 'tm' header")
    if n_states is None or n_symbols is None:
        raise TableauError("missing states/alpha declaration")
    tm = TMSpec(n_states, n_symbols, trans, frozenset(accepting))
    rep = check_machine(tm)
    if not rep:
        raise TableauError(rep.reason)
    return tm


def serialize_tm(tm: TMSpec) -> str:
    lines = ["tm", f"states {tm.n_states}", f"alpha {tm.n_symbols}"]
    for (q, s), (q2, s2, mv) in sorted(tm.trans.items()):
        lines.append(f"trans {q} {s} {q2} {s2} {mv}")
    for q in sorted(tm.accepting):
        lines.append(f"accept {q}")
    return "\n".join(lines) + "\n"


def decode_tau(text: str, n: int) -> tuple[int, ...]:
    """Hex-coded target word; leftmost bit is column 0."""
    text = text.strip()
    try:
        value = int(text, 16)
    except ValueError:
        raise TableauError(f"bad hex word {text!r}")
    if value < 0 or value >= 1 << n:
        raise TableauError(f"target word {text!r} does not fit {n} bits")
    return tuple((value >> (n - 1 - k)) & 1 for k in range(n))


def encode_tau(bits: Sequence[int]) -> str:
    n = len(bits)
    value = 0
    for k, b in enumerate(bits):
        if b not in (0, 1):
            raise TableauError(f"target bit {b!r} at column {k}")
        value |= b << (n - 1 - k)
    return format(value, f"0{(n + 3) // 4}x")


def symbol_bits(tm: TMSpec) -> int:
    return max(1, (tm.n_symbols - 1).bit_length())


def cell_width(tm: TMSpec) -> int:
    # symbol bits, head flag, one-hot state block
    return symbol_bits(tm) + 1 + tm.n_states


@dataclass(frozen=True)
class TableauInterface:
    """Input/output contract of a grid circuit: row address bits
    first (least significant first), then column bits; outputs are
    one cell in layout order."""

    m: int
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))


def check_tableau_interface(
    circuit: Circuit,
    iface: TableauInterface,
    tm: TMSpec,
    extra_free_limit: Optional[int] = None,
) -> CircuitReport:
    m = iface.m
    if m < 1:
        return CircuitReport(False, f"bad address width {m}")
    if len(iface.inputs) != 2 * m:
        return CircuitReport(False, f"expected {2 * m} inputs, got {len(iface.inputs)}")
    if len(set(iface.inputs)) != 2 * m:
        return CircuitReport(False, "duplicate input variables")
    cw = cell_width(tm)
    if len(iface.outputs) != cw:
        return CircuitReport(False, f"expected {cw} outputs, got {len(iface.outputs)}")
    if len(set(iface.outputs)) != cw:
        return CircuitReport(False, "duplicate output variables")
    frees = set(circuit.free)
    for v in iface.inputs:
        if v not in frees:
            return CircuitReport(False, f"input {v} is not free in the circuit")
    ext = circuit.extension_vars()
    for v in iface.outputs:
        if v not in ext:
            return CircuitReport(False, f"output {v} is not gate-defined")
    if tuple(iface.outputs) != tuple(circuit.outputs):
        return CircuitReport(False, "interface outputs disagree with circuit outputs")
    extras = frees - set(iface.inputs)
    if extra_free_limit is None:
        if extras:
            return CircuitReport(False, f"unexpected extra free variables {sorted(extras)}")
    else:
        bad = [v for v in extras if v > extra_free_limit]
        if bad:
            return CircuitReport(False, f"extra free variables {bad} above {extra_free_limit}")
    return CircuitReport(True)


def tableau_interface_from_circuit(circuit: Circuit, m: int) -> TableauInterface:
    """Read the positional convention: first 2m frees, all outputs."""
    if len(circuit.free) < 2 * m:
        raise TableauError("circuit has fewer frees than declared address bits")
    return TableauInterface(m, circuit.free[: 2 * m], circuit.outputs)


# ---------------------------------------------------------------------------
# Direct simulation: the semantic reference the clause set must agree with.


def read_grid(
    tm: TMSpec, beta: Circuit, iface: TableauInterface
) -> tuple[tuple[tuple[bool, ...], ...], ...]:
    """Evaluate the grid circuit on every address; extra frees are
    set false."""
    m = iface.m
    n = 1 << m
    rows = []
    for j in range(n):
        row = []
        for k in range(n):
            vals = {v: False for v in beta.free}
            for i in range(m):
                vals[iface.inputs[i]] = bool((j >> i) & 1)
                vals[iface.inputs[m + i]] = bool((k >> i) & 1)
            out = evaluate(beta, vals)
            row.append(tuple(out[y] for y in iface.outputs))
        rows.append(tuple(row))
    return tuple(rows)


def _decode_cell(tm: TMSpec, bits: Sequence[bool]):
    sb = symbol_bits(tm)
    sym = sum(1 << i for i in range(sb) if bits[i])
    head = bool(bits[sb])
    states = [q for q in range(tm.n_states) if bits[sb + 1 + q]]
    return sym, head, states


def _encode_cell(tm: TMSpec, sym: int, head: bool, state: Optional[int]) -> tuple[bool, ...]:
    sb = symbol_bits(tm)
    bits = [bool((sym >> i) & 1) for i in range(sb)]
    bits.append(head)
    bits.extend(state == q for q in range(tm.n_states))
    return tuple(bits)


def check_run(
    tm: TMSpec,
    tau_bits: Sequence[int],
    grid: Sequence[Sequence[Sequence[bool]]],
) -> CircuitReport:
    """Judge a grid directly: start row, stepwise evolution, halt in
    an accepting state, output equal to the target bits."""
    n = len(grid)
    cells = []
    for j in range(n):
        row = []
        for k in range(n):
            sym, head, states = _decode_cell(tm, grid[j][k])
            if len(states) > 1:
                return CircuitReport(False, f"cell ({j},{k}): several states set")
            if head and not states:
                return CircuitReport(False, f"cell ({j},{k}): head without a state")
            if not head and states:
                return CircuitReport(False, f"cell ({j},{k}): state without the head")
            row.append((sym, head, states[0] if states else None))
        cells.append(row)
    sym0, head0, state0 = cells[0][0]
    if not head0 or state0 != 0:
        return CircuitReport(False, "start row: head must sit on column 0 in state 0")
    for k in range(1, n):
        if cells[0][k][1]:
            return CircuitReport(False, f"start row: stray head at column {k}")
    for j in range(n):
        if sum(1 for k in range(n) if cells[j][k][1]) != 1:
            return CircuitReport(False, f"row {j} does not carry exactly one head")
    for j in range(n - 1):
        nxt = _step_row(tm, cells[j])
        if nxt is None:
            return CircuitReport(False, f"row {j}: head walks off the tape")
        if nxt != cells[j + 1]:
            return CircuitReport(False, f"row {j + 1} does not follow from row {j}")
    last = cells[n - 1]
    hk = next(k for k in range(n) if last[k][1])
    if last[hk][2] not in tm.accepting:
        return CircuitReport(False, "machine has not halted in an accepting state")
    for k in range(n):
        if last[k][0] != tau_bits[k]:
            return CircuitReport(False, f"output differs from the target at column {k}")
    return CircuitReport(True)


def _step_row(tm: TMSpec, row):
    """One machine step on a decoded row; None when the head would
    leave the tape.  Accepting or table-less pairs repeat the row."""
    n = len(row)
    hk = next(k for k in range(n) if row[k][1])
    sym, _, q = row[hk]
    if q in tm.accepting or (q, sym) not in tm.trans:
        return list(row)
    q2, s2, mv = tm.trans[(q, sym)]
    target = hk + {"L": -1, "R": 1, "S": 0}[mv]
    if target < 0 or target >= n:
        return None
    nxt = []
    for k in range(n):
        s = s2 if k == hk else row[k][0]
        if k == target:
            nxt.append((s, True, q2))
        else:
            nxt.append((s, False, None))
    return nxt


def run_accepts(tm: TMSpec, tau_bits: Sequence[int], beta: Circuit, iface: TableauInterface) -> bool:
    return bool(check_run(tm, tau_bits, read_grid(tm, beta, iface)))


# ---------------------------------------------------------------------------
# Clause-set generation.


class _Sink:
    """Gate collector sharing an allocator; lets the fault block take
    ids before the copy stride while sitting after it in gate order."""

    def __init__(self, fresh: VarAlloc):
        self.fresh = fresh
        self.gates: list[Gate] = []

    def gate(self, body) -> int:
        v = self.fresh.fresh()
        self.gates.append(Gate(v, tuple(body)))
        return v

    def or_(self, *lits: int) -> int:
        return self.gate(lits)

    def not_(self, lit: int) -> int:
        return self.gate((-lit,))

    def and_(self, *lits: int) -> int:
        d = self.gate(tuple(-l for l in lits))
        return self.gate((-d,))

    def xor_(self, a: int, b: int) -> int:
        return self.or_(self.and_(a, -b), self.and_(-a, b))


def _inc_bits(b: CircuitBuilder, bits: Sequence[int]) -> tuple[int, ...]:
    # ripple add-one; the top carry drops (addresses wrap, guards mask it)
    out = [b.not_(bits[0])]
    carry = bits[0]
    for v in bits[1:]:
        out.append(b.or_(b.and_(v, -carry), b.and_(-v, carry)))
        carry = b.and_(v, carry)
    return tuple(out)


def _dec_bits(b: CircuitBuilder, bits: Sequence[int]) -> tuple[int, ...]:
    out = [b.not_(bits[0])]
    borrow = -bits[0]
    for v in bits[1:]:
        out.append(b.or_(b.and_(v, -borrow), b.and_(-v, borrow)))
        borrow = b.and_(-v, borrow)
    return tuple(out)


@dataclass(frozen=True)
class TableauBundle:
    m: int
    clauses: ClauseSet
    circuit: Circuit  # all gates over the 2m address frees, output = verdict
    j_vars: tuple[int, ...]
    k_vars: tuple[int, ...]
    cell: dict[tuple[int, int], int]  # (copy, bit) -> id; copies: here, left, right, below
    delta: int
    neg_delta_index: int
    copy_maps: tuple[dict[int, int], ...]
    copy_base: int
    cell_base: int
    clause_index: dict[Clause, int] = field(repr=False)


def gen_tableau(
    tm: TMSpec,
    tau_bits: Sequence[int],
    beta: Circuit,
    iface: TableauInterface,
) -> TableauBundle:
    """Constraint clauses for 'the described grid is a valid accepting
    run with the target output'.

    Layout: address frees 1..2m, then arithmetic/flag gates, then a
    reserved block of four cell images, then the fault-detector ids,
    and the four grid-circuit copies on a stride of four starting at
    copy_base (the addressed cell's own copy at offset 0).  Gate order
    puts the copies before the detectors; clause order puts the
    detector block first, then the negated verdict, then the rest.
    Everything but the copy region is independent of the grid
    circuit, which is what lets grafting rebase onto the first copy."""
    rep = check_machine(tm)
    if not rep:
        raise TableauError(rep.reason)
    m = iface.m
    n = 1 << m
    tau = tuple(tau_bits)
    if len(tau) != n or any(b not in (0, 1) for b in tau):
        raise TableauError(f"target word must be {n} bits")
    rep = check_tableau_interface(beta, iface, tm, extra_free_limit=2 * m)
    if not rep:
        raise TableauError(rep.reason)
    sb = symbol_bits(tm)
    cw = cell_width(tm)

    jv = tuple(range(1, m + 1))
    kv = tuple(range(m + 1, 2 * m + 1))
    b = CircuitBuilder(VarAlloc(2 * m + 1))
    for v in jv + kv:
        b.free(v)
    tt = b.const_true(jv[0])
    j0 = b.not_(b.or_(*jv))
    jlast = b.not_(b.or_(*(-v for v in jv)))
    k0 = b.not_(b.or_(*kv))
    klast = b.not_(b.or_(*(-v for v in kv)))
    jp1 = _inc_bits(b, jv)
    kp1 = _inc_bits(b, kv)
    km1 = _dec_bits(b, kv)

    cell_base = b.fresh.next_var
    cell: dict[tuple[int, int], int] = {}
    for c in range(4):
        for t in range(cw):
            cell[(c, t)] = b.fresh.fresh()

    s = _Sink(b.fresh)
    false = s.not_(tt)

    def any_(terms: list[int]) -> int:
        return s.or_(*terms) if terms else false

    def sym(c: int, i: int) -> int:
        return cell[(c, i)]

    def head(c: int) -> int:
        return cell[(c, sb)]

    def state(c: int, q: int) -> int:
        return cell[(c, sb + 1 + q)]

    # Malformed addressed cell: states are one-hot under the head and
    # absent without it.
    shape_terms = []
    for a in range(tm.n_states):
        for c2 in range(a + 1, tm.n_states):
            shape_terms.append(s.and_(state(0, a), state(0, c2)))
    for a in range(tm.n_states):
        shape_terms.append(s.and_(-head(0), state(0, a)))
    shape_terms.append(s.and_(head(0), *(-state(0, a) for a in range(tm.n_states))))
    shape_viol = any_(shape_terms)

    # Start row: head on column 0 in state 0, bare cells elsewhere.
    bad_home = s.or_(-head(0), -state(0, 0))
    bad_far = s.or_(head(0), *(state(0, a) for a in range(tm.n_states)))
    frame_viol = s.or_(s.and_(j0, k0, bad_home), s.and_(j0, -k0, bad_far))

    # Applicable-move selectors on the addressed cell and its row
    # neighbours.  Accepting or table-less pairs have none and the
    # row repeats below.
    active = [
        (q, v, q2, s2, mv)
        for (q, v), (q2, s2, mv) in sorted(tm.trans.items())
        if q not in tm.accepting
    ]
    symeq: dict[tuple[int, int], int] = {}
    sel: dict[tuple[int, int, int], int] = {}
    for c in range(3):
        for v in sorted({v for (_, v, _, _, _) in active}):
            lits = [sym(c, i) if (v >> i) & 1 else -sym(c, i) for i in range(sb)]
            symeq[(c, v)] = s.and_(*lits)
        for (q, v, q2, s2, mv) in active:
            sel[(c, q, v)] = s.and_(head(c), state(c, q), symeq[(c, v)])
    act0 = any_([sel[(0, q, v)] for (q, v, _, _, _) in active])
    noact0 = s.not_(act0)
    inert0 = s.and_(head(0), noact0)

    # Head walking off the tape.
    off_l = any_([sel[(0, q, v)] for (q, v, _, _, mv) in active if mv == "L"])
    off_r = any_([sel[(0, q, v)] for (q, v, _, _, mv) in active if mv == "R"])
    off_viol = s.or_(s.and_(k0, off_l), s.and_(klast, off_r))

    # Expected next-row cell under this column.
    exp_sym = []
    for i in range(sb):
        terms = [sel[(0, q, v)] for (q, v, _, s2, _) in active if (s2 >> i) & 1]
        terms.append(s.and_(noact0, sym(0, i)))
        exp_sym.append(any_(terms))
    arrive: list[tuple[int, int]] = []
    for (q, v, q2, _, mv) in active:
        if mv == "R":
            arrive.append((s.and_(-k0, sel[(1, q, v)]), q2))
        elif mv == "L":
            arrive.append((s.and_(-klast, sel[(2, q, v)]), q2))
    stay = [sel[(0, q, v)] for (q, v, _, _, mv) in active if mv == "S"]
    exp_head = any_(stay + [inert0] + [g for g, _ in arrive])
    exp_state = []
    for bq in range(tm.n_states):
        terms = [
            sel[(0, q, v)] for (q, v, q2, _, mv) in active if mv == "S" and q2 == bq
        ]
        terms.append(s.and_(inert0, state(0, bq)))
        terms.extend(g for g, q2 in arrive if q2 == bq)
        exp_state.append(any_(terms))
    diffs = [s.xor_(cell[(3, i)], exp_sym[i]) for i in range(sb)]
    diffs.append(s.xor_(cell[(3, sb)], exp_head))
    diffs.extend(s.xor_(cell[(3, sb + 1 + bq)], exp_state[bq]) for bq in range(tm.n_states))
    trans_viol = s.and_(-jlast, s.or_(*diffs))

    # Last row: accepting stop spelling the target bits.
    eq_true = []
    for col in range(n):
        if tau[col]:
            eq_true.append(
                s.and_(*(kv[i] if (col >> i) & 1 else -kv[i] for i in range(m)))
            )
    tau_at_k = any_(eq_true)
    tau_diff = s.xor_(sym(0, 0), tau_at_k)
    high = [sym(0, i) for i in range(1, sb)]
    nonacc = any_([state(0, q) for q in range(tm.n_states) if q not in tm.accepting])
    last_viol = s.and_(jlast, s.or_(tau_diff, *high, s.and_(head(0), nonacc)))

    viol = s.or_(shape_viol, frame_viol, off_viol, trans_viol, last_viol)
    delta = s.not_(viol)

    copy_base = b.fresh.next_var
    addr = {0: jv + kv, 1: jv + km1, 2: jv + kp1, 3: jp1 + kv}
    out_set = set(iface.outputs)
    non_out = [g.var for g in beta.gates if g.var not in out_set]
    copy_maps = []
    copy_gate_lists = []
    for c in range(4):
        varmap = dict(zip(iface.inputs, addr[c]))
        for t, y in enumerate(iface.outputs):
            varmap[y] = cell[(c, t)]
        for t, v in enumerate(non_out, start=1):
            varmap[v] = copy_base + (t - 1) * 4 + c
        for v in beta.free:
            varmap.setdefault(v, v)  # extra frees alias the address bits
        gates = [
            Gate(varmap[g.var], tuple(map_literal(l, varmap) for l in g.body))
            for g in beta.gates
        ]
        copy_maps.append(varmap)
        copy_gate_lists.append(gates)

    all_gates = tuple(b.gates)
    for gl in copy_gate_lists:
        all_gates += tuple(gl)
    all_gates += tuple(s.gates)
    circuit = Circuit(jv + kv, all_gates, (delta,))
    rep = validate_circuit(circuit)
    if not rep:
        raise TableauError(f"generated circuit invalid: {rep.reason}")

    clauses: list[Clause] = []
    for g in s.gates:
        clauses.extend(gate_clauses(g))
    neg_delta_index = len(clauses)
    clauses.append(Clause((-delta,)))
    for g in b.gates:
        clauses.extend(gate_clauses(g))
    for gl in copy_gate_lists:
        for g in gl:
            clauses.extend(gate_clauses(g))
    cs = ClauseSet(max_var(circuit), clauses)
    index: dict[Clause, int] = {}
    for pos, cl in enumerate(clauses):
        index.setdefault(cl, pos)
    return TableauBundle(
        m,
        cs,
        circuit,
        jv,
        kv,
        cell,
        delta,
        neg_delta_index,
        tuple(copy_maps),
        copy_base,
        cell_base,
        index,
    )


def address_sweep(bundle: TableauBundle) -> tuple[bool, Optional[tuple[int, int]]]:
    """Exact satisfiability of the bundle by sweeping the free
    addresses: every other variable is gate-defined, so each address
    extends uniquely.  Returns (unsat, falsifying address)."""
    m = bundle.m
    for j in range(1 << m):
        for k in range(1 << m):
            vals = {}
            for i in range(m):
                vals[bundle.j_vars[i]] = bool((j >> i) & 1)
                vals[bundle.k_vars[i]] = bool((k >> i) & 1)
            out = evaluate(bundle.circuit, vals)
            if not out[bundle.delta]:
                return False, (j, k)
    return True, None


def refute_tableau(
    bundle: TableauBundle, max_nodes: Optional[int] = None
) -> Optional[ResolutionProof]:
    """Branch on the address bits; unit propagation settles the gates.
    None when the bundle is satisfiable."""
    out = dpll_refute(
        bundle.clauses, order=bundle.j_vars + bundle.k_vars, max_nodes=max_nodes
    )
    if out.tree is None:
        return None
    return proof_from_tree(bundle.clauses, out.tree)


# ---------------------------------------------------------------------------
# Verification and grafting.


@dataclass(frozen=True)
class TableauReport:
    ok: bool
    stage: str  # machine | decode | interface | generate | proof
    reason: str = ""
    bundle: Optional[TableauBundle] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class TableauRefutation:
    tm: TMSpec
    tau_bits: tuple[int, ...]
    alpha: ResolutionProof
    beta: Circuit
    iface: TableauInterface
    alpha_premises: Optional[int] = None


def verify_pq(
    tm: TMSpec,
    tau_bits: Sequence[int],
    beta: Circuit,
    iface: TableauInterface,
    alpha: ResolutionProof,
    alpha_premises: Optional[int] = None,
) -> TableauReport:
    rep = check_machine(tm)
    if not rep:
        return TableauReport(False, "machine", rep.reason)
    n = 1 << iface.m if iface.m >= 1 else 0
    tau = tuple(tau_bits)
    if len(tau) != n or any(bit not in (0, 1) for bit in tau):
        return TableauReport(False, "decode", f"target word must be {n} bits")
    rep = check_tableau_interface(beta, iface, tm, extra_free_limit=2 * iface.m)
    if not rep:
        return TableauReport(False, "interface", rep.reason)
    try:
        bundle = gen_tableau(tm, tau, beta, iface)
    except (TableauError, FormulaError, ValueError) as exc:
        return TableauReport(False, "generate", str(exc))
    if alpha_premises is not None and alpha_premises != len(bundle.clauses.clauses):
        return TableauReport(
            False,
            "proof",
            f"proof declares {alpha_premises} premises, the set has {len(bundle.clauses.clauses)}",
        )
    for step in alpha.steps:
        lits = getattr(step, "literals", ())
        for lit in lits:
            if abs(lit) > bundle.clauses.n:
                return TableauReport(
                    False, "proof", f"weakening introduces variable {abs(lit)} outside the set"
                )
    pr = check_proof(bundle.clauses, alpha, EMPTY_CLAUSE, CheckOptions())
    if not pr:
        return TableauReport(False, "proof", f"step {pr.step}: {pr.reason}", bundle)
    return TableauReport(True, "proof", "", bundle)


def verify_refutation(tr: TableauRefutation) -> TableauReport:
    return verify_pq(tr.tm, tr.tau_bits, tr.beta, tr.iface, tr.alpha, tr.alpha_premises)


def graft_pq(
    tm: TMSpec,
    tau_bits: Sequence[int],
    beta: Circuit,
    iface: TableauInterface,
    alpha_er: ERProof,
) -> TableauRefutation:
    """Fold an ER refutation of the constraint set into the grid
    circuit itself.  Same construction as for clause-set carriers:
    the grid circuit is rebased onto its first copy (inputs to the
    address bits, outputs to the addressed cell image, gates to the
    copy stride), a duplicate of every generator gate and proof
    auxiliary is appended, the proof is renamed onto the duplicate,
    its use of the negated verdict is lifted, and an embedding
    refutation glues the two verdicts."""
    tau = tuple(tau_bits)
    bundle = gen_tableau(tm, tau, beta, iface)
    rep = check_er(bundle.clauses, alpha_er)
    if not rep:
        raise TranslateError(f"invalid proof: {rep.reason}")
    aux = alpha_er.aux
    cw = cell_width(tm)

    g_circuit = bundle.circuit
    full_gates = g_circuit.gates + aux.gates
    m_beta = len(beta.gates) - cw  # non-output gate count
    copy_base = bundle.copy_base
    addr_vars = bundle.j_vars + bundle.k_vars

    dupmap = {v: v for v in addr_vars}
    dup_gates = []
    for t, g in enumerate(full_gates, start=1):
        nv = copy_base + (m_beta + t - 1) * 4
        dup_gates.append(Gate(nv, tuple(map_literal(l, dupmap) for l in g.body)))
        dupmap[g.var] = nv
    delta_prime = dupmap[bundle.delta]

    betamap = dict(zip(iface.inputs, addr_vars))
    for t, y in enumerate(iface.outputs):
        betamap[y] = bundle.cell[(0, t)]
    for v in beta.free:
        betamap.setdefault(v, v)
    t = 0
    for g in beta.gates:
        if g.var not in betamap:
            betamap[g.var] = copy_base + t * 4
            t += 1
    beta_hat = tuple(
        Gate(betamap[g.var], tuple(map_literal(l, betamap) for l in g.body))
        for g in beta.gates
    )
    beta2 = Circuit(
        addr_vars,
        beta_hat + tuple(dup_gates),
        tuple(bundle.cell[(0, t)] for t in range(cw)),
    )
    rep = validate_circuit(beta2)
    if not rep:
        raise TranslateError(f"grown circuit invalid: {rep.reason}")
    iface2 = TableauInterface(iface.m, addr_vars, beta2.outputs)
    bundle2 = gen_tableau(tm, tau, beta2, iface2)
    lookup = bundle2.clause_index

    old_premises = er_premises(bundle.clauses, aux)
    stripped = strip_weakening(old_premises, alpha_er.proof)
    premise_map = {}
    for q, cl in enumerate(old_premises.clauses):
        if q == bundle.neg_delta_index:
            premise_map[q] = len(bundle2.clauses.clauses)
        else:
            premise_map[q] = lookup[Clause(tuple(map_literal(l, dupmap) for l in cl))]
    renamed = rename_proof(stripped, dupmap, premise_map)
    lifted = lift_unit_axiom(bundle2.clauses, renamed, -delta_prime)

    dup_circuit = Circuit(addr_vars, tuple(dup_gates), (delta_prime,))
    f = {v: dupmap[v] for v in g_circuit.variables()}
    glue = emb_refute(g_circuit, dup_circuit, f, bundle.delta, polarity=False)
    glue_premises = emb_premises(
        g_circuit, dup_circuit, bundle.delta, False, delta_prime
    )

    b = ProofBuilder(bundle2.clauses)
    lifted_step = b.import_proof(lifted, lambda q: b.axiom(q))
    if b.clause(lifted_step) != Clause((delta_prime,)):
        raise TranslateError("lifting did not reach the duplicate verdict")
    n_gate_clauses = len(glue_premises.clauses) - 2

    def glue_axiom(q: int) -> int:
        if q < n_gate_clauses:
            return b.axiom(lookup[glue_premises.clauses[q]])
        if q == n_gate_clauses:
            return b.axiom(bundle2.neg_delta_index)
        return lifted_step

    final = b.import_proof(glue, glue_axiom)
    if b.clause(final) != EMPTY_CLAUSE:
        raise TranslateError("grafted refutation missed the empty clause")
    alpha2 = b.extract(final)
    return TableauRefutation(
        tm, tau, alpha2, beta2, iface2,
        alpha_premises=len(bundle2.clauses.clauses),
    )
