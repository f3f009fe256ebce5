"""Constructive proof translations.

Three building blocks:

* emb_refute: given an embedding f of circuit C into circuit D, refute
  the gate clauses plus contradictory units on an output y and its
  image, by deriving the bridge clauses (-e or f(e)) / (e or -f(e))
  gate by gate.
* lift_unit_axiom (proofs module): turn a refutation that uses a unit
  axiom {u} into a derivation of {-u} from the remaining premises.
* content-indexed composition: renamed proofs are replayed against a
  larger clause set by looking premises up by clause content.

These combine into the two simulations: search_translate rebuilds a
checker refutation for an algorithm circuit enlarged with a duplicate
of everything the proof used, and graft turns any extended-resolution
refutation of C(omega, beta) into an accepted implicit tuple whose
described circuit carries the duplicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .circuits import (
    Circuit,
    Gate,
    VarAlloc,
    check_embedding,
    circuit_clauses,
    gate_clauses,
    map_literal,
    max_var,
    validate_circuit,
)
from .correctness import (
    CorrectnessBundle,
    SearchProblem,
    check_search_problem,
    gen_C,
    gen_correct,
)
from .encoding import TreeInterface, canonical_tree_circuit, output_width
from .formulas import EMPTY_CLAUSE, Clause, ClauseSet
from .implicit import ImplicitRefutation, verify_implicit
from .proofs import (
    ERProof,
    ProofBuilder,
    ResolutionProof,
    check_er,
    er_premises,
    lift_unit_axiom,
    rename_proof,
    strip_weakening,
)


class TranslateError(ValueError):
    pass


def _map_lit(lit: int, f: dict[int, int]) -> int:
    v = f.get(abs(lit), abs(lit))
    return v if lit > 0 else -v


def emb_premises(
    c: Circuit, d: Circuit, y: int, polarity: bool, fy: int
) -> ClauseSet:
    cc = circuit_clauses(c)
    dc = circuit_clauses(d)
    units = (
        Clause((y if polarity else -y,)),
        Clause((-fy if polarity else fy,)),
    )
    n = max(cc.n, dc.n, abs(y), abs(fy))
    return ClauseSet(n, cc.clauses + dc.clauses + units)


def _clause_positions(circ: Circuit, start: int = 0):
    """Premise offsets of every gate clause: the wide clause by gate
    var, the two-literal ones by (gate var, body literal)."""
    big: dict[int, int] = {}
    dcl: dict[tuple[int, int], int] = {}
    pos = start
    for g in circ.gates:
        group = gate_clauses(g)
        big[g.var] = pos
        rank = 0
        for cl in group[1:]:
            lit = next(l for l in cl if l != g.var)
            dcl[(g.var, -lit)] = pos + 1 + rank
            rank += 1
        pos += len(group)
    return big, dcl, pos


def emb_refute(
    c: Circuit, d: Circuit, f: dict[int, int], y: int, polarity: bool
) -> ResolutionProof:
    """Refute the clauses of c and d plus the units y^polarity and
    f(y)^(1-polarity).

    For each needed gate e the bridge clause A(e) = {-e, f(e)} (and/or
    the converse B(e)) is derived by walking e's defining clauses and
    substituting body literals through previously derived bridges;
    cost is a constant number of steps per body literal.
    """
    rep = check_embedding(c, d, f)
    if not rep:
        raise TranslateError(f"not an embedding: {rep.reason}")
    if y not in c.variables():
        raise TranslateError(f"output {y} is not a variable of the host circuit")
    fy = f.get(y, y)
    premises = emb_premises(c, d, y, polarity, fy)
    unit_y = len(premises.clauses) - 2
    unit_fy = len(premises.clauses) - 1
    c_big, c_dcl, c_end = _clause_positions(c)
    d_big, d_dcl, _ = _clause_positions(d, start=c_end)

    gate_of = c.gate_map()
    b = ProofBuilder(premises)

    # Demand pass: which gates need A (-e or f(e)) and which need B.
    need_a: set[int] = set()
    need_b: set[int] = set()
    if fy != y:
        work = [(y, polarity)]  # True demands A, False demands B
        while work:
            var, want_a = work.pop()
            if f.get(var, var) == var or var not in gate_of:
                continue
            target = need_a if want_a else need_b
            if var in target:
                continue
            target.add(var)
            for lit in gate_of[var].body:
                sub = abs(lit)
                if f.get(sub, sub) == sub:
                    continue
                work.append((sub, want_a == (lit > 0)))

    a_step: dict[int, int] = {}
    b_step: dict[int, int] = {}
    for g in c.gates:
        e = g.var
        body = tuple(dict.fromkeys(g.body))
        if e in need_a:
            fe = f[e]
            cur = b.raw_axiom(c_big[e])
            for lit in body:
                sub = abs(lit)
                if _map_lit(lit, f) == lit:
                    continue
                if lit > 0:
                    cur = b.resolve(cur, a_step[sub], sub)
                else:
                    cur = b.resolve(b_step[sub], cur, sub)
            for lit in body:
                fl = _map_lit(lit, f)
                dcl = b.raw_axiom(d_dcl[(fe, fl)])
                if fl > 0:
                    if fl in b.clause(cur):
                        cur = b.resolve(cur, dcl, fl)
                elif fl in b.clause(cur):
                    cur = b.resolve(dcl, cur, -fl)
            if b.clause(cur) != Clause((-e, fe)):
                raise TranslateError(f"bridge clause for gate {e} came out wrong")
            a_step[e] = cur
        if e in need_b:
            fe = f[e]
            cur = b.raw_axiom(d_big[fe])
            for lit in body:
                sub = abs(lit)
                fl = _map_lit(lit, f)
                if fl == lit:
                    continue
                if fl > 0:
                    cur = b.resolve(cur, b_step[sub], fl)
                else:
                    cur = b.resolve(a_step[sub], cur, -fl)
            for lit in body:
                dcl = b.raw_axiom(c_dcl[(e, lit)])
                if lit > 0:
                    if lit in b.clause(cur):
                        cur = b.resolve(cur, dcl, lit)
                elif lit in b.clause(cur):
                    cur = b.resolve(dcl, cur, -lit)
            if b.clause(cur) != Clause((e, -fe)):
                raise TranslateError(f"converse bridge for gate {e} came out wrong")
            b_step[e] = cur

    uy = b.raw_axiom(unit_y)
    ufy = b.raw_axiom(unit_fy)
    if fy == y:
        final = b.resolve(uy, ufy, y) if polarity else b.resolve(ufy, uy, y)
    elif polarity:
        mid = b.resolve(uy, a_step[y], y)
        final = b.resolve(mid, ufy, fy)
    else:
        mid = b.resolve(b_step[y], uy, y)
        final = b.resolve(ufy, mid, fy)
    if b.clause(final) != EMPTY_CLAUSE:
        raise TranslateError("embedding refutation missed the empty clause")
    return b.extract(final)


def _premise_lookup(cs: ClauseSet) -> dict[Clause, int]:
    index: dict[Clause, int] = {}
    for pos, cl in enumerate(cs.clauses):
        index.setdefault(cl, pos)
    return index


def _rename_clause(cl: Clause, varmap: dict[int, int]) -> Clause:
    return Clause(tuple(_map_lit(l, varmap) for l in cl))


@dataclass(frozen=True)
class TranslatedSearch:
    problem: SearchProblem  # enlarged algorithm, same checker
    rho: ResolutionProof
    delta_prime: int


def search_translate(sp: SearchProblem, pi: ERProof) -> TranslatedSearch:
    """Absorb an ER refutation of the correctness clauses into the
    algorithm circuit: the enlarged algorithm carries a duplicate of
    algorithm, checker, and proof auxiliaries, and the returned plain
    refutation derives the duplicate's verdict and glues it back."""
    rep = check_search_problem(sp)
    if not rep:
        raise TranslateError(f"bad search problem: {rep.reason}")
    correct = gen_correct(sp)
    rep = check_er(correct, pi)
    if not rep:
        raise TranslateError(f"invalid proof: {rep.reason}")
    delta = sp.checker.outputs[0]

    host = Circuit(sp.xs, sp.algorithm.gates + sp.checker.gates, (delta,))
    full = Circuit(sp.xs, host.gates + pi.aux.gates, (delta,))
    rep = validate_circuit(full)
    if not rep:
        raise TranslateError(f"proof auxiliaries do not stack: {rep.reason}")
    old_premises = er_premises(correct, pi.aux)
    fresh = VarAlloc(max(max_var(full), old_premises.n) + 1)
    dup_gates, dupmap = [], {v: v for v in sp.xs}
    for g in full.gates:
        nv = fresh.fresh()
        dup_gates.append(Gate(nv, tuple(map_literal(l, dupmap) for l in g.body)))
        dupmap[g.var] = nv
    delta_prime = dupmap[delta]

    algo2 = Circuit(sp.xs, sp.algorithm.gates + tuple(dup_gates), sp.ys)
    sp2 = SearchProblem(sp.n, sp.xs, sp.ys, algo2, sp.checker)
    correct2 = gen_correct(sp2)
    lookup = _premise_lookup(correct2)

    neg_delta_pos = len(correct.clauses) - 1
    stripped = strip_weakening(old_premises, pi.proof)
    premise_map = {}
    for q, cl in enumerate(old_premises.clauses):
        if q == neg_delta_pos:
            premise_map[q] = len(correct2.clauses)
        else:
            premise_map[q] = lookup[_rename_clause(cl, dupmap)]
    renamed = rename_proof(stripped, dupmap, premise_map)
    lifted = lift_unit_axiom(correct2, renamed, -delta_prime)

    dup_circuit = Circuit(sp.xs, tuple(dup_gates), (delta_prime,))
    f = {v: dupmap[v] for v in host.variables()}
    glue = emb_refute(host, dup_circuit, f, delta, polarity=False)
    glue_premises = emb_premises(host, dup_circuit, delta, False, delta_prime)

    b = ProofBuilder(correct2)
    lifted_step = b.import_proof(lifted, lambda k: b.axiom(k))
    if b.clause(lifted_step) != Clause((delta_prime,)):
        raise TranslateError("lifting did not reach the duplicate verdict")
    n_gate_clauses = len(glue_premises.clauses) - 2

    def glue_axiom(k: int) -> int:
        if k < n_gate_clauses:
            return b.axiom(lookup[glue_premises.clauses[k]])
        if k == n_gate_clauses:  # unit {-delta}
            return b.axiom(len(correct2.clauses) - 1)
        return lifted_step  # unit {delta'}

    final = b.import_proof(glue, glue_axiom)
    if b.clause(final) != EMPTY_CLAUSE:
        raise TranslateError("translated refutation missed the empty clause")
    return TranslatedSearch(sp2, b.extract(final), delta_prime)


def _unit(b: ProofBuilder, lit: int, step: int) -> int:
    if b.clause(step) != Clause((lit,)):
        raise TranslateError(f"expected unit {lit}, got {b.clause(step)}")
    return step


@dataclass(frozen=True)
class TruthTranslation:
    beta: Circuit
    iface: TreeInterface
    eta: ERProof
    bundle: CorrectnessBundle


def truthdef_translate(omega: ClauseSet, pi: ERProof) -> TruthTranslation:
    """Turn an ER refutation of omega into one of C(omega, beta) for
    the canonical always-branch-on-depth circuit.

    The auxiliary circuit adds one stand-in variable per original
    variable, defined as the negation of its branch variable, plus a
    duplicate of pi's auxiliaries over the stand-ins.  The proof first
    forces every copy's outputs (the canonical circuit's answer on a
    depth-i window is i regardless of the branch bits), then converts
    each weakening-witness gate into the stand-in image of its source
    clause, and finally replays pi.
    """
    rep = check_er(omega, pi)
    if not rep:
        raise TranslateError(f"invalid proof: {rep.reason}")
    n = omega.n
    if n < 1:
        raise TranslateError("need at least one variable")
    beta, iface = canonical_tree_circuit(n)
    bundle = gen_C(omega, beta, iface)
    width = output_width(n)
    cs = bundle.clauses
    lookup = bundle.clause_index
    gm_c = bundle.circuit.gate_map()

    old_premises = er_premises(omega, pi.aux)
    fresh = VarAlloc(max(cs.n, old_premises.n) + 1)
    stand_in = {p: fresh.fresh() for p in range(1, n + 1)}
    aux_gates = [Gate(stand_in[p], (-p,)) for p in range(1, n + 1)]
    auxmap = dict(stand_in)
    for g in pi.aux.gates:
        nv = fresh.fresh()
        aux_gates.append(Gate(nv, tuple(map_literal(l, auxmap) for l in g.body)))
        auxmap[g.var] = nv
    aux = Circuit(tuple(range(1, n + 1)), tuple(aux_gates), ())
    premises = er_premises(cs, aux)
    aux_clause_base = len(cs.clauses) + 2 * n
    b = ProofBuilder(premises)

    def gate_big(var: int) -> int:
        return b.axiom(lookup[Clause((-var,) + tuple(gm_c[var].body))])

    def gate_dcl(var: int, lit: int) -> int:
        return b.axiom(lookup[Clause((var, -lit))])

    lam = bundle.lambda_bundle
    dl = bundle.delta_bundle
    tt = lam.const_true
    z1 = bundle.z_vars[0]
    tt_step = b.resolve(gate_dcl(tt, -z1), gate_dcl(tt, z1), z1)
    units: dict[int, int] = {tt: _unit(b, tt, tt_step)}

    def derive_or_unit(var: int, body: tuple[int, ...], value: bool) -> int:
        """Unit for an or-gate whose deciding body literals have units."""
        body = tuple(dict.fromkeys(body))
        if value:
            wit = next(
                l for l in body
                if abs(l) in units and b.clause(units[abs(l)]) == Clause((l,))
            )
            dcl = gate_dcl(var, wit)
            if wit > 0:
                step = b.resolve(units[wit], dcl, wit)
            else:
                step = b.resolve(dcl, units[abs(wit)], abs(wit))
        else:
            step = gate_big(var)
            for l in body:
                u = units[abs(l)]
                if l > 0:
                    step = b.resolve(step, u, l)
                else:
                    step = b.resolve(u, step, abs(l))
        units[var] = _unit(b, var if value else -var, step)
        return units[var]

    # Window-grid units (constant rows only; pass-throughs have none).
    for (i, j), u in sorted(lam.grid.items()):
        body = gm_c[u].body
        if body == (-tt,):
            derive_or_unit(u, body, False)
        elif body == (tt,):
            derive_or_unit(u, body, True)

    # Copy i of the canonical circuit: the window row fixes everything.
    gm = beta.gate_map()
    pre_vars = [beta.gates[t].var for t in range(n)]
    nd_vars = [beta.gates[n + 2 * (d - 1)].var for d in range(1, n + 1)]
    ind_vars = [beta.gates[n + 2 * (d - 1) + 1].var for d in range(1, n + 1)]
    for i in range(1, n + 1):
        cm = bundle.copy_maps[i - 1]
        for j, pv in enumerate(pre_vars):
            body = tuple(map_literal(l, cm) for l in gm[pv].body)
            derive_or_unit(cm[pv], body, j >= n - i + 1)
        for d in range(1, n + 1):
            ndv, indv = cm[nd_vars[d - 1]], cm[ind_vars[d - 1]]
            body = tuple(map_literal(l, cm) for l in gm[nd_vars[d - 1]].body)
            derive_or_unit(ndv, body, d != i)
            derive_or_unit(indv, (-ndv,), d == i)
        for m in range(1, width + 1):
            yv = iface.outputs[m - 1]
            body = tuple(map_literal(l, cm) for l in gm[yv].body)
            derive_or_unit(cm[yv], body, bool((i >> (m - 1)) & 1))

    # Weakening witnesses from the negated verdict.
    neg_delta = b.axiom(bundle.neg_delta_index)
    f_steps: list[int] = []
    final: Optional[int] = None
    for pos, clause in enumerate(omega.clauses):
        wv = dl.w_vars[pos]
        w_unit = b.resolve(gate_dcl(dl.delta, -wv), neg_delta, dl.delta)
        _unit(b, wv, w_unit)
        cur = b.resolve(w_unit, gate_big(wv), wv)
        if not clause.literals:
            # This witness gate is the negated constant: contradiction.
            c_unit = b.resolve(gate_dcl(dl.const, -z1), gate_dcl(dl.const, z1), z1)
            final = b.resolve(c_unit, cur, dl.const)
            break
        for lit in clause:
            j, k = abs(lit), (1 if lit > 0 else 0)
            lv = dl.l_vars[(j, k)]
            sv = dl.s_vars[(j, j, k)]
            step = b.resolve(gate_dcl(lv, -sv), gate_big(sv), sv)
            for m in range(1, width + 1):
                wgrid = bundle.w_grid[(j, m)]
                u = units[wgrid]
                if b.clause(u) == Clause((wgrid,)):
                    step = b.resolve(u, step, wgrid)
                else:
                    step = b.resolve(step, u, wgrid)
            zlit = j if k == 0 else -j
            if b.clause(step) != Clause((lv, zlit)):
                raise TranslateError("literal-gate unfolding went off the rails")
            cur = b.resolve(step, cur, lv)
        # cur is the branch-bit image of the clause; move it to the
        # stand-ins (clauses of p' = not z: {-p', -z} and {p', z}).
        for lit in clause:
            j = abs(lit)
            if lit > 0:
                cur = b.resolve(b.axiom(len(cs.clauses) + 2 * (j - 1) + 1), cur, j)
            else:
                cur = b.resolve(cur, b.axiom(len(cs.clauses) + 2 * (j - 1)), j)
        want = Clause(tuple(_map_lit(l, stand_in) for l in clause))
        if b.clause(cur) != want:
            raise TranslateError("stand-in image of a source clause came out wrong")
        f_steps.append(cur)

    if final is None:
        stripped = strip_weakening(old_premises, pi.proof)

        def axiom_map(q: int) -> int:
            if q < len(omega.clauses):
                return f_steps[q]
            return b.axiom(aux_clause_base + (q - len(omega.clauses)))

        final = b.import_proof(stripped, axiom_map, varmap=auxmap)
    if b.clause(final) != EMPTY_CLAUSE:
        raise TranslateError("translated refutation missed the empty clause")
    eta = ERProof(aux, b.extract(final))
    return TruthTranslation(beta, iface, eta, bundle)


def graft(
    omega: ClauseSet, beta: Circuit, iface: TreeInterface, alpha_er: ERProof
) -> ImplicitRefutation:
    """Fold an ER refutation of C(omega, beta) into the described
    circuit itself, yielding a plain implicit refutation.

    The grown circuit keeps beta's structure, rebased onto the ids the
    clause-set generator hands its first copy (inputs to the first
    window row, outputs to the first answer row, gates to the copy
    stride), which makes the first copy's clause block literally the
    grown circuit's own clauses.  A duplicate, over the branch
    variables, of every generator gate and proof auxiliary is
    appended.  The certificate renames the ER proof onto the
    duplicate, lifts its use of the negated verdict into a derivation
    of the duplicate verdict, and glues back with an embedding
    refutation."""
    n = iface.n
    if omega.n != n:
        omega = ClauseSet(n, omega.clauses)
    bundle = gen_C(omega, beta, iface)
    rep = check_er(bundle.clauses, alpha_er)
    if not rep:
        raise TranslateError(f"invalid proof: {rep.reason}")
    aux = alpha_er.aux
    width = output_width(n)

    g_circuit = bundle.circuit
    full_gates = g_circuit.gates + aux.gates
    m_beta = len(beta.gates) - width  # non-output gate count
    copy_base = bundle.copy_base

    dupmap = {z: z for z in bundle.z_vars}
    dup_gates = []
    for t, g in enumerate(full_gates, start=1):
        nv = copy_base + (m_beta + t - 1) * n
        dup_gates.append(Gate(nv, tuple(map_literal(l, dupmap) for l in g.body)))
        dupmap[g.var] = nv
    delta_prime = dupmap[bundle.delta]

    # Beta rebased so that its first copy is the identity.
    xhat = tuple(bundle.u_grid[(1, j)] for j in range(n + 1))
    betamap = {x: xh for x, xh in zip(iface.inputs, xhat)}
    for m, y in enumerate(iface.outputs, start=1):
        betamap[y] = bundle.w_grid[(1, m)]
    for v in beta.free:
        betamap.setdefault(v, v)  # extra frees stay put
    t = 0
    for g in beta.gates:
        if g.var not in betamap:
            betamap[g.var] = copy_base + t * n
            t += 1
    beta_hat = tuple(
        Gate(betamap[g.var], tuple(map_literal(l, betamap) for l in g.body))
        for g in beta.gates
    )
    beta2 = Circuit(
        xhat + tuple(bundle.z_vars),
        beta_hat + tuple(dup_gates),
        tuple(bundle.w_grid[(1, m)] for m in range(1, width + 1)),
    )
    rep = validate_circuit(beta2)
    if not rep:
        raise TranslateError(f"grown circuit invalid: {rep.reason}")
    iface2 = TreeInterface(n, xhat, beta2.outputs)
    bundle2 = gen_C(omega, beta2, iface2)
    lookup = bundle2.clause_index

    old_premises = er_premises(bundle.clauses, aux)
    stripped = strip_weakening(old_premises, alpha_er.proof)
    premise_map = {}
    for q, cl in enumerate(old_premises.clauses):
        if q == bundle.neg_delta_index:
            premise_map[q] = len(bundle2.clauses.clauses)
        else:
            premise_map[q] = lookup[_rename_clause(cl, dupmap)]
    renamed = rename_proof(stripped, dupmap, premise_map)
    lifted = lift_unit_axiom(bundle2.clauses, renamed, -delta_prime)

    dup_circuit = Circuit(tuple(bundle.z_vars), tuple(dup_gates), (delta_prime,))
    f = {v: dupmap[v] for v in g_circuit.variables()}
    glue = emb_refute(g_circuit, dup_circuit, f, bundle.delta, polarity=False)
    glue_premises = emb_premises(
        g_circuit, dup_circuit, bundle.delta, False, delta_prime
    )

    b = ProofBuilder(bundle2.clauses)
    lifted_step = b.import_proof(lifted, lambda k: b.axiom(k))
    if b.clause(lifted_step) != Clause((delta_prime,)):
        raise TranslateError("lifting did not reach the duplicate verdict")
    n_gate_clauses = len(glue_premises.clauses) - 2

    def glue_axiom(k: int) -> int:
        if k < n_gate_clauses:
            return b.axiom(lookup[glue_premises.clauses[k]])
        if k == n_gate_clauses:
            return b.axiom(bundle2.neg_delta_index)
        return lifted_step

    final = b.import_proof(glue, glue_axiom)
    if b.clause(final) != EMPTY_CLAUSE:
        raise TranslateError("grafted refutation missed the empty clause")
    alpha2 = b.extract(final)
    return ImplicitRefutation(
        n, omega, alpha2, beta2, iface2,
        alpha_premises=len(bundle2.clauses.clauses),
    )


def er_to_implicit(omega: ClauseSet, pi: ERProof) -> ImplicitRefutation:
    """Full simulation: truth-definition translation onto the
    canonical circuit, then grafting."""
    tt = truthdef_translate(omega, pi)
    ir = graft(omega, tt.beta, tt.iface, tt.eta)
    rep = verify_implicit(ir)
    if not rep:
        raise TranslateError(f"simulation output rejected at {rep.stage}: {rep.reason}")
    return ir
