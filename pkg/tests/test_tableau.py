import pytest

from implres.circuits import Circuit, Gate, validate_circuit
from implres.families import tm_halt, tm_left_runner, tm_right_writer, tm_write_stay
from implres.formulas import Clause
from implres.proofs import ERProof, Resolve, ResolutionProof
from implres.tableau import (
    TableauError,
    TableauInterface,
    TMSpec,
    address_sweep,
    check_machine,
    check_run,
    check_tableau_interface,
    decode_tau,
    encode_tau,
    gen_tableau,
    graft_pq,
    parse_tm,
    read_grid,
    refute_tableau,
    run_accepts,
    serialize_tm,
    tableau_interface_from_circuit,
    verify_pq,
    verify_refutation,
)


def empty_aux(proof):
    return ERProof(Circuit((), (), ()), proof)


def test_check_machine():
    tm, _, _, _ = tm_write_stay()
    assert check_machine(tm)
    assert not check_machine(TMSpec(0, 2, {}, frozenset()))
    assert not check_machine(TMSpec(1, 1, {}, frozenset()))
    assert not check_machine(TMSpec(1, 2, {(0, 0): (0, 0, "X")}, frozenset()))
    assert not check_machine(TMSpec(1, 2, {(0, 2): (0, 0, "S")}, frozenset()))
    assert not check_machine(TMSpec(1, 2, {(0, 0): (5, 0, "S")}, frozenset()))
    assert not check_machine(TMSpec(1, 2, {}, frozenset({7})))


def test_tm_serialize_parse_round_trip():
    for fixture in (tm_halt, tm_write_stay, tm_right_writer):
        tm, _, _, _ = fixture()
        assert parse_tm(serialize_tm(tm)) == tm


def test_parse_tm_errors():
    with pytest.raises(TableauError):
        parse_tm("")
    with pytest.raises(TableauError):
        parse_tm("tm\nstates 1\nalpha 2\ntrans 0 0 0 0 S\ntrans 0 0 0 1 S\naccept 0\n")
    with pytest.raises(TableauError):
        parse_tm("tm\nstates 1\nbogus\n")


def test_tau_codec():
    assert decode_tau("2", 2) == (1, 0)
    assert decode_tau("3", 2) == (1, 1)
    assert encode_tau((1, 0)) == "2"
    assert decode_tau("a5", 8) == (1, 0, 1, 0, 0, 1, 0, 1)
    assert encode_tau(decode_tau("a5", 8)) == "a5"
    assert decode_tau(encode_tau((0,) * 4), 4) == (0, 0, 0, 0)
    with pytest.raises(TableauError):
        decode_tau("4", 2)  # value needs three bits
    with pytest.raises(TableauError):
        decode_tau("zz", 4)


def test_interface_helpers():
    tm, tau, beta, iface = tm_halt()
    assert tableau_interface_from_circuit(beta, 1) == iface
    assert check_tableau_interface(beta, iface, tm)
    short = TableauInterface(1, iface.inputs, iface.outputs[:2])
    assert not check_tableau_interface(beta, short, tm)
    with pytest.raises(TableauError):
        tableau_interface_from_circuit(Circuit((1,), (), ()), 1)


def test_simulator_accepts_and_rejects():
    tm, tau, beta, iface = tm_halt()
    grid = read_grid(tm, beta, iface)
    assert check_run(tm, tau, grid)
    assert not check_run(tm, (0, 1), grid)
    assert run_accepts(tm, tau, beta, iface)

    tm2, tau2, beta2, iface2 = tm_write_stay()
    grid2 = read_grid(tm2, beta2, iface2)
    assert check_run(tm2, tau2, grid2)
    assert not check_run(tm2, (1, 0), grid2)

    tm3, tau3, beta3, iface3 = tm_right_writer()
    assert check_run(tm3, tau3, read_grid(tm3, beta3, iface3))


def test_gen_tableau_unsat_only_for_true_target():
    for fixture in (tm_halt, tm_write_stay, tm_right_writer):
        tm, tau, beta, iface = fixture()
        bundle = gen_tableau(tm, tau, beta, iface)
        unsat, witness = address_sweep(bundle)
        assert unsat, (fixture.__name__, witness)
        n_cells = 1 << iface.m
        for wrong in range(1 << n_cells):
            wrong_tau = tuple((wrong >> (n_cells - 1 - i)) & 1 for i in range(n_cells))
            if wrong_tau == tau:
                continue
            unsat, witness = address_sweep(gen_tableau(tm, wrong_tau, beta, iface))
            assert not unsat and witness is not None, (fixture.__name__, wrong_tau)


def test_gen_tableau_clause_layout_independent_of_grid():
    # same machine and target, structurally different grid circuits
    tm, tau, beta, iface = tm_halt()
    beta2 = Circuit(
        (1, 2),
        (Gate(3, (-2,)), Gate(4, (3,)), Gate(5, (-2,)), Gate(6, (-2,))),
        (4, 5, 6),
    )
    iface2 = tableau_interface_from_circuit(beta2, 1)
    b1 = gen_tableau(tm, tau, beta, iface)
    b2 = gen_tableau(tm, tau, beta2, iface2)
    assert len(beta2.gates) != len(beta.gates)
    assert b1.neg_delta_index == b2.neg_delta_index
    assert b1.delta == b2.delta
    assert b1.copy_base == b2.copy_base
    assert b1.cell_base == b2.cell_base
    assert b1.clauses.clauses[b1.neg_delta_index] == Clause((-b1.delta,))
    assert validate_circuit(b1.circuit)
    assert validate_circuit(b2.circuit)


def single_literal_variants(circ):
    """Flip one body literal, or pin a gate constant-true, one gate at
    a time."""
    for gi, g in enumerate(circ.gates):
        bodies = [
            tuple(l if i != li else -l for i, l in enumerate(g.body))
            for li in range(len(g.body))
        ]
        bodies.append((g.body[0], -g.body[0]))
        for body in bodies:
            gates = tuple(
                h if i != gi else Gate(h.var, body) for i, h in enumerate(circ.gates)
            )
            yield Circuit(circ.free, gates, circ.outputs)


def test_clause_set_tracks_simulator_under_mutation():
    cases = []
    tm1, tau1, beta1, iface1 = tm_halt()
    cases.append((tm1, beta1, iface1, tau1))
    cases.append((tm1, beta1, iface1, (0, 1)))
    tm2, tau2, beta2, iface2 = tm_write_stay()
    cases.append((tm2, beta2, iface2, tau2))
    cases.append((tm2, beta2, iface2, (1, 0)))
    checked = 0
    for tm, beta, iface, tau in cases:
        for variant in single_literal_variants(beta):
            # unsatisfiable exactly when the grid is a valid accepting run
            want_unsat = bool(check_run(tm, tau, read_grid(tm, variant, iface)))
            got_unsat, _ = address_sweep(gen_tableau(tm, tau, variant, iface))
            assert got_unsat == want_unsat, (tm, tau, variant)
            checked += 1
    assert checked >= 40


def test_off_tape_detector_is_load_bearing():
    # the left-walking machine admits no valid grid; without the
    # off-tape check the vanishing-head grid would satisfy everything
    for vanishing in (False, True):
        tm, tau, beta, iface = tm_left_runner(vanishing)
        assert not check_run(tm, tau, read_grid(tm, beta, iface))
        unsat, witness = address_sweep(gen_tableau(tm, tau, beta, iface))
        assert not unsat and witness is not None


def test_refute_and_verify():
    for fixture in (tm_halt, tm_write_stay, tm_right_writer):
        tm, tau, beta, iface = fixture()
        bundle = gen_tableau(tm, tau, beta, iface)
        alpha = refute_tableau(bundle)
        assert alpha is not None
        rep = verify_pq(tm, tau, beta, iface, alpha,
                        alpha_premises=len(bundle.clauses.clauses))
        assert rep, (fixture.__name__, rep.stage, rep.reason)


def test_refute_tableau_returns_none_on_satisfiable():
    tm, tau, beta, iface = tm_halt()
    assert refute_tableau(gen_tableau(tm, (0, 1), beta, iface)) is None


def test_verify_pq_rejections():
    tm, tau, beta, iface = tm_halt()
    bundle = gen_tableau(tm, tau, beta, iface)
    alpha = refute_tableau(bundle)
    # corrupted proof: swap the sides of the first resolution
    steps = list(alpha.steps)
    for i, st in enumerate(steps):
        if isinstance(st, Resolve):
            steps[i] = Resolve(st.right, st.left, st.pivot)
            break
    rep = verify_pq(tm, tau, beta, iface, ResolutionProof(tuple(steps)))
    assert not rep and rep.stage == "proof"
    # right proof, wrong target word
    rep = verify_pq(tm, (0, 1), beta, iface, alpha)
    assert not rep and rep.stage == "proof"
    # declared premise count must match
    rep = verify_pq(tm, tau, beta, iface, alpha, alpha_premises=1)
    assert not rep and rep.stage == "proof"
    # broken machine is caught first
    rep = verify_pq(TMSpec(1, 1, {}, frozenset()), tau, beta, iface, alpha)
    assert not rep and rep.stage == "machine"


def test_graft_pq_round_trip():
    for fixture in (tm_halt, tm_write_stay, tm_right_writer):
        tm, tau, beta, iface = fixture()
        bundle = gen_tableau(tm, tau, beta, iface)
        alpha = refute_tableau(bundle)
        tr = graft_pq(tm, tau, beta, iface, empty_aux(alpha))
        rep = verify_refutation(tr)
        assert rep, (fixture.__name__, rep.stage, rep.reason)
        # the grown grid computes the same tableau
        assert read_grid(tm, tr.beta, tr.iface) == read_grid(tm, beta, iface)


def test_graft_pq_carries_spurious_aux_gate():
    tm, tau, beta, iface = tm_halt()
    bundle = gen_tableau(tm, tau, beta, iface)
    alpha = refute_tableau(bundle)
    plain = graft_pq(tm, tau, beta, iface, empty_aux(alpha))
    junk = Circuit((1,), (Gate(bundle.clauses.n + 1, (1, -1)),), ())
    tr = graft_pq(tm, tau, beta, iface, ERProof(junk, alpha))
    assert verify_refutation(tr)
    assert len(tr.beta.gates) == len(plain.beta.gates) + 1


def test_gen_tableau_validates_inputs():
    tm, tau, beta, iface = tm_halt()
    with pytest.raises(TableauError):
        gen_tableau(TMSpec(1, 1, {}, frozenset()), tau, beta, iface)
    with pytest.raises(TableauError):
        gen_tableau(tm, (1, 0, 0), beta, iface)  # length mismatch
    with pytest.raises(TableauError):
        gen_tableau(tm, tau, beta, TableauInterface(1, (1, 2), (3, 4)))
