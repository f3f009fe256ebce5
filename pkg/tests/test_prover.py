import pytest

from implres.formulas import Clause, ClauseSet, satisfies
from implres.proofs import check_proof
from implres.prover import (
    Leaf,
    Node,
    ProverError,
    balance_tree,
    check_decision_tree,
    dpll_refute,
    parse_dtree,
    proof_from_tree,
    serialize_dtree,
    tree_depth,
    tree_size,
)


def test_tree_metrics():
    t = Node(1, Leaf(0), Node(2, Leaf(1), Leaf(2)))
    assert tree_size(t) == 5
    assert tree_depth(t) == 2
    assert tree_depth(Leaf(0)) == 0


def test_check_decision_tree(omega1, omega2):
    # left branch sets the variable true, so it falsifies the negative unit
    good = Node(1, Leaf(1), Leaf(0))
    assert check_decision_tree(omega1, good)
    swapped = Node(1, Leaf(0), Leaf(1))
    assert not check_decision_tree(omega1, swapped)
    assert not check_decision_tree(omega1, Leaf(7))
    irregular = Node(1, Node(1, Leaf(1), Leaf(1)), Leaf(0))
    assert not check_decision_tree(omega1, irregular)
    assert not check_decision_tree(omega1, irregular, regular=True)
    t2 = Node(2, Leaf(2), Node(1, Leaf(1), Leaf(0)))
    assert check_decision_tree(omega2, t2)


def test_proof_from_tree_is_tree_like_refutation(omega2):
    t = Node(2, Leaf(2), Node(1, Leaf(1), Leaf(0)))
    proof = proof_from_tree(omega2, t)
    rep = check_proof(omega2, proof)
    assert rep
    # one axiom per leaf, one resolution per node
    assert len(proof.steps) == tree_size(t)


def test_dpll_refute_unsat(omega1, omega2, php32, tseitin4):
    for cs in (omega1, omega2, php32, tseitin4):
        out = dpll_refute(cs)
        assert out.model is None
        assert check_decision_tree(cs, out.tree)
        assert check_proof(cs, proof_from_tree(cs, out.tree))


def test_dpll_refute_sat_model():
    cs = ClauseSet(3, ((1, 2), (-1, 3)))
    out = dpll_refute(cs)
    assert out.tree is None
    assert all(satisfies(out.model, c) for c in cs)


def test_dpll_respects_order_and_node_budget(php32):
    out = dpll_refute(php32, order=tuple(range(php32.n, 0, -1)))
    assert out.model is None
    assert check_decision_tree(php32, out.tree)
    with pytest.raises(ProverError):
        dpll_refute(php32, max_nodes=3)


def test_dpll_default_order_capped():
    wide = ClauseSet(30, (Clause((1,)), Clause((-1,))))
    with pytest.raises(ProverError):
        dpll_refute(wide)
    out = dpll_refute(wide, order=(1,))
    assert out.model is None


def test_balance_tree_queries_every_variable(omega2):
    out = dpll_refute(omega2)
    balanced = balance_tree(out.tree, (1, 2))
    assert check_decision_tree(omega2, balanced)
    assert tree_depth(balanced) == 2
    assert tree_size(balanced) == 7  # full binary tree over two variables
    # already balanced trees come back unchanged in shape
    again = balance_tree(balanced, (1, 2))
    assert tree_size(again) == 7


def test_balance_tree_rejects_foreign_variables(omega1):
    t = Node(1, Leaf(1), Leaf(0))
    with pytest.raises(ProverError):
        balance_tree(t, (2,))


def test_dtree_serialize_parse_round_trip(omega2, php32):
    for cs in (omega2, php32):
        out = dpll_refute(cs)
        text = serialize_dtree(cs, out.tree)
        back = parse_dtree(text, cs)
        assert check_decision_tree(cs, back)
        assert serialize_dtree(cs, back) == text


def test_parse_dtree_errors(omega1):
    with pytest.raises(ProverError):
        parse_dtree("", omega1)
    with pytest.raises(ProverError):
        parse_dtree("dtree 1\nn 1\n", omega1)  # dangling node
    with pytest.raises(ProverError):
        parse_dtree("dtree 1\nl 5 0\n", omega1)  # no premise with that clause
