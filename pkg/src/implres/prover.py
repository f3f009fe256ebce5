"""Decision-tree refutations and the branching prover.

Tree convention: at a node branching on variable v, taking the left
child records path bit 0 and assigns v := 1, so clauses tracked on
the left may carry the literal -v; the right child records bit 1 and
assigns v := 0, matching literal v.  A leaf names a premise falsified
by its path assignment.  Reading a node off as a resolution step
therefore resolves the right subtree (positive side) against the left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .formulas import Clause, ClauseSet
from .proofs import ProofBuilder, ResolutionProof, UnitPropagation


class ProverError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    premise: int


@dataclass(frozen=True)
class Node:
    var: int
    left: "DecisionTree"
    right: "DecisionTree"


DecisionTree = Union[Leaf, Node]


def tree_size(tree: DecisionTree) -> int:
    stack, total = [tree], 0
    while stack:
        t = stack.pop()
        total += 1
        if isinstance(t, Node):
            stack.append(t.left)
            stack.append(t.right)
    return total


def tree_depth(tree: DecisionTree) -> int:
    stack, best = [(tree, 0)], 0
    while stack:
        t, d = stack.pop()
        if isinstance(t, Leaf):
            best = max(best, d)
        else:
            stack.append((t.left, d + 1))
            stack.append((t.right, d + 1))
    return best


@dataclass(frozen=True)
class TreeReport:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_decision_tree(
    premises: ClauseSet, tree: DecisionTree, regular: bool = True
) -> TreeReport:
    """Check every leaf premise is falsified by its path assignment."""
    stack: list[tuple[DecisionTree, dict[int, bool]]] = [(tree, {})]
    while stack:
        t, path = stack.pop()
        if isinstance(t, Leaf):
            if not 0 <= t.premise < len(premises.clauses):
                return TreeReport(False, f"leaf premise {t.premise} out of range")
            clause = premises.clauses[t.premise]
            for lit in clause:
                val = path.get(abs(lit))
                if val is None or val == (lit > 0):
                    return TreeReport(
                        False,
                        f"premise {t.premise} not falsified on path {path}",
                    )
        else:
            if regular and t.var in path:
                return TreeReport(False, f"variable {t.var} queried twice on a path")
            left = dict(path)
            left[t.var] = True
            right = dict(path)
            right[t.var] = False
            stack.append((t.left, left))
            stack.append((t.right, right))
    return TreeReport(True)


def proof_from_tree(premises: ClauseSet, tree: DecisionTree) -> ResolutionProof:
    """Read the tree off as a tree-like regular refutation."""
    b = ProofBuilder(premises)
    work: list[tuple[str, object]] = [("visit", tree)]
    out: list[int] = []
    while work:
        op, arg = work.pop()
        if op == "visit":
            if isinstance(arg, Leaf):
                out.append(b.raw_axiom(arg.premise))
            else:
                work.append(("make", arg.var))
                work.append(("visit", arg.right))
                work.append(("visit", arg.left))
        else:
            right = out.pop()
            left = out.pop()
            out.append(b.resolve_opt(right, left, arg))
    final = out[-1]
    if b.clause(final).literals:
        raise ProverError(f"tree proof derives {b.clause(final)}, not the empty clause")
    return b.extract(final)


@dataclass(frozen=True)
class DpllOutcome:
    tree: Optional[DecisionTree]
    model: Optional[dict[int, bool]]
    nodes: int


def dpll_refute(
    cs: ClauseSet,
    order: Optional[Iterable[int]] = None,
    unit_priority: bool = True,
    max_nodes: Optional[int] = None,
) -> DpllOutcome:
    """Branching search returning a decision-tree refutation or a model.

    Branch variable choice: a clause that is unit under the current
    assignment wins (one branch kills it immediately), otherwise the
    first unassigned variable from ``order`` occurring in a clause not
    yet satisfied.  Left branch assigns the variable true.
    """
    if order is None:
        if cs.n > 20:
            raise ProverError("default branching order capped at 20 variables")
        order = range(1, cs.n + 1)
    order = tuple(order)
    engine = UnitPropagation(cs)
    occur_var: dict[int, list[int]] = {}
    for idx, c in enumerate(cs.clauses):
        for lit in c:
            occur_var.setdefault(abs(lit), []).append(idx)
    unsat_count = sum(1 for idx in range(len(cs.clauses)) if engine.n_sat[idx] == 0)

    def pick_unit() -> Optional[int]:
        while engine.pending:
            idx = engine.pending.pop()
            if engine.n_sat[idx] > 0:
                continue
            lit = engine._unit_literal(idx)
            if lit is None:
                continue
            engine.pending.append(idx)
            return lit
        return None

    def pick_order_var() -> Optional[int]:
        for v in order:
            if v in engine.value:
                continue
            if any(engine.n_sat[idx] == 0 for idx in occur_var.get(v, ())):
                return v
        return None

    def decide(lit: int) -> Optional[int]:
        nonlocal unsat_count
        conflict = engine._set(lit, None)
        for idx in engine.occur.get(lit, ()):
            if engine.n_sat[idx] == 1:
                unsat_count -= 1
        return conflict

    def retract(mark: int):
        nonlocal unsat_count
        while len(engine.trail) > mark:
            lit = engine.trail[-1]
            for idx in engine.occur.get(lit, ()):
                if engine.n_sat[idx] == 1:
                    unsat_count += 1
            engine.undo(len(engine.trail) - 1)

    nodes = 0
    if engine.empty_conflict is not None:
        return DpllOutcome(Leaf(engine.empty_conflict), None, 1)
    results: list[DecisionTree] = []
    stack: list[tuple] = [("enter",)]
    while stack:
        frame = stack.pop()
        if frame[0] == "enter":
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                raise ProverError(f"node budget {max_nodes} exhausted")
            if unsat_count == 0:
                model = {v: engine.value.get(v, False) for v in range(1, cs.n + 1)}
                return DpllOutcome(None, model, nodes)
            lit = pick_unit() if unit_priority else None
            var = abs(lit) if lit is not None else pick_order_var()
            if var is None:
                raise ProverError("branching order exhausted before refutation")
            stack.append(("combine", var))
            stack.append(("branch", -var))
            stack.append(("branch", var))
        elif frame[0] == "branch":
            lit = frame[1]
            mark = engine.mark()
            conflict = decide(lit)
            if conflict is not None:
                nodes += 1
                results.append(Leaf(conflict))
                retract(mark)
            else:
                stack.append(("undo", mark))
                stack.append(("enter",))
        elif frame[0] == "undo":
            retract(frame[1])
        else:
            right = results.pop()
            left = results.pop()
            results.append(Node(frame[1], left, right))
    return DpllOutcome(results[-1], None, nodes)


def balance_tree(
    tree: DecisionTree, order: Iterable[int]
) -> DecisionTree:
    """Extend every path to query all of ``order`` exactly once.

    Below a leaf the missing variables are chained in order, with the
    leaf copied into both children; the input must be regular with
    path variables drawn from ``order``.
    """
    order = tuple(order)
    pos = {v: i for i, v in enumerate(order)}

    def go(t: DecisionTree, used: frozenset[int]) -> DecisionTree:
        if isinstance(t, Node):
            if t.var not in pos or t.var in used:
                raise ProverError(f"node variable {t.var} outside the order or repeated")
            below = used | {t.var}
            return Node(t.var, go(t.left, below), go(t.right, below))
        out: DecisionTree = t
        for v in reversed([v for v in order if v not in used]):
            out = Node(v, out, out)
        return out

    return go(tree, frozenset())


def serialize_dtree(premises: ClauseSet, tree: DecisionTree) -> str:
    lines = [f"dtree {premises.n}"]
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            clause = premises.clauses[t.premise]
            lines.append(
                "l" + ("" if not clause.literals else " " + " ".join(map(str, clause))) + " 0"
            )
        else:
            lines.append(f"n {t.var}")
            stack.append(t.right)
            stack.append(t.left)
    return "\n".join(lines) + "\n"


def parse_dtree(text: str, premises: ClauseSet) -> DecisionTree:
    """Rebuild a tree, anchoring each leaf to the first equal premise."""
    tokens: list[tuple] = []
    n = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dtree":
            if n is not None or len(parts) != 2:
                raise ProverError("malformed dtree header")
            n = int(parts[1])
        elif parts[0] == "n" and len(parts) == 2:
            tokens.append(("n", int(parts[1])))
        elif parts[0] == "l" and parts[-1] == "0":
            tokens.append(("l", Clause(tuple(int(t) for t in parts[1:-1]))))
        else:
            raise ProverError(f"malformed dtree line {line!r}")
    if n is None:
        raise ProverError("missing dtree header")
    if n != premises.n:
        raise ProverError(f"dtree is over {n} variables, premises over {premises.n}")
    index_of = {}
    for idx, c in enumerate(premises.clauses):
        index_of.setdefault(c, idx)
    done: Optional[DecisionTree] = None
    open_nodes: list[list] = []
    for kind, payload in tokens:
        if kind == "n":
            if done is not None:
                raise ProverError("trailing dtree data")
            open_nodes.append([payload, None])
            continue
        if payload not in index_of:
            raise ProverError(f"leaf clause {payload} is not a premise")
        sub: DecisionTree = Leaf(index_of[payload])
        while True:
            if not open_nodes:
                if done is not None:
                    raise ProverError("trailing dtree data")
                done = sub
                break
            if open_nodes[-1][1] is None:
                open_nodes[-1][1] = sub
                break
            var, left = open_nodes.pop()
            sub = Node(var, left, sub)
    if done is None or open_nodes:
        raise ProverError("dtree ends early")
    return done
