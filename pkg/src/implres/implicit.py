"""The implicit proof system: tuples (n, omega, alpha, beta), their
verifier, and a certificate synthesizer.

A tuple claims that beta describes a balanced tree-like refutation of
omega; alpha certifies the claim by refuting the generated clause set
C(omega, beta) in plain resolution, which the verifier replays.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from .circuits import Circuit, CircuitError, parse_circuit, serialize_circuit
from .correctness import CorrectnessBundle, CorrectnessError, gen_C
from .encoding import (
    EncodingError,
    TreeInterface,
    check_interface,
    interface_from_circuit,
)
from .formulas import (
    EMPTY_CLAUSE,
    ClauseSet,
    FormulaError,
    parse_dimacs,
    serialize_dimacs,
)
from .proofs import (
    CheckOptions,
    ProofBuilder,
    ResolutionProof,
    UnitPropagation,
    check_proof,
    parse_proof,
    serialize_proof,
)
from .prover import DecisionTree, balance_tree, check_decision_tree, dpll_refute


class ImplicitError(ValueError):
    pass


class SynthesisFailure(Exception):
    """The described refutation is wrong for omega; carries the branch
    bits of a leaf whose clause weakens no member of omega."""

    def __init__(self, witness: tuple[int, ...]):
        self.witness = witness
        super().__init__(f"no conflict at leaf {witness}")


@dataclass(frozen=True)
class ImplicitRefutation:
    n: int
    omega: ClauseSet
    alpha: ResolutionProof
    beta: Circuit
    iface: TreeInterface
    alpha_premises: Optional[int] = None  # declared count from the proof file


@dataclass(frozen=True)
class ImplicitReport:
    ok: bool
    stage: str  # decode | interface | generate | proof
    reason: str = ""
    bundle: Optional[CorrectnessBundle] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_implicit(ir: ImplicitRefutation) -> ImplicitReport:
    if ir.n < 1:
        return ImplicitReport(False, "decode", f"bad variable count {ir.n}")
    occurring = set()
    for c in ir.omega:
        occurring.update(abs(l) for l in c)
    if occurring and max(occurring) > ir.n:
        return ImplicitReport(
            False, "interface", f"omega uses variable {max(occurring)} > n"
        )
    if ir.iface.n != ir.n:
        return ImplicitReport(False, "interface", "interface variable count differs")
    rep = check_interface(ir.beta, ir.iface, extra_free_limit=ir.n)
    if not rep:
        return ImplicitReport(False, "interface", rep.reason)
    try:
        bundle = gen_C(ClauseSet(ir.n, ir.omega.clauses), ir.beta, ir.iface)
    except (CorrectnessError, CircuitError, EncodingError, FormulaError) as exc:
        return ImplicitReport(False, "generate", str(exc))
    if ir.alpha_premises is not None and ir.alpha_premises != len(bundle.clauses.clauses):
        return ImplicitReport(
            False,
            "proof",
            f"proof declares {ir.alpha_premises} premises, C has {len(bundle.clauses.clauses)}",
        )
    for step in ir.alpha.steps:
        lits = getattr(step, "literals", ())
        for lit in lits:
            if abs(lit) > bundle.clauses.n:
                return ImplicitReport(
                    False, "proof", f"weakening introduces variable {abs(lit)} outside C"
                )
    pr = check_proof(bundle.clauses, ir.alpha, EMPTY_CLAUSE, CheckOptions())
    if not pr:
        return ImplicitReport(False, "proof", f"step {pr.step}: {pr.reason}", bundle)
    return ImplicitReport(True, "proof", "", bundle)


def synthesize_alpha(
    omega: ClauseSet, beta: Circuit, iface: TreeInterface
) -> ResolutionProof:
    """Refute C(omega, beta) by branching the z variables in ascending
    order; each conflict found by propagation is resolved back to the
    branch literals, and the branches merge into the empty clause."""
    n = iface.n
    if n > 16:
        raise ImplicitError("synthesis capped at 16 branch variables")
    bundle = gen_C(ClauseSet(n, omega.clauses), beta, iface)
    up = UnitPropagation(bundle.clauses)
    b = ProofBuilder(bundle.clauses)

    def witness() -> tuple[int, ...]:
        return tuple(int(up.value.get(z, False)) for z in bundle.z_vars)

    def go(depth: int) -> int:
        if depth > n:
            raise SynthesisFailure(witness())
        z = bundle.z_vars[depth - 1]
        if z in up.value:
            return go(depth + 1)
        mark = up.mark()
        sides = []
        for lit in (-z, z):
            conflict = up.assume(lit)
            if conflict is not None:
                sides.append(up.analyze(conflict, b))
            else:
                sides.append(go(depth + 1))
            up.undo(mark)
        return b.resolve_opt(sides[0], sides[1], z)

    conflict = up.propagate()
    if conflict is not None:
        root = up.analyze(conflict, b)
    else:
        root = go(1)
    if b.clause(root) != EMPTY_CLAUSE:
        raise ImplicitError(f"synthesis reached {b.clause(root)}, not the empty clause")
    return b.extract(root)


def implicit_from_tree(omega: ClauseSet, tree: DecisionTree) -> ImplicitRefutation:
    """Balance the tree, compile it, and synthesize the certificate."""
    from .encoding import tree_to_circuit

    n = omega.n
    rep = check_decision_tree(omega, tree)
    if not rep:
        raise ImplicitError(f"bad decision tree: {rep.reason}")
    balanced = balance_tree(tree, tuple(range(1, n + 1)))
    beta, iface = tree_to_circuit(balanced, n)
    alpha = synthesize_alpha(omega, beta, iface)
    return ImplicitRefutation(n, omega, alpha, beta, iface)


def refute_implicit(omega: ClauseSet, max_nodes: Optional[int] = None):
    """Search for a refutation; returns (tuple, None) on unsat input,
    (None, model) on satisfiable input."""
    out = dpll_refute(omega, max_nodes=max_nodes)
    if out.model is not None:
        return None, out.model
    return implicit_from_tree(omega, out.tree), None


@dataclass(frozen=True)
class Manifest:
    n: int
    omega_path: str
    beta_path: str
    alpha_path: str


def serialize_manifest(m: Manifest) -> str:
    return (
        "implicit-refutation\n"
        f"n {m.n}\n"
        f"omega {m.omega_path}\n"
        f"beta {m.beta_path}\n"
        f"alpha {m.alpha_path}\n"
    )


def parse_manifest(text: str) -> Manifest:
    header = False
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header:
            if line != "implicit-refutation":
                raise ImplicitError("missing implicit-refutation header")
            header = True
            continue
        parts = line.split(None, 1)
        if len(parts) != 2 or parts[0] not in ("n", "omega", "beta", "alpha"):
            raise ImplicitError(f"malformed manifest line {line!r}")
        if parts[0] in fields:
            raise ImplicitError(f"duplicate manifest key {parts[0]}")
        fields[parts[0]] = parts[1].strip()
    if not header:
        raise ImplicitError("missing implicit-refutation header")
    missing = [k for k in ("n", "omega", "beta", "alpha") if k not in fields]
    if missing:
        raise ImplicitError(f"manifest missing keys {missing}")
    try:
        n = int(fields["n"])
    except ValueError:
        raise ImplicitError("manifest n is not an integer") from None
    return Manifest(n, fields["omega"], fields["beta"], fields["alpha"])


def load_implicit(manifest_path: str) -> ImplicitRefutation:
    with open(manifest_path, "r", encoding="utf-8") as fh:
        m = parse_manifest(fh.read())
    base = os.path.dirname(os.path.abspath(manifest_path))

    def read(rel: str) -> str:
        with open(os.path.join(base, rel), "r", encoding="utf-8") as fh:
            return fh.read()

    omega = parse_dimacs(read(m.omega_path))
    beta = parse_circuit(read(m.beta_path))
    alpha, declared = parse_proof(read(m.alpha_path))
    iface = interface_from_circuit(beta, m.n)
    return ImplicitRefutation(m.n, omega, alpha, beta, iface, alpha_premises=declared)


def save_implicit(
    ir: ImplicitRefutation, outdir: str, stem: str = "refutation"
) -> str:
    """Write omega/beta/alpha plus the manifest; returns manifest path."""
    os.makedirs(outdir, exist_ok=True)
    names = {
        "omega": f"{stem}.cnf",
        "beta": f"{stem}.circ",
        "alpha": f"{stem}.rproof",
    }
    with open(os.path.join(outdir, names["omega"]), "w", encoding="utf-8") as fh:
        fh.write(serialize_dimacs(ir.omega))
    with open(os.path.join(outdir, names["beta"]), "w", encoding="utf-8") as fh:
        fh.write(serialize_circuit(ir.beta))
    n_premises = ir.alpha_premises
    if n_premises is None:
        bundle = gen_C(ClauseSet(ir.n, ir.omega.clauses), ir.beta, ir.iface)
        n_premises = len(bundle.clauses.clauses)
    with open(os.path.join(outdir, names["alpha"]), "w", encoding="utf-8") as fh:
        fh.write(serialize_proof(ir.alpha, n_premises))
    mpath = os.path.join(outdir, f"{stem}.manifest")
    with open(mpath, "w", encoding="utf-8") as fh:
        fh.write(
            serialize_manifest(
                Manifest(ir.n, names["omega"], names["beta"], names["alpha"])
            )
        )
    return mpath
