"""Resolution proofs: step objects, checkers, and rewriting utilities.

A proof is a sequence of steps over a positional premise list.  Step
clauses are always recomputed by the checker, never trusted from the
input.  The resolution rule is liberal: the pivot must occur
positively in the left premise and negatively in the right premise,
the conclusion is the union of the remaining literals, and nothing
forbids the pivot from reappearing via the other side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

from .circuits import Circuit, circuit_clauses, validate_circuit
from .formulas import EMPTY_CLAUSE, Clause, ClauseSet, check_literal


class ProofError(ValueError):
    """Raised when an operation is handed an invalid proof."""


@dataclass(frozen=True)
class Axiom:
    index: int


@dataclass(frozen=True)
class Resolve:
    left: int
    right: int
    pivot: int


@dataclass(frozen=True)
class Weaken:
    source: int
    literals: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))


Step = Union[Axiom, Resolve, Weaken]


@dataclass(frozen=True)
class ResolutionProof:
    steps: tuple[Step, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class CheckOptions:
    tree_like: bool = False
    regular: bool = False
    forbid_weakening: bool = False
    weakening_leaves_only: bool = False


@dataclass(frozen=True)
class ProofReport:
    ok: bool
    step: int = -1
    reason: str = ""
    final: Optional[Clause] = None

    def __bool__(self) -> bool:
        return self.ok


class _StepFailure(Exception):
    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"step {index}: {reason}")


def resolve_clauses(left: Clause, right: Clause, pivot: int) -> Clause:
    if pivot not in left:
        raise ProofError(f"pivot {pivot} not positive in left clause")
    if -pivot not in right:
        raise ProofError(f"pivot {pivot} not negative in right clause")
    return Clause(
        tuple(l for l in left if l != pivot) + tuple(l for l in right if l != -pivot)
    )


def replay_steps(premises: ClauseSet, steps: Iterable[Step]) -> list[Clause]:
    """Recompute every step clause; raises _StepFailure on bad steps."""
    clauses: list[Clause] = []
    for idx, step in enumerate(steps):
        if isinstance(step, Axiom):
            if not 0 <= step.index < len(premises.clauses):
                raise _StepFailure(idx, f"axiom index {step.index} out of range")
            clauses.append(premises.clauses[step.index])
        elif isinstance(step, Resolve):
            if not (0 <= step.left < idx and 0 <= step.right < idx):
                raise _StepFailure(idx, "resolve references a later or missing step")
            left, right = clauses[step.left], clauses[step.right]
            if step.pivot < 1:
                raise _StepFailure(idx, f"bad pivot {step.pivot}")
            if step.pivot not in left:
                raise _StepFailure(idx, f"pivot {step.pivot} absent from left clause")
            if -step.pivot not in right:
                raise _StepFailure(idx, f"pivot {step.pivot} absent from right clause")
            clauses.append(resolve_clauses(left, right, step.pivot))
        elif isinstance(step, Weaken):
            if not 0 <= step.source < idx:
                raise _StepFailure(idx, "weaken references a later or missing step")
            for lit in step.literals:
                check_literal(lit)
            clauses.append(clauses[step.source].union(step.literals))
        else:
            raise _StepFailure(idx, f"unknown step kind {type(step).__name__}")
    return clauses


def check_proof(
    premises: ClauseSet,
    proof: ResolutionProof,
    target: Optional[Clause] = EMPTY_CLAUSE,
    opts: CheckOptions = CheckOptions(),
) -> ProofReport:
    """Validate a proof; ``target=None`` accepts any final clause."""
    if not proof.steps:
        return ProofReport(False, -1, "empty proof")
    try:
        clauses = replay_steps(premises, proof.steps)
    except _StepFailure as exc:
        return ProofReport(False, exc.index, exc.reason)
    last = len(proof.steps) - 1
    if target is not None and clauses[-1] != target:
        return ProofReport(False, last, f"final clause {clauses[-1]} != target {target}")
    if opts.forbid_weakening or opts.weakening_leaves_only:
        for idx, step in enumerate(proof.steps):
            if isinstance(step, Weaken):
                if opts.forbid_weakening:
                    return ProofReport(False, idx, "weakening forbidden")
                if not isinstance(proof.steps[step.source], Axiom):
                    return ProofReport(False, idx, "weakening of a non-axiom step")
    if opts.tree_like:
        refs = [0] * len(proof.steps)
        for step in proof.steps:
            if isinstance(step, Resolve):
                refs[step.left] += 1
                refs[step.right] += 1
            elif isinstance(step, Weaken):
                refs[step.source] += 1
        for idx in range(last):
            if refs[idx] != 1:
                return ProofReport(
                    False, idx, f"step referenced {refs[idx]} times, not tree-like"
                )
        if refs[last] != 0:
            return ProofReport(False, last, "final step is referenced")
    if opts.regular:
        used: list[frozenset[int]] = []
        for idx, step in enumerate(proof.steps):
            if isinstance(step, Axiom):
                used.append(frozenset())
            elif isinstance(step, Weaken):
                used.append(used[step.source])
            else:
                below = used[step.left] | used[step.right]
                if step.pivot in below:
                    return ProofReport(
                        False, idx, f"variable {step.pivot} resolved twice on a path"
                    )
                used.append(below | {step.pivot})
    return ProofReport(True, last, "", clauses[-1])


def proof_clauses(premises: ClauseSet, proof: ResolutionProof) -> list[Clause]:
    """Recomputed step clauses of a proof assumed structurally valid."""
    try:
        return replay_steps(premises, proof.steps)
    except _StepFailure as exc:
        raise ProofError(str(exc)) from None


@dataclass(frozen=True)
class ERProof:
    """Refutation over the premises plus an auxiliary extension circuit."""

    aux: Circuit
    proof: ResolutionProof


def er_premises(premises: ClauseSet, aux: Circuit) -> ClauseSet:
    extra = circuit_clauses(aux)
    n = max(premises.n, extra.n)
    return ClauseSet(n, premises.clauses + extra.clauses)


def check_er(premises: ClauseSet, ep: ERProof) -> ProofReport:
    report = validate_circuit(ep.aux)
    if not report:
        return ProofReport(False, -1, f"aux circuit invalid: {report.reason}")
    occurring = set()
    for c in premises:
        occurring.update(abs(l) for l in c)
    for v in ep.aux.free:
        if v not in occurring:
            return ProofReport(False, -1, f"aux free variable {v} not in premises")
    for v in ep.aux.extension_vars():
        if v in occurring:
            return ProofReport(False, -1, f"aux extension variable {v} occurs in premises")
    return check_proof(er_premises(premises, ep.aux), ep.proof, EMPTY_CLAUSE)


def rename_proof(
    proof: ResolutionProof,
    varmap: dict[int, int],
    premise_map: Optional[dict[int, int]] = None,
) -> ResolutionProof:
    """Map all variables (polarity kept) and remap axiom indices."""

    def mv(var: int) -> int:
        if var not in varmap:
            raise ProofError(f"variable {var} unmapped")
        return varmap[var]

    def ml(lit: int) -> int:
        v = mv(abs(lit))
        return v if lit > 0 else -v

    steps: list[Step] = []
    for step in proof.steps:
        if isinstance(step, Axiom):
            idx = step.index
            if premise_map is not None:
                if idx not in premise_map:
                    raise ProofError(f"premise index {idx} unmapped")
                idx = premise_map[idx]
            steps.append(Axiom(idx))
        elif isinstance(step, Resolve):
            steps.append(Resolve(step.left, step.right, mv(step.pivot)))
        else:
            steps.append(Weaken(step.source, tuple(ml(l) for l in step.literals)))
    return ResolutionProof(tuple(steps))


class ProofBuilder:
    """Incremental proof assembly with clause tracking.

    Axiom steps are cached by premise index, so repeated references
    share one step; use ``raw_axiom`` when building tree-like proofs.
    """

    def __init__(self, premises: ClauseSet):
        self.premises = premises
        self.steps: list[Step] = []
        self.clauses: list[Clause] = []
        self._axioms: dict[int, int] = {}

    def _push(self, step: Step, clause: Clause) -> int:
        self.steps.append(step)
        self.clauses.append(clause)
        return len(self.steps) - 1

    def clause(self, step_id: int) -> Clause:
        return self.clauses[step_id]

    def raw_axiom(self, index: int) -> int:
        return self._push(Axiom(index), self.premises.clauses[index])

    def axiom(self, index: int) -> int:
        if index not in self._axioms:
            self._axioms[index] = self.raw_axiom(index)
        return self._axioms[index]

    def resolve(self, left: int, right: int, pivot: int) -> int:
        clause = resolve_clauses(self.clauses[left], self.clauses[right], pivot)
        return self._push(Resolve(left, right, pivot), clause)

    def resolve_opt(self, left: int, right: int, pivot: int) -> int:
        """Resolve, or alias the side already missing the pivot."""
        if pivot not in self.clauses[left]:
            return left
        if -pivot not in self.clauses[right]:
            return right
        return self.resolve(left, right, pivot)

    def weaken(self, source: int, literals: Iterable[int]) -> int:
        lits = tuple(literals)
        clause = self.clauses[source].union(lits)
        return self._push(Weaken(source, lits), clause)

    def weaken_to(self, source: int, target: Clause) -> int:
        have = set(self.clauses[source].literals)
        missing = tuple(l for l in target if l not in have)
        if not missing:
            return source
        return self.weaken(source, missing)

    def import_proof(
        self,
        proof: ResolutionProof,
        axiom_map: Callable[[int], int],
        varmap: Optional[dict[int, int]] = None,
    ) -> int:
        """Append a translated copy of ``proof``.

        ``axiom_map`` sends each original premise index to an existing
        step id of this builder; validity is re-established by the
        clause recomputation of every appended step.
        """

        def ml(lit: int) -> int:
            if varmap is None:
                return lit
            v = varmap[abs(lit)]
            return v if lit > 0 else -v

        local: list[int] = []
        for step in proof.steps:
            if isinstance(step, Axiom):
                local.append(axiom_map(step.index))
            elif isinstance(step, Resolve):
                pivot = step.pivot if varmap is None else varmap[step.pivot]
                local.append(self.resolve(local[step.left], local[step.right], pivot))
            else:
                local.append(self.weaken(local[step.source], (ml(l) for l in step.literals)))
        if not local:
            raise ProofError("cannot import an empty proof")
        return local[-1]

    def extract(self, final: int) -> ResolutionProof:
        """Prune to the steps reachable from ``final`` and reindex."""
        needed = {final}
        for idx in range(final, -1, -1):
            if idx not in needed:
                continue
            step = self.steps[idx]
            if isinstance(step, Resolve):
                needed.add(step.left)
                needed.add(step.right)
            elif isinstance(step, Weaken):
                needed.add(step.source)
        order = sorted(needed)
        remap = {old: new for new, old in enumerate(order)}
        out: list[Step] = []
        for old in order:
            step = self.steps[old]
            if isinstance(step, Resolve):
                out.append(Resolve(remap[step.left], remap[step.right], step.pivot))
            elif isinstance(step, Weaken):
                out.append(Weaken(remap[step.source], step.literals))
            else:
                out.append(step)
        return ResolutionProof(tuple(out))


def strip_weakening(premises: ClauseSet, proof: ResolutionProof) -> ResolutionProof:
    """Prune a refutation down to a weakening-free one.

    Standard subset propagation: every rebuilt clause is a subset of
    the original step clause, so the final clause stays empty.
    """
    report = check_proof(premises, proof, EMPTY_CLAUSE)
    if not report:
        raise ProofError(f"invalid input proof: step {report.step}: {report.reason}")
    b = ProofBuilder(premises)
    new_id: list[int] = []
    for step in proof.steps:
        if isinstance(step, Axiom):
            new_id.append(b.raw_axiom(step.index))
        elif isinstance(step, Weaken):
            new_id.append(new_id[step.source])
        else:
            left, right = new_id[step.left], new_id[step.right]
            new_id.append(b.resolve_opt(left, right, step.pivot))
    final = new_id[-1]
    if b.clause(final) != EMPTY_CLAUSE:
        raise ProofError("stripping failed to preserve the empty clause")
    return b.extract(final)


def lift_unit_axiom(premises: ClauseSet, proof: ResolutionProof, unit: int) -> ResolutionProof:
    """Turn a refutation of premises + {unit} into a derivation of {-unit}.

    The unit clause is expected as the last premise, at index
    ``len(premises.clauses)``.  Weakening is stripped first; then every
    resolution against the unit axiom is replaced by an alias of its
    other premise, which adds the literal -unit to the clauses below.
    The result derives {-unit} or a subset of it from the premises
    alone, in at most as many steps as the input.
    """
    check_literal(unit)
    augmented = ClauseSet(
        max(premises.n, abs(unit)), premises.clauses + (Clause((unit,)),)
    )
    unit_index = len(premises.clauses)
    stripped = strip_weakening(augmented, proof)
    b = ProofBuilder(premises)
    sentinel = -1
    new_id: list[int] = []
    for step in stripped.steps:
        if isinstance(step, Axiom):
            new_id.append(sentinel if step.index == unit_index else b.raw_axiom(step.index))
        else:
            assert isinstance(step, Resolve)
            left, right = new_id[step.left], new_id[step.right]
            if left == sentinel:
                new_id.append(right)
            elif right == sentinel:
                new_id.append(left)
            else:
                new_id.append(b.resolve(left, right, step.pivot))
    final = new_id[-1]
    if final == sentinel:
        raise ProofError("refutation is the bare unit axiom; nothing to lift")
    if not set(b.clause(final).literals) <= {-unit}:
        raise ProofError("lift produced a clause outside {-unit}")
    return b.extract(final)


class UnitPropagation:
    """Counter-based unit propagation with reason logging and undo."""

    def __init__(self, premises: ClauseSet):
        self.premises = premises
        self.clauses = [list(c.literals) for c in premises.clauses]
        self.size = [len(lits) for lits in self.clauses]
        self.occur: dict[int, list[int]] = {}
        for idx, lits in enumerate(self.clauses):
            for lit in lits:
                self.occur.setdefault(lit, []).append(idx)
        self.value: dict[int, bool] = {}
        self.reason: dict[int, Optional[int]] = {}
        self.trail: list[int] = []
        self.n_false = [0] * len(self.clauses)
        self.n_sat = [0] * len(self.clauses)
        self.empty_conflict: Optional[int] = None
        self.pending: list[int] = []
        for idx, lits in enumerate(self.clauses):
            if not lits and self.empty_conflict is None:
                self.empty_conflict = idx
            elif len(lits) == 1:
                self.pending.append(idx)

    def lit_value(self, lit: int) -> Optional[bool]:
        v = self.value.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int):
        while len(self.trail) > mark:
            lit = self.trail.pop()
            del self.value[abs(lit)]
            del self.reason[abs(lit)]
            for idx in self.occur.get(lit, ()):
                self.n_sat[idx] -= 1
                if self.n_sat[idx] == 0 and self.size[idx] - self.n_false[idx] == 1:
                    self.pending.append(idx)
            for idx in self.occur.get(-lit, ()):
                self.n_false[idx] -= 1
                if self.n_sat[idx] == 0 and self.size[idx] - self.n_false[idx] == 1:
                    self.pending.append(idx)

    def _set(self, lit: int, reason: Optional[int]) -> Optional[int]:
        """Assign a literal true; returns a conflicting clause index."""
        self.value[abs(lit)] = lit > 0
        self.reason[abs(lit)] = reason
        self.trail.append(lit)
        for idx in self.occur.get(lit, ()):
            self.n_sat[idx] += 1
        conflict = None
        for idx in self.occur.get(-lit, ()):
            self.n_false[idx] += 1
            if self.n_sat[idx] == 0:
                remaining = self.size[idx] - self.n_false[idx]
                if remaining == 0 and conflict is None:
                    conflict = idx
                elif remaining == 1:
                    self.pending.append(idx)
        return conflict

    def _unit_literal(self, idx: int) -> Optional[int]:
        unassigned = None
        for lit in self.clauses[idx]:
            val = self.lit_value(lit)
            if val is True:
                return None
            if val is None:
                if unassigned is not None:
                    return None
                unassigned = lit
        return unassigned

    def propagate(self) -> Optional[int]:
        """Drain the unit queue; returns a conflicting clause index.

        Stale queue entries (from undone assignments or satisfied
        clauses) are revalidated on pop, so the queue survives undo.
        """
        if self.empty_conflict is not None:
            return self.empty_conflict
        while self.pending:
            idx = self.pending.pop()
            if self.n_sat[idx] > 0:
                continue
            lit = self._unit_literal(idx)
            if lit is None:
                continue
            conflict = self._set(lit, idx)
            if conflict is not None:
                return conflict
        return None

    def assume(self, lit: int) -> Optional[int]:
        """Push an assumption (variable must be unassigned), propagate."""
        if abs(lit) in self.value:
            raise ProofError(f"assumption on assigned variable {abs(lit)}")
        conflict = self._set(lit, None)
        if conflict is not None:
            return conflict
        return self.propagate()

    def analyze(self, conflict: int, builder: ProofBuilder) -> int:
        """Resolve the conflict back to assumption literals.

        Returns a builder step whose clause contains only literals
        falsified by assumptions (reason None).
        """
        cur = builder.axiom(conflict)
        for lit in reversed(self.trail):
            reason = self.reason[abs(lit)]
            if reason is None:
                continue
            if -lit not in builder.clause(cur):
                continue
            r = builder.axiom(reason)
            if lit > 0:
                cur = builder.resolve(r, cur, lit)
            else:
                cur = builder.resolve(cur, r, -lit)
        return cur


def rup_derive(
    premises: ClauseSet, target: Clause, exact: bool = True
) -> Optional[ResolutionProof]:
    """Derive ``target`` by logging a reverse-unit-propagation conflict.

    Returns None when propagation from the negated target reaches no
    conflict.  With ``exact`` the derivation is weakened to exactly the
    target when the conflict clause is a proper subset.
    """
    up = UnitPropagation(premises)
    conflict = up.propagate()
    forced = None
    if conflict is None:
        for lit in target:
            val = up.lit_value(lit)
            if val is True:
                # Propagation already forces a target literal; its
                # reason clause plays the role of the conflict.
                if up.reason.get(abs(lit)) is not None:
                    forced = up.reason[abs(lit)]
                    break
                continue
            if val is False:
                continue
            conflict = up.assume(-lit)
            if conflict is not None:
                break
    if conflict is None and forced is None:
        return None
    b = ProofBuilder(premises)
    step = up.analyze(conflict if conflict is not None else forced, b)
    if not set(b.clause(step).literals) <= set(target.literals):
        raise ProofError("conflict analysis escaped the target literals")
    if exact:
        step = b.weaken_to(step, target)
    return b.extract(step)


def serialize_proof(proof: ResolutionProof, n_premises: int) -> str:
    lines = [f"res-proof {n_premises}"]
    for step in proof.steps:
        if isinstance(step, Axiom):
            lines.append(f"a {step.index}")
        elif isinstance(step, Resolve):
            lines.append(f"r {step.left} {step.right} {step.pivot}")
        else:
            lines.append(
                "w " + str(step.source)
                + ("" if not step.literals else " " + " ".join(map(str, step.literals)))
                + " 0"
            )
    return "\n".join(lines) + "\n"


def parse_proof(text: str) -> tuple[ResolutionProof, int]:
    """Returns the proof and the declared premise count."""
    steps: list[Step] = []
    n_premises = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "res-proof":
            if n_premises is not None or len(parts) != 2:
                raise ProofError("malformed res-proof header")
            n_premises = int(parts[1])
            continue
        if n_premises is None:
            raise ProofError("step data before res-proof header")
        try:
            args = [int(t) for t in parts[1:]]
        except ValueError:
            raise ProofError(f"bad token in line {line!r}") from None
        if parts[0] == "a" and len(args) == 1:
            steps.append(Axiom(args[0]))
        elif parts[0] == "r" and len(args) == 3:
            steps.append(Resolve(args[0], args[1], args[2]))
        elif parts[0] == "w" and len(args) >= 2 and args[-1] == 0:
            steps.append(Weaken(args[0], tuple(args[1:-1])))
        else:
            raise ProofError(f"malformed step line {line!r}")
    if n_premises is None:
        raise ProofError("missing res-proof header")
    return ResolutionProof(tuple(steps)), n_premises


def serialize_er(ep: ERProof, n_premises: int) -> str:
    """Self-contained text form: header, auxiliary circuit, steps.
    The declared premise count includes the auxiliary gate clauses."""
    from .circuits import serialize_circuit

    return "er-proof\n" + serialize_circuit(ep.aux) + serialize_proof(ep.proof, n_premises)


def parse_er(text: str) -> tuple[ERProof, int]:
    """Returns the proof and the declared premise count."""
    from .circuits import parse_circuit

    lines = text.splitlines()
    header = None
    split = None
    for i, raw in enumerate(lines):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            if line != "er-proof":
                raise ProofError("missing er-proof header")
            header = i
            continue
        if line.split()[0] == "res-proof":
            split = i
            break
    if header is None:
        raise ProofError("missing er-proof header")
    if split is None:
        raise ProofError("missing res-proof section")
    aux = parse_circuit("\n".join(lines[header + 1 : split]))
    proof, n_premises = parse_proof("\n".join(lines[split:]))
    return ERProof(aux, proof), n_premises
