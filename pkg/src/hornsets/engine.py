"""Horn programs with at most one body atom: validation, satisfiability,
intersection, bound sets and a ground-model oracle.

A program is a list of clauses `p(t) <- q(t1)` or facts `p(t)` over a shared
signature, together with the generators of a global path congruence.  The
side conditions require every rule body to sit below its head in the
restricted deletion order, and (for intersection) every pair of rule bodies
to sit below the pair of heads, encoded with a reserved pair constructor.

`inh` decides whether a predicate is satisfiable by an instance of a goal
term; `intersect` extends a program with a conjunction predicate.  All
searches share a state budget; exceeding it raises ResourceExhaustedError
rather than returning a wrong answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .deletions import (
    DeletionMonitor,
    GlobalCongruence,
    ResourceExhaustedError,
    SearchBudget,
    leq_star,
    less_set,
)
from .paths import Path, paths_of
from .terms import (
    PAIR,
    App,
    Signature,
    SignatureError,
    Subst,
    Term,
    Var,
    apply,
    canonical,
    check_term,
    fresh_name,
    ground_with_least,
    lci,
    match,
    mgu,
    pair_term,
    rename_apart,
    render_term,
    term_depth,
    vars_of,
)


@dataclass(frozen=True)
class Clause:
    head_pred: str
    head: Term
    body: tuple[tuple[str, Term], ...] = ()

    def is_fact(self) -> bool:
        return not self.body


@dataclass(frozen=True)
class Goal:
    pred: str
    term: Term


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    clause: int | None = None
    severity: str = "error"

    def __str__(self) -> str:
        where = f" (clause {self.clause + 1})" if self.clause is not None else ""
        return f"{self.code}{where}: {self.message}"


class InvalidProgramError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


class IntersectionIncoherentError(Exception):
    """A clause pair unified heads but produced diverging body instances."""


@dataclass(frozen=True)
class HornProgram:
    signature: Signature
    clauses: tuple[Clause, ...]
    congruence: tuple[tuple[Path, Path], ...] = ()

    def clauses_of(self, pred: str) -> list[Clause]:
        return [c for c in self.clauses if c.head_pred == pred]

    def predicates(self) -> list[str]:
        out: list[str] = []
        for c in self.clauses:
            if c.head_pred not in out:
                out.append(c.head_pred)
            for bp, _ in c.body:
                if bp not in out:
                    out.append(bp)
        return out

    def with_clauses(self, extra: tuple[Clause, ...]) -> "HornProgram":
        return HornProgram(self.signature, self.clauses + extra, self.congruence)


def _rename_clause(clause: Clause, avoid: set[str]) -> tuple[Term, tuple[tuple[str, Term], ...]]:
    """A fresh-variable copy of the clause (head and body renamed together)."""
    if clause.body:
        combined = pair_term(clause.head, clause.body[0][1])
        renamed, _ = rename_apart(combined, avoid)
        assert isinstance(renamed, App)
        head, bterm = renamed.args
        return head, ((clause.body[0][0], bterm),)
    head, _ = rename_apart(clause.head, avoid)
    return head, ()


def _pair_generators(
    generators: tuple[tuple[Path, Path], ...],
) -> list[tuple[Path, Path]]:
    """Generators instantiated in both components of a pair term, plus the
    component link itself.

    The link pair encodes the self-pair obligation (the congruence of a head
    paired with itself is included in the global congruence); it forces
    deletion sequences on pairs to act identically on both components, which
    is what makes the emitted intersection clauses' body instances coincide.
    """
    out: list[tuple[Path, Path]] = [(((PAIR, 1),), ((PAIR, 2),))]
    for k in (1, 2):
        prefix: Path = ((PAIR, k),)
        for a, b in generators:
            out.append((prefix + a, prefix + b))
    return out


def _clause_universe(clause: Clause) -> frozenset[Path]:
    uni = paths_of(clause.head)
    for _, bterm in clause.body:
        uni |= paths_of(bterm)
    return uni


def validate_program(
    prog: HornProgram,
    *,
    budget: SearchBudget | None = None,
    include_pairs: bool = True,
) -> list[Diagnostic]:
    """All side-condition checks; each failure yields one diagnostic.

    Per-clause: terms well-formed, at most one body atom, body variables
    disjoint, head congruence inside the global congruence, body below head in
    the restricted order.  With include_pairs, additionally the sharpened pair
    condition for every pair of rule clauses (the precondition of the
    intersection construction).
    """
    budget = budget if budget is not None else SearchBudget()
    sig = prog.signature
    out: list[Diagnostic] = []

    for i, clause in enumerate(prog.clauses):
        try:
            check_term(sig, clause.head)
            for _, bterm in clause.body:
                check_term(sig, bterm)
        except SignatureError as exc:
            out.append(Diagnostic("arity", str(exc), clause=i))
            continue
        if len(clause.body) > 1:
            out.append(
                Diagnostic(
                    "body-count",
                    f"{len(clause.body)} body atoms; at most one is supported",
                    clause=i,
                )
            )
            seen_vars: set[str] = set()
            for _, bterm in clause.body:
                overlap = vars_of(bterm) & seen_vars
                if overlap:
                    out.append(
                        Diagnostic(
                            "body-vars",
                            f"body atoms share variables {sorted(overlap)}",
                            clause=i,
                        )
                    )
                seen_vars |= vars_of(bterm)
            continue

        gc = GlobalCongruence(prog.congruence, _clause_universe(clause), sig)
        if not gc.includes_term_congruence(clause.head):
            out.append(
                Diagnostic(
                    "head-cong",
                    f"congruence of head {render_term(clause.head)} is not included "
                    "in the global congruence",
                    clause=i,
                )
            )
            continue
        if clause.body:
            _, bterm = clause.body[0]
            before = budget.states
            witness = leq_star(bterm, clause.head, gc, sig, budget)
            if witness is None:
                out.append(
                    Diagnostic(
                        "body-order",
                        f"body {render_term(bterm)} is not below head "
                        f"{render_term(clause.head)} in the restricted order "
                        f"({budget.states - before} states searched)",
                        clause=i,
                    )
                )

    if include_pairs and not out:
        out.extend(_validate_pairs(prog, budget))
    return out


def _validate_pairs(prog: HornProgram, budget: SearchBudget) -> list[Diagnostic]:
    sig = prog.signature.with_pair()
    gens = _pair_generators(prog.congruence)
    out: list[Diagnostic] = []
    rules = [(i, c) for i, c in enumerate(prog.clauses) if c.body]
    for a in range(len(rules)):
        for b in range(a, len(rules)):
            i, ci = rules[a]
            j, cj = rules[b]
            h1, b1 = _rename_clause(ci, set())
            h2, b2 = _rename_clause(cj, vars_of(h1) | vars_of(b1[0][1]))
            head_pair = pair_term(h1, h2)
            body_pair = pair_term(b1[0][1], b2[0][1])
            universe = paths_of(head_pair) | paths_of(body_pair)
            gc = GlobalCongruence(gens, universe, sig)
            if not gc.includes_term_congruence(head_pair):
                out.append(
                    Diagnostic(
                        "pair-cong",
                        f"congruence of head pair for clauses {i + 1}, {j + 1} "
                        "is not included in the global congruence",
                        clause=i,
                    )
                )
                continue
            before = budget.states
            if leq_star(body_pair, head_pair, gc, sig, budget) is None:
                out.append(
                    Diagnostic(
                        "pair-order",
                        f"body pair of clauses {i + 1}, {j + 1} is not below the "
                        f"head pair in the restricted order "
                        f"({budget.states - before} states searched)",
                        clause=i,
                    )
                )
    return out


@dataclass
class BoundSet:
    """Closure of the clause heads and the query under `less` then `lci`;
    every exponent visited by the satisfiability search stays inside it."""

    terms: tuple[Term, ...]
    gc: GlobalCongruence
    _keys: frozenset[Term] = field(init=False)

    def __post_init__(self) -> None:
        self._keys = frozenset(canonical(t) for t in self.terms)

    def contains(self, t: Term) -> bool:
        return canonical(t) in self._keys


def bound_set(
    prog: HornProgram,
    query_term: Term,
    budget: SearchBudget | None = None,
) -> BoundSet:
    """lci-of-less closure of the clause heads plus the query term.

    Iterated with a growing congruence universe until both the term set and
    the universe are stable; also yields the global-congruence decision
    relation used by the engine run.
    """
    budget = budget if budget is not None else SearchBudget()
    sig = prog.signature
    current: dict[Term, Term] = {}
    for c in prog.clauses:
        current.setdefault(canonical(c.head), canonical(c.head))
    current.setdefault(canonical(query_term), canonical(query_term))

    gc = None
    for _ in range(20):
        universe: set[Path] = set()
        for t in current:
            universe |= paths_of(t)
        gc = GlobalCongruence(prog.congruence, universe, sig)

        smaller: dict[Term, Term] = {}
        for t in current.values():
            for low in less_set(t, gc, sig, budget):
                smaller.setdefault(canonical(low), canonical(low))

        closed = dict(smaller)
        worklist = list(closed.values())
        while worklist:
            t = worklist.pop()
            for other in list(closed.values()):
                joined = lci([t, other])
                if joined is None:
                    continue
                key = canonical(joined)
                if key not in closed:
                    closed[key] = key
                    worklist.append(key)

        if set(closed) == set(current):
            ordered = sorted(closed.values(), key=lambda t: (term_depth(t), render_term(t)))
            return BoundSet(tuple(ordered), gc)
        current = closed
    raise RuntimeError("bound set computation did not stabilise")


@dataclass(frozen=True)
class TraceStep:
    rule: int
    pred: str
    exponent: Term


@dataclass
class InhResult:
    satisfiable: bool
    witness: Term | None
    trace: tuple[TraceStep, ...]
    visited: tuple[tuple[str, Term], ...]
    bound: BoundSet
    monitor: DeletionMonitor


def inh(
    prog: HornProgram,
    goal: Goal,
    budget: SearchBudget | None = None,
) -> InhResult:
    """Satisfiability of the goal predicate by an instance of the goal term.

    Disjunction over the goal predicate's clauses with unifiable heads; a
    repeated (predicate, exponent) pair along a branch, up to renaming, makes
    the branch false; facts make it true.  On success a ground witness is
    assembled by composing the unifiers down the successful branch and
    instantiating residual variables with the least ground term.
    """
    budget = budget if budget is not None else SearchBudget()
    diags = validate_program(prog, budget=budget, include_pairs=False)
    if diags:
        raise InvalidProgramError(diags)
    sig = prog.signature
    check_term(sig, goal.term)

    bset = bound_set(prog, goal.term, budget)
    gc = bset.gc
    if not gc.includes_term_congruence(goal.term):
        raise InvalidProgramError(
            [
                Diagnostic(
                    "goal-cong",
                    f"congruence of goal term {render_term(goal.term)} is not "
                    "included in the global congruence",
                )
            ]
        )
    monitor = DeletionMonitor(gc)
    trace: list[TraceStep] = []
    visited: list[tuple[str, Term]] = []

    def check_monitor(term: Term) -> None:
        n = len(monitor.diagnostics)
        monitor.check(f"exponent {render_term(canonical(term))}", term)
        if len(monitor.diagnostics) > n:
            raise InvalidProgramError(
                [Diagnostic("monitor", m) for m in monitor.diagnostics[n:]]
            )

    def disjunction(
        pred: str, term: Term, occ: frozenset[tuple[str, Term]]
    ) -> tuple[bool, Term | None]:
        budget.tick()
        visited.append((pred, canonical(term)))
        check_monitor(term)
        for clause in prog.clauses_of(pred):
            head, body = _rename_clause(clause, vars_of(term))
            beta = mgu(term, head)
            if beta is None:
                continue
            exponent = apply(beta, head)
            trace.append(TraceStep(1, pred, canonical(exponent)))
            ok, wit = conjunct(pred, exponent, body, beta, occ)
            if ok:
                return True, wit
        return False, None

    def conjunct(
        pred: str,
        exponent: Term,
        body: tuple[tuple[str, Term], ...],
        beta: Subst,
        occ: frozenset[tuple[str, Term]],
    ) -> tuple[bool, Term | None]:
        budget.tick()
        key = (pred, canonical(exponent))
        visited.append(key)
        check_monitor(exponent)
        if key in occ:
            trace.append(TraceStep(2, pred, canonical(exponent)))
            return False, None
        if not body:
            trace.append(TraceStep(4, pred, canonical(exponent)))
            return True, ground_with_least(exponent, sig)
        bpred, bterm = body[0]
        bexp = apply(beta, bterm)
        trace.append(TraceStep(3, bpred, canonical(bexp)))
        ok, wit = disjunction(bpred, bexp, occ | {key})
        if not ok:
            return False, None
        if wit is None:
            return True, None
        delta = match(bexp, wit)
        if delta is None:
            return True, None
        return True, ground_with_least(apply(delta, exponent), sig)

    satisfiable, witness = disjunction(goal.pred, goal.term, frozenset())
    return InhResult(
        satisfiable=satisfiable,
        witness=witness,
        trace=tuple(trace),
        visited=tuple(visited),
        bound=bset,
        monitor=monitor,
    )


@dataclass
class IntersectResult:
    program: HornProgram
    root: str
    pair_names: dict[tuple[str, str], str]
    new_clauses: tuple[Clause, ...]


def intersect(
    prog: HornProgram,
    left: str,
    right: str,
    budget: SearchBudget | None = None,
) -> IntersectResult:
    """Extend the program with a predicate equivalent to left ∧ right.

    For every clause pair with unifiable heads, emits a clause whose head is
    the unified head; two rules pair their body predicates on the (shared)
    unified body instance, a fact contributes no body obligation of its own so
    the rule's body atom is kept on its original predicate.  Recursion over
    newly needed predicate pairs is memoised, so at most |preds|^2 new
    predicates arise.
    """
    budget = budget if budget is not None else SearchBudget()
    diags = validate_program(prog, budget=budget, include_pairs=True)
    if diags:
        raise InvalidProgramError(diags)

    taken = set(prog.predicates())
    names: dict[tuple[str, str], str] = {}
    queue: list[tuple[str, str]] = []

    def name_for(pair: tuple[str, str]) -> str:
        if pair not in names:
            base = pair[0] + pair[1]
            name = base if base not in taken else fresh_name(base, taken)
            names[pair] = name
            taken.add(name)
            queue.append(pair)
        return names[pair]

    root = name_for((left, right))
    new_clauses: list[Clause] = []
    processed: set[tuple[str, str]] = set()

    while queue:
        pair = queue.pop(0)
        if pair in processed:
            continue
        processed.add(pair)
        pred_name = names[pair]
        emitted: set[tuple[str | None, Term]] = set()
        for ci in prog.clauses_of(pair[0]):
            for cj in prog.clauses_of(pair[1]):
                h1, b1 = _rename_clause(ci, set())
                avoid = vars_of(h1) | (vars_of(b1[0][1]) if b1 else set())
                h2, b2 = _rename_clause(cj, avoid)
                beta = mgu(h1, h2)
                if beta is None:
                    continue
                head = apply(beta, h1)
                if not b1 and not b2:
                    body: tuple[tuple[str, Term], ...] = ()
                elif b1 and not b2:
                    body = ((b1[0][0], apply(beta, b1[0][1])),)
                elif b2 and not b1:
                    body = ((b2[0][0], apply(beta, b2[0][1])),)
                else:
                    u1 = apply(beta, b1[0][1])
                    u2 = apply(beta, b2[0][1])
                    if canonical(pair_term(head, u1)) != canonical(pair_term(head, u2)):
                        raise IntersectionIncoherentError(
                            f"clauses {render_term(ci.head)} and {render_term(cj.head)} "
                            f"unify but their body instances diverge "
                            f"({render_term(u1)} vs {render_term(u2)})"
                        )
                    body = ((name_for((b1[0][0], b2[0][0])), u1),)
                # canonical variable names keep the emitted program stable
                if body:
                    renamed = canonical(pair_term(head, body[0][1]))
                    assert isinstance(renamed, App)
                    head, body = renamed.args[0], ((body[0][0], renamed.args[1]),)
                else:
                    head = canonical(head)
                key = (
                    body[0][0] if body else None,
                    canonical(pair_term(head, body[0][1] if body else head)),
                )
                if key in emitted:
                    continue
                emitted.add(key)
                new_clauses.append(Clause(pred_name, head, body))

    extended = prog.with_clauses(tuple(new_clauses))
    return IntersectResult(
        program=extended,
        root=root,
        pair_names=dict(names),
        new_clauses=tuple(new_clauses),
    )


def _ground_pool(sig: Signature, cap: int):
    pool: dict[int, list[Term]] = {}

    def up_to(d: int) -> list[Term]:
        if d <= 0:
            return []
        if d in pool:
            return pool[d]
        smaller = up_to(d - 1)
        out: list[Term] = [App(name) for name in sig.nullary()]
        seen = set(out)
        for name in sig.names():
            n = sig.arity(name)
            if n == 0:
                continue
            for args in itertools.product(smaller, repeat=n):
                t = App(name, args)
                if t not in seen:
                    seen.add(t)
                    out.append(t)
                    if len(out) > cap:
                        raise ResourceExhaustedError(
                            f"ground universe exceeds {cap} terms at depth {d}"
                        )
        pool[d] = out
        return out

    return up_to


def _var_budgets(t: Term, depth: int) -> dict[str, int] | None:
    """Depth budget per variable; None when the skeleton is already too deep."""
    budgets: dict[str, int] = {}

    def walk(u: Term, used: int) -> bool:
        if isinstance(u, Var):
            budgets[u.name] = min(budgets.get(u.name, depth), depth - used)
            return True
        if not u.args:
            return used + 1 <= depth
        return all(walk(a, used + 1) for a in u.args)

    if not walk(t, 0):
        return None
    return budgets


def enumerate_extension(
    prog: HornProgram,
    pred: str,
    depth: int,
    *,
    instance_cap: int = 500_000,
) -> frozenset[Term]:
    """Ground terms of constructor depth <= depth in the least model,
    computed by iterating the immediate-consequence step over the
    depth-bounded ground universe to a fixpoint."""
    sig = prog.signature
    if not sig.nullary():
        raise SignatureError("ground enumeration needs a nullary constructor")
    if depth < 1:
        return frozenset()
    up_to = _ground_pool(sig, instance_cap)

    ext: dict[str, set[Term]] = {}

    def instances(head: Term, fixed: Subst) -> list[Term]:
        residual_budgets = _var_budgets(head, depth)
        if residual_budgets is None:
            return []
        names = [v for v in sorted(residual_budgets) if v not in fixed]
        pools = []
        total = 1
        for v in names:
            p = up_to(residual_budgets[v])
            if not p:
                return []
            total *= len(p)
            if total > instance_cap:
                raise ResourceExhaustedError(
                    f"more than {instance_cap} ground instances for "
                    f"{render_term(head)} at depth {depth}"
                )
            pools.append(p)
        out = []
        for combo in itertools.product(*pools):
            subst = dict(fixed)
            subst.update(zip(names, combo))
            inst = apply(subst, head)
            if term_depth(inst) <= depth:
                out.append(inst)
        return out

    # semi-naive: facts once, then rules applied to newly derived terms only
    delta: dict[str, set[Term]] = {}
    for clause in prog.clauses:
        if clause.is_fact():
            target = ext.setdefault(clause.head_pred, set())
            fresh = {inst for inst in instances(clause.head, {}) if inst not in target}
            target |= fresh
            delta.setdefault(clause.head_pred, set()).update(fresh)
    rules = [c for c in prog.clauses if c.body]
    while delta:
        nxt: dict[str, set[Term]] = {}
        for clause in rules:
            bpred, bterm = clause.body[0]
            target = ext.setdefault(clause.head_pred, set())
            for g in delta.get(bpred, ()):
                sigma = match(bterm, g)
                if sigma is None:
                    continue
                for inst in instances(clause.head, sigma):
                    if inst not in target:
                        target.add(inst)
                        nxt.setdefault(clause.head_pred, set()).add(inst)
        delta = nxt
    return frozenset(ext.get(pred, ()))
