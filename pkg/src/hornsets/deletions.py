"""Deletions in paths and the term orders they induce.

A deletion q <- q.q' contracts the segment between q and q.q': the subterm at
q is replaced by its own subterm at q.q'.  Sequences of deletions, applied
left to right, induce the order `leq_plain` (obtainable by a deletion sequence
compatible with the term's own congruence) and its restriction `leq_star`
(sequences compatible with a global congruence), both well-founded
sub-relations of homeomorphic embedding.

The global congruence is finitely generated and decided by saturation over an
explicit finite prefix-closed universe; queries outside the universe raise
OutOfUniverseError so callers know to enlarge it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .paths import (
    Congruence,
    EPSILON,
    OutOfUniverseError,
    Path,
    ReprViolation,
    format_path,
    is_marker,
    is_prefix,
    path_key,
    paths_of,
    repr_of,
    saturate,
    subterm_at,
    validate_repr,
)
from .terms import App, Signature, Term, Var, canonical, fresh_name, render_term, vars_of

DEFAULT_MAX_STATES = 200_000


class IncompatibleDeletionError(ValueError):
    """The deletion sequence splits a congruence class of the path set."""


class InvalidDeletionResultError(ValueError):
    """The contracted path set is not a term representation."""

    def __init__(self, violations: list[ReprViolation]):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = violations


class ResourceExhaustedError(RuntimeError):
    """A search exceeded its configured state cap (not a decision)."""


@dataclass
class SearchBudget:
    """Shared state counter for the deletion searches."""

    max_states: int = DEFAULT_MAX_STATES
    states: int = 0

    def tick(self) -> None:
        self.states += 1
        if self.states > self.max_states:
            raise ResourceExhaustedError(
                f"search exceeded {self.max_states} states"
            )


@dataclass(frozen=True)
class Deletion:
    """A pair of paths q <- q.q' with a non-empty deleted segment."""

    anchor: Path
    target: Path

    def __post_init__(self) -> None:
        if self.target == self.anchor or not is_prefix(self.anchor, self.target):
            raise ValueError("deletion target must properly extend the anchor")

    @property
    def segment(self) -> Path:
        return self.target[len(self.anchor) :]

    def __str__(self) -> str:
        return f"{format_path(self.anchor)} <- {format_path(self.target)}"


DeletionSeq = tuple[Deletion, ...]


def format_deletion_seq(seq: DeletionSeq) -> str:
    return ", ".join(str(d) for d in seq)


def del_path(d: Deletion, p: Path) -> Path | None:
    """Apply a single deletion to a single path (at most one result).

    Keeps p when q is no prefix of it, drops it when it lies strictly inside
    the deleted segment, and reattaches q.q'.r as q.r.
    """
    if not is_prefix(d.anchor, p):
        return p
    if not is_prefix(d.target, p):
        return None
    return d.anchor + p[len(d.target) :]


def del_seq(seq: DeletionSeq, paths: Iterable[Path]) -> tuple[frozenset[Path], dict[Path, Path]]:
    """Apply a deletion sequence left to right.

    Returns the contracted path set and the origin map sending each surviving
    path back to the path of the input set it came from.  The origin map is
    injective; a collision would mean two distinct paths contracted onto one,
    which the deletion rules exclude.
    """
    origin = {p: p for p in paths}
    for d in seq:
        nxt: dict[Path, Path] = {}
        for cur, orig in origin.items():
            res = del_path(d, cur)
            if res is None:
                continue
            if res in nxt:
                raise RuntimeError(
                    f"deletion {d} maps two paths onto {format_path(res)}"
                )
            nxt[res] = orig
        origin = nxt
    return frozenset(origin), origin


def seq_compatible(seq: DeletionSeq, eq: Congruence, paths: Iterable[Path]) -> bool:
    """Survival under the whole sequence must be constant on every class."""
    paths = frozenset(paths)
    _, origin = del_seq(seq, paths)
    survived = set(origin.values())
    seen: set[Path] = set()
    for p in paths:
        if p in seen:
            continue
        cls = [q for q in eq.class_of(p) if q in paths]
        seen.update(cls)
        alive = sum(1 for q in cls if q in survived)
        if alive not in (0, len(cls)):
            return False
    return True


def del_cong(seq: DeletionSeq, eq: Congruence, paths: Iterable[Path], sig: Signature) -> Congruence:
    """Transport the congruence along the origin map, then re-close it."""
    paths = frozenset(paths)
    if not seq_compatible(seq, eq, paths):
        raise IncompatibleDeletionError(
            f"sequence {format_deletion_seq(seq)} splits a congruence class"
        )
    contracted, origin = del_seq(seq, paths)
    fwd = {orig: cur for cur, orig in origin.items()}
    pairs: list[tuple[Path, Path]] = []
    seen: set[Path] = set()
    for p in paths:
        if p in seen:
            continue
        cls = [q for q in eq.class_of(p) if q in paths]
        seen.update(cls)
        mapped = sorted((fwd[q] for q in cls if q in fwd), key=path_key)
        for other in mapped[1:]:
            pairs.append((mapped[0], other))
    return saturate(Congruence(contracted, pairs), sig)


def del_term(seq: DeletionSeq, t: Term, sig: Signature) -> Term:
    """The unique term whose representation is the contracted one.

    Variable endpoints keep the variable of their origin position; endpoints
    whose origin carries no variable (e.g. a deleted constant) get fresh
    variables.  Raises IncompatibleDeletionError when the sequence is not
    compatible with the term's congruence and InvalidDeletionResultError when
    the contracted path set is not a term representation (which happens when a
    deletion's segment path does not occur in the term).
    """
    r = repr_of(t)
    if not seq_compatible(seq, r.cong, r.paths):
        raise IncompatibleDeletionError(
            f"sequence {format_deletion_seq(seq)} is incompatible with the term"
        )
    contracted, origin = del_seq(seq, r.paths)
    eq2 = del_cong(seq, r.cong, r.paths, sig)
    violations = validate_repr(contracted, eq2, sig)
    if violations:
        raise InvalidDeletionResultError(violations)

    cont: dict[Path, set[tuple[str, int | None]]] = {p: set() for p in contracted}
    for p in contracted:
        if p:
            cont[p[:-1]].add(p[-1])

    taken = set(vars_of(t))
    names: dict[Path, str] = {}

    def endpoint_name(p: Path) -> str:
        cls = sorted(eq2.class_of(p), key=path_key)
        rep = cls[0]
        if rep in names:
            return names[rep]
        name: str | None = None
        for member in cls:
            o = origin.get(member)
            if o is None or is_marker(o):
                continue
            sub = subterm_at(t, o)
            if isinstance(sub, Var):
                name = sub.name
                break
        if name is None:
            name = fresh_name("F", taken)
            taken.add(name)
        names[rep] = name
        return name

    def build(at: Path) -> Term:
        steps = cont[at]
        if not steps:
            return Var(endpoint_name(at))
        ctor = next(iter(steps))[0]
        if sig.arity(ctor) == 0:
            return App(ctor)
        return App(
            ctor,
            tuple(build(at + ((ctor, i),)) for i in range(1, sig.arity(ctor) + 1)),
        )

    return build(EPSILON)


class GlobalCongruence:
    """Finitely generated congruence on paths, saturated over a finite universe.

    Saturation closes the generators under reflexivity, symmetry, transitivity,
    suffix extension within the universe and the maximality step.
    """

    def __init__(
        self,
        generators: Iterable[tuple[Path, Path]],
        universe: Iterable[Path],
        sig: Signature,
    ):
        self.generators: tuple[tuple[Path, Path], ...] = tuple(generators)
        uni = set(universe)
        for a, b in self.generators:
            uni.update(_sibl_pref_closure(a, sig))
            uni.update(_sibl_pref_closure(b, sig))
        uni.add(EPSILON)
        self.universe: frozenset[Path] = frozenset(uni)
        self.sig = sig
        # marker-equivalence reading of the maximality step: on this mixed
        # universe, marker presence only means *some* term has the constant
        self.relation: Congruence = saturate(
            Congruence(self.universe, self.generators), sig, nullary_presence=False
        )

    def member(self, p1: Path, p2: Path) -> bool:
        """Is (p1, p2) in the saturated relation?  Raises OutOfUniverseError
        for paths outside the decision universe."""
        for p in (p1, p2):
            if p not in self.universe:
                raise OutOfUniverseError(p)
        return self.relation.same(p1, p2)

    def restricted(self, paths: Iterable[Path]) -> Congruence:
        """The relation restricted to the given paths (which must be in the
        universe)."""
        paths = frozenset(paths)
        for p in paths:
            if p not in self.universe:
                raise OutOfUniverseError(p)
        pairs = [
            (a, b)
            for a, b in self.relation.nontrivial_pairs()
            if a in paths and b in paths
        ]
        # transitive chains may run through dropped paths; regroup per class
        regrouped: list[tuple[Path, Path]] = []
        seen: set[Path] = set()
        for p in paths:
            if p in seen:
                continue
            cls = sorted((q for q in self.relation.class_of(p) if q in paths), key=path_key)
            seen.update(cls)
            for other in cls[1:]:
                regrouped.append((cls[0], other))
        return Congruence(paths, regrouped)

    def includes_term_congruence(self, t: Term) -> bool:
        """(eq_t) subset of this relation; paths of t must be in the universe."""
        r = repr_of(t)
        for p in r.paths:
            if p not in self.universe:
                raise OutOfUniverseError(p)
        return all(self.relation.same(a, b) for a, b in r.cong.nontrivial_pairs())


def _sibl_pref_closure(p: Path, sig: Signature) -> set[Path]:
    out: set[Path] = {EPSILON}
    for k in range(1, len(p) + 1):
        prefix = p[:k]
        out.add(prefix)
        ctor, idx = prefix[-1]
        if idx is not None:
            for j in range(1, sig.arity(ctor) + 1):
                out.add(prefix[:-1] + ((ctor, j),))
    return out


def cong_member(gc: GlobalCongruence, p1: Path, p2: Path) -> bool:
    return gc.member(p1, p2)


_State = tuple[frozenset[Path], dict[Path, Path], DeletionSeq]


def _contractions(t: Term, budget: SearchBudget) -> Iterator[_State]:
    """Breadth-first enumeration of all contracted path sets reachable by
    deletion sequences whose paths lie in the current set.

    States are deduplicated on (path set, origin map); every single deletion
    strictly shrinks the path set, so the search is finite.
    """
    start_paths = paths_of(t)
    start: _State = (start_paths, {p: p for p in start_paths}, ())
    frontier = [start]
    seen = {(start_paths, frozenset(start[1].items()))}
    while frontier:
        nxt: list[_State] = []
        for state in frontier:
            budget.tick()
            yield state
            P, origin, seq = state
            ordered = sorted(P, key=path_key)
            for i, q in enumerate(ordered):
                if is_marker(q):
                    continue
                for target in ordered:
                    if target == q or not is_prefix(q, target):
                        continue
                    d = Deletion(q, target)
                    new_origin: dict[Path, Path] = {}
                    for cur, orig in origin.items():
                        res = del_path(d, cur)
                        if res is None:
                            continue
                        if res in new_origin:
                            raise RuntimeError(
                                f"deletion {d} maps two paths onto {format_path(res)}"
                            )
                        new_origin[res] = orig
                    new_paths = frozenset(new_origin)
                    assert len(new_paths) < len(P), "deletion must shrink the path set"
                    key = (new_paths, frozenset(new_origin.items()))
                    if key in seen:
                        continue
                    seen.add(key)
                    nxt.append((new_paths, new_origin, seq + (d,)))
        frontier = nxt


def _survived(origin: dict[Path, Path]) -> frozenset[Path]:
    return frozenset(origin.values())


def _class_view(eq: Congruence, paths: frozenset[Path]) -> list[frozenset[Path]]:
    seen: set[Path] = set()
    out = []
    for p in sorted(paths, key=path_key):
        if p in seen:
            continue
        cls = frozenset(q for q in eq.class_of(p) if q in paths)
        seen.update(cls)
        out.append(cls)
    return out


def _compatible_survival(classes: list[frozenset[Path]], survived: frozenset[Path]) -> bool:
    for cls in classes:
        alive = len(cls & survived)
        if alive not in (0, len(cls)):
            return False
    return True


def leq_star(
    smaller: Term,
    larger: Term,
    gc: GlobalCongruence,
    sig: Signature,
    budget: SearchBudget | None = None,
) -> DeletionSeq | None:
    """Witness sequence for `smaller` below `larger` in the restricted order.

    Requires the larger term's congruence to be included in the global one;
    searches exhaustively over contracted path sets, checking whole-sequence
    compatibility with the global congruence via the origin map, and compares
    results up to renaming.  None is a normal no-witness result.
    """
    if not gc.includes_term_congruence(larger):
        return None
    return _search_witness(smaller, larger, gc.restricted(paths_of(larger)), sig, budget)


def leq_plain(
    smaller: Term,
    larger: Term,
    sig: Signature,
    budget: SearchBudget | None = None,
) -> DeletionSeq | None:
    """Witness for the unrestricted deletion order (compatibility with the
    larger term's own congruence only)."""
    return _search_witness(smaller, larger, repr_of(larger).cong, sig, budget)


def _search_witness(
    smaller: Term,
    larger: Term,
    eq: Congruence,
    sig: Signature,
    budget: SearchBudget | None,
) -> DeletionSeq | None:
    budget = budget if budget is not None else SearchBudget()
    target = paths_of(smaller)
    big = paths_of(larger)
    if len(target) > len(big):
        return None
    classes = _class_view(eq, big)
    for P, origin, seq in _contractions(larger, budget):
        if P != target:
            continue
        if not _compatible_survival(classes, _survived(origin)):
            continue
        try:
            result = del_term(seq, larger, sig)
        except InvalidDeletionResultError:
            continue
        if canonical(result) == canonical(smaller):
            return seq
    return None


def less_set(
    t: Term,
    gc: GlobalCongruence,
    sig: Signature,
    budget: SearchBudget | None = None,
) -> list[Term]:
    """All terms below t in the restricted order, up to renaming.

    Empty when the term's own congruence escapes the global one (then nothing,
    not even t itself, is below t).
    """
    if not gc.includes_term_congruence(t):
        return []
    return _less(t, gc.restricted(paths_of(t)), sig, budget)


def less_plain(
    t: Term,
    sig: Signature,
    budget: SearchBudget | None = None,
) -> list[Term]:
    """All terms below t in the unrestricted deletion order, up to renaming."""
    return _less(t, repr_of(t).cong, sig, budget)


def _less(
    t: Term,
    eq: Congruence,
    sig: Signature,
    budget: SearchBudget | None,
) -> list[Term]:
    budget = budget if budget is not None else SearchBudget()
    big = paths_of(t)
    classes = _class_view(eq, big)
    out: dict[Term, Term] = {}
    for P, origin, seq in _contractions(t, budget):
        if not _compatible_survival(classes, _survived(origin)):
            continue
        try:
            result = del_term(seq, t, sig)
        except InvalidDeletionResultError:
            continue
        out.setdefault(canonical(result), result)
    return list(out.values())


@dataclass
class DeletionMonitor:
    """Dynamic check for the closure of the global congruence under consistent
    deletions: every contraction performed during an engine run must keep its
    congruence inside the global one."""

    gc: GlobalCongruence
    diagnostics: list[str] = field(default_factory=list)

    def check(self, label: str, term: Term) -> None:
        try:
            ok = self.gc.includes_term_congruence(term)
        except OutOfUniverseError as exc:
            self.diagnostics.append(f"{label}: {exc}")
            return
        if not ok:
            self.diagnostics.append(
                f"{label}: congruence of contracted term escapes the global congruence"
            )


def check_global(
    gc: GlobalCongruence,
    terms: Iterable[Term],
    sig: Signature,
) -> tuple[list[str], DeletionMonitor]:
    """Static obligations of a global congruence, plus the runtime monitor.

    Verifies that each term's congruence is included in the global one and that
    the relation is closed under the maximality step on its universe; closure
    under consistent deletions is not decidable statically, so the returned
    monitor re-checks every engine-run contraction.
    """
    diagnostics: list[str] = []
    for t in terms:
        try:
            if not gc.includes_term_congruence(t):
                diagnostics.append(
                    f"congruence of {canonical_label(t)} is not included in the global congruence"
                )
        except OutOfUniverseError as exc:
            diagnostics.append(str(exc))
    if saturate(gc.relation, sig, nullary_presence=False) != gc.relation:
        diagnostics.append("global congruence is not closed under the maximality step")
    return diagnostics, DeletionMonitor(gc)


def canonical_label(t: Term) -> str:
    return render_term(canonical(t))
