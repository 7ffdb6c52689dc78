"""Terms as marked path sets with congruence relations.

A path is a sequence of steps from the root: (constructor, argument index)
for constructors of arity >= 1, or a final (constructor, None) marker step for
a nullary constructor.  The pair (path set, congruence of positions carrying
equal subterms) determines a term up to renaming; this module provides the
translation in both directions, the validity conditions for such pairs, the
closure operators they need, and the path-level least-common-instance and
instance checks.

Every congruence here is an equivalence relation on an explicit finite
universe of paths.  Suffix stability (p1 ~ p2 implies p1.r ~ p2.r) is
materialised within the universe; queries about suffix extensions beyond the
universe go through `Congruence.hull_same`, which answers from the stored
pairs of the longest matching prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .terms import App, Signature, Term, Var

Step = tuple[str, int | None]
Path = tuple[Step, ...]

EPSILON: Path = ()

# Safety valve for closure loops on pathological inputs (a congruence relating
# a path to its own extension makes the closed path set infinite).
_CLOSURE_CAP = 20_000


class UndefinedPathError(ValueError):
    """subterm_at was asked for a path outside the term (or a marker path)."""


class OutOfUniverseError(KeyError):
    """A congruence was queried on a path outside its universe."""

    def __init__(self, path: Path):
        super().__init__(path)
        self.path = path

    def __str__(self) -> str:
        return f"path {format_path(self.path)} is outside the congruence universe"


class PathClosureDiverged(RuntimeError):
    """Closing a path set under a congruence did not reach a fixpoint."""


class InvalidReprError(ValueError):
    """A (path set, congruence) pair is not a term representation."""

    def __init__(self, violations: list["ReprViolation"]):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = violations


def step_key(step: Step) -> tuple[str, int]:
    ctor, idx = step
    return (ctor, -1 if idx is None else idx)


def path_key(p: Path) -> tuple[int, tuple[tuple[str, int], ...]]:
    """Length-lexicographic sort key."""
    return (len(p), tuple(step_key(s) for s in p))


def is_marker(p: Path) -> bool:
    return bool(p) and p[-1][1] is None


def is_prefix(p: Path, q: Path) -> bool:
    return len(p) <= len(q) and q[: len(p)] == p


def format_path(p: Path) -> str:
    """Dot-separated literal syntax: `:.1.s.1`, markers bare (`:.2.0`), `eps`."""
    if not p:
        return "eps"
    parts: list[str] = []
    for ctor, idx in p:
        parts.append(ctor)
        if idx is not None:
            parts.append(str(idx))
    return ".".join(parts)


def paths_of(t: Term) -> frozenset[Path]:
    """The inductively defined path set; contains eps, prefix- and sibling-closed."""
    out: set[Path] = {EPSILON}

    def walk(u: Term, at: Path) -> None:
        if isinstance(u, Var):
            return
        if not u.args:
            out.add(at + ((u.ctor, None),))
            return
        for i, a in enumerate(u.args, 1):
            child = at + ((u.ctor, i),)
            out.add(child)
            walk(a, child)

    walk(t, EPSILON)
    return frozenset(out)


def subterm_at(t: Term, p: Path) -> Term:
    """The subterm reached by descending along p (undefined on marker paths)."""
    u = t
    for ctor, idx in p:
        if idx is None:
            raise UndefinedPathError(f"marker path {format_path(p)} has no subterm")
        if not isinstance(u, App) or u.ctor != ctor or idx > len(u.args):
            raise UndefinedPathError(f"{format_path(p)} is not a path of the term")
        u = u.args[idx - 1]
    return u


class Congruence:
    """Equivalence classes over a finite path universe (union-find based).

    Instances are treated as immutable after construction; derived relations
    are built with `merged` / `with_universe`.
    """

    __slots__ = ("universe", "_parent")

    def __init__(self, universe: Iterable[Path], pairs: Iterable[tuple[Path, Path]] = ()):
        self.universe: frozenset[Path] = frozenset(universe)
        self._parent: dict[Path, Path] = {p: p for p in self.universe}
        for a, b in pairs:
            self._union(a, b)

    def _find(self, p: Path) -> Path:
        parent = self._parent
        if p not in parent:
            raise OutOfUniverseError(p)
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    def _union(self, a: Path, b: Path) -> bool:
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return False
        # deterministic representative: smallest path of the merged class
        if path_key(rb) < path_key(ra):
            ra, rb = rb, ra
        self._parent[rb] = ra
        return True

    def same(self, a: Path, b: Path) -> bool:
        return self._find(a) == self._find(b)

    def class_of(self, p: Path) -> frozenset[Path]:
        rep = self._find(p)
        return frozenset(q for q in self.universe if self._find(q) == rep)

    def classes(self) -> list[tuple[Path, ...]]:
        by_rep: dict[Path, list[Path]] = {}
        for p in self.universe:
            by_rep.setdefault(self._find(p), []).append(p)
        out = [tuple(sorted(ps, key=path_key)) for ps in by_rep.values()]
        out.sort(key=lambda c: path_key(c[0]))
        return out

    def nontrivial_classes(self) -> list[tuple[Path, ...]]:
        return [c for c in self.classes() if len(c) > 1]

    def nontrivial_pairs(self) -> list[tuple[Path, Path]]:
        """A spanning set of pairs: (smallest member, other) per class."""
        out = []
        for cls in self.nontrivial_classes():
            for other in cls[1:]:
                out.append((cls[0], other))
        return out

    def is_identity(self) -> bool:
        return not self.nontrivial_classes()

    def merged(self, pairs: Iterable[tuple[Path, Path]]) -> "Congruence":
        return Congruence(self.universe, self.nontrivial_pairs() + list(pairs))

    def with_universe(self, universe: Iterable[Path]) -> "Congruence":
        """Extend/restrict the universe; pairs with both endpoints kept survive."""
        universe = frozenset(universe)
        pairs = [
            (a, b) for a, b in self.nontrivial_pairs() if a in universe and b in universe
        ]
        return Congruence(universe, pairs)

    def hull_same(self, a: Path, b: Path) -> bool:
        """Membership in the suffix-stable hull (a, b may extend universe members)."""
        if a == b:
            return True
        if a in self.universe and b in self.universe and self.same(a, b):
            return True
        for s in range(1, min(len(a), len(b)) + 1):
            if a[len(a) - s :] != b[len(b) - s :]:
                break
            pa, pb = a[: len(a) - s], b[: len(b) - s]
            if pa in self.universe and pb in self.universe and self.same(pa, pb):
                return True
        return False

    def includes(self, other: "Congruence") -> bool:
        """Every pair of `other` holds here (up to suffix hull)."""
        return all(self.hull_same(a, b) for a, b in other.nontrivial_pairs())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Congruence):
            return NotImplemented
        return self.universe == other.universe and self.classes() == other.classes()

    def __hash__(self):  # pragma: no cover - congruences are not dict keys
        return hash(self.universe)

    def __repr__(self) -> str:
        classes = ", ".join(
            "{" + ", ".join(format_path(p) for p in c) + "}" for c in self.nontrivial_classes()
        )
        return f"Congruence({len(self.universe)} paths; {classes or 'identity'})"


def _continuations(universe: frozenset[Path]) -> dict[Path, dict[str, set[int | None]]]:
    cont: dict[Path, dict[str, set[int | None]]] = {p: {} for p in universe}
    for p in universe:
        if not p:
            continue
        parent = p[:-1]
        if parent in cont:
            ctor, idx = p[-1]
            cont[parent].setdefault(ctor, set()).add(idx)
    return cont


def saturate(eq: Congruence, sig: Signature, *, nullary_presence: bool = True) -> Congruence:
    """Close under suffix extension (within the universe), maximality and
    transitivity to a fixpoint.

    The maximality step adds (p1, p2) whenever some constructor continues both
    with pairwise equivalent children.  For a nullary constructor two readings
    exist: on a single term's paths the presence of both marker paths suffices
    (the constant *is* at both positions), which is what term representations
    need; on a mixed universe (a global congruence over many terms' paths)
    presence only means some term has the constant there, so the markers must
    already be equivalent.
    """
    uni = eq.universe
    cong = Congruence(uni, eq.nontrivial_pairs())
    by_prefix: dict[Path, list[Path]] = {p: [] for p in uni}
    for p in uni:
        for k in range(len(p)):
            prefix = p[:k]
            if prefix in by_prefix:
                by_prefix[prefix].append(p)
    cont = _continuations(uni)
    paths_sorted = sorted(uni, key=path_key)

    changed = True
    while changed:
        changed = False
        # suffix extension within the universe
        for cls in cong.nontrivial_classes():
            base = cls[0]
            for m in cls[1:]:
                for ext in by_prefix[base]:
                    q = m + ext[len(base) :]
                    if q in uni and not cong.same(ext, q):
                        cong._union(ext, q)
                        changed = True
                for ext in by_prefix[m]:
                    q = base + ext[len(m) :]
                    if q in uni and not cong.same(ext, q):
                        cong._union(ext, q)
                        changed = True
        # maximality
        for i, p1 in enumerate(paths_sorted):
            for p2 in paths_sorted[i + 1 :]:
                if cong.same(p1, p2):
                    continue
                shared = set(cont[p1]) & set(cont[p2])
                for ctor in shared:
                    n = sig.arity(ctor)
                    if n == 0:
                        if nullary_presence or cong.same(p1 + ((ctor, None),), p2 + ((ctor, None),)):
                            cong._union(p1, p2)
                            changed = True
                            break
                        continue
                    if all(
                        p1 + ((ctor, k),) in uni
                        and p2 + ((ctor, k),) in uni
                        and cong.same(p1 + ((ctor, k),), p2 + ((ctor, k),))
                        for k in range(1, n + 1)
                    ):
                        cong._union(p1, p2)
                        changed = True
                        break
    return cong


def close_mx(eq: Congruence, paths: Iterable[Path], sig: Signature) -> Congruence:
    """Least congruence over the given paths extending eq and closed under the
    maximality step (plus suffix extension and transitivity)."""
    universe = eq.universe | frozenset(paths)
    return saturate(eq.with_universe(universe), sig)


def close_paths(paths: Iterable[Path], eq: Congruence) -> frozenset[Path]:
    """Extend the path set by everything equivalent to a member, where
    equivalence includes suffix extensions of the stored pairs."""
    out = set(paths)
    queue = list(out)
    while queue:
        p = queue.pop()
        for k in range(len(p), -1, -1):
            prefix = p[:k]
            if prefix not in eq.universe:
                continue
            for mate in eq.class_of(prefix):
                cand = mate + p[k:]
                if cand not in out:
                    out.add(cand)
                    queue.append(cand)
                    if len(out) > _CLOSURE_CAP:
                        raise PathClosureDiverged(
                            "path closure exceeds cap; the congruence relates a "
                            "path to its own extension"
                        )
    return frozenset(out)


@dataclass(frozen=True)
class TermRepr:
    """The renaming-invariant representation: paths plus position congruence."""

    paths: frozenset[Path]
    cong: Congruence


def repr_of(t: Term) -> TermRepr:
    """Paths of t with the smallest congruence relating equal-subterm positions.

    Marker paths inherit their parents' classes (suffix extension); the result
    satisfies all validity conditions by construction.
    """
    ps = paths_of(t)
    groups: dict[object, list[Path]] = {}
    for p in sorted(ps, key=path_key):
        if is_marker(p):
            key: object = ("m", p[-1][0])
        else:
            key = ("t", subterm_at(t, p))
        groups.setdefault(key, []).append(p)
    pairs = []
    for members in groups.values():
        for other in members[1:]:
            pairs.append((members[0], other))
    return TermRepr(ps, Congruence(ps, pairs))


@dataclass(frozen=True)
class ReprViolation:
    condition: int
    witness: tuple
    message: str


def _wellformed(p: Path, sig: Signature) -> str | None:
    for i, (ctor, idx) in enumerate(p):
        if ctor not in sig:
            return f"undeclared constructor {ctor!r}"
        n = sig.arity(ctor)
        if idx is None:
            if n != 0:
                return f"marker step for non-nullary constructor {ctor!r}"
            if i != len(p) - 1:
                return "marker step not final"
        else:
            if n == 0:
                return f"indexed step for nullary constructor {ctor!r}"
            if not 1 <= idx <= n:
                return f"index {idx} out of range for {ctor!r}/{n}"
    return None


def validate_repr(paths: Iterable[Path], eq: Congruence, sig: Signature) -> list[ReprViolation]:
    """Check the six conditions a (path set, congruence) pair must satisfy to
    represent a term; report all violations with witnesses.

    1 nonempty and well-formed, 2 sibling/prefix closure, 3 closure of the path
    set under the congruence, 4 compatibility (equivalent paths continue with
    one constructor), 5 suffix stability, 6 maximality.
    """
    P = frozenset(paths)
    out: list[ReprViolation] = []

    if not P:
        out.append(ReprViolation(1, (), "empty path set"))
        return out
    for p in sorted(P, key=path_key):
        problem = _wellformed(p, sig)
        if problem:
            out.append(ReprViolation(1, (p,), f"{format_path(p)}: {problem}"))
    if out:
        return out

    # 2: sibling + prefix closure
    missing: dict[Path, Path] = {}
    for p in sorted(P, key=path_key):
        for k in range(len(p)):
            prefix = p[: k + 1]
            if prefix not in P and prefix not in missing:
                missing[prefix] = p
            ctor, idx = prefix[-1]
            if idx is not None:
                for j in range(1, sig.arity(ctor) + 1):
                    sib = prefix[:-1] + ((ctor, j),)
                    if sib not in P and sib not in missing:
                        missing[sib] = p
    for gap, p in sorted(missing.items(), key=lambda kv: path_key(kv[0])):
        out.append(
            ReprViolation(2, (gap, p), f"missing sibling/prefix {format_path(gap)}")
        )

    # 3: P closed under the congruence (including suffix extensions of pairs)
    try:
        closed = close_paths(P, eq)
        for extra in sorted(closed - P, key=path_key):
            out.append(
                ReprViolation(
                    3, (extra,), f"equivalent path {format_path(extra)} missing from P"
                )
            )
    except PathClosureDiverged:
        out.append(ReprViolation(3, (), "congruence relates a path to its own extension"))

    in_universe = P & eq.universe
    cont = _continuations(frozenset(P))

    def members(p: Path) -> list[Path]:
        return [q for q in eq.class_of(p) if q in P] if p in eq.universe else [p]

    # 4: compatibility - equivalent paths continue with equal constructors
    seen_reps: set[Path] = set()
    for p in sorted(in_universe, key=path_key):
        rep = eq._find(p)
        if rep in seen_reps:
            continue
        seen_reps.add(rep)
        ctors: dict[str, Path] = {}
        for m in members(p):
            for c in cont.get(m, {}):
                ctors.setdefault(c, m)
        if len(ctors) > 1:
            names = sorted(ctors)
            out.append(
                ReprViolation(
                    4,
                    tuple(ctors[c] for c in names),
                    f"class of {format_path(p)} continues with {', '.join(names)}",
                )
            )

    # 5: suffix stability within P
    for cls in eq.nontrivial_classes():
        base = cls[0]
        for m in cls[1:]:
            for ext in sorted(P, key=path_key):
                if is_prefix(base, ext) and ext != base:
                    q = m + ext[len(base) :]
                    if q in eq.universe and not eq.same(ext, q):
                        out.append(
                            ReprViolation(
                                5,
                                (ext, q),
                                f"{format_path(ext)} ~ {format_path(q)} missing",
                            )
                        )

    # 6: maximality
    base = Congruence(eq.universe, eq.nontrivial_pairs())
    saturated = saturate(base, sig)
    for a, b in saturated.nontrivial_pairs():
        if not eq.same(a, b):
            out.append(
                ReprViolation(
                    6, (a, b), f"{format_path(a)} ~ {format_path(b)} forced by maximality"
                )
            )
    return out


def term_of(paths: Iterable[Path], eq: Congruence, sig: Signature) -> Term:
    """The term with the given representation (canonical variable names).

    Variables are numbered X1, X2, ... by the smallest (length-lexicographic)
    path of their congruence class.  Raises InvalidReprError when the pair is
    not a term representation.
    """
    P = frozenset(paths)
    violations = validate_repr(P, eq, sig)
    if violations:
        raise InvalidReprError(violations)
    cont = _continuations(P)

    endpoints = [p for p in sorted(P, key=path_key) if not is_marker(p) and not cont[p]]
    class_order: dict[Path, int] = {}
    names: dict[Path, str] = {}
    for p in endpoints:
        rep = eq._find(p) if p in eq.universe else p
        if rep not in class_order:
            class_order[rep] = len(class_order) + 1
        names[p] = f"X{class_order[rep]}"

    def build(at: Path) -> Term:
        steps = cont[at]
        if not steps:
            return Var(names[at])
        (ctor, indices), = steps.items()
        if indices == {None}:
            return App(ctor)
        return App(ctor, tuple(build(at + ((ctor, i),)) for i in range(1, sig.arity(ctor) + 1)))

    return build(EPSILON)


def repr_term_of(r: TermRepr, sig: Signature) -> Term:
    return term_of(r.paths, r.cong, sig)


def _has_clash(eq: Congruence, sig: Signature) -> bool:
    # condition 4 applies reflexively: even a single path may continue with at
    # most one constructor
    cont = _continuations(eq.universe)
    for cls in eq.classes():
        ctors: set[str] = set()
        for m in cls:
            ctors.update(cont.get(m, {}))
            if len(ctors) > 1:
                return True
    return False


def _has_prefix_pair(eq: Congruence) -> bool:
    for cls in eq.nontrivial_classes():
        for i, a in enumerate(cls):
            for b in cls[i + 1 :]:
                if is_prefix(a, b) or is_prefix(b, a):
                    return True
    return False


def lci_repr(reprs: list[TermRepr] | tuple[TermRepr, ...], sig: Signature) -> TermRepr | None:
    """Path-level least common instance: saturate the union of the congruences
    and close the union of the path sets, iterated to a mutual fixpoint.

    Returns None when no common instance exists: either a compatibility clash
    (two constructors forced at equivalent positions) or a congruence class
    relating a path to its own extension (the infinite-term case).
    """
    if not reprs:
        raise ValueError("lci_repr of an empty list")
    universe: frozenset[Path] = frozenset().union(*(r.paths for r in reprs))
    pairs: list[tuple[Path, Path]] = []
    for r in reprs:
        pairs.extend(r.cong.nontrivial_pairs())
    eq = Congruence(universe, pairs)

    for _ in range(200):
        eq = saturate(eq, sig)
        if _has_clash(eq, sig):
            return None
        if _has_prefix_pair(eq):
            return None
        try:
            grown = close_paths(eq.universe, eq)
        except PathClosureDiverged:
            return None
        if grown == eq.universe:
            return TermRepr(grown, eq)
        eq = eq.with_universe(grown)
    raise RuntimeError("lci_repr did not reach a fixpoint")


@dataclass(frozen=True)
class InstanceCheck:
    holds: bool
    flat: bool | None = None
    linear: bool | None = None


def is_instance(general: Term, instance: Term) -> InstanceCheck:
    """Does a substitution map `general` onto `instance`?

    Holds iff the path set and congruence of `general` are included in those of
    `instance`; the substitution is then flat iff the path sets coincide and
    linear iff the congruences coincide (as suffix-stable hulls).
    """
    rg, ri = repr_of(general), repr_of(instance)
    if not rg.paths <= ri.paths:
        return InstanceCheck(False)
    for a, b in rg.cong.nontrivial_pairs():
        if not ri.cong.same(a, b):
            return InstanceCheck(False)
    flat = rg.paths == ri.paths
    linear = all(rg.cong.hull_same(a, b) for a, b in ri.cong.nontrivial_pairs())
    return InstanceCheck(True, flat=flat, linear=linear)
