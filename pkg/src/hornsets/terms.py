"""First-order terms over a fixed-arity constructor signature.

Terms are immutable: a variable is identified by its name, an application
carries a constructor name and exactly as many arguments as the signature
declares.  Substitutions are plain dicts from variable names to terms; every
operation that produces one keeps it idempotent (no bound variable occurs in
any image term).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

# Reserved binary constructor used to encode pairs of terms (e.g. for the
# sharpened clause-pair side condition).  The name is not expressible in the
# concrete syntax, so it can never collide with a user constructor.
PAIR = "$pair"


class SignatureError(ValueError):
    """A term or declaration is inconsistent with the signature."""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    ctor: str
    args: tuple["Term", ...] = ()


Term = Var | App
Subst = dict[str, Term]


@dataclass(frozen=True)
class Signature:
    """Constructor names with fixed arities, in declaration order."""

    declarations: tuple[tuple[str, int], ...]
    _arities: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        arities: dict[str, int] = {}
        for name, arity in self.declarations:
            if not name:
                raise SignatureError("empty constructor name")
            if arity < 0:
                raise SignatureError(f"negative arity for constructor {name!r}")
            if name in arities and arities[name] != arity:
                raise SignatureError(f"conflicting arities for constructor {name!r}")
            arities[name] = arity
        object.__setattr__(self, "_arities", arities)

    def arity(self, name: str) -> int:
        try:
            return self._arities[name]
        except KeyError:
            raise SignatureError(f"undeclared constructor {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._arities

    def names(self) -> tuple[str, ...]:
        return tuple(self._arities)

    def nullary(self) -> tuple[str, ...]:
        return tuple(sorted(n for n, a in self._arities.items() if a == 0))

    def least_ground(self) -> Term | None:
        """Smallest ground term; ties among nullary constructors broken by name."""
        consts = self.nullary()
        return App(consts[0]) if consts else None

    def with_pair(self) -> "Signature":
        """The signature extended by the reserved pair constructor."""
        if PAIR in self:
            return self
        return Signature(self.declarations + ((PAIR, 2),))


def pair_term(t1: Term, t2: Term) -> Term:
    return App(PAIR, (t1, t2))


def check_term(sig: Signature, t: Term) -> None:
    """Raise SignatureError unless every application matches its declared arity."""
    if isinstance(t, Var):
        return
    n = sig.arity(t.ctor)
    if len(t.args) != n:
        raise SignatureError(
            f"constructor {t.ctor!r} has arity {n}, applied to {len(t.args)} arguments"
        )
    for a in t.args:
        check_term(sig, a)


def iter_vars(t: Term) -> Iterator[str]:
    """Variable names in pre-order, with multiplicity."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            yield u.name
        else:
            stack.extend(reversed(u.args))


def vars_of(t: Term) -> set[str]:
    return set(iter_vars(t))


def occurs(name: str, t: Term) -> bool:
    return any(v == name for v in iter_vars(t))


def apply(subst: Subst, t: Term) -> Term:
    """Homomorphic application; unbound variables map to themselves."""
    if isinstance(t, Var):
        return subst.get(t.name, t)
    if not t.args:
        return t
    return App(t.ctor, tuple(apply(subst, a) for a in t.args))


def compose(outer: Subst, inner: Subst) -> Subst:
    """The substitution applying `inner` first, then `outer` (kept idempotent)."""
    out: Subst = {}
    for x, img in inner.items():
        img2 = apply(outer, img)
        if img2 != Var(x):
            out[x] = img2
    for x, img in outer.items():
        if x not in inner and img != Var(x):
            out[x] = img
    return out


def mgu(t1: Term, t2: Term) -> Subst | None:
    """Most general unifier, or None when none exists.

    Performs the occurs check (infinite terms are out of scope) and returns an
    idempotent substitution.
    """
    subst: Subst = {}
    todo: list[tuple[Term, Term]] = [(t1, t2)]
    while todo:
        a, b = todo.pop()
        a, b = apply(subst, a), apply(subst, b)
        if a == b:
            continue
        if not isinstance(a, Var):
            if not isinstance(b, Var):
                if a.ctor != b.ctor or len(a.args) != len(b.args):
                    return None
                todo.extend(zip(a.args, b.args))
                continue
            a, b = b, a
        if occurs(a.name, b):
            return None
        bind = {a.name: b}
        subst = {x: apply(bind, img) for x, img in subst.items()}
        subst[a.name] = b
    return {x: img for x, img in subst.items() if img != Var(x)}


def match(pattern: Term, target: Term) -> Subst | None:
    """A substitution with apply(subst, pattern) == target, or None."""
    subst: Subst = {}
    todo = [(pattern, target)]
    while todo:
        p, g = todo.pop()
        if isinstance(p, Var):
            if p.name in subst:
                if subst[p.name] != g:
                    return None
            else:
                subst[p.name] = g
        else:
            if isinstance(g, Var) or p.ctor != g.ctor or len(p.args) != len(g.args):
                return None
            todo.extend(zip(p.args, g.args))
    return subst


def fresh_name(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def rename_apart(t: Term, avoid: Iterable[str]) -> tuple[Term, dict[str, str]]:
    """An alpha-variant of t sharing no variable with `avoid`, plus the renaming."""
    avoid = set(avoid)
    taken = avoid | vars_of(t)
    renaming: dict[str, str] = {}
    for name in iter_vars(t):
        if name in avoid and name not in renaming:
            new = fresh_name(name, taken)
            renaming[name] = new
            taken.add(new)
    if not renaming:
        return t, {}
    return apply({old: Var(new) for old, new in renaming.items()}, t), renaming


def canonical(t: Term, prefix: str = "X") -> Term:
    """Rename variables to X1, X2, ... in leftmost-outermost first-occurrence order.

    Two terms are alpha-equivalent iff their canonical forms are equal.
    """
    names: dict[str, str] = {}

    def walk(u: Term) -> Term:
        if isinstance(u, Var):
            name = names.get(u.name)
            if name is None:
                name = f"{prefix}{len(names) + 1}"
                names[u.name] = name
            return Var(name)
        if not u.args:
            return u
        return App(u.ctor, tuple(walk(a) for a in u.args))

    return walk(t)


def alpha_eq(t1: Term, t2: Term) -> bool:
    return canonical(t1) == canonical(t2)


def lci(terms: list[Term] | tuple[Term, ...]) -> Term | None:
    """Least common instance of the given terms, or None when some pair clashes.

    Folds pairwise, renaming each argument apart first; the result is unique up
    to renaming regardless of order.
    """
    if not terms:
        raise ValueError("lci of an empty term list")
    acc = terms[0]
    for t in terms[1:]:
        t2, _ = rename_apart(t, vars_of(acc))
        s = mgu(acc, t2)
        if s is None:
            return None
        acc = apply(s, acc)
    return acc


@dataclass(frozen=True)
class SubstClass:
    flat: bool
    linear: bool
    renaming: bool


def classify_substitution(subst: Subst) -> SubstClass:
    """flat: every image is a variable; linear: the image tuple is a linear term."""
    images = [subst[x] for x in sorted(subst)]
    flat = all(isinstance(img, Var) for img in images)
    seen: set[str] = set()
    linear = True
    for img in images:
        for v in iter_vars(img):
            if v in seen:
                linear = False
            seen.add(v)
    return SubstClass(flat=flat, linear=linear, renaming=flat and linear)


def decompose_substitution(subst: Subst) -> tuple[Subst, Subst]:
    """Split into a flat and a linear part with flat ∘ linear = subst on dom.

    Repeated variable occurrences across the image tuple are replaced by fresh
    variables (collected in the flat part); first occurrences keep their name.
    """
    taken = set(subst) | {v for img in subst.values() for v in iter_vars(img)}
    flat: Subst = {}
    linear: Subst = {}
    seen: set[str] = set()

    def rebuild(u: Term) -> Term:
        if isinstance(u, Var):
            if u.name not in seen:
                seen.add(u.name)
                return u
            new = fresh_name(u.name, taken)
            taken.add(new)
            flat[new] = Var(u.name)
            return Var(new)
        if not u.args:
            return u
        return App(u.ctor, tuple(rebuild(a) for a in u.args))

    for x in sorted(subst):
        linear[x] = rebuild(subst[x])
    return flat, linear


def term_depth(t: Term) -> int:
    """Constructor depth; variables and constants both have depth 1."""
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def ground_with_least(t: Term, sig: Signature) -> Term | None:
    """Instantiate every variable with the signature's least ground term."""
    least = sig.least_ground()
    if least is None:
        return None if vars_of(t) else t
    return apply({v: least for v in vars_of(t)}, t)


def _is_symbolic(name: str) -> bool:
    return not (name[0].isalnum() or name[0] == "_")


def render_term(t: Term) -> str:
    """Concrete syntax: `s(X):Y` style, symbolic binary constructors infix.

    Infix constructors are right-associative and bind loosest, so only a
    left-nested infix operand needs parentheses.  Pair terms render as <a, b>.
    """
    if isinstance(t, Var):
        return t.name
    if t.ctor == PAIR:
        return f"<{render_term(t.args[0])}, {render_term(t.args[1])}>"
    if len(t.args) == 2 and _is_symbolic(t.ctor):
        left, right = t.args
        ls = render_term(left)
        if isinstance(left, App) and len(left.args) == 2 and _is_symbolic(left.ctor):
            ls = f"({ls})"
        return f"{ls}{t.ctor}{render_term(right)}"
    if not t.args:
        return t.ctor
    return f"{t.ctor}({','.join(render_term(a) for a in t.args)})"
