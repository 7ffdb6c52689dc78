"""Shared fixtures: the example program and random generators.

The random-program generators rejection-sample against validate_program, so
every yielded program satisfies the side conditions it is used under; seeds
are fixed for reproducibility.
"""

import random
from pathlib import Path

import pytest

from hornsets.deletions import (
    GlobalCongruence,
    ResourceExhaustedError,
    SearchBudget,
    less_set,
)
from hornsets.engine import Clause, HornProgram, validate_program
from hornsets.paths import paths_of
from hornsets.terms import App, Signature, Term, Var, vars_of

FIXTURES = Path(__file__).parent / "fixtures"

NAT_SIG = Signature((("0", 0), ("s", 1), (":", 2)))
UNARY_SIG = Signature((("0", 0), ("s", 1)))
MIXED_SIG = Signature((("c0", 0), ("d0", 0), ("u", 1), ("g", 2), ("h", 3)))
COLON_GENS = ((((":", 1),), ((":", 2),)),)

X, Y = Var("X"), Var("Y")
ZERO = App("0")


def s_(t: Term) -> Term:
    return App("s", (t,))


def cons(a: Term, b: Term) -> Term:
    return App(":", (a, b))


def s_tower(k: int, base: Term) -> Term:
    for _ in range(k):
        base = s_(base)
    return base


def beispiel6_program() -> HornProgram:
    return HornProgram(
        NAT_SIG,
        (
            Clause("p", cons(s_(s_(X)), s_(Y)), (("p", cons(s_(X), Y)),)),
            Clause("p", cons(X, ZERO)),
            Clause("q", cons(s_(X), s_(X)), (("q", cons(X, X)),)),
            Clause("q", cons(ZERO, X)),
        ),
        COLON_GENS,
    )


@pytest.fixture(scope="session")
def beispiel6() -> HornProgram:
    return beispiel6_program()


def random_term(rng: random.Random, sig: Signature, max_depth: int, vars_pool) -> Term:
    nullary = [n for n, a in sig.declarations if a == 0]
    bigger = [(n, a) for n, a in sig.declarations if a > 0]
    if max_depth <= 1 or rng.random() < 0.3:
        if vars_pool and rng.random() < 0.55:
            return Var(rng.choice(vars_pool))
        return App(rng.choice(nullary))
    name, arity = rng.choice(bigger)
    return App(name, tuple(random_term(rng, sig, max_depth - 1, vars_pool) for _ in range(arity)))


def generalize(rng: random.Random, t: Term, prefix: str) -> Term:
    """Random anti-instance: subterms replaced by (possibly shared) variables."""
    pool = [f"{prefix}{i}" for i in range(1, 4)]

    def walk(u: Term) -> Term:
        if rng.random() < 0.25:
            return Var(rng.choice(pool))
        if isinstance(u, Var) or not u.args:
            return u
        return App(u.ctor, tuple(walk(a) for a in u.args))

    return walk(t)


def unifiable_pair(rng: random.Random, sig: Signature, max_depth: int) -> tuple[Term, Term]:
    """Two anti-instances of a shared ground-ish base term; always unifiable."""
    base = random_term(rng, sig, max_depth, [])
    return generalize(rng, base, "A"), generalize(rng, base, "B")


# ---- random valid programs ----------------------------------------------------


def _unary_clauses(rng: random.Random, preds) -> list[Clause]:
    clauses = []
    for _ in range(rng.randint(2, 4)):
        pred = rng.choice(preds)
        k = rng.randint(0, 3)
        leaf = Var("X") if rng.random() < 0.6 else ZERO
        head = s_tower(k, leaf)
        if k >= 1 and rng.random() < 0.6:
            body_term = s_tower(rng.randint(0, k - 1), leaf)
            clauses.append(Clause(pred, head, ((rng.choice(preds), body_term),)))
        else:
            clauses.append(Clause(pred, head, ()))
    return clauses


def _binary_clauses(rng: random.Random, preds, ground_facts: bool) -> list[Clause]:
    clauses = []
    for _ in range(rng.randint(2, 4)):
        pred = rng.choice(preds)
        if rng.random() < 0.5:
            # rule: strip the same number of s-layers from both components
            if rng.random() < 0.5:
                a = rng.randint(1, 2)
                head = cons(s_tower(a, X), s_tower(a, X))
                strip = rng.randint(1, a)
                body_term = cons(s_tower(a - strip, X), s_tower(a - strip, X))
            else:
                a, b = rng.randint(1, 2), rng.randint(1, 2)
                head = cons(s_tower(a, X), s_tower(b, Y))
                strip = rng.randint(1, min(a, b))
                body_term = cons(s_tower(a - strip, X), s_tower(b - strip, Y))
            clauses.append(Clause(pred, head, ((rng.choice(preds), body_term),)))
        else:
            if ground_facts:
                head = cons(s_tower(rng.randint(0, 2), ZERO), s_tower(rng.randint(0, 2), ZERO))
            else:
                head = cons(random_term(rng, NAT_SIG, 2, ["X"]), s_tower(rng.randint(0, 1), ZERO))
            clauses.append(Clause(pred, head, ()))
    return clauses


def _mixed_clauses(rng: random.Random, preds) -> list[Clause]:
    """Free-form clauses over the mixed signature; bodies drawn from the
    restricted-order cone of the head so the side conditions tend to hold."""
    clauses = []
    for _ in range(rng.randint(2, 4)):
        pred = rng.choice(preds)
        head = random_term(rng, MIXED_SIG, 3, ["X", "Y"])
        gc = GlobalCongruence((), paths_of(head), MIXED_SIG)
        options: list[Term] = []
        try:
            if gc.includes_term_congruence(head):
                options = [
                    t
                    for t in less_set(head, gc, MIXED_SIG, SearchBudget(5_000))
                    if vars_of(t) <= vars_of(head)
                ]
        except ResourceExhaustedError:
            options = []
        if options and rng.random() < 0.6:
            clauses.append(Clause(pred, head, ((rng.choice(preds), rng.choice(options)),)))
        else:
            clauses.append(Clause(pred, head, ()))
    return clauses


def _candidate(rng: random.Random, for_intersection: bool) -> HornProgram:
    preds = ["p", "q"][: rng.randint(1, 2)]
    style = rng.random()
    if style < 0.4:
        return HornProgram(UNARY_SIG, tuple(_unary_clauses(rng, preds)))
    if style < 0.8:
        return HornProgram(
            NAT_SIG, tuple(_binary_clauses(rng, preds, ground_facts=for_intersection)), COLON_GENS
        )
    if for_intersection:
        return HornProgram(UNARY_SIG, tuple(_unary_clauses(rng, preds)))
    return HornProgram(MIXED_SIG, tuple(_mixed_clauses(rng, preds)))


def generate_valid_programs(
    seed: int, count: int, *, for_intersection: bool
) -> list[HornProgram]:
    rng = random.Random(seed)
    out: list[HornProgram] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        assert attempts < 400 * count, "program generator rejection rate too high"
        prog = _candidate(rng, for_intersection)
        if not any(c.body for c in prog.clauses) and rng.random() < 0.7:
            continue  # keep mostly programs that exercise rules
        try:
            diags = validate_program(
                prog, budget=SearchBudget(60_000), include_pairs=for_intersection
            )
        except ResourceExhaustedError:
            continue
        if diags:
            continue
        out.append(prog)
    return out


@pytest.fixture(scope="session")
def inh_programs() -> list[HornProgram]:
    return generate_valid_programs(101, 50, for_intersection=False)


@pytest.fixture(scope="session")
def intersect_programs() -> list[HornProgram]:
    return generate_valid_programs(202, 20, for_intersection=True)
