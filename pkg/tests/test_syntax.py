"""Tests for the concrete syntax: lexer, parser, renderer, round trips."""

import random
from pathlib import Path

import pytest

from hornsets.engine import Clause, HornProgram
from hornsets.syntax import (
    ParseError,
    parse_goal,
    parse_path,
    parse_program,
    parse_term,
    parse_term_inferring,
    render_clause,
    render_program,
)
from hornsets.terms import App, Signature, Var

FIXTURES = Path(__file__).parent / "fixtures"
SIG = Signature((("0", 0), ("s", 1), (":", 2)))

X, Y = Var("X"), Var("Y")
ZERO = App("0")


def s(t):
    return App("s", (t,))


def cons(a, b):
    return App(":", (a, b))


class TestParseProgram:
    def test_beispiel_file(self):
        source = parse_program((FIXTURES / "beispiel6.hn").read_text())
        assert len(source.clauses) == 4
        assert source.signature == SIG
        assert source.congruence == (((( ":", 1),), ((":", 2),)),)
        assert source.clauses[0] == Clause(
            "p", cons(s(s(X)), s(Y)), (("p", cons(s(X), Y)),)
        )
        assert source.clauses[1] == Clause("p", cons(X, ZERO))
        assert source.clauses[2] == Clause("q", cons(s(X), s(X)), (("q", cons(X, X)),))
        assert source.clauses[3] == Clause("q", cons(ZERO, X))

    def test_empty_program(self):
        with pytest.raises(ParseError, match="empty program"):
            parse_program("")

    def test_comment_only(self):
        with pytest.raises(ParseError, match="empty program"):
            parse_program("% nothing here\n")

    def test_undeclared_constructor(self):
        with pytest.raises(ParseError, match="undeclared"):
            parse_program("constructors s/1.\np(f(X)).\n")

    def test_arity_mismatch(self):
        with pytest.raises(ParseError, match="arity"):
            parse_program("constructors s/1.\np(s(X, X)).\n")

    def test_two_body_atoms_parse(self):
        source = parse_program(
            "constructors 0/0.\np(X) <- q(X), r(X).\n"
        )
        assert len(source.clauses[0].body) == 2

    def test_located_error(self):
        with pytest.raises(ParseError) as err:
            parse_program("constructors s/1.\np(s(X)]\n")
        assert err.value.line == 2 and err.value.col == 7

    def test_infix_needs_declaration(self):
        with pytest.raises(ParseError, match="':' used but not declared"):
            parse_program("constructors s/1, 0/0.\np(X:Y).\n")


class TestTermsAndPaths:
    def test_parse_term_infix(self):
        assert parse_term("s(s(X)):s(Y)", SIG) == cons(s(s(X)), s(Y))

    def test_right_associative(self):
        assert parse_term("X:Y:0", SIG) == cons(X, cons(Y, ZERO))
        assert parse_term("(X:Y):0", SIG) == cons(cons(X, Y), ZERO)

    def test_parse_goal(self):
        assert parse_goal("pq(s(X):Y)", SIG) == ("pq", cons(s(X), Y))

    def test_parse_path(self):
        assert parse_path(":.1.s.1", SIG) == ((":", 1), ("s", 1))
        assert parse_path(":.2.0", SIG) == ((":", 2), ("0", None))
        assert parse_path("eps", SIG) == ()

    def test_path_index_range(self):
        with pytest.raises(ParseError, match="out of range"):
            parse_path(":.3", SIG)

    def test_inferred_signature(self):
        (t,), sig = parse_term_inferring(["s(X):g(Y,0)"])
        assert t == cons(s(X), App("g", (Y, ZERO)))
        assert sig.arity("g") == 2 and sig.arity("0") == 0

    def test_inference_conflict(self):
        with pytest.raises(ParseError, match="arities"):
            parse_term_inferring(["g(g(X), X):g(Y)"])


class TestRenderRoundTrip:
    def test_beispiel_round_trip(self):
        source = parse_program((FIXTURES / "beispiel6.hn").read_text())
        again = parse_program(render_program(source))
        assert source.structurally_equal(again)

    def test_render_clause(self):
        clause = Clause("p", cons(s(s(X)), s(Y)), (("p", cons(s(X), Y)),))
        assert render_clause(clause) == "p(s(s(X)):s(Y)) <- p(s(X):Y)."

    def test_random_programs_round_trip(self):
        rng = random.Random(5)
        for _ in range(200):
            prog = _random_program(rng)
            text = render_program(prog)
            again = parse_program(text)
            assert again.program() == prog, text


def _random_term(rng, sig, vars_pool, depth):
    if depth <= 1 or rng.random() < 0.35:
        if rng.random() < 0.5:
            return Var(rng.choice(vars_pool))
        return App(rng.choice([n for n, a in sig.declarations if a == 0]))
    name, arity = rng.choice([(n, a) for n, a in sig.declarations if a > 0])
    return App(name, tuple(_random_term(rng, sig, vars_pool, depth - 1) for _ in range(arity)))


def _random_program(rng):
    sig = Signature((("0", 0), ("nil", 0), ("s", 1), (":", 2), ("f", 3)))
    preds = ["p", "q", "r"][: rng.randint(1, 3)]
    clauses = []
    for _ in range(rng.randint(1, 5)):
        head_pred = rng.choice(preds)
        head = _random_term(rng, sig, ["X", "Y", "Z"], rng.randint(1, 4))
        if rng.random() < 0.5:
            body = ((rng.choice(preds), _random_term(rng, sig, ["X", "Y"], rng.randint(1, 3))),)
        else:
            body = ()
        clauses.append(Clause(head_pred, head, body))
    gens = []
    if rng.random() < 0.5:
        gens.append((((":", 1),), ((":", 2),)))
    return HornProgram(sig, tuple(clauses), tuple(gens))
