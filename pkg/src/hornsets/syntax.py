"""Concrete syntax for Horn programs: lexer, parser and pretty-printer.

Grammar (file extension .hn, UTF-8, `%` comments to end of line):

    program     ::= { block }
    block       ::= "constructors" decl { "," decl } "."
                  | "congruence" pair { "," pair } "."
                  | clause
    decl        ::= ctor "/" INT
    pair        ::= path "~" path
    clause      ::= atom [ "<-" atom { "," atom } ] "."
    atom        ::= pred "(" term ")"
    term        ::= base [ ":" term ]            (right associative, loosest)
    base        ::= VARIABLE | ctor [ "(" term { "," term } ")" ] | "(" term ")"
    path        ::= "eps" | step { "." step }    (nullary marker steps final)

Constructors and predicates are lowercase identifiers, digits, or ":";
variables start with an uppercase letter.  Nullary constructors are written
bare.  Parsing a clause requires the constructors block to come first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import Clause, Diagnostic, HornProgram
from .paths import Path, format_path
from .terms import App, Signature, Term, Var, render_term


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.diagnostic = Diagnostic("syntax", message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_SINGLE = {
    "(": "LP",
    ")": "RP",
    ",": "COMMA",
    ".": "DOT",
    "~": "TILDE",
    "/": "SLASH",
    ":": "COLON",
}


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("<-", i):
            tokens.append(Token("ARROW", "<-", line, col))
            i += 2
            col += 2
            continue
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "UNAME" if word[0].isupper() else "LNAME"
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


@dataclass
class SourceProgram:
    """A parsed program plus per-clause source locations."""

    signature: Signature
    congruence: tuple[tuple[Path, Path], ...]
    clauses: tuple[Clause, ...]
    clause_locations: tuple[tuple[int, int], ...] = ()

    def program(self) -> HornProgram:
        return HornProgram(self.signature, self.clauses, self.congruence)

    def structurally_equal(self, other: "SourceProgram") -> bool:
        return (
            self.signature == other.signature
            and self.congruence == other.congruence
            and self.clauses == other.clauses
        )


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        return tok

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # ---- program structure -------------------------------------------------

    def program(self) -> SourceProgram:
        decls: list[tuple[str, int]] = []
        gens: list[tuple[Path, Path]] = []
        clauses: list[Clause] = []
        locations: list[tuple[int, int]] = []
        sig = Signature(())
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind == "LNAME" and tok.text == "constructors":
                self.next()
                decls.extend(self.ctor_block())
                seen: dict[str, int] = {}
                for name, arity in decls:
                    if name in seen and seen[name] != arity:
                        raise ParseError(
                            f"constructor {name!r} redeclared with different arity",
                            tok.line,
                            tok.col,
                        )
                    seen[name] = arity
                sig = Signature(tuple(dict(decls).items()))
            elif tok.kind == "LNAME" and tok.text == "congruence":
                self.next()
                gens.extend(self.congruence_block(sig))
            elif tok.kind == "LNAME":
                loc = (tok.line, tok.col)
                clauses.append(self.clause(sig))
                locations.append(loc)
            else:
                raise self.fail(f"expected a declaration or clause, found {tok.text!r}")
        if not decls and not clauses and not gens:
            eof = self.peek()
            raise ParseError("empty program", eof.line, eof.col)
        return SourceProgram(sig, tuple(gens), tuple(clauses), tuple(locations))

    def ctor_block(self) -> list[tuple[str, int]]:
        out = []
        while True:
            name_tok = self.next()
            if name_tok.kind not in ("LNAME", "INT", "COLON"):
                raise ParseError("expected a constructor name", name_tok.line, name_tok.col)
            self.expect("SLASH", "'/'")
            arity_tok = self.expect("INT", "an arity")
            out.append((name_tok.text, int(arity_tok.text)))
            sep = self.next()
            if sep.kind == "DOT":
                return out
            if sep.kind != "COMMA":
                raise ParseError("expected ',' or '.'", sep.line, sep.col)

    def congruence_block(self, sig: Signature) -> list[tuple[Path, Path]]:
        out = []
        while True:
            left = self.path(sig)
            self.expect("TILDE", "'~'")
            right = self.path(sig)
            out.append((left, right))
            sep = self.next()
            if sep.kind == "DOT":
                return out
            if sep.kind != "COMMA":
                raise ParseError("expected ',' or '.'", sep.line, sep.col)

    def clause(self, sig: Signature) -> Clause:
        pred, term = self.atom(sig)
        body: list[tuple[str, Term]] = []
        if self.peek().kind == "ARROW":
            self.next()
            body.append(self.atom(sig))
            while self.peek().kind == "COMMA":
                self.next()
                body.append(self.atom(sig))
        self.expect("DOT", "'.'")
        return Clause(pred, term, tuple(body))

    def atom(self, sig: Signature) -> tuple[str, Term]:
        name = self.expect("LNAME", "a predicate name")
        self.expect("LP", "'('")
        term = self.term(sig)
        self.expect("RP", "')'")
        return name.text, term

    # ---- terms ---------------------------------------------------------------

    def term(self, sig: Signature) -> Term:
        left = self.base(sig)
        if self.peek().kind == "COLON":
            tok = self.peek()
            if ":" not in sig:
                raise ParseError("':' used but not declared", tok.line, tok.col)
            self.next()
            right = self.term(sig)
            return App(":", (left, right))
        return left

    def base(self, sig: Signature) -> Term:
        tok = self.next()
        if tok.kind == "UNAME":
            return Var(tok.text)
        if tok.kind == "LP":
            inner = self.term(sig)
            self.expect("RP", "')'")
            return inner
        if tok.kind in ("LNAME", "INT"):
            name = tok.text
            if name not in sig:
                raise ParseError(f"undeclared constructor {name!r}", tok.line, tok.col)
            arity = sig.arity(name)
            if self.peek().kind == "LP":
                self.next()
                args = [self.term(sig)]
                while self.peek().kind == "COMMA":
                    self.next()
                    args.append(self.term(sig))
                self.expect("RP", "')'")
                if len(args) != arity:
                    raise ParseError(
                        f"constructor {name!r} has arity {arity}, got {len(args)} arguments",
                        tok.line,
                        tok.col,
                    )
                return App(name, tuple(args))
            if arity != 0:
                raise ParseError(
                    f"constructor {name!r} has arity {arity} and needs arguments",
                    tok.line,
                    tok.col,
                )
            return App(name)
        raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.line, tok.col)

    # ---- paths ---------------------------------------------------------------

    def path(self, sig: Signature) -> Path:
        tok = self.peek()
        if tok.kind == "LNAME" and tok.text == "eps":
            self.next()
            return ()
        steps: list[tuple[str, int | None]] = []
        while True:
            ctor_tok = self.next()
            if ctor_tok.kind not in ("LNAME", "INT", "COLON"):
                raise ParseError("expected a constructor in path", ctor_tok.line, ctor_tok.col)
            name = ctor_tok.text
            if name not in sig:
                raise ParseError(f"undeclared constructor {name!r} in path", ctor_tok.line, ctor_tok.col)
            arity = sig.arity(name)
            if arity == 0:
                steps.append((name, None))
                return tuple(steps)
            self.expect("DOT", "'.' before an argument index")
            idx_tok = self.expect("INT", "an argument index")
            idx = int(idx_tok.text)
            if not 1 <= idx <= arity:
                raise ParseError(
                    f"index {idx} out of range for {name!r}/{arity}",
                    idx_tok.line,
                    idx_tok.col,
                )
            steps.append((name, idx))
            if self.peek().kind == "DOT" and self._continues_path(sig):
                self.next()
                continue
            return tuple(steps)

    def _continues_path(self, sig: Signature) -> bool:
        after = self.peek(1)
        return after.kind in ("LNAME", "INT", "COLON") and after.text in sig


def parse_program(text: str) -> SourceProgram:
    """Parse a program; raises ParseError with a located diagnostic."""
    return _Parser(tokenize(text)).program()


def parse_term(text: str, sig: Signature) -> Term:
    parser = _Parser(tokenize(text))
    term = parser.term(sig)
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return term


def parse_goal(text: str, sig: Signature) -> tuple[str, Term]:
    parser = _Parser(tokenize(text))
    pred, term = parser.atom(sig)
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return pred, term


def parse_path(text: str, sig: Signature) -> Path:
    parser = _Parser(tokenize(text))
    path = parser.path(sig)
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return path


# ---- signature inference for standalone terms -------------------------------


@dataclass
class _Inferred:
    arities: dict[str, int] = field(default_factory=dict)


def _infer_term(parser: _Parser, inf: _Inferred) -> Term:
    left = _infer_base(parser, inf)
    if parser.peek().kind == "COLON":
        parser.next()
        prior = inf.arities.setdefault(":", 2)
        if prior != 2:
            tok = parser.peek()
            raise ParseError("':' used with conflicting arity", tok.line, tok.col)
        right = _infer_term(parser, inf)
        return App(":", (left, right))
    return left


def _infer_base(parser: _Parser, inf: _Inferred) -> Term:
    tok = parser.next()
    if tok.kind == "UNAME":
        return Var(tok.text)
    if tok.kind == "LP":
        inner = _infer_term(parser, inf)
        parser.expect("RP", "')'")
        return inner
    if tok.kind in ("LNAME", "INT"):
        name = tok.text
        args: list[Term] = []
        if parser.peek().kind == "LP":
            parser.next()
            args.append(_infer_term(parser, inf))
            while parser.peek().kind == "COMMA":
                parser.next()
                args.append(_infer_term(parser, inf))
            parser.expect("RP", "')'")
        prior = inf.arities.setdefault(name, len(args))
        if prior != len(args):
            raise ParseError(
                f"constructor {name!r} used with arities {prior} and {len(args)}",
                tok.line,
                tok.col,
            )
        return App(name, tuple(args))
    raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.line, tok.col)


def parse_term_inferring(texts: list[str], base: Signature | None = None) -> tuple[list[Term], Signature]:
    """Parse standalone terms, inferring constructor arities from usage.

    A base signature (e.g. from a program file) contributes declarations that
    usage must agree with.
    """
    inf = _Inferred(dict(base.declarations) if base else {})
    terms = []
    for text in texts:
        parser = _Parser(tokenize(text))
        terms.append(_infer_term(parser, inf))
        tok = parser.peek()
        if tok.kind != "EOF":
            raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return terms, Signature(tuple(inf.arities.items()))


# ---- rendering ---------------------------------------------------------------


def render_clause(clause: Clause) -> str:
    head = f"{clause.head_pred}({render_term(clause.head)})"
    if not clause.body:
        return f"{head}."
    body = ", ".join(f"{p}({render_term(t)})" for p, t in clause.body)
    return f"{head} <- {body}."


def render_program(prog: HornProgram | SourceProgram) -> str:
    if isinstance(prog, SourceProgram):
        prog = prog.program()
    lines = []
    if prog.signature.declarations:
        decls = ", ".join(f"{n}/{a}" for n, a in prog.signature.declarations)
        lines.append(f"constructors {decls}.")
    if prog.congruence:
        pairs = ", ".join(f"{format_path(a)} ~ {format_path(b)}" for a, b in prog.congruence)
        lines.append(f"congruence {pairs}.")
    if lines:
        lines.append("")
    for clause in prog.clauses:
        lines.append(render_clause(clause))
    return "\n".join(lines) + "\n"
