"""Command-line interface.

Subcommands: validate, sat, intersect, bound, repr, order, enum.  Exit codes:
0 success/true, 1 false/no-witness, 2 diagnostics, 3 resource exhausted (a
search hit --max-states; never a wrong answer).

Output formats: `pretty` is human-oriented; `machine` is line-oriented
key=value with a frozen field set (documented in the README).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path as FsPath

from .deletions import (
    GlobalCongruence,
    ResourceExhaustedError,
    SearchBudget,
    format_deletion_seq,
    leq_plain,
    leq_star,
)
from .engine import (
    Goal,
    IntersectionIncoherentError,
    InvalidProgramError,
    bound_set,
    enumerate_extension,
    inh,
    intersect,
    validate_program,
)
from .paths import (
    OutOfUniverseError,
    format_path,
    path_key,
    paths_of,
    repr_of,
    validate_repr,
)
from .syntax import (
    ParseError,
    parse_goal,
    parse_program,
    parse_term_inferring,
    render_clause,
    render_program,
)
from .terms import SignatureError, render_term

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_DIAGNOSTICS = 2
EXIT_EXHAUSTED = 3


def _load(path: str):
    try:
        text = FsPath(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", 0, 0) from None
    return parse_program(text)


def _emit_diagnostics(diags, fmt) -> None:
    if fmt == "machine":
        print("ok=false")
        print(f"diagnostics.n={len(diags)}")
        for i, d in enumerate(diags, 1):
            print(f"diagnostic.{i}.code={d.code}")
            print(f"diagnostic.{i}.message={d.message}")
            if d.clause is not None:
                print(f"diagnostic.{i}.clause={d.clause + 1}")
    else:
        for d in diags:
            print(f"error: {d}")


def cmd_validate(args) -> int:
    source = _load(args.file)
    budget = SearchBudget(args.max_states)
    diags = validate_program(source.program(), budget=budget)
    if diags:
        _emit_diagnostics(diags, args.format)
        return EXIT_DIAGNOSTICS
    if args.format == "machine":
        print("ok=true")
    else:
        print(f"{args.file}: all side conditions hold")
    return EXIT_TRUE


def cmd_sat(args) -> int:
    source = _load(args.file)
    prog = source.program()
    pred, term = parse_goal(args.goal, prog.signature)
    budget = SearchBudget(args.max_states)
    result = inh(prog, Goal(pred, term), budget)
    if args.format == "machine":
        print(f"result={'true' if result.satisfiable else 'false'}")
        if args.witness and result.satisfiable and result.witness is not None:
            print(f"witness={render_term(result.witness)}")
        if args.trace:
            print(f"trace.n={len(result.trace)}")
            for i, step in enumerate(result.trace, 1):
                print(f"trace.{i}.rule={step.rule}")
                print(f"trace.{i}.pred={step.pred}")
                print(f"trace.{i}.exp={render_term(step.exponent)}")
    else:
        verdict = "satisfiable" if result.satisfiable else "unsatisfiable"
        print(f"{pred}({render_term(term)}) is {verdict}")
        if args.witness and result.satisfiable and result.witness is not None:
            print(f"witness: {render_term(result.witness)}")
        if args.trace:
            for step in result.trace:
                print(f"  rule {step.rule}: {step.pred}^{render_term(step.exponent)}")
    return EXIT_TRUE if result.satisfiable else EXIT_FALSE


def cmd_intersect(args) -> int:
    source = _load(args.file)
    budget = SearchBudget(args.max_states)
    result = intersect(source.program(), args.left, args.right, budget)
    if args.out:
        FsPath(args.out).write_text(render_program(result.program), encoding="utf-8")
    if args.format == "machine":
        print(f"pred={result.root}")
        pairs = sorted(result.pair_names.items(), key=lambda kv: kv[1])
        print(f"pairs.n={len(pairs)}")
        for i, ((left, right), name) in enumerate(pairs, 1):
            print(f"pair.{i}.left={left}")
            print(f"pair.{i}.right={right}")
            print(f"pair.{i}.name={name}")
        print(f"clauses.n={len(result.new_clauses)}")
        for i, clause in enumerate(result.new_clauses, 1):
            print(f"clause.{i}={render_clause(clause)}")
    else:
        print(f"% {result.root}(x) holds iff {args.left}(x) and {args.right}(x)")
        for clause in result.new_clauses:
            print(render_clause(clause))
    return EXIT_TRUE


def cmd_bound(args) -> int:
    source = _load(args.file)
    prog = source.program()
    pred, term = parse_goal(args.goal, prog.signature)
    budget = SearchBudget(args.max_states)
    bset = bound_set(prog, term, budget)
    if args.format == "machine":
        print(f"terms.n={len(bset.terms)}")
        for i, t in enumerate(bset.terms, 1):
            print(f"term.{i}={render_term(t)}")
    else:
        print(f"bound set for {pred}({render_term(term)}): {len(bset.terms)} terms")
        for t in bset.terms:
            print(f"  {render_term(t)}")
    return EXIT_TRUE


def cmd_repr(args) -> int:
    (term,), sig = parse_term_inferring([args.term])
    r = repr_of(term)
    ordered = sorted(r.paths, key=path_key)
    classes = r.cong.nontrivial_classes()
    valid = not validate_repr(r.paths, r.cong, sig)
    if args.format == "machine":
        print(f"paths.n={len(ordered)}")
        for i, p in enumerate(ordered, 1):
            print(f"path.{i}={format_path(p)}")
        print(f"classes.n={len(classes)}")
        for i, cls in enumerate(classes, 1):
            print(f"class.{i}={{{', '.join(format_path(p) for p in cls)}}}")
        print(f"valid={'true' if valid else 'false'}")
    else:
        print(f"paths of {render_term(term)}:")
        for p in ordered:
            print(f"  {format_path(p)}")
        if classes:
            print("congruence classes:")
            for cls in classes:
                print(f"  {{{', '.join(format_path(p) for p in cls)}}}")
        else:
            print("congruence: identity")
    return EXIT_TRUE


def cmd_order(args) -> int:
    base_sig = None
    gens = ()
    if args.global_file:
        source = _load(args.global_file)
        base_sig = source.signature
        gens = source.congruence
    (small, large), sig = parse_term_inferring([args.smaller, args.larger], base_sig)
    budget = SearchBudget(args.max_states)
    universe = paths_of(small) | paths_of(large)
    gc = GlobalCongruence(gens, universe, sig)
    plain = leq_plain(small, large, sig, budget)
    star = leq_star(small, large, gc, sig, budget)
    if args.format == "machine":
        print(f"plain={'true' if plain is not None else 'false'}")
        print(f"star={'true' if star is not None else 'false'}")
        if plain is not None:
            print(f"witness.plain={format_deletion_seq(plain)}")
        if star is not None:
            print(f"witness.star={format_deletion_seq(star)}")
    else:
        t1, t2 = render_term(small), render_term(large)
        if plain is not None:
            print(f"{t1} <= {t2} in the deletion order via: {format_deletion_seq(plain) or '(empty)'}")
        else:
            print(f"{t1} is not below {t2} in the deletion order")
        if star is not None:
            print(
                f"{t1} <= {t2} in the restricted order via: {format_deletion_seq(star) or '(empty)'}"
            )
        else:
            print(f"{t1} is not below {t2} in the restricted order")
    return EXIT_TRUE if star is not None else EXIT_FALSE


def cmd_enum(args) -> int:
    source = _load(args.file)
    prog = source.program()
    ext = enumerate_extension(prog, args.pred, args.depth)
    ordered = sorted(ext, key=render_term)
    if args.format == "machine":
        print(f"terms.n={len(ordered)}")
        for i, t in enumerate(ordered, 1):
            print(f"term.{i}={render_term(t)}")
    else:
        print(f"{args.pred} contains {len(ordered)} ground terms up to depth {args.depth}")
        for t in ordered:
            print(f"  {render_term(t)}")
    return EXIT_TRUE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hornsets",
        description="Satisfiability and intersection of Horn-defined term-set predicates",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("pretty", "machine"), default="pretty", help="output format"
    )
    common.add_argument(
        "--max-states",
        type=int,
        default=SearchBudget().max_states,
        help="search state cap (exceeding it exits 3, never a wrong answer)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", parents=[common], help="check program side conditions")
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("sat", parents=[common], help="decide satisfiability of a goal")
    sp.add_argument("file")
    sp.add_argument("--goal", required=True, help="goal atom, e.g. 'p(s(X):Y)'")
    sp.add_argument("--witness", action="store_true", help="print a ground witness")
    sp.add_argument("--trace", action="store_true", help="print the derivation trace")
    sp.set_defaults(fn=cmd_sat)

    sp = sub.add_parser("intersect", parents=[common], help="build a conjunction predicate")
    sp.add_argument("file")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--out", help="write the extended program to this file")
    sp.set_defaults(fn=cmd_intersect)

    sp = sub.add_parser("bound", parents=[common], help="print the exponent bound set")
    sp.add_argument("file")
    sp.add_argument("--goal", required=True)
    sp.set_defaults(fn=cmd_bound)

    sp = sub.add_parser("repr", parents=[common], help="print paths and congruence of a term")
    sp.add_argument("term")
    sp.set_defaults(fn=cmd_repr)

    sp = sub.add_parser("order", parents=[common], help="decide the deletion orders")
    sp.add_argument("smaller")
    sp.add_argument("larger")
    sp.add_argument("--global", dest="global_file", help="program file providing the congruence")
    sp.set_defaults(fn=cmd_order)

    sp = sub.add_parser("enum", parents=[common], help="enumerate a predicate extension")
    sp.add_argument("file")
    sp.add_argument("--pred", required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.set_defaults(fn=cmd_enum)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        if args.format == "machine":
            print("ok=false")
            print("diagnostics.n=1")
            print("diagnostic.1.code=syntax")
            print(f"diagnostic.1.message={exc}")
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except InvalidProgramError as exc:
        _emit_diagnostics(exc.diagnostics, args.format)
        return EXIT_DIAGNOSTICS
    except (SignatureError, OutOfUniverseError, IntersectionIncoherentError) as exc:
        if args.format == "machine":
            print("ok=false")
            print("diagnostics.n=1")
            print("diagnostic.1.code=engine")
            print(f"diagnostic.1.message={exc}")
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except ResourceExhaustedError as exc:
        if args.format == "machine":
            print("result=resource-exhausted")
            print(f"message={exc}")
        else:
            print(f"resource exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED


if __name__ == "__main__":
    sys.exit(main())
