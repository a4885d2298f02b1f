"""Command-line front end.

Exit codes: 0 success, 1 law violated or goal unprovable at fixpoint,
2 usage or parse error, 3 semantic error, 4 step budget exhausted.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from .combinators import (
    LAW_UNIVERSES,
    check_laws,
    compile_phi,
    evaluate,
    k_element,
    parse_phi,
    s_element,
    staged_apply,
)
from .core import (
    Arrow,
    CanonSet,
    Leaf,
    ParseError,
    ProofExpr,
    format_expr,
    format_set,
    parse_expr,
    parse_identifier,
    parse_set,
)
from .groups import (
    OpenTermError,
    Presentation,
    PresentationError,
    alg_normalize,
    ass_element,
    format_term,
    id_element,
    inv_element,
    parse_presentation,
    parse_term,
    trace_render,
)
from .intensional import BUDGET_EXHAUSTED, Element, Ext, InfiniteResultError, Int
from .probes import Sampler, Universe, trial_rng
from .proplogic import (
    format_formula,
    lift,
    modusponens_element,
    mp_constructor,
    parse_formula,
    provable,
    roots,
    theory,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SEMANTIC, EXIT_BUDGET = 0, 1, 2, 3, 4

ALPHABETS: dict[str, Callable[[str], object]] = {
    "plain": parse_identifier,
    "prop": parse_formula,
    "group": parse_term,
}

BUILTINS: dict[str, tuple[Callable[[], Element], str]] = {
    "K": (k_element, "plain"),
    "S": (s_element, "plain"),
    "MP": (mp_constructor, "prop"),
    "MODUSPONENS": (modusponens_element, "prop"),
    "ASS": (ass_element, "group"),
    "INV": (inv_element, "group"),
    "ID": (id_element, "group"),
}


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# JSON rendering


def expr_to_json(x: ProofExpr):
    if isinstance(x, Leaf):
        return {"atom": str(x.atom)}
    return {"head": set_to_json(x.head), "body": expr_to_json(x.body)}


def set_to_json(s: CanonSet) -> list:
    return [expr_to_json(e) for e in s]


def expr_from_json(data, parse_atom: Callable[[str], object] = parse_identifier) -> ProofExpr:
    if "atom" in data:
        return Leaf(parse_atom(data["atom"]))
    return Arrow(set_from_json(data["head"], parse_atom), expr_from_json(data["body"], parse_atom))


def set_from_json(data, parse_atom: Callable[[str], object] = parse_identifier) -> CanonSet:
    return CanonSet(expr_from_json(d, parse_atom) for d in data)


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


# ---------------------------------------------------------------------------
# Inputs


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}", EXIT_USAGE) from None


def _sources(inline: Sequence[str] | None, files: Sequence[str] | None, what: str) -> list[str]:
    inline = list(inline or [])
    files = list(files or [])
    if inline and files:
        raise CLIError(f"give {what} either inline or with --file, not both", EXIT_USAGE)
    return inline or [_read(f) for f in files]


def _parse(fn, text: str, *args):
    try:
        return fn(text.strip(), *args)
    except ParseError as exc:
        raise CLIError(f"parse error: {exc}", EXIT_USAGE) from None


def _element(text: str, parse_atom) -> Element:
    text = text.strip()
    if text.startswith("{"):
        return Ext(_parse(parse_set, text, parse_atom))
    name = text.upper()
    if name not in BUILTINS:
        raise CLIError(
            f"unknown builtin {text!r} (known: {', '.join(BUILTINS)})", EXIT_SEMANTIC
        )
    return BUILTINS[name][0]()


def _alphabet(args, operand: str | None = None) -> Callable[[str], object]:
    name = args.alphabet
    if name is None:
        name = "plain"
        if operand is not None and operand.strip().upper() in BUILTINS:
            name = BUILTINS[operand.strip().upper()][1]
    return ALPHABETS[name]


def _describe(X: Element) -> str:
    if isinstance(X, Int):
        return f"<intensional: {X.name} applied {len(X.args)} times>"
    return format_set(X.set)


# ---------------------------------------------------------------------------
# Commands


def cmd_parse(args, out) -> int:
    (text,) = _sources([args.expr] if args.expr else [], [args.file] if args.file else [], "the expression") or [""]
    parse_atom = _alphabet(args)
    text = text.strip()
    try:
        value = parse_expr(text, parse_atom)
        rendered, data = format_expr(value), expr_to_json(value)
    except ParseError as exc:
        if not text.startswith("{"):
            raise CLIError(f"parse error: {exc}", EXIT_USAGE) from None
        try:
            s = parse_set(text, parse_atom)
        except ParseError:
            raise CLIError(f"parse error: {exc}", EXIT_USAGE) from None
        rendered, data = format_set(s), set_to_json(s)
    out(_dump(data) if args.format == "json" else rendered)
    return EXIT_OK


def cmd_apply(args, out) -> int:
    operands = _sources(args.operands, args.file, "operands")
    if len(operands) < 2:
        raise CLIError("apply needs an element and at least one argument set", EXIT_USAGE)
    parse_atom = _alphabet(args, operands[0])
    X = _element(operands[0], parse_atom)
    for text in operands[1:]:
        X = X.apply(_parse(parse_set, text, parse_atom))
    if args.format == "json":
        if isinstance(X, Int):
            out(_dump({"intensional": {"name": X.name, "applied": len(X.args)}}))
        else:
            out(_dump({"result": set_to_json(X.set)}))
    else:
        out(_describe(X))
        if isinstance(X, Int):
            out("hint: probe membership with `proofalgebra member`")
    return EXIT_OK


def cmd_member(args, out) -> int:
    parse_atom = _alphabet(args, args.element)
    X = _element(args.element, parse_atom)
    for text in args.arg or []:
        X = X.apply(_parse(parse_set, text, parse_atom))
    e = _parse(parse_expr, args.expr, parse_atom)
    result = X.member(e)
    out(_dump({"member": result}) if args.format == "json" else str(result).lower())
    return EXIT_OK


def _axioms(text: str) -> CanonSet:
    text = text.strip()
    if text.startswith("{"):
        return _parse(parse_set, text, parse_formula)
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    return lift(_parse(parse_formula, l) for l in lines if l)


def _formulas(fs) -> str:
    return "{" + ", ".join(format_formula(f) for f in sorted(fs, key=lambda f: f.sort_key())) + "}"


def cmd_close(args, out) -> int:
    sources = _sources([args.axioms] if args.axioms is not None else [], [args.file] if args.file else [], "axioms")
    X = _axioms(sources[0] if sources else "")
    if args.steps < 0:
        raise CLIError("--steps must be non-negative", EXIT_USAGE)
    prune = not args.literal
    closure = theory(X, args.steps, prune=prune)
    data = {
        "status": closure.status,
        "rounds": closure.rounds,
        "roots": [format_formula(f) for f in sorted(roots(closure.result), key=lambda f: f.sort_key())],
    }
    lines = [
        f"status: {closure.status}",
        f"rounds: {closure.rounds}",
        f"roots: {_formulas(roots(closure.result))}",
    ]
    code = EXIT_BUDGET if closure.status == BUDGET_EXHAUSTED else EXIT_OK
    if args.goal is not None:
        goal = _parse(parse_formula, args.goal)
        axioms = [x.atom for x in X if isinstance(x, Leaf)]
        result = provable(axioms, goal, args.steps, prune=prune)
        if result.provable:
            verdict, code = "PROVABLE", EXIT_OK
            data["witness"] = format_expr(result.witness)
            lines += [verdict, f"witness: {format_expr(result.witness)}"]
        elif result.exhausted:
            verdict, code = "UNKNOWN", EXIT_BUDGET
            lines.append("UNKNOWN (budget exhausted)")
        else:
            verdict, code = "UNPROVABLE", EXIT_FAIL
            lines.append("UNPROVABLE")
        data["goal"] = format_formula(goal)
        data["verdict"] = verdict
    if args.format == "json":
        out(_dump(data))
    else:
        for line in lines:
            out(line)
    return code


def cmd_normalize(args, out) -> int:
    (term_text,) = _sources([args.term] if args.term else [], [args.file] if args.file else [], "the term") or [None]
    if term_text is None:
        raise CLIError("normalize needs --term or --file", EXIT_USAGE)
    presentation = Presentation()
    if args.presentation:
        presentation = _parse(parse_presentation, _read(args.presentation))
    t = _parse(parse_term, term_text)
    try:
        chain = alg_normalize(presentation, t, args.budget)
    except (OpenTermError, PresentationError) as exc:
        raise CLIError(str(exc), EXIT_SEMANTIC) from None
    if args.format == "json":
        out(_dump({
            "term": format_term(t),
            "final": format_term(chain.final),
            "status": chain.status,
            "trace": trace_render(chain, "maclane"),
            "steps": [{"label": s.label, "term": format_term(s.term)} for s in chain.steps],
        }))
    else:
        out(format_term(chain.final))
        if args.trace != "none":
            out(trace_render(chain, args.trace))
        if chain.status == BUDGET_EXHAUSTED:
            out(f"status: {chain.status}")
    return EXIT_BUDGET if chain.status == BUDGET_EXHAUSTED else EXIT_OK


def cmd_compile(args, out) -> int:
    parse_atom = ALPHABETS[args.alphabet or "plain"]
    if args.arity < 0:
        raise CLIError("--arity must be non-negative", EXIT_USAGE)
    phi = _parse(parse_phi, args.body, args.arity, parse_atom)
    compiled = compile_phi(phi)
    if args.probe:
        probes = []
        for row in args.probe:
            if len(row) != phi.arity:
                raise CLIError(f"each --probe needs {phi.arity} sets, got {len(row)}", EXIT_USAGE)
            probes.append([_parse(parse_set, s, parse_atom) for s in row])
    else:
        sampler = Sampler(trial_rng(args.seed, 0), Universe(max_rank=2, max_size=2))
        probes = [[sampler.set() for _ in range(phi.arity)] for _ in range(args.probes)]
    reference = BUILTINS[args.against][0]() if args.against else None
    rows, agree = [], True
    for row in probes:
        got = staged_apply(compiled, row)
        want = evaluate(phi, row)
        entry = {
            "args": [set_to_json(s) for s in row],
            "result": set_to_json(got.set),
            "eval": set_to_json(want),
        }
        ok = got.set == want
        ref = None
        if reference is not None:
            ref = staged_apply(reference, row)
            if not isinstance(ref, Ext):
                raise CLIError(f"{args.against} is not saturated by {phi.arity} arguments", EXIT_SEMANTIC)
            entry[args.against] = set_to_json(ref.set)
            ok = ok and ref.set == got.set
        entry["agree"] = ok
        agree = agree and ok
        rows.append(entry)
        text = f"({', '.join(format_set(s) for s in row)}) -> {format_set(got.set)}"
        if ref is not None:
            text += f"  {args.against}: {format_set(ref.set)}"
        if not ok:
            text += "  MISMATCH"
        rows[-1]["text"] = text
    if args.format == "json":
        out(_dump({"element": f"[{phi}]", "arity": phi.arity, "probes": [
            {k: v for k, v in r.items() if k != "text"} for r in rows
        ], "agree": agree}))
    else:
        out(f"element: [{phi}] arity {phi.arity}")
        for r in rows:
            out(r["text"])
    return EXIT_OK if agree else EXIT_FAIL


def cmd_check_laws(args, out) -> int:
    if args.trials < 1:
        raise CLIError("--trials must be at least 1", EXIT_USAGE)
    phi = None
    if args.body is not None:
        if args.law != "compile":
            raise CLIError("--body only applies to --law compile", EXIT_USAGE)
        phi = _parse(parse_phi, args.body, args.arity)
    report = check_laws(args.law, args.trials, args.seed, phi=phi, probes=args.probes)
    out(_dump(report.to_json()) if args.format == "json" else report.render())
    return EXIT_OK if report.holds else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="proofalgebra", description="Algebra of proof-expressions: application, closure, normalization, combinators."
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and pretty-print an expression or set")
    p.add_argument("expr", nargs="?")
    p.add_argument("--file")
    p.add_argument("--alphabet", choices=tuple(ALPHABETS))
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("apply", parents=[common], help="apply an element to finite sets in turn")
    p.add_argument("operands", nargs="*", help="element (set or builtin K, S, MP, ...) then argument sets")
    p.add_argument("--file", action="append")
    p.add_argument("--alphabet", choices=tuple(ALPHABETS))
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("member", parents=[common], help="test membership in an element")
    p.add_argument("element")
    p.add_argument("expr")
    p.add_argument("--arg", action="append", help="finite set applied to the element first")
    p.add_argument("--alphabet", choices=tuple(ALPHABETS))
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("close", parents=[common], help="close axioms under modus ponens")
    p.add_argument("axioms", nargs="?", help="formula set, e.g. '{p, p=>q}'")
    p.add_argument("--file", help="axiom file: a set literal or one formula per line")
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--goal")
    p.add_argument("--literal", action="store_true", help="keep every proof, not one per formula")
    p.set_defaults(func=cmd_close)

    p = sub.add_parser("normalize", parents=[common], help="normalize a group term")
    p.add_argument("--term")
    p.add_argument("--file")
    p.add_argument("--presentation")
    p.add_argument("--trace", choices=("maclane", "tree", "none"), default="maclane")
    p.add_argument("--budget", type=int, default=10_000)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("compile", parents=[common], help="compile an applicative expression and probe it")
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--body", required=True)
    p.add_argument("--probe", nargs="+", action="append", metavar="SET")
    p.add_argument("--probes", type=int, default=5, help="random probes when none are given")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--against", choices=("K", "S"))
    p.add_argument("--alphabet", choices=tuple(ALPHABETS))
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("check-laws", parents=[common], help="randomized combinator law checks")
    p.add_argument("--law", choices=tuple(LAW_UNIVERSES), required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probes", type=int, default=10)
    p.add_argument("--arity", type=int, default=0)
    p.add_argument("--body")
    p.set_defaults(func=cmd_check_laws)
    return parser


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def out(line: str) -> None:
        print(line, file=stdout)

    try:
        return args.func(args, out)
    except CLIError as exc:
        print(f"proofalgebra {args.command}: {exc}", file=stderr)
        return exc.code
    except InfiniteResultError as exc:
        print(f"proofalgebra {args.command}: {exc}", file=stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
