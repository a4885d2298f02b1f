"""The combinators K and S, a compiler for applicative expressions, law checks.

``K = { {y} -> ({} -> y) }`` and

``S = { {t -> ({r1..rn} -> s)} -> ({s1 -> r1, ..., sn -> rn} -> (t | s1 | ... | sn -> s)) }``

over all proof-expressions.  Applied to finite sets they satisfy
``K.X.Y = X`` and ``S.X.Y.Z = (X.Z).(Y.Z)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

from .core import (
    EMPTY,
    Arrow,
    CanonSet,
    ParseError,
    ProofExpr,
    apply_fin,
    format_set,
    parse_identifier,
    parse_set,
)
from .intensional import Element, Ext, Int, RuleFamily
from .probes import Sampler, Universe, trial_rng

__all__ = [
    "App",
    "Const",
    "LawReport",
    "Param",
    "Phi",
    "check_laws",
    "compile_phi",
    "evaluate",
    "format_phi",
    "k_element",
    "parse_phi",
    "random_phi",
    "s_element",
    "staged_apply",
]


class KFamily(RuleFamily):
    name = "K"
    arity = 1

    def member(self, args, e):
        return (
            isinstance(e, Arrow)
            and isinstance(e.body, Arrow)
            and not e.body.head
            and len(e.head) == 1
            and e.head.items[0] is e.body.body
        )

    def saturate(self, args):
        (Y,) = args
        return CanonSet(Arrow(EMPTY, y) for y in Y)


def _s_match(a: ProofExpr, B: CanonSet, sigma: CanonSet, s: ProofExpr) -> bool:
    # a = tau -> (R -> s); B = {s_i -> r_i} with {r_i} = R; sigma = tau | U s_i
    if not (isinstance(a, Arrow) and isinstance(a.body, Arrow)) or a.body.body is not s:
        return False
    if not all(isinstance(b, Arrow) for b in B):
        return False
    if frozenset(b.body for b in B) != a.body.head.members:
        return False
    support = set(a.head.members)
    for b in B:
        support |= b.head.members
    return support == sigma.members


def _s_shape(e: ProofExpr):
    if isinstance(e, Arrow) and isinstance(e.body, Arrow):
        return e.head, e.body.head, e.body.body
    return None


class SFamily(RuleFamily):
    name = "S"
    arity = 2

    def member(self, args, e):
        if not args:
            if not isinstance(e, Arrow) or len(e.head) != 1:
                return False
            candidates: Iterable[ProofExpr] = e.head
            e = e.body
        else:
            candidates = args[0]
        shape = _s_shape(e)
        if shape is None:
            return False
        B, sigma, s = shape
        return any(_s_match(a, B, sigma, s) for a in candidates)

    def saturate(self, args):
        X, Y = args
        heads_by_body: dict[ProofExpr, list[frozenset]] = {}
        for y in Y:
            if isinstance(y, Arrow):
                heads_by_body.setdefault(y.body, []).append(y.head.members)
        out = set()
        for x in X:
            if not (isinstance(x, Arrow) and isinstance(x.body, Arrow)):
                continue
            supports = {x.head.members}
            for r in x.body.head:
                heads = heads_by_body.get(r)
                if not heads:
                    supports = set()
                    break
                choices = _unions(heads)
                supports = {a | c for a in supports for c in choices}
            for sigma in supports:
                out.add(Arrow(sigma, x.body.body))
        return CanonSet(out)


def _unions(sets: Sequence[frozenset]) -> set:
    """Unions of every nonempty subfamily of ``sets``."""
    out: set = set()
    for s in sets:
        out |= {s} | {s | u for u in out}
    return out


def k_element() -> Int:
    return Int(KFamily())


def s_element() -> Int:
    return Int(SFamily())


# ---------------------------------------------------------------------------
# Applicative expressions


@dataclass(frozen=True)
class Param:
    index: int


@dataclass(frozen=True)
class Const:
    value: CanonSet


@dataclass(frozen=True)
class App:
    fn: "AppExpr"
    arg: "AppExpr"


AppExpr = Union[Param, Const, App]


@dataclass(frozen=True)
class Phi:
    """An applicative expression over parameters ``X1 .. X{arity}``."""

    body: AppExpr
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be non-negative")
        for p in _params(self.body):
            if not 0 <= p.index < self.arity:
                raise ValueError(f"parameter X{p.index + 1} exceeds arity {self.arity}")

    def __str__(self) -> str:
        return format_phi(self.body)


def _params(t: AppExpr) -> Iterable[Param]:
    if isinstance(t, Param):
        yield t
    elif isinstance(t, App):
        yield from _params(t.fn)
        yield from _params(t.arg)


def format_phi(t: AppExpr | Phi) -> str:
    if isinstance(t, Phi):
        t = t.body
    if isinstance(t, Param):
        return f"X{t.index + 1}"
    if isinstance(t, Const):
        return format_set(t.value)
    arg = format_phi(t.arg)
    if isinstance(t.arg, App):
        arg = f"({arg})"
    return f"{format_phi(t.fn)} {arg}"


def parse_phi(
    text: str, arity: int, parse_atom: Callable[[str], object] = parse_identifier
) -> Phi:
    """Parse juxtaposition syntax such as ``(X1 X3) (X2 X3)`` or ``X1 {a}``."""
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def operand() -> AppExpr | None:
        nonlocal pos
        skip()
        if pos >= len(text):
            return None
        ch = text[pos]
        if ch == "(":
            start = pos
            pos += 1
            t = application()
            skip()
            if pos >= len(text) or text[pos] != ")":
                raise ParseError("expected ')'", text, pos)
            pos += 1
            if t is None:
                raise ParseError("empty parentheses", text, start)
            return t
        if ch == "{":
            start, depth = pos, 0
            while pos < len(text):
                depth += {"{": 1, "}": -1}.get(text[pos], 0)
                pos += 1
                if depth == 0:
                    break
            else:
                raise ParseError("unterminated set literal", text, start)
            try:
                return Const(parse_set(text[start:pos], parse_atom))
            except ParseError as exc:
                raise ParseError(exc.message, text, start + exc.pos) from None
        if ch == "X":
            start = pos
            pos += 1
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            digits = text[start + 1 : pos]
            if not digits or int(digits) == 0:
                raise ParseError("expected parameter X1, X2, ...", text, start)
            index = int(digits) - 1
            if index >= arity:
                raise ParseError(f"X{index + 1} exceeds arity {arity}", text, start)
            return Param(index)
        if ch == ")":
            return None
        raise ParseError(f"unexpected {ch!r}", text, pos)

    def application() -> AppExpr | None:
        t = operand()
        if t is None:
            return None
        while True:
            a = operand()
            if a is None:
                return t
            t = App(t, a)

    body = application()
    skip()
    if body is None:
        raise ParseError("expected an expression", text, pos)
    if pos != len(text):
        raise ParseError(f"unexpected {text[pos]!r}", text, pos)
    return Phi(body, arity)


def evaluate(phi: Phi, args: Sequence[CanonSet]) -> CanonSet:
    """Direct recursive evaluation, applying finite sets at every node."""
    if len(args) != phi.arity:
        raise ValueError(f"expected {phi.arity} arguments, got {len(args)}")

    def go(t: AppExpr) -> CanonSet:
        if isinstance(t, Param):
            return args[t.index]
        if isinstance(t, Const):
            return t.value
        return apply_fin(go(t.fn), go(t.arg))

    return go(phi.body)


# ---------------------------------------------------------------------------
# Compilation
#
# [phi] = { a1 -> (a2 -> ... (an -> m)) : m in phi(a1, ..., an) } over finite
# sets a_i, i.e. the iterated graph-model abstraction of phi.  The body is
# compiled to postfix code for a small stack machine; the element applies by
# running that code.

_PARAM, _CONST, _APPLY = 0, 1, 2


def _codegen(t: AppExpr, out: list) -> list:
    if isinstance(t, Param):
        out.append((_PARAM, t.index))
    elif isinstance(t, Const):
        out.append((_CONST, t.value))
    else:
        _codegen(t.fn, out)
        _codegen(t.arg, out)
        out.append((_APPLY, None))
    return out


def _run(code: Sequence[tuple], env: Sequence[CanonSet]) -> CanonSet:
    stack: list[CanonSet] = []
    for op, operand in code:
        if op == _PARAM:
            stack.append(env[operand])
        elif op == _CONST:
            stack.append(operand)
        else:
            arg = stack.pop()
            stack.append(apply_fin(stack.pop(), arg))
    (result,) = stack
    return result


class CompiledFamily(RuleFamily):
    def __init__(self, phi: Phi):
        self.phi = phi
        self.arity = phi.arity
        self.name = f"[{format_phi(phi)}]"
        self.code = tuple(_codegen(phi.body, []))

    def member(self, args, e):
        # membership after binding A1..Ak: peel the remaining abstractions;
        # since application is monotone, "some a_i inside A_i" reduces to A_i
        supports = list(args)
        for _ in range(self.arity - len(args)):
            if not isinstance(e, Arrow):
                return False
            supports.append(e.head)
            e = e.body
        return e in _run(self.code, supports)

    def saturate(self, args):
        return _run(self.code, args)


def compile_phi(phi: Phi) -> Element:
    """The element ``[phi]`` with ``[phi].X1...Xn = phi(X1, ..., Xn)``."""
    if phi.arity == 0:
        return Ext(evaluate(phi, ()))
    return Int(CompiledFamily(phi))


def staged_apply(X: Element, args: Iterable[CanonSet]) -> Element:
    for a in args:
        X = X.apply(a)
    return X


def random_phi(rng: random.Random, sampler: Sampler, max_arity: int = 3, max_depth: int = 3) -> Phi:
    arity = rng.randint(1, max_arity)

    def gen(depth: int) -> AppExpr:
        if depth == 0 or rng.random() < 0.3:
            if rng.random() < 0.8:
                return Param(rng.randrange(arity))
            return Const(sampler.set(2, rng.randint(0, 2)))
        return App(gen(depth - 1), gen(depth - 1))

    return Phi(gen(max_depth), arity)


# ---------------------------------------------------------------------------
# Law checking


@dataclass
class LawReport:
    law: str
    trials: int
    seed: int
    universe: Universe
    counterexamples: list[str] = field(default_factory=list)
    nontrivial: int = 0
    phi: str | None = None

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def render(self) -> str:
        lines = [
            f"law: {self.law}",
            f"trials: {self.trials}",
            f"seed: {self.seed}",
            f"universe: {self.universe.describe()}",
        ]
        if self.phi is not None:
            lines.append(f"phi: {self.phi}")
        lines += [
            f"nontrivial: {self.nontrivial}",
            f"counterexamples: {len(self.counterexamples)}",
        ]
        lines += [f"  {c}" for c in self.counterexamples[:10]]
        lines.append(f"result: {'HOLDS' if self.holds else 'VIOLATED'}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "trials": self.trials,
            "seed": self.seed,
            "universe": {
                "atoms": list(self.universe.atoms),
                "max_rank": self.universe.max_rank,
                "max_size": self.universe.max_size,
            },
            "phi": self.phi,
            "nontrivial": self.nontrivial,
            "counterexamples": self.counterexamples,
            "holds": self.holds,
        }


LAW_UNIVERSES = {
    "K": Universe(max_rank=3, max_size=4),
    "S": Universe(max_rank=3, max_size=3),
    "compile": Universe(max_rank=3, max_size=3),
}


def _final(X: Element) -> CanonSet:
    if not isinstance(X, Ext):
        raise AssertionError(f"expected a finite result, got {X!r}")
    return X.set


def check_laws(
    law: str,
    trials: int,
    seed: int = 0,
    phi: Phi | None = None,
    probes: int = 10,
    universe: Universe | None = None,
) -> LawReport:
    """Test ``K.X.Y = X``, ``S.X.Y.Z = (X.Z).(Y.Z)`` or ``[phi]`` against ``evaluate``.

    Each trial draws its sets from its own seeded substream.  For ``compile``
    without a fixed ``phi`` every trial draws a fresh expression and checks it
    on ``probes`` argument tuples.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if law not in LAW_UNIVERSES:
        raise ValueError(f"unknown law {law!r}")
    universe = universe or LAW_UNIVERSES[law]
    report = LawReport(law, trials, seed, universe, phi=None if phi is None else str(phi))
    K, S = k_element(), s_element()
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        sampler = Sampler(rng, universe)
        if law == "K":
            X, Y = sampler.set(), sampler.set()
            got = _final(K.apply(X).apply(Y))
            report.nontrivial += bool(got)
            if got != X:
                report.counterexamples.append(f"X={X} Y={Y}: K.X.Y={got}")
        elif law == "S":
            X, Y, Z = sampler.s_triple()
            got = _final(staged_apply(S, (X, Y, Z)))
            want = apply_fin(apply_fin(X, Z), apply_fin(Y, Z))
            report.nontrivial += bool(want)
            if got != want:
                report.counterexamples.append(
                    f"X={X} Y={Y} Z={Z}: S.X.Y.Z={got} but (X.Z).(Y.Z)={want}"
                )
        else:
            f = phi if phi is not None else random_phi(rng, sampler)
            compiled = compile_phi(f)
            hit = False
            for _ in range(probes):
                args = [sampler.set() for _ in range(f.arity)]
                got = _final(staged_apply(compiled, args))
                want = evaluate(f, args)
                hit = hit or bool(want)
                if got != want:
                    shown = ", ".join(map(str, args))
                    report.counterexamples.append(
                        f"phi={f} args=({shown}): compiled={got} eval={want}"
                    )
            report.nontrivial += hit
    return report
