"""Propositional formulas as atoms, modus ponens as rule and as proof-constructor.

Formula syntax (loosest to tightest)::

    f := f "=>" f      right-associative
       | f "|" f       left-associative
       | f "&" f       left-associative
       | "~" f
       | "(" f ")" | ident

``=>`` is material implication; the proof arrow ``->`` is a separate token and
never appears inside a formula.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .core import Arrow, CanonSet, Leaf, ParseError, ProofExpr, root
from .intensional import BUDGET_EXHAUSTED, Closure, Int, RuleFamily, close

__all__ = [
    "And",
    "Formula",
    "Implies",
    "Not",
    "Or",
    "Provability",
    "Var",
    "format_formula",
    "lift",
    "modusponens_element",
    "mp_constructor",
    "parse_formula",
    "provable",
    "roots",
    "theory",
    "witness_is_sound",
]


class Formula:
    __slots__ = ()

    def sort_key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other: Formula) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def sort_key(self):
        return (1, 0, self.name)


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def sort_key(self):
        return (1, 1, self.arg.sort_key())


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def sort_key(self):
        return (1, 2, self.left.sort_key(), self.right.sort_key())


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def sort_key(self):
        return (1, 3, self.left.sort_key(), self.right.sort_key())


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def sort_key(self):
        return (1, 4, self.left.sort_key(), self.right.sort_key())


# binding strength, higher binds tighter
_PREC = {Implies: 1, Or: 2, And: 3, Not: 4, Var: 5}
_OPS = {Implies: "=>", Or: "|", And: "&"}


def format_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        inner = format_formula(f.arg)
        if _PREC[type(f.arg)] < _PREC[Not]:
            inner = f"({inner})"
        return "~" + inner
    prec = _PREC[type(f)]
    left = format_formula(f.left)
    right = format_formula(f.right)
    if isinstance(f, Implies):
        # right-associative: parenthesize a left operand of equal strength
        if _PREC[type(f.left)] <= prec:
            left = f"({left})"
        if _PREC[type(f.right)] < prec:
            right = f"({right})"
    else:
        if _PREC[type(f.left)] < prec:
            left = f"({left})"
        if _PREC[type(f.right)] <= prec:
            right = f"({right})"
    return f"{left} {_OPS[type(f)]} {right}"


_TOKEN = re.compile(r"\s*(?:(=>|⊃)|([|∨])|([&∧])|([~¬])|(\()|(\))|([A-Za-z_][A-Za-z0-9_']*))")


class _FormulaParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        kinds = ("=>", "|", "&", "~", "(", ")", "id")
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos == len(text):
                break
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
            for kind, value in zip(kinds, m.groups()):
                if value is not None:
                    self.tokens.append((kind, value, m.start(m.lastindex)))
                    break
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r}, found {found!r}", self.text, tok[2])
        self.i += 1
        return tok

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "=>":
            self.i += 1
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.i += 1
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind = self.peek()
        if kind == "~":
            self.i += 1
            return Not(self.unary())
        if kind == "(":
            self.i += 1
            f = self.implication()
            self.take(")")
            return f
        return Var(self.take("id")[1])


def parse_formula(text: str) -> Formula:
    p = _FormulaParser(text)
    f = p.implication()
    p.take("end")
    return f


# ---------------------------------------------------------------------------
# Rule families


class ModusPonens(RuleFamily):
    """All ``{a => b, a} -> b`` over formula leaves."""

    name = "MODUSPONENS"
    arity = 1

    def member(self, args, e):
        if not (isinstance(e, Arrow) and isinstance(e.body, Leaf)):
            return False
        if len(e.head) != 2 or not all(isinstance(h, Leaf) for h in e.head):
            return False
        f, g = (h.atom for h in e.head)
        b = e.body.atom
        return Implies(f, b) == g or Implies(g, b) == f

    def saturate(self, args):
        (Y,) = args
        return CanonSet(
            Leaf(y.atom.right)
            for y in Y
            if isinstance(y, Leaf)
            and isinstance(y.atom, Implies)
            and Leaf(y.atom.left) in Y
        )


class MPConstructor(RuleFamily):
    """All ``{x, y} -> ({x, y} -> b)`` where x proves ``a => b`` and y proves ``a``."""

    name = "MP"
    arity = 1

    def member(self, args, e):
        if not (isinstance(e, Arrow) and isinstance(e.body, Arrow)):
            return False
        inner = e.body
        if inner.head != e.head or not isinstance(inner.body, Leaf) or len(e.head) != 2:
            return False
        x, y = e.head
        b = inner.body.atom
        rx, ry = root(x), root(y)
        return Implies(ry, b) == rx or Implies(rx, b) == ry

    def saturate(self, args):
        (Y,) = args
        return CanonSet(_mp_step(Y))


def _mp_step(Y: Iterable[ProofExpr]):
    by_root: dict[object, list[ProofExpr]] = {}
    for y in Y:
        by_root.setdefault(root(y), []).append(y)
    for f, majors in by_root.items():
        if not isinstance(f, Implies):
            continue
        minors = by_root.get(f.left)
        if not minors:
            continue
        conclusion = Leaf(f.right)
        for x in majors:
            for y in minors:
                yield Arrow((x, y), conclusion)


def modusponens_element() -> Int:
    return Int(ModusPonens())


def mp_constructor() -> Int:
    return Int(MPConstructor())


# ---------------------------------------------------------------------------
# Theories


def lift(formulas: Iterable[Formula]) -> CanonSet:
    return CanonSet(Leaf(f) for f in formulas)


def roots(X: Iterable[ProofExpr]) -> frozenset:
    return frozenset(root(x) for x in X)


def _first_proofs(current: CanonSet, produced: CanonSet) -> CanonSet:
    # keep one proof per newly reached formula: the smallest by (rank, order)
    known = roots(current)
    best: dict[object, ProofExpr] = {}
    for x in produced:
        r = root(x)
        if r in known:
            continue
        if r not in best or (x.rank, x.key) < (best[r].rank, best[r].key):
            best[r] = x
    return CanonSet(best.values())


def theory(X: CanonSet, budget: int = 32, prune: bool = True) -> Closure:
    """Close ``X`` under the MP proof-constructor.

    With ``prune`` (the default) each round only adds a proof for formulas not
    yet proven, which keeps the iterates finite when the axioms contain
    cycles such as ``p => p``.  ``prune=False`` runs the literal iteration,
    whose proof set grows without bound on such inputs.
    """
    select = _first_proofs if prune else None
    return close(mp_constructor(), X, budget, select=select)


@dataclass(frozen=True)
class Provability:
    provable: bool
    witness: ProofExpr | None
    status: str
    rounds: int

    @property
    def exhausted(self) -> bool:
        return not self.provable and self.status == BUDGET_EXHAUSTED


def provable(
    axioms: Iterable[Formula], goal: Formula, budget: int = 32, prune: bool = True
) -> Provability:
    closure = theory(lift(axioms), budget, prune=prune)
    proofs = [x for x in closure.result if root(x) == goal]
    if not proofs:
        return Provability(False, None, closure.status, closure.rounds)
    witness = min(proofs, key=lambda x: (x.rank, x.key))
    return Provability(True, witness, closure.status, closure.rounds)


def witness_is_sound(x: ProofExpr, axioms: Iterable[Formula] | None = None) -> bool:
    """Check every arrow of ``x`` is a modus ponens step ``{maj, min} -> b``.

    With ``axioms`` given, leaves must also be among them.
    """
    allowed = None if axioms is None else frozenset(axioms)
    stack = [x]
    while stack:
        e = stack.pop()
        if isinstance(e, Leaf):
            if allowed is not None and e.atom not in allowed:
                return False
            continue
        if not isinstance(e.body, Leaf) or len(e.head) != 2:
            return False
        p, q = e.head
        b = e.body.atom
        rp, rq = root(p), root(q)
        if Implies(rq, b) != rp and Implies(rp, b) != rq:
            return False
        stack.extend(e.head)
    return True

