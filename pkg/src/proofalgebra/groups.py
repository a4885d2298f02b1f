"""Reduction calculus for finitely presented groups.

Atoms are binary group terms.  The one-step operators replace a single
subterm occurrence:

* ``ASS``: ``u*(v*w)`` <-> ``(u*v)*w``
* ``INV``: ``u*u^-1`` or ``u^-1*u`` -> ``1``
* ``ID``: ``u*1`` or ``1*u`` -> ``u``
* ``Rk``: an occurrence of the k-th relator -> ``1``

Each operator maps a reduction-expression ``x`` to the expressions
``{x} -> t`` where ``t`` is a one-step rewrite of ``root(x)``.
:func:`alg_normalize` strings such steps into a linear chain.

Term syntax: ``t := t "*" t | t "^-1" | "1" | ident | "?" ident | "(" t ")"``
with ``*`` left-associative and ``^-1`` binding tightest.  Identifiers are
generators; ``?u`` is a variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

from .core import Arrow, CanonSet, Leaf, ParseError, ProofExpr, format_expr, root
from .intensional import BUDGET_EXHAUSTED, FIXPOINT, Int, RuleFamily, union

__all__ = [
    "Gen",
    "GroupTerm",
    "Inv",
    "Mul",
    "Normalization",
    "OpenTermError",
    "Presentation",
    "Redex",
    "Step",
    "Unit",
    "Var",
    "alg_element",
    "alg_normalize",
    "ass_apply",
    "ass_element",
    "find_redexes",
    "format_term",
    "id_apply",
    "id_element",
    "inv_apply",
    "inv_element",
    "is_closed",
    "is_normal",
    "parse_presentation",
    "parse_term",
    "relator_apply",
    "relator_element",
    "rewrite",
    "rewrites",
    "trace_render",
]


class GroupTerm:
    __slots__ = ()

    def sort_key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other: GroupTerm) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_term(self)

    def __mul__(self, other: GroupTerm) -> Mul:
        return Mul(self, other)

    def inv(self) -> Inv:
        return Inv(self)


@dataclass(frozen=True)
class Unit(GroupTerm):
    def sort_key(self):
        return (2, 0)


@dataclass(frozen=True)
class Gen(GroupTerm):
    name: str

    def sort_key(self):
        return (2, 1, self.name)


@dataclass(frozen=True)
class Var(GroupTerm):
    name: str

    def sort_key(self):
        return (2, 2, self.name)


@dataclass(frozen=True)
class Inv(GroupTerm):
    arg: GroupTerm

    def sort_key(self):
        return (2, 3, self.arg.sort_key())


@dataclass(frozen=True)
class Mul(GroupTerm):
    left: GroupTerm
    right: GroupTerm

    def sort_key(self):
        return (2, 4, self.left.sort_key(), self.right.sort_key())


ONE = Unit()


def format_term(t: GroupTerm) -> str:
    if isinstance(t, Unit):
        return "1"
    if isinstance(t, Gen):
        return t.name
    if isinstance(t, Var):
        return "?" + t.name
    if isinstance(t, Inv):
        inner = format_term(t.arg)
        if isinstance(t.arg, Mul):
            inner = f"({inner})"
        return inner + "^-1"
    right = format_term(t.right)
    if isinstance(t.right, Mul):
        right = f"({right})"
    return f"{format_term(t.left)} * {right}"


_TERM_TOKEN = re.compile(
    r"(?P<mul>[*·])|(?P<inv>\^-1|⁻¹)|(?P<lp>\()|(?P<rp>\))|(?P<one>1)"
    r"|(?P<var>\?[A-Za-z_][A-Za-z0-9_']*)|(?P<id>[A-Za-z_][A-Za-z0-9_']*)"
)


class _TermParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos == len(text):
                break
            m = _TERM_TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
            self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise ParseError(
                f"expected {kind}, found {tok[1] or 'end of input'!r}", self.text, tok[2]
            )
        self.i += 1
        return tok

    def product(self) -> GroupTerm:
        t = self.postfix()
        while self.peek() == "mul":
            self.i += 1
            t = Mul(t, self.postfix())
        return t

    def postfix(self) -> GroupTerm:
        t = self.primary()
        while self.peek() == "inv":
            self.i += 1
            t = Inv(t)
        return t

    def primary(self) -> GroupTerm:
        kind, value, pos = self.tokens[self.i]
        self.i += 1
        if kind == "one":
            return ONE
        if kind == "id":
            return Gen(value)
        if kind == "var":
            return Var(value[1:])
        if kind == "lp":
            t = self.product()
            self.take("rp")
            return t
        raise ParseError(f"expected a term, found {value or 'end of input'!r}", self.text, pos)


def parse_term(text: str) -> GroupTerm:
    p = _TermParser(text)
    t = p.product()
    p.take("end")
    return t


def is_closed(t: GroupTerm) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Inv):
        return is_closed(t.arg)
    if isinstance(t, Mul):
        return is_closed(t.left) and is_closed(t.right)
    return True


def generators_of(t: GroupTerm) -> set[str]:
    if isinstance(t, Gen):
        return {t.name}
    if isinstance(t, Inv):
        return generators_of(t.arg)
    if isinstance(t, Mul):
        return generators_of(t.left) | generators_of(t.right)
    return set()


class OpenTermError(ValueError):
    """A term with variables was given where a closed term is required."""


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...] = ()
    relators: tuple[GroupTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        declared = set(self.generators)
        for k, r in enumerate(self.relators, 1):
            if not is_closed(r):
                raise PresentationError(f"relator {k} ({format_term(r)}) contains a variable")
            missing = generators_of(r) - declared
            if missing:
                raise PresentationError(
                    f"relator {k} uses undeclared generator(s) {', '.join(sorted(missing))}"
                )

    def check_term(self, t: GroupTerm) -> None:
        if not is_closed(t):
            raise OpenTermError(f"{format_term(t)} is not a closed term")
        if self.generators:
            missing = generators_of(t) - set(self.generators)
            if missing:
                raise PresentationError(
                    f"undeclared generator(s) {', '.join(sorted(missing))}"
                )


def parse_presentation(text: str) -> Presentation:
    """Read ``gens: g1 g2 ...`` and ``rel: <term>`` lines; ``#`` starts a comment."""
    gens: list[str] = []
    rels: list[GroupTerm] = []
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0]
        stripped = body.strip()
        if stripped:
            key, sep, rest = stripped.partition(":")
            start = offset + body.index(stripped) + len(key) + len(sep)
            key = key.strip()
            if not sep or key not in ("gens", "rel"):
                raise ParseError("expected 'gens:' or 'rel:'", text, offset + body.index(stripped))
            if key == "gens":
                for name in rest.split():
                    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
                        raise ParseError(f"invalid generator name {name!r}", text, start)
                    gens.append(name)
            else:
                try:
                    rels.append(parse_term(rest))
                except ParseError as exc:
                    raise ParseError(exc.message, text, start + exc.pos) from None
        offset += len(line)
    return Presentation(tuple(gens), tuple(rels))


# ---------------------------------------------------------------------------
# Positions and redexes

Path = tuple[int, ...]


def subterm(t: GroupTerm, path: Path) -> GroupTerm:
    for step in path:
        if isinstance(t, Mul):
            t = t.right if step else t.left
        elif isinstance(t, Inv) and step == 0:
            t = t.arg
        else:
            raise IndexError(f"no subterm at {path}")
    return t


def replace(t: GroupTerm, path: Path, new: GroupTerm) -> GroupTerm:
    if not path:
        return new
    head, rest = path[0], path[1:]
    if isinstance(t, Mul):
        if head:
            return Mul(t.left, replace(t.right, rest, new))
        return Mul(replace(t.left, rest, new), t.right)
    if isinstance(t, Inv) and head == 0:
        return Inv(replace(t.arg, rest, new))
    raise IndexError(f"no subterm at {path}")


def postorder(t: GroupTerm, path: Path = ()) -> Iterator[tuple[Path, GroupTerm]]:
    """All (path, subterm) pairs, children before parents, left before right."""
    if isinstance(t, Mul):
        yield from postorder(t.left, path + (0,))
        yield from postorder(t.right, path + (1,))
    elif isinstance(t, Inv):
        yield from postorder(t.arg, path + (0,))
    yield path, t


def _ass_l(t: GroupTerm) -> GroupTerm | None:
    if isinstance(t, Mul) and isinstance(t.right, Mul):
        return Mul(Mul(t.left, t.right.left), t.right.right)
    return None


def _ass_r(t: GroupTerm) -> GroupTerm | None:
    if isinstance(t, Mul) and isinstance(t.left, Mul):
        return Mul(t.left.left, Mul(t.left.right, t.right))
    return None


def _inv(t: GroupTerm) -> GroupTerm | None:
    if isinstance(t, Mul) and (t.right == Inv(t.left) or t.left == Inv(t.right)):
        return ONE
    return None


def _id(t: GroupTerm) -> GroupTerm | None:
    if isinstance(t, Mul):
        if t.right == ONE:
            return t.left
        if t.left == ONE:
            return t.right
    return None


_ROOT_RULES: dict[str, Callable[[GroupTerm], GroupTerm | None]] = {
    "ASS-L": _ass_l,
    "ASS-R": _ass_r,
    "INV": _inv,
    "ID": _id,
}

LABELS = {"ASS-L": "ASS", "ASS-R": "ASS", "INV": "INV", "ID": "ID"}


@dataclass(frozen=True)
class Redex:
    """A rewritable occurrence: where it is and which law applies.

    ``kind`` is ``ASS-L`` (``u*(v*w)`` to ``(u*v)*w``), ``ASS-R`` (the
    converse), ``INV``, ``ID`` or ``RELATOR``; ``index`` is the 0-based
    relator number for the last.
    """

    position: Path
    kind: str
    index: int | None = None

    @property
    def label(self) -> str:
        if self.kind == "RELATOR":
            return f"R{self.index + 1}"
        return LABELS[self.kind]


def _root_rewrite(t: GroupTerm, kind: str, relator: GroupTerm | None) -> GroupTerm | None:
    if kind == "RELATOR":
        return ONE if t == relator else None
    return _ROOT_RULES[kind](t)


def rewrite(t: GroupTerm, redex: Redex, relators: Sequence[GroupTerm] = ()) -> GroupTerm:
    """Apply ``redex`` to ``t``; raises ValueError if the pattern does not match."""
    sub = subterm(t, redex.position)
    rel = relators[redex.index] if redex.kind == "RELATOR" else None
    new = _root_rewrite(sub, redex.kind, rel)
    if new is None:
        raise ValueError(f"{redex} does not match {format_term(t)}")
    return replace(t, redex.position, new)


def find_redexes(
    t: GroupTerm, kinds: Sequence[str], relators: Sequence[GroupTerm] = ()
) -> list[Redex]:
    """Redexes of the given kinds, leftmost-innermost first."""
    found = []
    for path, sub in postorder(t):
        for kind in kinds:
            if kind == "RELATOR":
                for i, r in enumerate(relators):
                    if sub == r:
                        found.append(Redex(path, kind, i))
            elif _ROOT_RULES[kind](sub) is not None:
                found.append(Redex(path, kind))
    return found


def rewrites(t: GroupTerm, kinds: Sequence[str], relators: Sequence[GroupTerm] = ()) -> set:
    return {rewrite(t, r, relators) for r in find_redexes(t, kinds, relators)}


# ---------------------------------------------------------------------------
# Operators on reduction-expressions


def _extend(x: ProofExpr, terms) -> CanonSet:
    return CanonSet(Arrow((x,), Leaf(t)) for t in terms)


def _term_root(x: ProofExpr) -> GroupTerm | None:
    r = root(x)
    return r if isinstance(r, GroupTerm) else None


def _op(kinds: Sequence[str]):
    def op(x: ProofExpr) -> CanonSet:
        t = _term_root(x)
        return _extend(x, rewrites(t, kinds)) if t is not None else CanonSet()

    return op


ass_apply = _op(("ASS-L", "ASS-R"))
ass_apply.__doc__ = "All ``{x} -> t`` with ``t`` one reassociation of ``root(x)``."
inv_apply = _op(("INV",))
inv_apply.__doc__ = "All ``{x} -> t`` cancelling one ``u*u^-1`` or ``u^-1*u`` in ``root(x)``."
id_apply = _op(("ID",))
id_apply.__doc__ = "All ``{x} -> t`` dropping one unit factor of ``root(x)``."


def relator_apply(i: int, presentation: Presentation, x: ProofExpr) -> CanonSet:
    """All ``{x} -> t`` with one occurrence of relator ``i`` (0-based) replaced by 1."""
    if not 0 <= i < len(presentation.relators):
        raise IndexError(f"relator index {i} out of range")
    t = _term_root(x)
    if t is None:
        return CanonSet()
    rel = presentation.relators[i]
    return _extend(x, {replace(t, p, ONE) for p, sub in postorder(t) if sub == rel})


class ReductionFamily(RuleFamily):
    """Members ``{x} -> ({x} -> t)`` for every one-step rewrite ``t`` of ``root(x)``."""

    arity = 1

    def __init__(self, name: str, op: Callable[[ProofExpr], CanonSet]):
        self.name = name
        self.op = op

    def member(self, args, e):
        if not (isinstance(e, Arrow) and isinstance(e.body, Arrow)):
            return False
        if len(e.head) != 1 or e.body.head != e.head:
            return False
        return e.body in self.op(e.head.items[0])

    def saturate(self, args):
        (Y,) = args
        out = CanonSet()
        for y in Y:
            out = out | self.op(y)
        return out


def ass_element() -> Int:
    return Int(ReductionFamily("ASS", ass_apply))


def inv_element() -> Int:
    return Int(ReductionFamily("INV", inv_apply))


def id_element() -> Int:
    return Int(ReductionFamily("ID", id_apply))


def relator_element(i: int, presentation: Presentation) -> Int:
    if not 0 <= i < len(presentation.relators):
        raise IndexError(f"relator index {i} out of range")
    return Int(ReductionFamily(f"R{i + 1}", lambda x: relator_apply(i, presentation, x)))


def alg_element(presentation: Presentation):
    """The union of all one-step operators of ``presentation``."""
    parts = [ass_element(), inv_element(), id_element()]
    parts += [relator_element(i, presentation) for i in range(len(presentation.relators))]
    return union(*parts)


# ---------------------------------------------------------------------------
# Normalization strategy


@dataclass(frozen=True)
class Step:
    redex: Redex
    term: GroupTerm

    @property
    def label(self) -> str:
        return self.redex.label


@dataclass(frozen=True)
class Normalization:
    start: GroupTerm
    steps: tuple[Step, ...]
    status: str
    relators: tuple[GroupTerm, ...] = field(default=(), repr=False)

    @property
    def final(self) -> GroupTerm:
        return self.steps[-1].term if self.steps else self.start

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.steps]

    @cached_property
    def expr(self) -> ProofExpr:
        """The linear reduction-expression whose root is the final term."""
        x: ProofExpr = Leaf(self.start)
        for s in self.steps:
            x = Arrow((x,), Leaf(s.term))
        return x


def _spine(t: GroupTerm) -> list[GroupTerm]:
    factors = []
    while isinstance(t, Mul):
        factors.append(t.left)
        t = t.right
    factors.append(t)
    return factors


def _chains(t: GroupTerm, path: Path = ()) -> Iterator[Path]:
    """Paths of product chains, outermost first."""
    if isinstance(t, Mul):
        yield path
        k = 0
        while isinstance(t, Mul):
            yield from _chains(t.left, path + (1,) * k + (0,))
            t = t.right
            k += 1
        yield from _chains(t, path + (1,) * k)
    elif isinstance(t, Inv):
        yield from _chains(t.arg, path + (0,))


def _inverse_pair(a: GroupTerm, b: GroupTerm) -> bool:
    return b == Inv(a) or a == Inv(b)


class _Normalizer:
    def __init__(self, presentation: Presentation):
        self.relators = presentation.relators
        # relators are matched in their free normal form; trivial ones are dropped
        self.patterns: list[tuple[int, GroupTerm, list[GroupTerm]]] = []
        if self.relators:
            free = _Normalizer(Presentation())
            for i, r in enumerate(self.relators):
                t = r
                for _ in range(10_000):
                    nxt = free.next_steps(t)
                    if not nxt:
                        break
                    t = nxt[-1].term
                if t != ONE:
                    self.patterns.append((i, t, _spine(t)))
        self.pattern_terms = [p[1] for p in self.patterns]

    def _relator_redex(self, path: Path, sub: GroupTerm) -> Redex | None:
        for i, pat, _ in self.patterns:
            if sub == pat:
                return Redex(path, "RELATOR", i)
        return None

    def apply(self, t: GroupTerm, redex: Redex) -> Step:
        rels = self.relators
        if redex.kind == "RELATOR":
            rels = {i: pat for i, pat, _ in self.patterns}
        return Step(redex, rewrite(t, redex, rels))

    def next_steps(self, t: GroupTerm) -> list[Step]:
        """The next one or more steps, or [] if ``t`` is normal."""
        for path, sub in postorder(t):
            if _ass_r(sub) is not None:
                return [self.apply(t, Redex(path, "ASS-R"))]
        for path, sub in postorder(t):
            if _id(sub) is not None:
                return [self.apply(t, Redex(path, "ID"))]
            if _inv(sub) is not None:
                return [self.apply(t, Redex(path, "INV"))]
            redex = self._relator_redex(path, sub)
            if redex is not None:
                return [self.apply(t, redex)]
        return self._expose(t)

    def _expose(self, t: GroupTerm) -> list[Step]:
        # a cancellable block strictly inside a product chain: gather it into
        # one subterm by reassociating leftwards, delete it, drop the unit
        for path in _chains(t):
            factors = _spine(subterm(t, path))
            n = len(factors)
            for i in range(n - 2):
                block = None
                if _inverse_pair(factors[i], factors[i + 1]):
                    block = (2, Redex(path + (1,) * i + (0,), "INV"))
                else:
                    for k, _, pat in self.patterns:
                        m = len(pat)
                        if m >= 2 and i + m <= n - 1 and factors[i : i + m] == pat:
                            block = (m, Redex(path + (1,) * i + (0,), "RELATOR", k))
                            break
                if block is None:
                    continue
                m, delete = block
                steps = []
                for j in range(i + m - 2, i - 1, -1):
                    steps.append(self.apply(t, Redex(path + (1,) * j, "ASS-L")))
                    t = steps[-1].term
                steps.append(self.apply(t, delete))
                t = steps[-1].term
                steps.append(self.apply(t, Redex(path + (1,) * i, "ID")))
                return steps
        return []


def alg_normalize(presentation: Presentation, t: GroupTerm, budget: int = 10_000) -> Normalization:
    """Rewrite ``t`` to normal form, recording every step.

    The strategy first right-associates products, then applies the
    leftmost-innermost identity, inverse or relator redex.  When a cancellable
    pair or a relator occurrence sits strictly inside a product chain it is
    first gathered into a subterm with left reassociations.  At most
    ``budget`` steps are taken; the status reports whether normal form was
    reached.
    """
    presentation.check_term(t)
    normalizer = _Normalizer(presentation)
    steps: list[Step] = []
    current = t
    while True:
        nxt = normalizer.next_steps(current)
        if not nxt:
            status = FIXPOINT
            break
        if len(steps) + len(nxt) > budget:
            status = BUDGET_EXHAUSTED
            break
        steps.extend(nxt)
        current = nxt[-1].term
    return Normalization(t, tuple(steps), status, presentation.relators)


def is_normal(t: GroupTerm, presentation: Presentation = Presentation()) -> bool:
    """No unit, inverse or relator redex, and no left-nested product.

    Relators are checked both as written and in the reduced form the
    normalizer matches.
    """
    relators = set(presentation.relators)
    relators.update(_Normalizer(presentation).pattern_terms)
    for _, sub in postorder(t):
        if _ass_r(sub) is not None or _id(sub) is not None or _inv(sub) is not None:
            return False
        if sub in relators:
            return False
    return True


def trace_render(chain: Normalization, style: str = "maclane") -> str:
    if style == "tree":
        return format_expr(chain.expr)
    if style != "maclane":
        raise ValueError(f"unknown trace style {style!r}")
    labels = chain.labels
    if not labels:
        return "Anfang Th."
    parts = ["Anfang Th"] + [f"Sub ({l})" for l in labels[:-1]] + [f"Ende ({labels[-1]})"]
    return ", ".join(parts)
