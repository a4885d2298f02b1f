"""Proof-expressions, canonical finite sets, and application between them.

A proof-expression is either a leaf carrying an alphabet element (an atom) or
an arrow ``head -> body`` whose head is a finite set of proof-expressions.
Expressions are hash-consed: structurally equal expressions are the same
Python object, so equality and hashing are identity-based and cheap.

Atoms may be plain identifiers (``str``) or any hashable object exposing a
``sort_key()`` tuple and a ``__str__`` rendering; :mod:`proofalgebra.proplogic`
and :mod:`proofalgebra.groups` supply the two built-in alphabets.
"""

from __future__ import annotations

import re
import weakref
from itertools import chain
from typing import Callable, Iterable, Iterator

__all__ = [
    "Arrow",
    "CanonSet",
    "EMPTY",
    "Leaf",
    "ParseError",
    "ProofExpr",
    "apply_fin",
    "arrow",
    "atom_key",
    "canonicalize",
    "format_expr",
    "format_set",
    "leaf",
    "parse_expr",
    "parse_identifier",
    "parse_set",
    "rank",
    "root",
]


class ParseError(ValueError):
    """Malformed input text; carries the 0-based offset of the problem."""

    def __init__(self, message: str, text: str, pos: int):
        self.message = message
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.column}")


def atom_key(atom) -> tuple:
    if isinstance(atom, str):
        return (0, atom)
    return atom.sort_key()


class ProofExpr:
    """Base class of the two expression shapes. Do not instantiate directly."""

    __slots__ = ("key", "rank", "__weakref__")

    def __lt__(self, other: ProofExpr) -> bool:
        return self.key < other.key

    def __le__(self, other: ProofExpr) -> bool:
        return self.key <= other.key

    def __gt__(self, other: ProofExpr) -> bool:
        return self.key > other.key

    def __ge__(self, other: ProofExpr) -> bool:
        return self.key >= other.key

    def __str__(self) -> str:
        return format_expr(self)


_leaves: "weakref.WeakValueDictionary[object, Leaf]" = weakref.WeakValueDictionary()
_arrows: "weakref.WeakValueDictionary[tuple, Arrow]" = weakref.WeakValueDictionary()


class Leaf(ProofExpr):
    __slots__ = ("atom",)

    def __new__(cls, atom) -> Leaf:
        self = _leaves.get(atom)
        if self is None:
            self = object.__new__(cls)
            self.atom = atom
            self.key = (0, atom_key(atom))
            self.rank = 0
            self = _leaves.setdefault(atom, self)
        return self

    def __reduce__(self):
        return (Leaf, (self.atom,))

    def __repr__(self) -> str:
        return f"Leaf({self.atom!r})"


class Arrow(ProofExpr):
    __slots__ = ("head", "body")

    def __new__(cls, head: CanonSet | Iterable[ProofExpr], body: ProofExpr) -> Arrow:
        if not isinstance(head, CanonSet):
            head = CanonSet(head)
        if not isinstance(body, ProofExpr):
            raise TypeError(f"arrow body must be a ProofExpr, got {body!r}")
        ident = (head.items, body)
        self = _arrows.get(ident)
        if self is None:
            self = object.__new__(cls)
            self.head = head
            self.body = body
            self.key = (1, tuple(e.key for e in head.items), body.key)
            self.rank = 1 + max(chain((e.rank for e in head.items), (body.rank,)))
            self = _arrows.setdefault(ident, self)
        return self

    def __reduce__(self):
        return (Arrow, (self.head, self.body))

    def __repr__(self) -> str:
        return f"Arrow({format_set(self.head)}, {format_expr(self.body)})"


leaf = Leaf


def arrow(head: Iterable[ProofExpr], body: ProofExpr) -> Arrow:
    return Arrow(head, body)


class CanonSet:
    """A finite, duplicate-free set of proof-expressions in canonical order.

    Iteration yields the elements sorted by the global expression order, so two
    sets are equal exactly when their element sequences are identical.
    """

    __slots__ = ("items", "_members", "_hash")

    def __init__(self, elements: Iterable[ProofExpr] = ()):
        members = frozenset(elements)
        for e in members:
            if not isinstance(e, ProofExpr):
                raise TypeError(f"not a proof-expression: {e!r}")
        self._members = members
        self.items: tuple[ProofExpr, ...] = tuple(sorted(members, key=_key))
        self._hash = hash(self.items)

    def __reduce__(self):
        return (CanonSet, (self.items,))

    @classmethod
    def of(cls, *elements: ProofExpr) -> CanonSet:
        return cls(elements)

    def __iter__(self) -> Iterator[ProofExpr]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, e: object) -> bool:
        return e in self._members

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CanonSet):
            return NotImplemented
        return self._hash == other._hash and self.items == other.items

    def __hash__(self) -> int:
        return self._hash

    def __le__(self, other: CanonSet) -> bool:
        return self._members <= other._members

    def __ge__(self, other: CanonSet) -> bool:
        return self._members >= other._members

    def __or__(self, other: CanonSet) -> CanonSet:
        if self._members >= other._members:
            return self
        return CanonSet(self._members | other._members)

    def __and__(self, other: CanonSet) -> CanonSet:
        return CanonSet(self._members & other._members)

    def __sub__(self, other: CanonSet) -> CanonSet:
        return CanonSet(self._members - other._members)

    def issubset(self, other: CanonSet) -> bool:
        return self._members <= other._members

    @property
    def members(self) -> frozenset:
        return self._members

    def __repr__(self) -> str:
        return f"CanonSet({format_set(self)})"

    def __str__(self) -> str:
        return format_set(self)


def _key(e: ProofExpr) -> tuple:
    return e.key


EMPTY = CanonSet()


def canonicalize(raw: Iterable[ProofExpr]) -> CanonSet:
    if isinstance(raw, CanonSet):
        return raw
    return CanonSet(raw)


def root(x: ProofExpr):
    """The atom at the end of the body chain: the statement ``x`` proves."""
    while isinstance(x, Arrow):
        x = x.body
    return x.atom


def rank(x: ProofExpr) -> int:
    return x.rank


def apply_fin(X: CanonSet, Y: CanonSet) -> CanonSet:
    """``X . Y``: bodies of the arrows in X whose whole head lies inside Y."""
    ys = Y.members
    return CanonSet(
        e.body for e in X.items if isinstance(e, Arrow) and e.head.members <= ys
    )


# ---------------------------------------------------------------------------
# Text syntax
#
#   expr := atom | set "->" expr | "(" expr ")"
#   set  := "{" [expr ("," expr)*] "}"
#
# Parentheses are accepted for readability and never emitted.

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def parse_identifier(text: str) -> str:
    name = text.strip()
    if not _IDENT.match(name):
        raise ParseError(f"invalid atom {name!r}", text, 0)
    return name


def format_expr(x: ProofExpr) -> str:
    if isinstance(x, Leaf):
        return str(x.atom)
    return f"{format_set(x.head)}->{format_expr(x.body)}"


def format_set(s: Iterable[ProofExpr]) -> str:
    return "{" + ", ".join(format_expr(e) for e in s) + "}"


class _ExprParser:
    def __init__(self, text: str, parse_atom: Callable[[str], object]):
        self.text = text
        self.pos = 0
        self.parse_atom = parse_atom

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, self.text, self.pos if pos is None else pos)

    def skip(self) -> None:
        text = self.text
        while self.pos < len(text) and text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos : self.pos + 1]

    def expect(self, token: str) -> None:
        self.skip()
        if not self.text.startswith(token, self.pos):
            found = self.text[self.pos : self.pos + 1] or "end of input"
            raise self.error(f"expected {token!r}, found {found!r}")
        self.pos += len(token)

    def expr(self) -> ProofExpr:
        ch = self.peek()
        if ch == "{":
            head = self.set()
            self.expect("->")
            return Arrow(head, self.expr())
        if ch == "(" and self._grouping():
            self.pos += 1
            x = self.expr()
            self.expect(")")
            return x
        return self.atom()

    def _grouping(self) -> bool:
        # "(" opens a grouped arrow only if a "{" follows; otherwise it
        # belongs to the atom syntax (formulas and group terms use parens)
        i = self.pos + 1
        text = self.text
        while i < len(text) and (text[i].isspace() or text[i] == "("):
            i += 1
        return text.startswith("{", i)

    def set(self) -> CanonSet:
        self.expect("{")
        items = []
        if self.peek() == "}":
            self.pos += 1
            return EMPTY
        while True:
            items.append(self.expr())
            self.skip()
            ch = self.peek()
            if ch == ",":
                self.pos += 1
            elif ch == "}":
                self.pos += 1
                return CanonSet(items)
            else:
                raise self.error(f"expected ',' or '}}', found {ch or 'end of input'!r}")

    def atom(self) -> Leaf:
        self.skip()
        start = self.pos
        text = self.text
        end = start
        depth = 0
        while end < len(text) and text[end] not in "{},":
            if text.startswith("->", end):
                break
            if text[end] == "(":
                depth += 1
            elif text[end] == ")":
                if depth == 0:
                    break
                depth -= 1
            end += 1
        chunk = text[start:end]
        if not chunk.strip():
            raise self.error("expected expression", start)
        try:
            value = self.parse_atom(chunk)
        except ParseError as exc:
            raise ParseError(exc.message, text, start + exc.pos) from None
        self.pos = end
        return Leaf(value)

    def finish(self) -> None:
        self.skip()
        if self.pos != len(self.text):
            raise self.error(f"unexpected {self.text[self.pos:self.pos + 2]!r}")


def parse_expr(text: str, parse_atom: Callable[[str], object] = parse_identifier) -> ProofExpr:
    p = _ExprParser(text, parse_atom)
    x = p.expr()
    p.finish()
    return x


def parse_set(text: str, parse_atom: Callable[[str], object] = parse_identifier) -> CanonSet:
    p = _ExprParser(text, parse_atom)
    s = p.set()
    p.finish()
    return s
