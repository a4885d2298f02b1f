"""Algebra elements that may be infinite.

An element is either extensional (an explicit :class:`~proofalgebra.core.CanonSet`)
or intensional: a rule family together with the finite arguments already
applied to it.  Rule families decide membership and know how to apply
themselves to a finite set.  After ``arity`` finite arguments every family
yields an extensional result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .core import EMPTY, CanonSet, ProofExpr, apply_fin

__all__ = [
    "BUDGET_EXHAUSTED",
    "FIXPOINT",
    "Closure",
    "Element",
    "Ext",
    "InfiniteResultError",
    "Int",
    "RuleFamily",
    "UnionFamily",
    "apply",
    "close",
    "member",
    "union",
]

FIXPOINT = "fixpoint"
BUDGET_EXHAUSTED = "budget-exhausted"


class InfiniteResultError(ValueError):
    """An application that was required to be finite produced an infinite set."""


class Element:
    """Base class for algebra elements."""

    __slots__ = ()

    def apply(self, Y: CanonSet) -> Element:
        raise NotImplementedError

    def member(self, e: ProofExpr) -> bool:
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return isinstance(self, Ext)


class Ext(Element):
    __slots__ = ("set",)

    def __init__(self, s: CanonSet | Iterable[ProofExpr]):
        self.set = s if isinstance(s, CanonSet) else CanonSet(s)

    def apply(self, Y: CanonSet) -> Element:
        return Ext(apply_fin(self.set, Y))

    def member(self, e: ProofExpr) -> bool:
        return e in self.set

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ext) and other.set == self.set

    def __hash__(self) -> int:
        return hash(self.set)

    def __repr__(self) -> str:
        return f"Ext({self.set})"


class RuleFamily:
    """A schema describing a (possibly infinite) set of proof-expressions.

    Subclasses set ``name`` and ``arity`` and implement :meth:`member`.  The
    default :meth:`step` accumulates arguments until ``arity`` of them are
    bound, then calls :meth:`saturate`, which must return the finite result.
    """

    name: str = "?"
    arity: int = 1

    def member(self, args: tuple[CanonSet, ...], e: ProofExpr) -> bool:
        raise NotImplementedError

    def saturate(self, args: tuple[CanonSet, ...]) -> CanonSet:
        raise NotImplementedError

    def step(self, args: tuple[CanonSet, ...], Y: CanonSet) -> Element:
        args = args + (Y,)
        if len(args) < self.arity:
            return Int(self, args)
        return Ext(self.saturate(args))

    def __repr__(self) -> str:
        return f"<rule family {self.name}>"


class Int(Element):
    __slots__ = ("family", "args")

    def __init__(self, family: RuleFamily, args: tuple[CanonSet, ...] = ()):
        self.family = family
        self.args = tuple(args)

    @property
    def name(self) -> str:
        return self.family.name

    @property
    def remaining(self) -> int:
        """Finite arguments still needed before the result is extensional."""
        return max(self.family.arity - len(self.args), 0)

    def apply(self, Y: CanonSet) -> Element:
        return self.family.step(self.args, Y)

    def member(self, e: ProofExpr) -> bool:
        return self.family.member(self.args, e)

    def __repr__(self) -> str:
        return f"<intensional: {self.name} applied {len(self.args)} times>"


class UnionFamily(RuleFamily):
    def __init__(self, parts: Iterable[Element]):
        self.parts = tuple(parts)
        self.name = " | ".join(_element_name(p) for p in self.parts)
        self.arity = max(
            (p.remaining if isinstance(p, Int) else 0 for p in self.parts), default=0
        )

    def member(self, args, e):
        return any(p.member(e) for p in self.parts)

    def step(self, args, Y):
        return union(*(p.apply(Y) for p in self.parts))


def _element_name(x: Element) -> str:
    if isinstance(x, Int):
        return x.name if not x.args else f"{x.name}.{len(x.args)}"
    return str(x.set)


def apply(X: Element, Y: CanonSet | Iterable[ProofExpr]) -> Element:
    if not isinstance(Y, CanonSet):
        Y = CanonSet(Y)
    return X.apply(Y)


def member(X: Element, e: ProofExpr) -> bool:
    return X.member(e)


def union(*elements: Element) -> Element:
    """Set union of elements; extensional parts are merged eagerly."""
    finite = EMPTY
    rest: list[Element] = []
    for x in elements:
        if isinstance(x, Ext):
            finite = finite | x.set
        elif isinstance(x, Int) and isinstance(x.family, UnionFamily):
            for p in x.family.parts:
                if isinstance(p, Ext):
                    finite = finite | p.set
                else:
                    rest.append(p)
        else:
            rest.append(x)
    if not rest:
        return Ext(finite)
    if finite:
        rest.insert(0, Ext(finite))
    if len(rest) == 1:
        return rest[0]
    return Int(UnionFamily(rest))


@dataclass(frozen=True)
class Closure:
    result: CanonSet
    status: str
    rounds: int

    @property
    def at_fixpoint(self) -> bool:
        return self.status == FIXPOINT


def close(
    F: Element,
    X0: CanonSet,
    budget: int,
    select: Callable[[CanonSet, CanonSet], CanonSet] | None = None,
) -> Closure:
    """Iterate ``X <- X | F.X`` until nothing changes or ``budget`` rounds ran.

    ``select(current, produced)`` may filter each round's new material before
    it is added; the default keeps everything.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    X = X0
    for i in range(1, budget + 1):
        step = F.apply(X)
        if not isinstance(step, Ext):
            raise InfiniteResultError(
                f"{_element_name(F) if isinstance(F, Int) else F!r} applied to a "
                "finite set is not finite; close needs a saturating element"
            )
        produced = step.set
        if select is not None:
            produced = select(X, produced)
        nxt = X | produced
        if nxt == X:
            return Closure(X, FIXPOINT, i)
        X = nxt
    return Closure(X, BUDGET_EXHAUSTED, budget)

