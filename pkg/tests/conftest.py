import random

import pytest
from hypothesis import settings, strategies as st

from proofalgebra.core import Arrow, CanonSet, Leaf
from proofalgebra.groups import Gen, Inv, Mul, Unit
from proofalgebra.proplogic import And, Implies, Not, Or, Var

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

ATOMS = ("a", "b", "c")


@st.composite
def exprs(draw, max_rank=3, max_head=3, atoms=ATOMS):
    if max_rank == 0 or draw(st.integers(0, 2)) == 0:
        return Leaf(draw(st.sampled_from(atoms)))
    head = draw(st.lists(exprs(max_rank - 1, max_head, atoms), max_size=max_head))
    body = draw(exprs(max_rank - 1, max_head, atoms))
    return Arrow(head, body)


def sets(max_rank=3, max_size=6):
    return st.lists(exprs(max_rank), max_size=max_size).map(CanonSet)


@st.composite
def formulas(draw, depth=3, names=("p", "q", "r")):
    if depth == 0 or draw(st.integers(0, 2)) == 0:
        return Var(draw(st.sampled_from(names)))
    kind = draw(st.sampled_from(["not", "and", "or", "imp", "imp"]))
    if kind == "not":
        return Not(draw(formulas(depth - 1, names)))
    cls = {"and": And, "or": Or, "imp": Implies}[kind]
    return cls(draw(formulas(depth - 1, names)), draw(formulas(depth - 1, names)))


@st.composite
def group_terms(draw, max_size=10, gens=("s", "t", "u")):
    budget = draw(st.integers(1, max_size))

    def build(n):
        if n <= 1:
            return draw(st.sampled_from([Unit()] + [Gen(g) for g in gens]))
        if n == 2 or draw(st.integers(0, 3)) == 0:
            return Inv(build(n - 1))
        k = draw(st.integers(1, n - 2))
        return Mul(build(k), build(n - 1 - k))

    return build(budget)


def random_term(rng: random.Random, size: int, gens, unit_weight=0.15, inv_weight=0.25):
    """Closed term with at most ``size`` nodes."""
    if size <= 1:
        if rng.random() < unit_weight:
            return Unit()
        return Gen(rng.choice(gens))
    if size == 2 or rng.random() < inv_weight:
        return Inv(random_term(rng, size - 1, gens, unit_weight, inv_weight))
    k = rng.randint(1, size - 2)
    return Mul(
        random_term(rng, k, gens, unit_weight, inv_weight),
        random_term(rng, size - 1 - k, gens, unit_weight, inv_weight),
    )


# --- acceptance summary ------------------------------------------------------

_acceptance: list = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.module.__name__.endswith("test_acceptance"):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _acceptance.append((report.passed, doc))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for passed, doc in _acceptance:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {doc}")
