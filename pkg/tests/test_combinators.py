import json
import random
from itertools import product

import pytest
from hypothesis import given

from proofalgebra.combinators import (
    App,
    Const,
    LAW_UNIVERSES,
    Param,
    Phi,
    check_laws,
    compile_phi,
    evaluate,
    format_phi,
    k_element,
    parse_phi,
    random_phi,
    s_element,
    staged_apply,
)
from proofalgebra.core import EMPTY, Arrow, CanonSet, Leaf, ParseError, parse_expr, parse_set
from proofalgebra.intensional import Ext, Int, apply, member
from proofalgebra.probes import Sampler, Universe, trial_rng

from conftest import exprs, sets
from oracles import apply_oracle

a, b, c = Leaf("a"), Leaf("b"), Leaf("c")
E = parse_set


def final(X):
    assert isinstance(X, Ext)
    return X.set


# --- K -------------------------------------------------------------------


def test_k_examples():
    K = k_element()
    assert final(staged_apply(K, [E("{a}"), E("{b}")])) == E("{a}")
    assert final(staged_apply(K, [EMPTY, E("{a, b}")])) == EMPTY
    assert final(apply(K, E("{a}"))) == E("{{}->a}")


@given(exprs(max_rank=3))
def test_k_member_matches_shape(e):
    shape = (
        isinstance(e, Arrow)
        and len(e.head) == 1
        and isinstance(e.body, Arrow)
        and len(e.body.head) == 0
        and e.body.body == next(iter(e.head))
    )
    assert member(k_element(), e) == shape


# --- S -------------------------------------------------------------------


def test_s_examples():
    S = s_element()
    X, Y = E("{{}->({a}->b)}"), E("{{}->a}")
    assert final(staged_apply(S, [X, Y, EMPTY])) == E("{b}")
    assert final(staged_apply(S, [EMPTY, Y, E("{a}")])) == EMPTY


def test_s_is_staged():
    S = s_element()
    assert isinstance(apply(S, EMPTY), Int)
    assert isinstance(staged_apply(S, [EMPTY, EMPTY]), Ext)


def test_s_empty_body_members_fire_for_any_y():
    X = E("{{a}->({}->b)}")
    for Y in (EMPTY, E("{c}")):
        assert final(staged_apply(s_element(), [X, Y, E("{a}")])) == E("{b}")


def test_s_member_schema():
    e = parse_expr("{{t}->({r}->s)}->({{u}->r}->({t, u}->s))")
    assert member(s_element(), e)
    assert not member(s_element(), parse_expr("{{t}->({r}->s)}->({{u}->r}->({t}->s))"))
    assert not member(s_element(), parse_expr("{{t}->({r}->s)}->({{u}->q}->({t, u}->s))"))


@pytest.mark.parametrize("trial", range(150))
def test_s_law_against_apply_oracle(trial):
    X, Y, Z = Sampler(trial_rng(99, trial), LAW_UNIVERSES["S"]).s_triple()
    want = apply_oracle(CanonSet(apply_oracle(X, Z)), CanonSet(apply_oracle(Y, Z)))
    assert set(final(staged_apply(s_element(), [X, Y, Z]))) == want


# --- applicative expressions ----------------------------------------------


def test_parse_phi():
    assert parse_phi("(X1 X3) (X2 X3)", 3).body == App(
        App(Param(0), Param(2)), App(Param(1), Param(2))
    )
    assert parse_phi("X1 X2 X3", 3).body == App(App(Param(0), Param(1)), Param(2))
    assert parse_phi("X1 {a, {b}->c}", 1).body == App(Param(0), Const(E("{a, {b}->c}")))


@pytest.mark.parametrize("text", ["X4", "X0", "(X1", "X1 )", "", "Y1", "X1 {a"])
def test_parse_phi_errors(text):
    with pytest.raises(ParseError):
        parse_phi(text, 3)


def test_phi_validates_arity():
    with pytest.raises(ValueError):
        Phi(Param(2), 2)


def test_format_phi_roundtrip():
    for text in ["X1 X3 (X2 X3)", "X2 X1", "X1 {a}", "X1 (X2 (X3 {}))"]:
        phi = parse_phi(text, 3)
        assert format_phi(phi) == text
        assert parse_phi(format_phi(phi), 3) == phi


def test_evaluate_examples():
    X, Y = E("{{a}->b}"), E("{a}")
    assert evaluate(parse_phi("X1", 1), [X]) == X
    assert evaluate(parse_phi("X1 X2", 2), [X, Y]) == E("{b}")
    assert evaluate(Phi(Const(E("{c}")), 2), [X, Y]) == E("{c}")
    with pytest.raises(ValueError):
        evaluate(parse_phi("X1", 1), [])


# --- compile ---------------------------------------------------------------


def test_compile_identity():
    I = compile_phi(parse_phi("X1", 1))
    for Y in (EMPTY, E("{a, {b}->c}")):
        assert final(apply(I, Y)) == Y


def test_compile_membership():
    I = compile_phi(parse_phi("X1", 1))
    assert member(I, parse_expr("{a, b}->a"))
    assert not member(I, parse_expr("{a}->b"))
    K2 = compile_phi(parse_phi("X1", 2))
    # [X1] over two parameters also holds {a}->({b}->a), which K lacks
    assert member(K2, parse_expr("{a}->({b}->a)"))
    assert not member(k_element(), parse_expr("{a}->({b}->a)"))


def _grid():
    # fixed universe of expressions of rank <= 2, sets of size <= 2
    pool = [
        a,
        b,
        parse_expr("{}->a"),
        parse_expr("{a}->b"),
        parse_expr("{}->({a}->b)"),
        parse_expr("{b}->({}->a)"),
    ]
    sets_ = [EMPTY] + [CanonSet.of(x) for x in pool]
    sets_ += [CanonSet.of(x, y) for i, x in enumerate(pool) for y in pool[i + 1 :]]
    return sets_


GRID = _grid()


def test_compiled_k_agrees_with_k_on_grid():
    K, CK = k_element(), compile_phi(parse_phi("X1", 2))
    for X, Y in product(GRID, repeat=2):
        assert final(staged_apply(CK, [X, Y])) == final(staged_apply(K, [X, Y]))


def test_compiled_s_agrees_with_s_on_grid():
    S, CS = s_element(), compile_phi(parse_phi("(X1 X3) (X2 X3)", 3))
    hits = 0
    for X, Y, Z in product(GRID, repeat=3):
        got = final(staged_apply(CS, [X, Y, Z]))
        assert got == final(staged_apply(S, [X, Y, Z]))
        hits += bool(got)
    assert hits > 50


@pytest.mark.parametrize("trial", range(100))
def test_random_compile_matches_evaluate(trial):
    rng = trial_rng(3, trial)
    sampler = Sampler(rng, LAW_UNIVERSES["compile"])
    phi = random_phi(rng, sampler)
    F = compile_phi(phi)
    for _ in range(5):
        args = [sampler.set() for _ in range(phi.arity)]
        assert final(staged_apply(F, args)) == evaluate(phi, args)


def test_compile_arity_zero():
    phi = Phi(App(Const(E("{{a}->b}")), Const(E("{a}"))), 0)
    assert compile_phi(phi) == Ext(E("{b}"))


# --- law checking -------------------------------------------------------------


def test_check_laws_k():
    report = check_laws("K", 200, seed=1)
    assert report.holds and report.trials == 200
    assert report.nontrivial > 100


def test_check_laws_s():
    report = check_laws("S", 200, seed=1)
    assert report.holds and report.nontrivial > 20


def test_check_laws_compile_fixed_phi():
    report = check_laws("compile", 100, seed=2, phi=parse_phi("X2 X1", 2), probes=3)
    assert report.holds
    assert report.phi == "X2 X1"


def test_report_renders_violation():
    report = check_laws("K", 3, seed=0)
    report.counterexamples.append("forced")
    assert not report.holds
    assert "VIOLATED" in report.render()


def test_check_laws_rejects_bad_input():
    with pytest.raises(ValueError):
        check_laws("K", 0)
    with pytest.raises(ValueError):
        check_laws("Y", 1)


def test_report_is_deterministic():
    one = check_laws("S", 50, seed=7)
    two = check_laws("S", 50, seed=7)
    assert one.render() == two.render()
    assert json.dumps(one.to_json()) == json.dumps(two.to_json())
    assert "seed: 7" in one.render() and "max_rank=3" in one.render()


def test_trial_substreams_are_independent():
    first = Sampler(trial_rng(4, 10)).set()
    rng = random.Random()
    rng.seed("4/10")
    assert Sampler(rng).set() == first
    assert Sampler(trial_rng(4, 11)).set() != first or Sampler(trial_rng(4, 12)).set() != first


@given(sets(max_size=3), sets(max_size=3))
def test_compile_application_term(X, Y):
    F = compile_phi(parse_phi("X1 X2", 2))
    assert final(staged_apply(F, [X, Y])) == CanonSet(apply_oracle(X, Y))


def test_sampler_respects_universe():
    u = Universe(max_rank=2, max_size=3)
    for t in range(100):
        s_ = Sampler(trial_rng(0, t), u).set()
        assert len(s_) <= 3 and all(e.rank <= 2 for e in s_)
