import random
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from proofalgebra.core import Arrow, Leaf, ParseError
from proofalgebra.groups import (
    ONE,
    Gen,
    Inv,
    Mul,
    OpenTermError,
    Presentation,
    PresentationError,
    Redex,
    Unit,
    Var,
    alg_normalize,
    ass_apply,
    find_redexes,
    format_term,
    id_apply,
    inv_apply,
    is_normal,
    parse_presentation,
    parse_term,
    relator_apply,
    rewrite,
    trace_render,
)
from proofalgebra.intensional import BUDGET_EXHAUSTED, FIXPOINT

from conftest import group_terms, random_term
from oracles import (
    evaluate_in_group,
    one_step,
    perm_inv,
    perm_mul,
    term_size,
)

T = parse_term
FREE = Presentation()
s, t = Gen("s"), Gen("t")


# --- syntax ----------------------------------------------------------------


@pytest.mark.parametrize(
    "text, term",
    [
        ("s * t * u", Mul(Mul(s, t), Gen("u"))),
        ("s * (t * u)", Mul(s, Mul(t, Gen("u")))),
        ("s^-1 * t", Mul(Inv(s), t)),
        ("(s*t)^-1", Inv(Mul(s, t))),
        ("s^-1^-1", Inv(Inv(s))),
        ("1 * ?u", Mul(Unit(), Var("u"))),
        ("s·t⁻¹", Mul(s, Inv(t))),
    ],
)
def test_parse_term(text, term):
    assert T(text) == term


@pytest.mark.parametrize("text", ["s *", "(s", "s t", "^-1", "?", "s ^ 2", ""])
def test_parse_term_errors(text):
    with pytest.raises(ParseError):
        T(text)


@given(group_terms(max_size=12))
def test_term_roundtrip(term):
    assert T(format_term(term)) == term


def test_format_term():
    assert format_term(T("s*(t*u)")) == "s * (t * u)"
    assert format_term(T("(s*t)*u")) == "s * t * u"
    assert format_term(T("(s*t)^-1")) == "(s * t)^-1"
    assert format_term(T("?x * 1")) == "?x * 1"


def test_presentation_file():
    pres = parse_presentation("# cyclic\ngens: g h\nrel: g*g*g   # order 3\n\nrel: h^-1*g\n")
    assert pres.generators == ("g", "h")
    assert pres.relators == (T("g*g*g"), T("h^-1*g"))


@pytest.mark.parametrize(
    "text, error",
    [
        ("gens: g\nrel: g*h", PresentationError),
        ("gens: g\nrel: ?x*g", PresentationError),
        ("gens: g\nrel g", ParseError),
        ("gens: g\nrel: g*", ParseError),
        ("gens: 1g", ParseError),
    ],
)
def test_presentation_errors(text, error):
    with pytest.raises(error):
        parse_presentation(text)


def test_parse_error_position_in_presentation():
    with pytest.raises(ParseError) as info:
        parse_presentation("gens: g\nrel: g * )")
    assert info.value.line == 2


# --- one-step operators ----------------------------------------------------


def _bodies(out):
    return {e.body.atom for e in out}


@pytest.mark.parametrize("op, law", [(ass_apply, "ASS"), (inv_apply, "INV"), (id_apply, "ID")])
@given(term=group_terms(max_size=10))
def test_operator_equals_position_oracle(op, law, term):
    assert _bodies(op(Leaf(term))) == one_step(term, law)


def test_ass_both_directions():
    got = _bodies(ass_apply(Leaf(T("(a*b)*(c*d)"))))
    assert got == {T("a*(b*(c*d))"), T("((a*b)*c)*d")}


def test_operators_extend_expression():
    x = Arrow([Leaf(T("s"))], Leaf(T("s * s^-1")))
    out = inv_apply(x)
    assert set(out) == {Arrow([x], Leaf(ONE))}


def test_operators_treat_variables_as_opaque():
    assert _bodies(inv_apply(Leaf(T("?u * ?u^-1")))) == {ONE}
    assert _bodies(id_apply(Leaf(T("?u * 1")))) == {T("?u")}


@given(group_terms(max_size=10, gens=("g", "h")), st.sampled_from(["g*g", "g*h^-1", "g^-1"]))
def test_relator_operator_equals_oracle(term, rel):
    pres = Presentation(("g", "h"), (T(rel),))
    assert _bodies(relator_apply(0, pres, Leaf(term))) == one_step(term, "R", T(rel))


def test_rewrite_rejects_nonmatching_redex():
    with pytest.raises(ValueError):
        rewrite(T("s*t"), Redex((), "INV"))


def test_find_redexes_order_is_leftmost_innermost():
    term = T("(s*1)*(t*1)")
    paths = [r.position for r in find_redexes(term, ["ID"])]
    assert paths == [(0,), (1,)]


# --- normalization -----------------------------------------------------------


def test_erratum_example():
    chain = alg_normalize(FREE, T("(s * t^-1) * t"))
    assert chain.final == s
    assert chain.status == FIXPOINT
    assert trace_render(chain) == "Anfang Th, Sub (ASS), Sub (INV), Ende (ID)"
    terms = [format_term(x.term) for x in chain.steps]
    assert terms == ["s * (t^-1 * t)", "s * 1", "s"]


def test_trivial_chain():
    chain = alg_normalize(FREE, ONE)
    assert chain.final == ONE and chain.steps == ()
    assert trace_render(chain) == "Anfang Th."
    assert trace_render(chain, "tree") == "1"


def test_relator_example():
    pres = parse_presentation("gens: g1 g2\nrel: g1*g2^-1*g1")
    chain = alg_normalize(pres, T("(g1*g2^-1)*g1"))
    assert chain.final == ONE
    assert trace_render(chain) == "Anfang Th, Sub (ASS), Ende (R1)"


def test_tree_trace_is_linear_expression():
    chain = alg_normalize(FREE, T("(s * t^-1) * t"))
    x = chain.expr
    assert trace_render(chain, "tree") == (
        "{{{s * t^-1 * t}->s * (t^-1 * t)}->s * 1}->s"
    )
    depth = 0
    while isinstance(x, Arrow):
        (x,) = x.head
        depth += 1
    assert depth == 3 and x == Leaf(T("(s * t^-1) * t"))


def test_trace_style_unknown():
    with pytest.raises(ValueError):
        trace_render(alg_normalize(FREE, ONE), "fancy")


def test_open_terms_rejected():
    with pytest.raises(OpenTermError):
        alg_normalize(FREE, T("?u * 1"))


def test_undeclared_generator_rejected():
    with pytest.raises(PresentationError):
        alg_normalize(Presentation(("g",)), T("g*h"))


def test_budget():
    term = T("((((s*1)*1)*1)*1)*1")
    chain = alg_normalize(FREE, term, budget=2)
    assert chain.status == BUDGET_EXHAUSTED and len(chain.steps) <= 2
    assert alg_normalize(FREE, term).final == s


def test_inner_cancellation_is_exposed():
    chain = alg_normalize(FREE, T("s * (t * (t^-1 * s))"))
    assert chain.final == T("s * s")


def test_trivial_relator_is_ignored():
    pres = Presentation(("g",), (T("g*g^-1"),))
    assert alg_normalize(pres, T("g*g")).final == T("g*g")


def _steps_are_one_step_rewrites(chain, patterns):
    current = chain.start
    for st_ in chain.steps:
        if st_.label.startswith("R"):
            law, rel = "R", patterns[int(st_.label[1:]) - 1]
        else:
            law, rel = st_.label, None
        assert st_.term in one_step(current, law, rel), (format_term(current), st_.label)
        current = st_.term


@given(group_terms(max_size=10))
def test_every_step_is_an_operator_step(term):
    chain = alg_normalize(FREE, term)
    _steps_are_one_step_rewrites(chain, ())


def _literal_word(rng, n, gens):
    if n <= 1:
        r = rng.random()
        if r < 0.15:
            return ONE
        g = Gen(rng.choice(gens))
        return Inv(g) if r < 0.5 else g
    k = rng.randint(1, n - 1)
    return Mul(_literal_word(rng, k, gens), _literal_word(rng, n - k, gens))


def _letters(term):
    if isinstance(term, Mul):
        return _letters(term.left) + _letters(term.right)
    if isinstance(term, Unit):
        return []
    if isinstance(term, Gen):
        return [(term.name, 1)]
    assert isinstance(term.arg, Gen)
    return [(term.arg.name, -1)]


def _free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == (x[0], -x[1]):
            out.pop()
        else:
            out.append(x)
    return out


def _right_assoc(term):
    while isinstance(term, Mul):
        if isinstance(term.left, Mul):
            return False
        term = term.right
    return True


@pytest.mark.parametrize("seed", range(300))
def test_free_words_reach_reduced_word(seed):
    rng = random.Random(seed)
    term = _literal_word(rng, rng.randint(1, 10), "st")
    chain = alg_normalize(FREE, term)
    assert _letters(chain.final) == _free_reduce(_letters(term))
    assert _right_assoc(chain.final)


# soundness in S3 (non-abelian) and Z_n


S3 = list(permutations(range(3)))


@given(group_terms(max_size=10), st.sampled_from(S3), st.sampled_from(S3), st.sampled_from(S3))
def test_free_normalization_sound_in_s3(term, ps, pt, pu):
    env = {"s": ps, "t": pt, "u": pu}
    final = alg_normalize(FREE, term).final
    ev = lambda x: evaluate_in_group(x, env, perm_mul, perm_inv, (0, 1, 2))
    assert ev(final) == ev(term)


def _power(n, rng=None):
    if n == 0:
        return ONE
    factors = [Gen("g")] * n
    if rng is None:
        term = factors[0]
        for f in factors[1:]:
            term = Mul(term, f)
        return term
    while len(factors) > 1:
        i = rng.randrange(len(factors) - 1)
        factors[i : i + 2] = [Mul(factors[i], factors[i + 1])]
    return factors[0]


@pytest.mark.parametrize("n", range(1, 7))
def test_cyclic_presentation_sound(n):
    pres = Presentation(("g",), (_power(n),))
    rng = random.Random(n)
    for k in range(13):
        for term in (_power(k), _power(k, rng)):
            chain = alg_normalize(pres, term)
            assert chain.status == FIXPOINT
            assert chain.final == alg_normalize(pres, _power(k % n)).final
            count = len(_letters(chain.final))
            assert count == k % n
            _steps_are_one_step_rewrites(chain, [alg_normalize(FREE, _power(n)).final])


@given(group_terms(max_size=10))
def test_normal_forms_have_no_redex(term):
    final = alg_normalize(FREE, term).final
    assert is_normal(final)
    assert not one_step(final, "INV") and not one_step(final, "ID")


@given(group_terms(max_size=10, gens=("g", "h")))
def test_normal_forms_avoid_relators(term):
    pres = Presentation(("g", "h"), (T("g*g*g"), T("h*g")))
    final = alg_normalize(pres, term).final
    assert is_normal(final, pres)
    for rel in pres.relators:
        assert not one_step(final, "R", rel)


@given(group_terms(max_size=10))
def test_idempotent(term):
    final = alg_normalize(FREE, term).final
    assert alg_normalize(FREE, final).steps == ()


def test_random_terms_stay_small():
    rng = random.Random(0)
    for _ in range(200):
        term = random_term(rng, 10, "stu")
        assert term_size(term) <= 10
        assert term_size(alg_normalize(FREE, term).final) <= term_size(term)
