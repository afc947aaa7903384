import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shallowhol import kernel as kn
from shallowhol.embedding import m_box, preset, relation_const, PROP_T
from gen import HOL_SIG, HOL_TYPES, hol_term

O, I, E = kn.BOOL, kn.WORLD, kn.INDIV
x, y = kn.Var("x", I), kn.Var("y", I)
c = kn.Const("c", E)


def test_identity_types_as_world_endofunction():
    assert kn.typecheck(kn.Lam("x", I, x)) == kn.Arrow(I, I)


def test_embedded_box_is_world_predicate():
    sig = kn.Signature()
    sig.declare_reserved("r", kn.arrow(I, I, O))
    sig.declare("p", PROP_T)
    term = kn.normalize(kn.App(m_box("_"), kn.Const("p", PROP_T)))
    assert kn.typecheck(term, sig) == kn.Arrow(I, O)


def test_arrow_domain_violation():
    sig = kn.Signature()
    sig.declare("p", PROP_T)
    sig.declare("c", E)
    with pytest.raises(kn.TypeMismatch) as err:
        kn.typecheck(kn.App(kn.Const("p", PROP_T), c), sig)
    assert err.value.position == "arg"
    assert err.value.expected == I and err.value.found == E


def test_unbound_constant():
    with pytest.raises(kn.UnboundConstant):
        kn.typecheck(kn.Const("mystery", O), kn.Signature())


def test_constant_annotation_must_match_signature():
    sig = kn.Signature()
    sig.declare("p", PROP_T)
    with pytest.raises(kn.TypeMismatch):
        kn.typecheck(kn.Const("p", O), sig)


def test_logical_family_members_typecheck():
    assert kn.typecheck(kn.forall_const(E)) == kn.arrow(kn.Arrow(E, O), O)
    assert kn.typecheck(kn.eq_const(PROP_T)) == kn.arrow(PROP_T, PROP_T, O)
    with pytest.raises(kn.TypeMismatch):
        kn.typecheck(kn.Const("all", kn.arrow(E, O)))


def test_reserved_names():
    sig = kn.Signature()
    with pytest.raises(kn.SignatureError):
        sig.declare("all", O)
    sig.declare("p", O)
    with pytest.raises(kn.SignatureError):
        sig.declare("p", O)


def test_substitution_avoids_capture():
    out = kn.substitute(kn.Lam("y", I, x), "x", y)
    assert out == kn.Lam("y'", I, y)


def test_substitution_basics():
    assert kn.substitute(kn.Var("x", E), "x", c, HOL_SIG) == c
    ident = kn.Lam("x", E, kn.Var("x", E))
    assert kn.substitute(ident, "x", c, HOL_SIG) == ident


def test_substitution_type_mismatch():
    with pytest.raises(kn.TypeMismatch):
        kn.substitute(x, "x", c, HOL_SIG)


def test_fresh_names_skip_used_primes():
    assert kn.fresh_name("y", {"y", "y'"}) == "y''"


def test_beta_step():
    assert kn.normalize(kn.App(kn.Lam("x", E, kn.Var("x", E)), c)) == c


def test_eta_step():
    f = kn.Const("f", kn.Arrow(E, O))
    assert kn.normalize(kn.Lam("x", E, kn.App(f, kn.Var("x", E)))) == f


def test_eta_blocked_by_occurrence():
    g = kn.Var("g", kn.arrow(E, E, O))
    t = kn.Lam("x", E, kn.apply(g, kn.Var("x", E), kn.Var("x", E)))
    assert kn.normalize(t) == t


def test_box_unfolds_to_quantified_implication():
    w = kn.Var("w", I)
    term = kn.normalize(kn.App(kn.App(m_box("_"), kn.Const("p", PROP_T)), w))
    assert kn.render(term) == "all (\\v:i. imp (r w v) (p v))"


def test_alpha_equivalence():
    assert kn.alpha_eq(kn.Lam("x", I, x), kn.Lam("y", I, y))
    assert not kn.alpha_eq(kn.Lam("x", E, c), kn.Lam("x", E, kn.Var("x", E)))
    assert not kn.alpha_eq(kn.Lam("x", I, y), kn.Lam("y", I, y))


def test_render_parenthesizes():
    f = kn.Var("f", kn.arrow(kn.Arrow(I, O), O))
    t = kn.App(f, kn.Lam("x", I, kn.App(kn.Const("p", PROP_T), x)))
    assert kn.render(t) == "f (\\x:i. p x)"
    assert kn.render(kn.Lam("h", kn.Arrow(I, O), kn.Var("h", kn.Arrow(I, O)))) == "\\h:(i -> o). h"


def _random_case(seed):
    rng = random.Random(seed)
    ty = rng.choice(HOL_TYPES)
    return rng, ty, hol_term(rng, ty, depth=rng.randint(1, 5))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_generated_terms_are_well_typed(seed):
    _, ty, t = _random_case(seed)
    assert kn.typecheck(t, HOL_SIG) == ty


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_subject_reduction(seed):
    _, ty, t = _random_case(seed)
    assert kn.typecheck(kn.normalize(t), HOL_SIG) == ty


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_normalization_idempotent(seed):
    _, _, t = _random_case(seed)
    n = kn.normalize(t)
    assert kn.alpha_eq(kn.normalize(n), n)


def substitution_lemma_holds(rng) -> bool:
    """t[x:=u][y:=v] is alpha-equivalent to t[y:=v][x:=u[y:=v]] (x not free in v)."""
    tx, ty_ = rng.choice([O, I, E]), rng.choice([O, I, E])
    ctx = {"x": tx, "y": ty_}
    if tx == ty_ and rng.random() < 0.5:
        ctx = {"x": tx, "y": tx}
    t = hol_term(rng, rng.choice([O, I, E, kn.Arrow(I, O)]), ctx, depth=rng.randint(1, 4))
    u = hol_term(rng, ctx["x"], {"y": ctx["y"], "z": O}, depth=rng.randint(0, 3))
    v = hol_term(rng, ctx["y"], {"z": O, "w": I}, depth=rng.randint(0, 3))
    if "x" in kn.free_vars(v):
        return True
    sub = lambda term, var, repl: kn.substitute(term, var, repl, HOL_SIG)  # noqa: E731
    left = sub(sub(t, "x", u), "y", v)
    right = sub(sub(t, "y", v), "x", sub(u, "y", v))
    return kn.alpha_eq(left, right)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_substitution_lemma(seed):
    assert substitution_lemma_holds(random.Random(seed))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_beta_agrees_with_substitution(seed):
    rng = random.Random(seed)
    aty = rng.choice([O, I, E])
    body = hol_term(rng, O, {"x": aty}, depth=3)
    arg = hol_term(rng, aty, {"x": aty, "y": aty}, depth=2)
    redex = kn.App(kn.Lam("x", aty, body), arg)
    assert kn.alpha_eq(kn.normalize(redex), kn.normalize(kn.substitute(body, "x", arg, HOL_SIG)))


def test_relation_constant_name():
    assert relation_const("_").name == "r"
    assert relation_const("a").name == "r_a"
    assert preset("S5").universal
