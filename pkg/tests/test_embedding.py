import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shallowhol import embedding as em
from shallowhol import holmodel as hm
from shallowhol import kernel as kn
from shallowhol import search as se
from shallowhol import syntax as sx
from gen import FO_DECLS, MULTI_DECLS, fo_formula, prop_formula

D = sx.decls(p="o", q="o", P="indiv -> o", c="indiv")
I, O = kn.WORLD, kn.BOOL


def unfold(text, name="K", domains="constant", grounded=False, **kw):
    lp = em.preset(name, domains, **kw)
    sig = em.signature_for(D, lp)
    t = em.embed(sx.parse_formula(text, D), lp, sig)
    if grounded:
        t = em.ground(t, lp, sig)
    return kn.render(kn.normalize(t))


def applied(text, name="K"):
    lp = em.preset(name)
    sig = em.signature_for(D, lp)
    return kn.render(kn.normalize(kn.App(em.embed(sx.parse_formula(text, D), lp, sig), kn.Var("w", I))))


def test_lifted_conjunction():
    assert unfold("p & q") == "\\w:i. and (p w) (q w)"


def test_box_under_k():
    assert applied("box p") == "all (\\v:i. imp (r w v) (p v))"


def test_box_under_universal_s5():
    # all p is the eta-contracted form of all (\v:i. p v)
    assert applied("box p", "S5") == "all p"
    assert applied("box p", "S5equiv") == "all (\\v:i. imp (r w v) (p v))"


def test_quantifier_instances():
    assert unfold("forall (x: indiv). P x") == "\\w:i. all (\\x:e. P x w)"
    assert unfold("forall (x: indiv). P x", domains="varying") == "\\w:i. all (\\x:e. imp (eiw x w) (P x w))"
    assert unfold("exists (x: indiv). P x", domains="varying") == "\\w:i. ex (\\x:e. and (eiw x w) (P x w))"
    # higher sorts stay possibilist
    assert unfold("forall (X: o). X | not X", domains="varying") == "\\w:i. all (\\x:(i -> o). or (x w) (not (x w)))"


def test_grounding():
    assert unfold("top", grounded=True) == "all (\\w:i. true)"
    assert unfold("p", grounded=True, grounding="actual") == "p w0"
    assert unfold("box p -> p", grounded=True) == "all (\\w:i. imp (all (\\v:i. imp (r w v) (p v))) (p w))"


def test_ground_top_true_in_every_model():
    lp = em.preset("K")
    sig = em.signature_for(sx.decls(), lp)
    t = kn.normalize(em.ground(em.embed(sx.Top(), lp, sig), lp, sig))
    for n in (1, 2, 3):
        for model in hm.enumerate_hol_models(sig, n, 1):
            assert hm.eval_term(model, t) is True


def test_ground_rejects_non_predicates():
    with pytest.raises(kn.TypeMismatch):
        em.ground(kn.TRUE, em.preset("K"))


def test_frame_axioms():
    r = lambda n: [kn.render(t) for t in em.frame_axioms(em.preset(n))]  # noqa: E731
    assert r("K") == []
    assert r("KT") == ["all (\\w:i. r w w)"]
    assert r("S4") == ["all (\\w:i. r w w)", "all (\\w:i. all (\\v:i. all (\\u:i. imp (and (r w v) (r v u)) (r w u))))"]
    assert r("S5") == []
    assert len(r("S5equiv")) == 3


def test_varying_domains_need_existence_predicate():
    lp = em.preset("K", "varying")
    with pytest.raises(em.MissingExistencePredicate):
        em.embed(sx.Atom("p"), lp, em.signature_for(D, em.preset("K")))


def test_sort_error_on_undeclared_symbol():
    lp = em.preset("K")
    with pytest.raises(em.SortError):
        em.embed(sx.Atom("zz"), lp, em.signature_for(D, lp))


def test_signature_contents():
    sig = em.signature_for(MULTI_DECLS, em.preset("KT", "varying", indices=("a", "b")))
    assert sig.lookup("r_a") == kn.arrow(I, I, O) and sig.lookup("r_b") is not None
    assert sig.lookup("eiw") == kn.arrow(kn.INDIV, I, O)
    assert sig.lookup("P") == kn.arrow(kn.INDIV, I, O)
    assert em.signature_for(D, em.preset("S5")).lookup("r") is None


# ---------------------------------------------------------------- free logic

F = sx.decls(P="indiv -> o", c="indiv")


def free_verdict(text, decls=F, indiv=3):
    sig = em.free_signature(decls)
    term = em.embed_free(sx.parse_formula(text, decls), sig)
    assert kn.typecheck(term, sig) == O
    return hm.find_hol_countermodel(term, sig, 1, indiv)


def test_free_universal_over_existents_is_valid():
    sig = em.free_signature(F)
    term = em.embed_free(sx.FreeForall("x", sx.ExistsPred("x")), sig)
    assert kn.render(term) == "all (\\x:e. imp (E x) (E x))"
    assert free_verdict("all_free x. E x").valid


def test_free_existential_fails_on_empty_existents():
    v = free_verdict("some_free x. top")
    assert not v.valid
    assert v.countermodel.n_indiv == 1 and v.countermodel.interp["E"] == (False,)


def test_free_specification_fails_for_nonexistent_constant():
    v = free_verdict("(all_free x. P x) -> P c")
    assert not v.valid
    m = v.countermodel
    assert m.interp["E"][m.interp["c"]] is False


def test_free_specification_with_existents_needs_two_elements():
    # once something exists, the smallest counterexample separates c from the existent
    sig = em.free_signature(F)
    hyp = em.embed_free(sx.parse_formula("some_free x. top", F), sig)
    inst = em.embed_free(sx.parse_formula("(all_free x. P x) -> P c", F), sig)
    v = hm.find_hol_countermodel(kn.apply(kn.IMP, hyp, inst), sig, 1, 3)
    assert v.countermodel.n_indiv == 2


def test_free_rejects_modalities():
    with pytest.raises(em.EmbeddingError):
        em.embed_free(sx.Box(sx.DEFAULT_INDEX, sx.Atom("p")), em.free_signature(sx.decls(p="o")))


# ---------------------------------------------------------------- description logic


def test_alc_translation():
    c = em.Only("r", em.CAnd(em.Concept("A"), em.Concept("B")))
    assert em.translate_alc(c) == sx.Box("r", sx.And(sx.Atom("A"), sx.Atom("B")))
    assert em.translate_alc(em.Some("s", em.CNot(em.Concept("A")))) == sx.Dia("s", sx.Not(sx.Atom("A")))


def test_alc_subsumptions():
    A = em.Concept("A")
    decls, lp = em.alc_problem(A, em.Some("r", A))
    assert lp.indices == ("r",)
    v = se.decide_bounded([], em.alc_subsumption(A, A), lp, se.Bounds(3, 1), decls)
    assert not isinstance(v, se.Countermodel)
    v = se.decide_bounded([], em.alc_subsumption(em.Some("r", A), em.Only("r", A)), lp, se.Bounds(3, 1), decls)
    assert isinstance(v, se.Countermodel)
    succ = [b for a, b in v.model.access["r"] if a == v.world]
    assert len(succ) == 2


# ---------------------------------------------------------------- properties


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["K", "KT", "S4", "S5", "S5equiv"]), st.sampled_from(["constant", "varying"]))
def test_embeddings_are_world_predicates(seed, name, domains):
    rng = random.Random(seed)
    lp = em.preset(name, domains)
    sig = em.signature_for(FO_DECLS, lp)
    t = em.embed(fo_formula(rng, 4), lp, sig)
    assert kn.typecheck(t, sig) == em.PROP_T
    assert kn.typecheck(kn.normalize(t), sig) == em.PROP_T
    assert kn.typecheck(em.ground(t, lp, sig), sig) == O


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_embedding_is_compositional(seed):
    rng = random.Random(seed)
    lp = em.preset("K")
    sig = em.signature_for(sx.decls(p="o", q="o", s="o"), lp)
    f, g = prop_formula(rng, 3), prop_formula(rng, 3)
    for node, table in [(sx.And, em.M_AND), (sx.Or, em.M_OR), (sx.Implies, em.M_IMP), (sx.Iff, em.M_IFF)]:
        whole = em.embed(node(f, g), lp, sig)
        parts = kn.apply(table, em.embed(f, lp, sig), em.embed(g, lp, sig))
        assert kn.alpha_eq(kn.normalize(whole), kn.normalize(parts))
    whole = em.embed(sx.Box("_", f), lp, sig)
    assert kn.alpha_eq(kn.normalize(whole), kn.normalize(kn.App(em.m_box("_"), em.embed(f, lp, sig))))


def test_universal_and_equivalence_s5_agree_on_propositional_corpus():
    rng = random.Random(7)
    d = sx.decls(p="o", q="o", s="o")
    bounds = se.Bounds(3, 1)
    for _ in range(60):
        f = prop_formula(rng, 3)
        a = se.decide_bounded([], f, em.preset("S5"), bounds, d)
        b = se.decide_bounded([], f, em.preset("S5equiv"), bounds, d)
        assert isinstance(a, se.Countermodel) == isinstance(b, se.Countermodel)


def test_barcan_constant_valid_varying_refuted():
    d = sx.decls(P="indiv -> o")
    bf = sx.parse_formula("(forall (x: indiv). box (P x)) -> box (forall (x: indiv). P x)", d)
    assert not isinstance(se.decide_bounded([], bf, em.preset("K"), se.Bounds(2, 2), d), se.Countermodel)
    v = se.decide_bounded([], bf, em.preset("K", "varying"), se.Bounds(2, 2), d)
    assert isinstance(v, se.Countermodel) and v.model.n_worlds == 2
