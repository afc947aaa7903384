import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shallowhol import kripke
from shallowhol import search as se
from shallowhol import syntax as sx
from shallowhol.embedding import preset
from gen import FO_DECLS, PROP_DECLS, fo_formula, prop_formula

D = sx.decls(p="o", q="o")
f = lambda text, d=D: sx.parse_formula(text, d)  # noqa: E731
B3 = se.Bounds(3, 1)


def reverifies(premises, conj, lp, model, world):
    return (kripke.check_frame(model, lp)
            and all(kripke.valid_in_model(model, p, lp) for p in premises)
            and not kripke.eval(model, conj, world))


def test_t_axiom_refuted_in_k_by_one_irreflexive_world():
    model, world = se.find_countermodel([], f("box p -> p"), preset("K"), B3, D)
    assert model.n_worlds == 1 and model.access["_"] == frozenset() and world == 0


def test_t_axiom_holds_in_kt():
    assert se.find_countermodel([], f("box p -> p"), preset("KT"), B3, D) is None


def test_barcan_varying_countermodel():
    d = sx.decls(P="indiv -> o")
    bf = f("(forall (x: indiv). box (P x)) -> box (forall (x: indiv). P x)", d)
    lp = preset("K", "varying")
    model, world = se.find_countermodel([], bf, lp, se.Bounds(2, 2), d)
    assert model.n_worlds == 2 and reverifies([], bf, lp, model, world)
    # the domain grows along the edge from the falsifying world
    (a, b), = model.access["_"]
    assert a == world and not model.domains[b] <= model.domains[a]
    # with nonempty domains required the countermodel needs two individuals
    ne = f("exists (x: indiv). top", d)
    model, world = se.find_countermodel([ne], bf, lp, se.Bounds(2, 3), d)
    assert model.carrier == 2 and reverifies([ne], bf, lp, model, world)


def test_five_certified_in_universal_s5():
    v = se.decide_bounded([], f("dia p -> box dia p"), preset("S5"), B3, D)
    assert isinstance(v, se.ValidCertified) and v.label == "certified"


def test_four_refuted_in_kt_by_chain():
    v = se.decide_bounded([], f("box p -> box box p"), preset("KT"), B3, D)
    assert isinstance(v, se.Countermodel)
    rel = v.model.access["_"]
    assert v.model.n_worlds == 3
    assert any((a, b) in rel and (b, c) in rel and (a, c) not in rel for a in range(3) for b in range(3) for c in range(3))


def test_contradictory_premises():
    v = se.decide_bounded([f("p"), f("not p")], sx.Bottom(), preset("K"), B3, D)
    assert isinstance(v, se.ValidUpTo)
    assert v.premise_models == 0 and not v.premises_satisfiable


def test_valid_up_to_reports_bounds():
    v = se.decide_bounded([], f("box (p -> q) -> box p -> box q"), preset("K"), se.Bounds(2, 1), D)
    assert isinstance(v, se.ValidUpTo) and str(v.bounds) == "w<=2,d<=1"
    assert v.models_checked > 0 and v.premises_satisfiable


def test_cap_reports_unknown():
    v = se.decide_bounded([], f("box (p -> q) -> box p -> box q"), preset("K"), se.Bounds(3, 1, max_models=50), D)
    assert isinstance(v, se.Unknown) and v.label == "unknown"
    with pytest.raises(se.BoundsExceeded):
        se.find_countermodel([], f("box (p -> q) -> box p -> box q"), preset("K"), se.Bounds(3, 1, max_models=50), D)


def test_bounds_validation():
    with pytest.raises(ValueError):
        se.Bounds(0, 1)


def test_small_model_bound():
    assert se.small_model_bound([f("dia p -> box dia p")]) == 2
    assert se.small_model_bound([f("box p & dia q & dia (p & q)")]) == 4


def test_evidence_trivial_schema():
    schema = sx.Schema("id", (("X", sx.PROP),), sx.Implies(sx.Atom("X"), sx.Atom("X")))
    rep = se.check_consequence_evidence([], schema, preset("K"), se.Bounds(2, 1), sx.decls())
    assert rep.all_hold and rep.kind == "bounded evidence" and rep.axiom_models > 0
    assert rep.summary().startswith("bounded evidence")


def test_evidence_collapse_fails_without_axioms():
    schema = sx.Schema("collapse", (("X", sx.PROP),), sx.Implies(sx.Atom("X"), sx.Box("_", sx.Atom("X"))))
    rep = se.check_consequence_evidence([], schema, preset("S5"), se.Bounds(2, 1), sx.decls())
    assert not rep.all_hold
    model, env, world = rep.first_failure
    assert not kripke.eval(model, schema.body, world, {"X": (sx.PROP, env["X"])})


def test_evidence_degenerate_axioms_force_collapse():
    # box (X <-> Y) for a fixed Y only has one-world models when every proposition is Y or not Y
    d = sx.decls(q="o")
    ax = f("forall (X: o). box (X <-> q) | box (X <-> not q)", d)
    schema = sx.Schema("collapse", (("X", sx.PROP),), sx.Implies(sx.Atom("X"), sx.Box("_", sx.Atom("X"))))
    rep = se.check_consequence_evidence([ax], schema, preset("S5"), se.Bounds(3, 1), d)
    assert rep.all_hold and set(rep.models_by_world_count) == {1}


def test_find_models_order_and_limit():
    models, visited = se.find_models([f("dia p")], preset("K"), se.Bounds(2, 1), D, limit=3)
    assert len(models) == 3 and visited >= 3
    assert [m.n_worlds for m in models] == sorted(m.n_worlds for m in models)
    assert all(kripke.valid_in_model(m, f("dia p"), preset("K")) for m in models)


def test_definitions_are_computed():
    d = sx.decls(P="indiv -> o", G="indiv -> o")
    defn = f("forall (x: indiv). G x <-> box (P x)", d)
    defs, rest = se.split_definitions([defn], d, preset("K"))
    assert [x.name for x in defs] == ["G"] and rest == []
    conj = f("forall (x: indiv). G x -> P x", d)
    v = se.decide_bounded([defn], conj, preset("K"), se.Bounds(2, 1), d)
    assert isinstance(v, se.Countermodel)
    assert reverifies([defn], conj, preset("K"), v.model, v.world)


def test_higher_order_signature():
    d = sx.decls(Pos="(indiv -> o) -> o")
    ax = f("forall (X: indiv -> o). Pos X -> box (Pos X)", d)
    conj = f("forall (X: indiv -> o). Pos X", d)
    v = se.decide_bounded([ax], conj, preset("S5"), se.Bounds(2, 1), d)
    assert isinstance(v, se.Countermodel) and reverifies([ax], conj, preset("S5"), v.model, v.world)


# ---------------------------------------------------------------- properties


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["K", "KB", "KT", "S4", "S5", "S5equiv"]))
def test_countermodels_reverify(seed, name):
    rng = random.Random(seed)
    lp = preset(name)
    premises = [prop_formula(rng, 2)] if rng.random() < 0.3 else []
    conj = prop_formula(rng, 3)
    v = se.decide_bounded(premises, conj, lp, B3, PROP_DECLS)
    if isinstance(v, se.Countermodel):
        assert reverifies(premises, conj, lp, v.model, v.world)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["constant", "varying"]))
def test_quantified_countermodels_reverify(seed, domains):
    rng = random.Random(seed)
    lp = preset(rng.choice(["K", "KT", "S4", "S5"]), domains)
    conj = fo_formula(rng, 3)
    v = se.decide_bounded([], conj, lp, se.Bounds(2, 2, max_models=2**22), FO_DECLS)
    if isinstance(v, se.Countermodel):
        assert reverifies([], conj, lp, v.model, v.world)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_determinism(seed):
    rng = random.Random(seed)
    lp = preset(rng.choice(["K", "KT", "S4", "KB"]))
    conj = prop_formula(rng, 3)
    a = se.decide_bounded([], conj, lp, B3, PROP_DECLS)
    b = se.decide_bounded([], conj, lp, B3, PROP_DECLS)
    assert a == b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_symmetry_breaking_keeps_verdicts(seed):
    rng = random.Random(seed)
    lp = preset(rng.choice(["K", "KT", "S4", "KB", "S5equiv"]))
    conj = prop_formula(rng, 3)
    a = se.decide_bounded([], conj, lp, se.Bounds(3, 1), PROP_DECLS)
    b = se.decide_bounded([], conj, lp, se.Bounds(3, 1, symmetry_breaking=True), PROP_DECLS)
    assert type(a) is type(b)
    if isinstance(b, se.Countermodel):
        assert reverifies([], conj, lp, b.model, b.world)
        assert a.model.n_worlds == b.model.n_worlds
