import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shallowhol import syntax as sx
from shallowhol.corpus import corpus_root
from gen import ALL_DECLS, any_formula

D = sx.DEFAULT_INDEX
P = sx.decls(p="o", q="o", P="indiv -> o")


def test_box_implication():
    assert sx.parse_formula("box p -> p", P) == sx.Implies(sx.Box(D, sx.Atom("p")), sx.Atom("p"))


def test_quantified_box():
    f = sx.parse_formula("forall (x: indiv). box (P x)", P)
    assert f == sx.Forall("x", sx.INDIV, sx.Box(D, sx.Atom("P", ("x",))))


def test_indexed_box():
    d = sx.decls(indices=("a", "b", "c"), p="o", q="o")
    assert sx.parse_formula("[a](p & q)", d) == sx.Box("a", sx.And(sx.Atom("p"), sx.Atom("q")))


def test_knowledge_is_sugar_for_box():
    d = sx.decls(indices=("a", "b"), p="o")
    assert sx.parse_formula("K_a p", d) == sx.parse_formula("[a] p", d)


def test_common_knowledge_node():
    d = sx.decls(indices=("a", "b"), p="o")
    assert sx.parse_formula("C{a,b} p", d) == sx.CommonKnows(frozenset({"a", "b"}), sx.Atom("p"))
    # bare C ranges over every agent
    assert sx.parse_formula("C p", d) == sx.parse_formula("C{b,a} p", d)


def test_precedence_and_associativity():
    f = sx.parse_formula("p & q | p -> q -> p <-> q", P)
    a, b = sx.Atom("p"), sx.Atom("q")
    assert f == sx.Iff(sx.Implies(sx.Or(sx.And(a, b), a), sx.Implies(b, a)), b)
    assert sx.parse_formula("not box p & q", P) == sx.And(sx.Not(sx.Box(D, a)), b)


def test_print_examples():
    assert sx.print_formula(sx.Box(D, sx.Atom("p"))) == "box p"
    assert sx.print_formula(sx.FreeForall("x", sx.ExistsPred("x"))) == "all_free x. E x"
    nested = sx.Implies(sx.Atom("p"), sx.Implies(sx.Atom("q"), sx.Atom("p")))
    assert sx.print_formula(nested) == "p -> q -> p"
    assert sx.parse_formula(sx.print_formula(nested), P) == nested
    left = sx.Implies(sx.Implies(sx.Atom("p"), sx.Atom("q")), sx.Atom("p"))
    assert sx.print_formula(left) == "(p -> q) -> p"


def test_unknown_symbol():
    with pytest.raises(sx.UnknownSymbol):
        sx.parse_formula("box zz", P)
    with pytest.raises(sx.UnknownSymbol):
        sx.parse_formula("[z] p", P)


def test_arity_mismatch():
    d = sx.decls(P="indiv -> o", p="o", c="indiv")
    with pytest.raises(sx.ArityMismatch):
        sx.parse_formula("P", d)
    with pytest.raises(sx.ArityMismatch):
        sx.parse_formula("p c", d)


def test_syntax_error_position():
    with pytest.raises(sx.LogicSyntaxError) as err:
        sx.parse_formula("p &", P)
    assert err.value.line == 1 and err.value.col >= 1


def test_minimal_problem():
    pf = sx.parse_problem("logic S5\nconst p : o\nconjecture t1 : box p -> p\n")
    assert pf.logic == "S5universal"
    assert list(pf.conjectures) == ["t1"]


def test_problem_with_undeclared_constant():
    with pytest.raises(sx.UnknownSymbol):
        sx.parse_problem("logic K\nconjecture t : box q\n")


def test_problem_duplicate_and_undeclared_logic():
    with pytest.raises(sx.DuplicateName):
        sx.parse_problem("logic K\nconst p : o\naxiom a : p\naxiom a : p\n")
    with pytest.raises(sx.UndeclaredLogic):
        sx.parse_problem("const p : o\nconjecture t : p\n")
    with pytest.raises(sx.UndeclaredLogic):
        sx.parse_problem("logic Q7\nconst p : o\nconjecture t : p\n")


def test_wise_men_file():
    pf = sx.parse_problem((corpus_root() / "wise_men" / "wise_men.lgp").read_text())
    assert pf.decls.indices == ("a", "b", "c")
    assert pf.logic == "S5equiv"
    assert {"c_knows", "a_knows"} <= set(pf.conjectures)
    again = sx.parse_problem(sx.print_problem(pf))
    assert again.axioms == pf.axioms and again.conjectures == pf.conjectures


@pytest.mark.parametrize("path", sorted(corpus_root().glob("*/*.lgp")), ids=lambda p: f"{p.parent.name}/{p.name}")
def test_corpus_files_round_trip(path):
    pf = sx.parse_problem(path.read_text())
    again = sx.parse_problem(sx.print_problem(pf))
    assert again == pf


def test_table_helpers():
    s = sx.parse_sort("indiv -> indiv -> o")
    assert sx.table_shape(s, 2, 3) == (3, 3, 2)
    assert sx.carrier_size(sx.parse_sort("indiv -> o"), 2, 2) == 2 ** 4
    assert sx.flat_index((1, 0, 1), (3, 3, 2)) == 1 * 6 + 0 * 2 + 1


def round_trips(seed: int) -> bool:
    f = any_formula(random.Random(seed), depth=random.Random(seed ^ 0x5F).randint(0, 6))
    return sx.parse_formula(sx.print_formula(f), ALL_DECLS) == f


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    assert round_trips(seed)


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=40))
def test_parser_total_on_text(text):
    try:
        sx.parse_formula(text, ALL_DECLS)
    except sx.ParseError:
        pass


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=60))
def test_problem_parser_total_on_bytes(data):
    try:
        sx.parse_problem(data.decode("utf-8", errors="replace"))
    except sx.ParseError:
        pass


def test_embedding_names_are_reserved():
    for name in ("r", "r_a", "eiw"):
        with pytest.raises(sx.DuplicateName):
            sx.decls(**{name: "o"})
