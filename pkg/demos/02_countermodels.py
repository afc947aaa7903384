"""
Countermodels and the correspondence table
==========================================

Bounded search enumerates Kripke models smallest first.  Each axiom is
checked against each frame class; failures come with a concrete model.
"""

from shallowhol import kripke
from shallowhol import search as se
from shallowhol import syntax as sx
from shallowhol.embedding import preset

decls = sx.decls(p="o", q="o")
axioms = {
    "K": "box (p -> q) -> box p -> box q",
    "T": "box p -> p",
    "B": "p -> box dia p",
    "4": "box p -> box box p",
    "5": "dia p -> box dia p",
}
logics = ["K", "KB", "KT", "S4", "S5"]

# %% the table (c = countermodel, v = valid up to 3 worlds, * = certified)
print("      " + "".join(f"{name:>5}" for name in logics))
for ax, text in axioms.items():
    row = []
    for name in logics:
        v = se.decide_bounded([], sx.parse_formula(text, decls), preset(name), se.Bounds(3, 1), decls)
        row.append({"countermodel": "c", "valid-up-to": "v", "certified": "*"}[v.label])
    print(f"{ax:<6}" + "".join(f"{c:>5}" for c in row))

# %% the smallest model where 4 fails although the relation is reflexive
v = se.decide_bounded([], sx.parse_formula(axioms["4"], decls), preset("KT"), se.Bounds(3, 1), decls)
print()
print(f"4 under KT fails at world {v.world} of:")
print(kripke.format_model(v.model))
print(kripke.to_dot(v.model, "four_in_KT"))

# %% Barcan: valid with constant domains, refuted once domains may vary
d = sx.decls(P="indiv -> o")
bf = sx.parse_formula("(forall (x: indiv). box (P x)) -> box (forall (x: indiv). P x)", d)
for domains in ["constant", "varying"]:
    v = se.decide_bounded([], bf, preset("K", domains), se.Bounds(2, 2), d)
    print(f"Barcan, {domains} domains: {v.label}")
print(kripke.format_model(v.model))
