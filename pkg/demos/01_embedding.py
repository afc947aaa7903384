"""
Modal formulas as world predicates
==================================

A modal formula becomes a HOL term of type i -> o: the set of worlds where
it holds.  Connectives are lifted pointwise, box quantifies over accessible
worlds, and nothing else needs a recursive definition.
"""

from shallowhol import embedding as em
from shallowhol import kernel as kn
from shallowhol import syntax as sx

decls = sx.decls(p="o", q="o", P="indiv -> o")


def show(text, logic="K", domains="constant"):
    lp = em.preset(logic, domains)
    sig = em.signature_for(decls, lp)
    term = em.embed(sx.parse_formula(text, decls), lp, sig)
    print(f"{logic:<4} {domains:<8} {text}")
    print("     raw:      ", kn.render(term)[:110] + ("..." if len(kn.render(term)) > 110 else ""))
    print("     unfolded: ", kn.render(kn.normalize(term)))
    print("     grounded: ", kn.render(kn.normalize(em.ground(term, lp, sig))))
    print("     type:     ", kn.typecheck(term, sig))
    print()


# %% the lifted conjunction and the box of K
show("p & q")
show("box p -> p")

# %% with the universal relation box needs no accessibility constant at all
show("box p -> p", "S5")

# %% quantifiers: possibilist under constant domains, guarded by eiw under varying ones
show("forall (x: indiv). box (P x)")
show("forall (x: indiv). box (P x)", domains="varying")

# %% frame conditions as HOL statements
for logic in ["K", "KT", "S4", "S5equiv"]:
    print(logic, [kn.render(t) for t in em.frame_axioms(em.preset(logic))])
