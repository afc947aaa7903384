"""
ALC as multi-modal K
====================

Roles are modality indices, "only r.C" is [r] C and "some r.C" is <r> C.
Subsumption is global validity of an implication.
"""

from shallowhol import embedding as em
from shallowhol import kripke
from shallowhol import search as se
from shallowhol import syntax as sx

A, B = em.Concept("A"), em.Concept("B")
cases = [
    (em.Only("r", em.CAnd(A, B)), em.Only("r", A)),
    (em.Some("r", A), em.Only("r", A)),
    (em.CAnd(em.Some("r", A), em.Only("r", B)), em.Some("r", em.CAnd(A, B))),
    (em.Some("r", A), em.Some("s", A)),
]

for sub, sup in cases:
    decls, lp = em.alc_problem(sub, sup)
    goal = em.alc_subsumption(sub, sup)
    v = se.decide_bounded([], goal, lp, se.Bounds(3, 1), decls)
    print(f"{sx.print_formula(goal):<40} {v.label}")
    if isinstance(v, se.Countermodel):
        print("   " + kripke.format_model(v.model).replace("\n", "\n   ").rstrip())
