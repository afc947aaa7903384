"""
Proofs and their replay
=======================

The tableau prover works on prefixed signed formulas.  A closed tableau is
returned as a trace that an independent checker replays node by node; an
open branch is turned into a Kripke model and checked semantically.
"""

import dataclasses

from shallowhol import kripke
from shallowhol import syntax as sx
from shallowhol import tableau as tb
from shallowhol.embedding import preset

decls = sx.decls(p="o", q="o")
four = sx.parse_formula("box p -> box box p", decls)

# %% a proof in S4
r = tb.prove(four, preset("S4"))
print(r.trace.render())
print("replay:", tb.replay(r.trace))

# %% the same formula in KT has an open branch, read off as a model
r_kt = tb.prove(four, preset("KT"))
print()
print(f"KT: {r_kt.label}, falsified at world {r_kt.world}")
print(kripke.format_model(r_kt.model))

# %% tampering with a proof is caught
node = r.trace.nodes[6]
forged = dataclasses.replace(r.trace, nodes=tuple(
    dataclasses.replace(n, premises=()) if n.id == node.id else n for n in r.trace.nodes))
try:
    tb.replay(forged)
except tb.InvalidStep as exc:
    print("forged trace rejected:", exc)
