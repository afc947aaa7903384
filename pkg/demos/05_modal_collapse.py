"""
Modal collapse in Scott's axioms
================================

The ontological axioms (positive properties, essence, necessary existence)
have the side effect that every truth is necessary.  Bounded search cannot
prove this, but it can check every small model of the axioms: all of them
satisfy every instance of X -> box X.
"""

import time

from shallowhol import kripke
from shallowhol import search as se
from shallowhol import syntax as sx
from shallowhol.corpus import corpus_root
from shallowhol.embedding import preset

pf = sx.parse_problem((corpus_root() / "scott" / "scott.lgp").read_text())
for name, f in pf.axioms.items():
    print(f"{name:<4} {sx.print_formula(f)}")
print()

# %% the evidence run
start = time.perf_counter()
rep = se.check_consequence_evidence(list(pf.axioms.values()), pf.schemas["collapse"], preset("S5"), se.Bounds(2, 2), pf.decls)
print(rep.summary())
print(f"{time.perf_counter() - start:.1f}s")

# %% one of the models, and the existence of God in it
models, _ = se.find_models(list(pf.axioms.values()), preset("S5"), se.Bounds(2, 2), pf.decls, limit=1)
print(kripke.format_model(models[0]))
print("T3 holds:", kripke.valid_in_model(models[0], pf.conjectures["T3"], preset("S5")))
