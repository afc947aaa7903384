"""
Three wise men
==============

Each man sees the others' foreheads but not his own.  After hearing that at
least one is marked, and that the first two do not know their own state,
the third knows he is marked.  The puzzle is an S5 multi-agent model;
public statements remove the worlds where they are false.
"""

from shallowhol import kripke
from shallowhol import syntax as sx
from shallowhol.corpus import corpus_root

pf = sx.parse_problem((corpus_root() / "wise_men" / "wise_men.lgp").read_text())
model = kripke.hat_puzzle_model(["a", "b", "c"], ["ma", "mb", "mc"])
print(f"initial model: {model.n_worlds} worlds")

# %% announce the statements one by one
current = model
for name, f in pf.axioms.items():
    current = kripke.announce(current, f)
    marks = [
        "".join(m[1] if w in current.valuation[m] else "-" for m in ["ma", "mb", "mc"])
        for w in current.worlds
    ]
    print(f"after {name:<10} {current.n_worlds} worlds: {' '.join(marks)}")

# %% what is known now
for goal in ["c_knows", "a_knows"]:
    rep = kripke.model_consequence(model, list(pf.axioms.values()), pf.conjectures[goal])
    print(f"{goal}: {'entailed' if rep.entailed else 'not entailed'}")

# %% common knowledge of the first announcement holds everywhere afterwards
ck = sx.parse_formula("C (ma | mb | mc)", pf.decls)
after = kripke.announce(model, pf.axioms["someone"])
print("C(someone) after the announcement:", all(kripke.eval(after, ck, w) for w in after.worlds))
