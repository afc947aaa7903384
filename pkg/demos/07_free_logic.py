"""
Free logic
==========

Free quantifiers range over the existents E; names may denote objects
outside E.  Classical instantiation survives, free instantiation does not.
"""

from shallowhol import embedding as em
from shallowhol import holmodel as hm
from shallowhol import kernel as kn
from shallowhol import syntax as sx

decls = sx.decls(P="indiv -> o", c="indiv")
sig = em.free_signature(decls)

for text in [
    "all_free x. E x",
    "some_free x. top",
    "(forall (x: indiv). P x) -> P c",
    "(all_free x. P x) -> P c",
    "(all_free x. P x) & E c -> P c",
]:
    term = em.embed_free(sx.parse_formula(text, decls), sig)
    v = hm.find_hol_countermodel(term, sig, 1, 3)
    print(f"{text:<36} {kn.render(term)}")
    if v.valid:
        print(f"{'':<36} valid ({v.models_checked} models, up to 3 individuals)")
    else:
        m = v.countermodel
        print(f"{'':<36} fails with {m.n_indiv} individual(s): " + ", ".join(f"{k}={m.interp[k]}" for k in sig.consts))
