"""Shallow semantical embedding of modal, epistemic, free and description logics in HOL.

Modules:

* ``kernel``    simply typed lambda calculus (HOL terms, types, normalization)
* ``syntax``    object-logic formulas, parser, printer, problem files
* ``embedding`` the lifting of object logics into HOL terms
* ``kripke``    Kripke-model semantics (the independent oracle)
* ``holmodel``  standard finite HOL models
* ``search``    bounded countermodel search and bounded decision
* ``tableau``   prefixed tableau prover for propositional multi-modal logic
* ``corpus``    bundled problems with expected verdicts
"""

from .embedding import LogicPreset, embed, ground, preset
from .kripke import KripkeModel
from .search import Bounds, decide_bounded, find_countermodel
from .syntax import parse_formula, parse_problem, print_formula
from .tableau import prove, replay

__all__ = [
    "Bounds", "KripkeModel", "LogicPreset", "decide_bounded", "embed", "find_countermodel", "ground",
    "parse_formula", "parse_problem", "preset", "print_formula", "prove", "replay",
]
