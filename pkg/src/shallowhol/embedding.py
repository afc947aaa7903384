"""World-lifted embedding of quantified multi-modal logic into HOL.

Object-logic formulas become world predicates of type ``i -> o``.  Each
connective is mapped to a closed lambda term (an abbreviation) and ``embed``
only ever applies those abbreviations to the embeddings of the immediate
subformulas; unfolding them is left to ``kernel.beta_eta_normalize``.
Constants and variables are type-lifted: an object sort ``o`` becomes
``i -> o``, ``indiv`` becomes ``e`` and arrows are lifted pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from . import syntax as sx
from .kernel import (
    AND, BOOL, FALSE, IFF, IMP, INDIV, NOT, OR, TRUE, WORLD,
    App, Arrow, Const, HolTerm, HolType, Lam, Signature, TypeMismatch, Var,
    apply, arrow, exists_const, forall_const, mk_exists, mk_forall, typecheck,
)


class EmbeddingError(Exception):
    pass


class SortError(EmbeddingError):
    pass


class MissingExistencePredicate(EmbeddingError):
    pass


class UnsupportedConstruct(EmbeddingError):
    pass


EXISTENCE = "eiw"
FREE_EXISTENCE = "E"

PRESET_FLAGS = {
    "K": frozenset(),
    "KB": frozenset({"symmetric"}),
    "KT": frozenset({"reflexive"}),
    "S4": frozenset({"reflexive", "transitive"}),
    "S5equiv": frozenset({"reflexive", "symmetric", "transitive"}),
    "S5universal": frozenset({"universal"}),
}


@dataclass(frozen=True)
class LogicPreset:
    """Which logic L is: frame class, domain condition, modalities, grounding."""

    frame_class: str = "K"
    custom_flags: FrozenSet[str] = frozenset()
    domains: str = "constant"
    indices: Tuple[str, ...] = (sx.DEFAULT_INDEX,)
    grounding: str = "global"
    actual_world: str = "w0"

    def __post_init__(self):
        if self.frame_class not in sx.FRAME_CLASSES:
            raise ValueError(f"unknown frame class {self.frame_class!r}")
        if self.domains not in ("constant", "varying"):
            raise ValueError(f"unknown domain condition {self.domains!r}")
        if self.grounding not in ("global", "actual"):
            raise ValueError(f"unknown grounding {self.grounding!r}")
        if not set(self.custom_flags) <= set(sx.FRAME_FLAGS):
            raise ValueError(f"unknown frame flags {sorted(self.custom_flags)}")
        if self.custom_flags and self.frame_class != "custom":
            raise ValueError("frame flags are only allowed with the custom frame class")

    @property
    def flags(self) -> FrozenSet[str]:
        if self.frame_class == "custom":
            return frozenset(self.custom_flags)
        return PRESET_FLAGS[self.frame_class]

    @property
    def universal(self) -> bool:
        """True when the accessibility constant is eliminated (S5 as in the universal-relation reading)."""
        return self.frame_class == "S5universal"

    def with_(self, **changes) -> "LogicPreset":
        fields = dict(
            frame_class=self.frame_class, custom_flags=self.custom_flags, domains=self.domains,
            indices=self.indices, grounding=self.grounding, actual_world=self.actual_world,
        )
        fields.update(changes)
        return LogicPreset(**fields)


def preset(name: str = "K", domains: str = "constant", indices: Sequence[str] = (sx.DEFAULT_INDEX,),
           grounding: str = "global", flags=()) -> LogicPreset:
    name = sx.LOGIC_ALIASES.get(name, name)
    return LogicPreset(name, frozenset(flags), domains, tuple(indices), grounding)


def preset_from_problem(pf: sx.ProblemFile) -> LogicPreset:
    return LogicPreset(pf.logic, pf.frame_flags, pf.domains, pf.decls.indices, pf.grounding, pf.actual_world)


# ---------------------------------------------------------------- type lifting

PROP_T = Arrow(WORLD, BOOL)  # i -> o
REL_T = arrow(WORLD, WORLD, BOOL)  # i -> i -> o


def lift_sort(sort: sx.Sort) -> HolType:
    if sort == sx.PROP:
        return PROP_T
    if sort == sx.INDIV:
        return INDIV
    return Arrow(lift_sort(sort.dom), lift_sort(sort.cod))


def relation_name(index: str) -> str:
    return "r" if index == sx.DEFAULT_INDEX else f"r_{index}"


def relation_const(index: str) -> Const:
    return Const(relation_name(index), REL_T)


def signature_for(decls: sx.Declarations, preset: LogicPreset) -> Signature:
    """Lifted object constants plus the preset's own reserved constants."""
    sig = Signature()
    for name, s in decls.consts.items():
        sig.declare(name, lift_sort(s))
    if not preset.universal:
        for idx in preset.indices:
            sig.declare_reserved(relation_name(idx), REL_T)
    if preset.domains == "varying":
        sig.declare_reserved(EXISTENCE, arrow(INDIV, WORLD, BOOL))
    if preset.grounding == "actual":
        sig.declare_reserved(preset.actual_world, WORLD)
    return sig


# ---------------------------------------------------------------- the equation table

_phi = Var("phi", PROP_T)
_psi = Var("psi", PROP_T)
_w = Var("w", WORLD)
_v = Var("v", WORLD)


def _lift1(connective: Const) -> HolTerm:
    return Lam("phi", PROP_T, Lam("w", WORLD, App(connective, App(_phi, _w))))


def _lift2(connective: Const) -> HolTerm:
    return Lam("phi", PROP_T, Lam("psi", PROP_T, Lam("w", WORLD, apply(connective, App(_phi, _w), App(_psi, _w)))))


M_TOP = Lam("w", WORLD, TRUE)
M_BOT = Lam("w", WORLD, FALSE)
M_NOT = _lift1(NOT)
M_AND = _lift2(AND)
M_OR = _lift2(OR)
M_IMP = _lift2(IMP)
M_IFF = _lift2(IFF)


def m_box(index: str, universal: bool = False) -> HolTerm:
    """``\\phi. \\w. all v. r w v -> phi v`` (or ``all v. phi v`` for the universal relation)."""
    if universal:
        body = mk_forall("v", WORLD, App(_phi, _v))
    else:
        body = mk_forall("v", WORLD, apply(IMP, apply(relation_const(index), _w, _v), App(_phi, _v)))
    return Lam("phi", PROP_T, Lam("w", WORLD, body))


def m_dia(index: str, universal: bool = False) -> HolTerm:
    if universal:
        body = mk_exists("v", WORLD, App(_phi, _v))
    else:
        body = mk_exists("v", WORLD, apply(AND, apply(relation_const(index), _w, _v), App(_phi, _v)))
    return Lam("phi", PROP_T, Lam("w", WORLD, body))


def m_forall(ty: HolType, actualist: bool = False) -> HolTerm:
    """Quantifier instance at ``ty``: ``\\P. \\w. all x. P x w`` (guarded by ``eiw x w`` if actualist)."""
    P = Var("P", Arrow(ty, PROP_T))
    x = Var("x", ty)
    body = apply(P, x, _w)
    if actualist:
        body = apply(IMP, apply(Const(EXISTENCE, arrow(INDIV, WORLD, BOOL)), x, _w), body)
    return Lam("P", Arrow(ty, PROP_T), Lam("w", WORLD, App(forall_const(ty), Lam("x", ty, body))))


def m_exists(ty: HolType, actualist: bool = False) -> HolTerm:
    P = Var("P", Arrow(ty, PROP_T))
    x = Var("x", ty)
    body = apply(P, x, _w)
    if actualist:
        body = apply(AND, apply(Const(EXISTENCE, arrow(INDIV, WORLD, BOOL)), x, _w), body)
    return Lam("P", Arrow(ty, PROP_T), Lam("w", WORLD, App(exists_const(ty), Lam("x", ty, body))))


# ---------------------------------------------------------------- embed


def embed(ast: sx.ModalAst, preset: LogicPreset, sig: Signature, env: Optional[Dict[str, sx.Sort]] = None) -> HolTerm:
    """Embed ``ast`` as a world predicate (a HOL term of type ``i -> o``).

    The result is the equation table applied to subformula embeddings; call
    ``kernel.beta_eta_normalize`` to unfold it.  ``env`` gives the object
    sorts of free variables (e.g. schema parameters).
    """
    if preset.domains == "varying" and sig.lookup(EXISTENCE) is None:
        raise MissingExistencePredicate(f"varying domains need {EXISTENCE!r} in the signature")
    return _embed(ast, preset, sig, dict(env or {}))


def _name_term(name: str, env: Dict[str, sx.Sort], sig: Signature) -> HolTerm:
    s = env.get(name)
    if s is not None:
        return Var(name, lift_sort(s))
    ty = sig.lookup(name)
    if ty is None:
        raise SortError(f"undeclared symbol {name!r}")
    return Const(name, ty)


def _embed(ast, preset, sig, env) -> HolTerm:
    if isinstance(ast, sx.Atom):
        head = _name_term(ast.name, env, sig)
        term = apply(head, *(_name_term(a, env, sig) for a in ast.args))
        try:
            ty = typecheck(term, sig)
        except TypeMismatch as exc:
            raise SortError(f"ill-sorted atom {sx.print_formula(ast)}: {exc}") from None
        if ty != PROP_T:
            raise SortError(f"atom {sx.print_formula(ast)} is not a formula")
        return term
    if isinstance(ast, sx.Top):
        return M_TOP
    if isinstance(ast, sx.Bottom):
        return M_BOT
    if isinstance(ast, sx.Not):
        return App(M_NOT, _embed(ast.f, preset, sig, env))
    if isinstance(ast, sx.BINARY):
        table = {sx.And: M_AND, sx.Or: M_OR, sx.Implies: M_IMP, sx.Iff: M_IFF}
        return apply(table[type(ast)], _embed(ast.left, preset, sig, env), _embed(ast.right, preset, sig, env))
    if isinstance(ast, (sx.Box, sx.Dia)):
        if ast.index not in preset.indices:
            raise SortError(f"modality index {ast.index!r} not in the preset")
        schema = m_box if isinstance(ast, sx.Box) else m_dia
        return App(schema(ast.index, preset.universal), _embed(ast.f, preset, sig, env))
    if isinstance(ast, (sx.Forall, sx.Exists)):
        if not sx.is_valid_sort(ast.sort):
            raise SortError(f"unsupported sort {ast.sort}")
        ty = lift_sort(ast.sort)
        inner = dict(env)
        inner[ast.var] = ast.sort
        body = Lam(ast.var, ty, _embed(ast.f, preset, sig, inner))
        actualist = preset.domains == "varying" and ast.sort == sx.INDIV
        schema = m_forall if isinstance(ast, sx.Forall) else m_exists
        return App(schema(ty, actualist), body)
    if isinstance(ast, sx.CommonKnows):
        raise UnsupportedConstruct("common knowledge has no embedding equation; use the kripke evaluator")
    if isinstance(ast, (sx.FreeForall, sx.FreeExists, sx.ExistsPred)):
        raise UnsupportedConstruct("free-logic operators are embedded with embed_free")
    raise TypeError(f"not a formula: {ast!r}")


def ground(term: HolTerm, preset: LogicPreset, sig: Optional[Signature] = None) -> HolTerm:
    """Close a world predicate: ``all w. term w`` (global) or ``term w0`` (actual world)."""
    ty = typecheck(term, sig)
    if ty != PROP_T:
        raise TypeMismatch("", PROP_T, ty)
    if preset.grounding == "actual":
        return App(term, Const(preset.actual_world, WORLD))
    return mk_forall("w", WORLD, App(term, _w))


def frame_axioms(preset: LogicPreset) -> List[HolTerm]:
    """Closed HOL statements of the preset's frame conditions, per modality index."""
    if preset.universal:
        return []
    u = Var("u", WORLD)
    out = []
    for idx in preset.indices:
        r = relation_const(idx)

        def R(a, b, r=r):
            return apply(r, a, b)

        conds = {
            "reflexive": mk_forall("w", WORLD, R(_w, _w)),
            "symmetric": mk_forall("w", WORLD, mk_forall("v", WORLD, apply(IMP, R(_w, _v), R(_v, _w)))),
            "transitive": mk_forall("w", WORLD, mk_forall("v", WORLD, mk_forall("u", WORLD, apply(
                IMP, apply(AND, R(_w, _v), R(_v, u)), R(_w, u))))),
            "euclidean": mk_forall("w", WORLD, mk_forall("v", WORLD, mk_forall("u", WORLD, apply(
                IMP, apply(AND, R(_w, _v), R(_w, u)), R(_v, u))))),
            "universal": mk_forall("w", WORLD, mk_forall("v", WORLD, R(_w, _v))),
        }
        out.extend(conds[f] for f in sx.FRAME_FLAGS if f in preset.flags)
    return out


# ---------------------------------------------------------------- free logic


def free_signature(decls: sx.Declarations) -> Signature:
    """Unlifted signature for free logic: ``o`` stays ``o``, ``indiv`` is ``e``, plus ``E : e -> o``."""
    sig = Signature()
    for name, s in decls.consts.items():
        sig.declare(name, _unlifted(s))
    sig.declare_reserved(FREE_EXISTENCE, Arrow(INDIV, BOOL))
    return sig


def _unlifted(sort: sx.Sort) -> HolType:
    if sort == sx.PROP:
        return BOOL
    if sort == sx.INDIV:
        return INDIV
    return Arrow(_unlifted(sort.dom), _unlifted(sort.cod))


def embed_free(ast: sx.ModalAst, sig: Signature, env: Optional[Dict[str, sx.Sort]] = None) -> HolTerm:
    """Classical HOL term of type ``o`` for a non-modal free-logic formula.

    Free quantifiers range over the existents: ``all_free x. phi`` becomes
    ``all x. E x -> phi``.  ``forall`` stays the classical (inner plus outer)
    quantifier.  Atoms about non-existents may be true.
    """
    return _free(ast, sig, dict(env or {}))


def _free(ast, sig, env) -> HolTerm:
    E = Const(FREE_EXISTENCE, Arrow(INDIV, BOOL))
    if isinstance(ast, sx.Atom):
        def name(n):
            if n in env:
                return Var(n, _unlifted(env[n]))
            ty = sig.lookup(n)
            if ty is None:
                raise SortError(f"undeclared symbol {n!r}")
            return Const(n, ty)

        term = apply(name(ast.name), *(name(a) for a in ast.args))
        try:
            ty = typecheck(term, sig)
        except TypeMismatch as exc:
            raise SortError(str(exc)) from None
        if ty != BOOL:
            raise SortError(f"atom {sx.print_formula(ast)} is not a formula")
        return term
    if isinstance(ast, sx.Top):
        return TRUE
    if isinstance(ast, sx.Bottom):
        return FALSE
    if isinstance(ast, sx.Not):
        return App(NOT, _free(ast.f, sig, env))
    if isinstance(ast, sx.BINARY):
        op = {sx.And: AND, sx.Or: OR, sx.Implies: IMP, sx.Iff: IFF}[type(ast)]
        return apply(op, _free(ast.left, sig, env), _free(ast.right, sig, env))
    if isinstance(ast, sx.ExistsPred):
        if ast.term in env:
            if env[ast.term] != sx.INDIV:
                raise SortError(f"E applied to non-individual {ast.term!r}")
            t = Var(ast.term, INDIV)
        elif sig.lookup(ast.term) == INDIV:
            t = Const(ast.term, INDIV)
        else:
            raise SortError(f"E applied to {ast.term!r}, which is not an individual")
        return App(E, t)
    if isinstance(ast, (sx.FreeForall, sx.FreeExists)):
        inner = dict(env)
        inner[ast.var] = sx.INDIV
        body = _free(ast.f, sig, inner)
        guard = App(E, Var(ast.var, INDIV))
        if isinstance(ast, sx.FreeForall):
            return mk_forall(ast.var, INDIV, apply(IMP, guard, body))
        return mk_exists(ast.var, INDIV, apply(AND, guard, body))
    if isinstance(ast, (sx.Forall, sx.Exists)):
        inner = dict(env)
        inner[ast.var] = ast.sort
        ty = _unlifted(ast.sort)
        mk = mk_forall if isinstance(ast, sx.Forall) else mk_exists
        return mk(ast.var, ty, _free(ast.f, sig, inner))
    raise SortError(f"{type(ast).__name__} is not part of the non-modal free-logic fragment")


# ---------------------------------------------------------------- description logic


@dataclass(frozen=True)
class Concept:
    name: str


@dataclass(frozen=True)
class CNot:
    c: "AlcConcept"


@dataclass(frozen=True)
class CAnd:
    left: "AlcConcept"
    right: "AlcConcept"


@dataclass(frozen=True)
class COr:
    left: "AlcConcept"
    right: "AlcConcept"


@dataclass(frozen=True)
class Some:
    role: str
    c: "AlcConcept"


@dataclass(frozen=True)
class Only:
    role: str
    c: "AlcConcept"


@dataclass(frozen=True)
class Thing:
    pass


@dataclass(frozen=True)
class Nothing:
    pass


AlcConcept = Union[Concept, CNot, CAnd, COr, Some, Only, Thing, Nothing]


def translate_alc(concept: AlcConcept) -> sx.ModalAst:
    """ALC concept to multi-modal K: roles become modality indices."""
    c = concept
    if isinstance(c, Concept):
        return sx.Atom(c.name)
    if isinstance(c, Thing):
        return sx.Top()
    if isinstance(c, Nothing):
        return sx.Bottom()
    if isinstance(c, CNot):
        return sx.Not(translate_alc(c.c))
    if isinstance(c, CAnd):
        return sx.And(translate_alc(c.left), translate_alc(c.right))
    if isinstance(c, COr):
        return sx.Or(translate_alc(c.left), translate_alc(c.right))
    if isinstance(c, Only):
        return sx.Box(c.role, translate_alc(c.c))
    if isinstance(c, Some):
        return sx.Dia(c.role, translate_alc(c.c))
    raise TypeError(f"not an ALC concept: {c!r}")


def alc_subsumption(sub: AlcConcept, sup: AlcConcept) -> sx.ModalAst:
    """``sub ⊑ sup`` as the formula whose global validity in K decides it."""
    return sx.Implies(translate_alc(sub), translate_alc(sup))


def alc_problem(*concepts: AlcConcept) -> Tuple[sx.Declarations, LogicPreset]:
    """Declarations and K preset covering the atomic concepts and roles used."""
    names, roles = [], []

    def walk(c):
        if isinstance(c, Concept):
            if c.name not in names:
                names.append(c.name)
        elif isinstance(c, (Some, Only)):
            if c.role not in roles:
                roles.append(c.role)
            walk(c.c)
        elif isinstance(c, CNot):
            walk(c.c)
        elif isinstance(c, (CAnd, COr)):
            walk(c.left)
            walk(c.right)

    for c in concepts:
        walk(c)
    d = sx.Declarations(indices=tuple(roles) or (sx.DEFAULT_INDEX,))
    for n in names:
        d.declare(n, sx.PROP)
    return d, LogicPreset("K", indices=d.indices)
