"""Standard finite models of HOL and the bridge from Kripke models.

Values: ``bool`` for ``o``, ``int`` for ``i`` and ``e``, and for ``a -> b``
either a tuple (the function's table, entry ``k`` being the image of the
``k``-th element of ``carrier(a)``) or a Python callable produced by
evaluating an abstraction.  Equality of functions is extensional.

Carriers are enumerated in code order: the element of ``a -> b`` with code
``c`` maps the ``j``-th element of ``carrier(a)`` to the element of
``carrier(b)`` whose code is digit ``j`` of ``c`` in base ``|b|`` (least
significant digit first).  For predicate types this makes the code the
bitmask of the row-major truth table, the same convention as ``kripke``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, Mapping, Optional, Tuple

from . import syntax as sx
from .embedding import EXISTENCE, PROP_T, LogicPreset, embed, ground, lift_sort, relation_name, signature_for
from .kernel import (
    BOOL, INDIV, WORLD, App, Arrow, BaseType, Const, HolTerm, HolType, Lam,
    Signature, TypeVar, Var, normalize, typecheck,
)
from .kripke import KripkeModel


class HolModelError(Exception):
    pass


class UnboundVariable(HolModelError):
    pass


class MissingInterpretation(HolModelError):
    pass


class BoundsTooLarge(HolModelError):
    pass


@dataclass
class HolModel:
    n_worlds: int
    n_indiv: int
    interp: Dict[str, object] = field(default_factory=dict)
    sig: Optional[Signature] = None

    def __post_init__(self):
        if self.n_worlds < 1 or self.n_indiv < 1:
            raise HolModelError("carriers must be nonempty")
        if self.sig is not None:
            for name, ty in self.sig.consts.items():
                if name not in self.interp:
                    raise MissingInterpretation(f"no interpretation for {name!r}")
                code_of(self, self.interp[name], ty)  # membership check

    def base_size(self, ty: BaseType) -> int:
        if ty == BOOL:
            return 2
        if ty == WORLD:
            return self.n_worlds
        if ty == INDIV:
            return self.n_indiv
        raise HolModelError(f"unknown base type {ty}")

    def size(self, ty: HolType) -> int:
        if isinstance(ty, Arrow):
            return self.size(ty.cod) ** self.size(ty.dom)
        if isinstance(ty, TypeVar):
            raise HolModelError("type variables have no carrier")
        return self.base_size(ty)


def carrier(model: HolModel, ty: HolType) -> Iterator[object]:
    """Elements of ``ty`` in code order (materialised lazily)."""
    if isinstance(ty, Arrow):
        dom = model.size(ty.dom)
        for digits in product(list(carrier(model, ty.cod)), repeat=dom):
            yield tuple(reversed(digits))
    elif ty == BOOL:
        yield False
        yield True
    else:
        yield from range(model.size(ty))


def element(model: HolModel, code: int, ty: HolType):
    if isinstance(ty, Arrow):
        k = model.size(ty.cod)
        return tuple(element(model, code // k**j % k, ty.cod) for j in range(model.size(ty.dom)))
    if ty == BOOL:
        return bool(code)
    return code


def code_of(model: HolModel, value, ty: HolType) -> int:
    if isinstance(ty, Arrow):
        table = tabulate(model, value, ty)
        k = model.size(ty.cod)
        return sum(code_of(model, v, ty.cod) * k**j for j, v in enumerate(table))
    if ty == BOOL:
        if not isinstance(value, bool):
            raise HolModelError(f"{value!r} is not a truth value")
        return int(value)
    if not isinstance(value, int) or not 0 <= value < model.size(ty):
        raise HolModelError(f"{value!r} is not an element of {ty}")
    return value


def tabulate(model: HolModel, value, ty: Arrow) -> tuple:
    if isinstance(value, tuple):
        if len(value) != model.size(ty.dom):
            raise HolModelError(f"table of wrong size for {ty}")
        return value
    return tuple(value(x) for x in carrier(model, ty.dom))


def apply_value(model: HolModel, fn, arg, fty: Arrow):
    if isinstance(fn, tuple):
        return fn[code_of(model, arg, fty.dom)]
    return fn(arg)


def equal_values(model: HolModel, a, b, ty: HolType) -> bool:
    if isinstance(ty, Arrow):
        return code_of(model, a, ty) == code_of(model, b, ty)
    return a == b


# ---------------------------------------------------------------- evaluation


def _logical(model: HolModel, c: Const):
    name = c.name
    if name == "true":
        return True
    if name == "false":
        return False
    if name == "not":
        return lambda a: not a
    if name == "and":
        return lambda a: lambda b: a and b
    if name == "or":
        return lambda a: lambda b: a or b
    if name == "imp":
        return lambda a: lambda b: (not a) or b
    if name == "iff":
        return lambda a: lambda b: a == b
    if name in ("all", "ex"):
        pred_ty = c.type.dom
        test = all if name == "all" else any
        return lambda p: test(apply_value(model, p, x, pred_ty) for x in carrier(model, pred_ty.dom))
    if name == "eq":
        ty = c.type.dom
        return lambda a: lambda b: equal_values(model, a, b, ty)
    return None


def eval_term(model: HolModel, term: HolTerm, env: Optional[Mapping[str, object]] = None):
    """Denotation of a well-typed term; ``env`` maps free variable names to values."""
    return _eval(model, term, dict(env or {}))


def _eval(model, term, env):
    if isinstance(term, Var):
        if term.name not in env:
            raise UnboundVariable(term.name)
        return env[term.name]
    if isinstance(term, Const):
        v = _logical(model, term)
        if v is not None:
            return v
        if term.name not in model.interp:
            raise MissingInterpretation(term.name)
        return model.interp[term.name]
    if isinstance(term, App):
        fn = _eval(model, term.fn, env)
        arg = _eval(model, term.arg, env)
        if isinstance(fn, tuple):
            return apply_value(model, fn, arg, type_of(term.fn))
        return fn(arg)
    if isinstance(term, Lam):
        def closure(x, term=term, env=env):
            inner = dict(env)
            inner[term.var] = x
            return _eval(model, term.body, inner)

        return closure
    raise TypeError(f"not a HOL term: {term!r}")


def type_of(term: HolTerm) -> HolType:
    """Type read off annotations, for terms already known to be well typed."""
    if isinstance(term, (Var, Const)):
        return term.type
    if isinstance(term, Lam):
        return Arrow(term.var_type, type_of(term.body))
    return type_of(term.fn).cod


# ---------------------------------------------------------------- Kripke -> HOL


def induce_hol_model(km: KripkeModel, preset: LogicPreset, sig: Signature) -> HolModel:
    """HOL model sharing ``km``'s worlds and individuals.

    Accessibility constants become ``km``'s relations, ``eiw`` the per-world
    domain membership, lifted object constants their Kripke valuations.
    """
    model = HolModel(km.n_worlds, km.carrier)
    interp = {}
    n, m = km.n_worlds, km.carrier
    kripke_sorts = dict(km.sorts)
    for name, ty in sig.consts.items():
        if name == EXISTENCE:
            interp[name] = tuple(tuple(x in km.domains[w] for w in range(n)) for x in range(m))
        elif name in kripke_sorts:
            s = kripke_sorts[name]
            if lift_sort(s) != ty:
                raise MissingInterpretation(f"{name!r}: Kripke sort {s} does not lift to {ty}")
            interp[name] = element(model, km.codes[name], ty)
        elif name == preset.actual_world and preset.grounding == "actual":
            interp[name] = km.actual
        else:
            rel = None
            for idx in preset.indices:
                if relation_name(idx) == name:
                    rel = km.access.get(idx)
            if rel is None:
                raise MissingInterpretation(f"no Kripke counterpart for {name!r}")
            interp[name] = tuple(tuple((w, v) in rel for v in range(n)) for w in range(n))
    return HolModel(n, m, interp, sig)


def kripke_env_to_hol(model: HolModel, env: Mapping[str, Tuple[sx.Sort, int]]) -> Dict[str, object]:
    """Translate a Kripke variable assignment (sort, code) into HOL values."""
    return {name: element(model, code, lift_sort(s)) for name, (s, code) in env.items()}


# ---------------------------------------------------------------- enumeration


def count_hol_models(sig: Signature, n_worlds: int, n_indiv: int) -> int:
    probe = HolModel(n_worlds, n_indiv)
    total = 1
    for ty in sig.consts.values():
        total *= probe.size(ty)
    return total


def enumerate_hol_models(sig: Signature, n_worlds: int = 1, n_indiv: int = 1, cap: int = 1_000_000,
                         fixed: Optional[Mapping[str, object]] = None) -> Iterator[HolModel]:
    """Every interpretation of ``sig``'s constants over the given carriers.

    Order is lexicographic over the interpretation codes with constants in
    declaration order (the first declared constant varies slowest).
    ``fixed`` pins some constants instead of enumerating them.
    """
    fixed = dict(fixed or {})
    probe = HolModel(n_worlds, n_indiv)
    free = [(name, ty) for name, ty in sig.consts.items() if name not in fixed]
    sizes = [probe.size(ty) for _, ty in free]
    total = 1
    for s in sizes:
        total *= s
    if total > cap:
        raise BoundsTooLarge(f"{total} interpretations exceed the cap of {cap}")
    for codes in product(*(range(s) for s in sizes)):
        interp = dict(fixed)
        for (name, ty), c in zip(free, codes):
            interp[name] = element(probe, c, ty)
        yield HolModel(n_worlds, n_indiv, interp, sig)


@dataclass
class HolVerdict:
    valid: bool
    models_checked: int
    countermodel: Optional[HolModel] = None


def find_hol_countermodel(term: HolTerm, sig: Signature, max_worlds: int = 1, max_indiv: int = 3,
                          cap: int = 1_000_000) -> HolVerdict:
    """Smallest standard model (worlds, then individuals, then enumeration order) falsifying a closed ``o`` term."""
    if typecheck(term, sig) != BOOL:
        raise HolModelError("only closed formulas of type o can be refuted")
    checked = 0
    for n in range(1, max_worlds + 1):
        for m in range(1, max_indiv + 1):
            for model in enumerate_hol_models(sig, n, m, cap):
                checked += 1
                if not eval_term(model, term):
                    return HolVerdict(False, checked, model)
    return HolVerdict(True, checked)


def embedded_truth(km: KripkeModel, ast: sx.ModalAst, preset: LogicPreset, decls: sx.Declarations,
                   world: Optional[int] = None) -> bool:
    """Truth of the unfolded embedding of ``ast`` in the HOL model induced by ``km``.

    With ``world`` the world predicate is applied to that world; without it
    the grounded statement is evaluated.  This is the HOL side of the
    faithfulness check against ``kripke``.
    """
    sig = signature_for(decls, preset)
    term = embed(ast, preset, sig)
    model = induce_hol_model(km, preset, sig)
    if world is None:
        return eval_term(model, normalize(ground(term, preset, sig)))
    return apply_value(model, eval_term(model, normalize(term)), world, PROP_T)
