"""Simply typed lambda calculus core of classical higher-order logic.

Types are ``o`` (truth values), ``i`` (possible worlds), ``e`` (individuals)
and right-associative arrows.  Terms are constants, variables, applications
and typed abstractions.  Every binder carries its type, so there is no type
inference: ``typecheck`` only propagates annotations.

Canonical text rendering (used for golden tests, see ``render``)::

    term  ::= '\\' NAME ':' btype '.' term        abstraction, body extends right
            | app
    app   ::= atom atom*                          left-associative application
    atom  ::= NAME | '(' term ')'
    btype ::= base | '(' type ')'                 arrows in binders are parenthesised
    type  ::= base ('->' type)?                   right-associative
    base  ::= 'o' | 'i' | 'e' | "'" NAME

Logical constants are ordinary constants with reserved names: ``true``,
``false``, ``not``, ``and``, ``or``, ``imp``, ``iff`` and the type-indexed
families ``all``, ``ex`` (type ``(a -> o) -> o``) and ``eq`` (type
``a -> a -> o``).  The kernel is monomorphic; a family member is a ``Const``
whose type is an instance of the family schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Union


class KernelError(Exception):
    pass


class UnboundConstant(KernelError):
    def __init__(self, name: str):
        super().__init__(f"unbound constant {name!r}")
        self.name = name


class TypeMismatch(KernelError):
    def __init__(self, position: str, expected, found):
        super().__init__(f"type mismatch at {position or '<root>'}: expected {expected}, found {found}")
        self.position = position
        self.expected = expected
        self.found = found


class SignatureError(KernelError):
    pass


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class BaseType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Arrow:
    dom: "HolType"
    cod: "HolType"

    def __str__(self) -> str:
        return render_type(self)


@dataclass(frozen=True)
class TypeVar:
    name: str

    def __str__(self) -> str:
        return "'" + self.name


HolType = Union[BaseType, Arrow, TypeVar]

BOOL = BaseType("o")
WORLD = BaseType("i")
INDIV = BaseType("e")


def arrow(*types: HolType) -> HolType:
    """``arrow(a, b, c)`` is ``a -> b -> c``."""
    if len(types) == 1:
        return types[0]
    return Arrow(types[0], arrow(*types[1:]))


def render_type(ty: HolType) -> str:
    if isinstance(ty, Arrow):
        left = render_type(ty.dom)
        if isinstance(ty.dom, Arrow):
            left = f"({left})"
        return f"{left} -> {render_type(ty.cod)}"
    return str(ty)


def has_typevars(ty: HolType) -> bool:
    if isinstance(ty, TypeVar):
        return True
    if isinstance(ty, Arrow):
        return has_typevars(ty.dom) or has_typevars(ty.cod)
    return False


def match_type(pattern: HolType, ty: HolType, binding: Optional[Dict[str, HolType]] = None):
    """One-way matching of a schema type against a ground type.

    Returns the binding of type variables or ``None`` when ``ty`` is not an
    instance of ``pattern``.
    """
    binding = {} if binding is None else binding
    if isinstance(pattern, TypeVar):
        bound = binding.get(pattern.name)
        if bound is None:
            binding[pattern.name] = ty
            return binding
        return binding if bound == ty else None
    if isinstance(pattern, Arrow):
        if not isinstance(ty, Arrow):
            return None
        if match_type(pattern.dom, ty.dom, binding) is None:
            return None
        return match_type(pattern.cod, ty.cod, binding)
    return binding if pattern == ty else None


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Const:
    name: str
    type: HolType

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Var:
    name: str
    type: HolType

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class App:
    fn: "HolTerm"
    arg: "HolTerm"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Lam:
    var: str
    var_type: HolType
    body: "HolTerm"

    def __str__(self) -> str:
        return render(self)


HolTerm = Union[Const, Var, App, Lam]


def apply(fn: HolTerm, *args: HolTerm) -> HolTerm:
    for a in args:
        fn = App(fn, a)
    return fn


# ---------------------------------------------------------------- logical constants

_A = TypeVar("a")

LOGICAL_SCHEMAS: Mapping[str, HolType] = {
    "true": BOOL,
    "false": BOOL,
    "not": Arrow(BOOL, BOOL),
    "and": arrow(BOOL, BOOL, BOOL),
    "or": arrow(BOOL, BOOL, BOOL),
    "imp": arrow(BOOL, BOOL, BOOL),
    "iff": arrow(BOOL, BOOL, BOOL),
    "all": Arrow(Arrow(_A, BOOL), BOOL),
    "ex": Arrow(Arrow(_A, BOOL), BOOL),
    "eq": arrow(_A, _A, BOOL),
}

TRUE = Const("true", BOOL)
FALSE = Const("false", BOOL)
NOT = Const("not", Arrow(BOOL, BOOL))
AND = Const("and", arrow(BOOL, BOOL, BOOL))
OR = Const("or", arrow(BOOL, BOOL, BOOL))
IMP = Const("imp", arrow(BOOL, BOOL, BOOL))
IFF = Const("iff", arrow(BOOL, BOOL, BOOL))


def forall_const(ty: HolType) -> Const:
    return Const("all", Arrow(Arrow(ty, BOOL), BOOL))


def exists_const(ty: HolType) -> Const:
    return Const("ex", Arrow(Arrow(ty, BOOL), BOOL))


def eq_const(ty: HolType) -> Const:
    return Const("eq", arrow(ty, ty, BOOL))


def mk_forall(var: str, ty: HolType, body: HolTerm) -> HolTerm:
    return App(forall_const(ty), Lam(var, ty, body))


def mk_exists(var: str, ty: HolType, body: HolTerm) -> HolTerm:
    return App(exists_const(ty), Lam(var, ty, body))


# ---------------------------------------------------------------- signature


@dataclass
class Signature:
    """Declared constants plus the set of names user declarations may not take."""

    consts: Dict[str, HolType] = field(default_factory=dict)
    reserved: FrozenSet[str] = frozenset(LOGICAL_SCHEMAS)

    def declare(self, name: str, ty: HolType) -> None:
        if name in self.reserved:
            raise SignatureError(f"{name!r} is a reserved name")
        self._add(name, ty)

    def declare_reserved(self, name: str, ty: HolType) -> None:
        """Declare one of the artifact's own constants (accessibility, existence, ...)."""
        self.reserved = self.reserved | {name}
        self._add(name, ty)

    def _add(self, name: str, ty: HolType) -> None:
        if name in self.consts or name in LOGICAL_SCHEMAS:
            raise SignatureError(f"{name!r} declared twice")
        if has_typevars(ty):
            raise SignatureError(f"{name!r}: declared types must be ground")
        self.consts[name] = ty

    def lookup(self, name: str) -> Optional[HolType]:
        return self.consts.get(name)

    def copy(self) -> "Signature":
        return Signature(dict(self.consts), self.reserved)


# ---------------------------------------------------------------- typing


def typecheck(term: HolTerm, sig: Optional[Signature] = None) -> HolType:
    """Return the type of ``term``; raises ``UnboundConstant`` or ``TypeMismatch``.

    Free variables are typed by their own annotation.  With ``sig=None`` only
    logical constants are resolvable.
    """
    return _typecheck(term, sig, {}, "")


def _typecheck(term, sig, ctx, pos) -> HolType:
    if isinstance(term, Var):
        bound = ctx.get(term.name)
        if bound is not None and bound != term.type:
            raise TypeMismatch(pos, bound, term.type)
        return term.type
    if isinstance(term, Const):
        schema = LOGICAL_SCHEMAS.get(term.name)
        if schema is not None:
            if match_type(schema, term.type) is None or has_typevars(term.type):
                raise TypeMismatch(pos, schema, term.type)
            return term.type
        declared = sig.lookup(term.name) if sig is not None else None
        if declared is None:
            raise UnboundConstant(term.name)
        if declared != term.type:
            raise TypeMismatch(pos, declared, term.type)
        return term.type
    if isinstance(term, App):
        fty = _typecheck(term.fn, sig, ctx, pos + ".fn" if pos else "fn")
        aty = _typecheck(term.arg, sig, ctx, pos + ".arg" if pos else "arg")
        if not isinstance(fty, Arrow):
            raise TypeMismatch(pos, Arrow(aty, TypeVar("?")), fty)
        if fty.dom != aty:
            raise TypeMismatch(pos + ".arg" if pos else "arg", fty.dom, aty)
        return fty.cod
    if isinstance(term, Lam):
        inner = dict(ctx)
        inner[term.var] = term.var_type
        body = _typecheck(term.body, sig, inner, pos + ".body" if pos else "body")
        return Arrow(term.var_type, body)
    raise TypeError(f"not a HOL term: {term!r}")


# ---------------------------------------------------------------- variables


def free_vars(term: HolTerm) -> FrozenSet[str]:
    if isinstance(term, Var):
        return frozenset([term.name])
    if isinstance(term, Const):
        return frozenset()
    if isinstance(term, App):
        return free_vars(term.fn) | free_vars(term.arg)
    return free_vars(term.body) - {term.var}


def _free_occurrence_types(term: HolTerm, name: str, bound: FrozenSet[str] = frozenset()):
    if isinstance(term, Var):
        if term.name == name and name not in bound:
            yield term.type
    elif isinstance(term, App):
        yield from _free_occurrence_types(term.fn, name, bound)
        yield from _free_occurrence_types(term.arg, name, bound)
    elif isinstance(term, Lam):
        if term.var != name:
            yield from _free_occurrence_types(term.body, name, bound)


def _all_names(term: HolTerm, acc: set) -> set:
    if isinstance(term, (Var, Const)):
        acc.add(term.name)
    elif isinstance(term, App):
        _all_names(term.fn, acc)
        _all_names(term.arg, acc)
    else:
        acc.add(term.var)
        _all_names(term.body, acc)
    return acc


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """First of ``base'``, ``base''``, ... not in ``avoid``."""
    avoid = set(avoid)
    primes = 1
    while True:
        candidate = base + "'" * primes
        if candidate not in avoid:
            return candidate
        primes += 1


# ---------------------------------------------------------------- substitution


def substitute(term: HolTerm, var: str, replacement: HolTerm, sig: Optional[Signature] = None) -> HolTerm:
    """Capture-avoiding ``term[var := replacement]``.

    Raises ``TypeMismatch`` if a free occurrence of ``var`` is annotated with
    a type other than the replacement's.
    """
    rty = typecheck(replacement, sig)
    for ty in _free_occurrence_types(term, var):
        if ty != rty:
            raise TypeMismatch(var, ty, rty)
    return _subst(term, var, replacement, free_vars(replacement))


def _subst(term, var, repl, repl_fv):
    if isinstance(term, Var):
        return repl if term.name == var else term
    if isinstance(term, Const):
        return term
    if isinstance(term, App):
        fn = _subst(term.fn, var, repl, repl_fv)
        arg = _subst(term.arg, var, repl, repl_fv)
        if fn is term.fn and arg is term.arg:
            return term
        return App(fn, arg)
    if term.var == var or var not in free_vars(term.body):
        return term
    if term.var in repl_fv:
        avoid = _all_names(term.body, set(repl_fv)) | {var}
        new = fresh_name(term.var, avoid)
        body = _subst(term.body, term.var, Var(new, term.var_type), frozenset([new]))
        return Lam(new, term.var_type, _subst(body, var, repl, repl_fv))
    return Lam(term.var, term.var_type, _subst(term.body, var, repl, repl_fv))


# ---------------------------------------------------------------- normalisation


def beta_normalize(term: HolTerm) -> HolTerm:
    if isinstance(term, (Var, Const)):
        return term
    if isinstance(term, Lam):
        return Lam(term.var, term.var_type, beta_normalize(term.body))
    fn = beta_normalize(term.fn)
    arg = beta_normalize(term.arg)
    if isinstance(fn, Lam):
        return beta_normalize(_subst(fn.body, fn.var, arg, free_vars(arg)))
    return App(fn, arg)


def eta_contract(term: HolTerm) -> HolTerm:
    if isinstance(term, (Var, Const)):
        return term
    if isinstance(term, App):
        return App(eta_contract(term.fn), eta_contract(term.arg))
    body = eta_contract(term.body)
    if (
        isinstance(body, App)
        and isinstance(body.arg, Var)
        and body.arg.name == term.var
        and term.var not in free_vars(body.fn)
    ):
        return body.fn
    return Lam(term.var, term.var_type, body)


def beta_eta_normalize(term: HolTerm) -> HolTerm:
    """β-normal form followed by η-contraction.

    η-contraction of a β-normal term of the simply typed calculus cannot
    create a new β-redex, so the result is βη-normal.
    """
    return eta_contract(beta_normalize(term))


normalize = beta_eta_normalize


# ---------------------------------------------------------------- alpha equivalence


def alpha_eq(t1: HolTerm, t2: HolTerm) -> bool:
    return _alpha(t1, t2, {}, {}, 0)


def _alpha(a, b, env_a, env_b, depth) -> bool:
    if isinstance(a, Var) and isinstance(b, Var):
        da, db = env_a.get(a.name), env_b.get(b.name)
        if da is None and db is None:
            return a.name == b.name and a.type == b.type
        return da == db
    if isinstance(a, Const) and isinstance(b, Const):
        return a == b
    if isinstance(a, App) and isinstance(b, App):
        return _alpha(a.fn, b.fn, env_a, env_b, depth) and _alpha(a.arg, b.arg, env_a, env_b, depth)
    if isinstance(a, Lam) and isinstance(b, Lam):
        if a.var_type != b.var_type:
            return False
        ea = dict(env_a)
        eb = dict(env_b)
        ea[a.var] = depth
        eb[b.var] = depth
        return _alpha(a.body, b.body, ea, eb, depth + 1)
    return False


# ---------------------------------------------------------------- rendering


def _binder_type(ty: HolType) -> str:
    text = render_type(ty)
    return f"({text})" if isinstance(ty, Arrow) else text


def render(term: HolTerm) -> str:
    """Canonical text form, e.g. ``\\w:i. and (p w) (q w)``."""
    if isinstance(term, (Var, Const)):
        return term.name
    if isinstance(term, Lam):
        return f"\\{term.var}:{_binder_type(term.var_type)}. {render(term.body)}"
    head = term
    args = []
    while isinstance(head, App):
        args.append(head.arg)
        head = head.fn
    parts = [f"({render(head)})" if isinstance(head, Lam) else render(head)]
    for a in reversed(args):
        parts.append(render(a) if isinstance(a, (Var, Const)) else f"({render(a)})")
    return " ".join(parts)
