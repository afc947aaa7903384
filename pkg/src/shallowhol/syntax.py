"""Surface syntax of the object logics: formula AST, parser, printer, problem files.

Formula grammar (precedence from tightest to loosest: prefix operators,
``&``, ``|``, ``->``, ``<->``; ``->`` is right-associative, ``&``, ``|`` and
``<->`` associate to the left; quantifier bodies extend as far right as
possible)::

    formula  ::= imp ('<->' imp)*
    imp      ::= disj ('->' imp)?
    disj     ::= conj ('|' conj)*
    conj     ::= unary ('&' unary)*
    unary    ::= ('not' | '~') unary
               | 'box' unary | 'dia' unary            default modality
               | '[' IDX ']' unary | '<' IDX '>' unary indexed modality
               | 'K_' IDX unary                       sugar for '[' IDX ']'
               | 'C' ('{' IDX (',' IDX)* '}')? unary  common knowledge (all indices if no set)
               | ('forall' | 'exists') binder+ '.' formula
               | ('all_free' | 'some_free') NAME '.' formula
               | atomic
    binder   ::= '(' NAME ':' sort ')'
    atomic   ::= 'top' | 'bot' | 'E' NAME | '(' formula ')' | NAME NAME*
    sort     ::= 'o' | 'indiv' | sort '->' sort | '(' sort ')'   arrows right-associative

Problem files are line oriented; ``#`` starts a comment and an indented line
continues the previous statement::

    logic    K | KB | KT | S4 | S5 | S5universal | S5equiv | custom
    frame    reflexive symmetric transitive euclidean universal   (custom only)
    domains  constant | varying
    grounding global | actual [WORLD]
    indices  NAME+
    const    NAME : sort
    axiom    NAME : formula
    conjecture NAME : formula
    schema   NAME binder+ : formula

Constant names ``r``, ``r_<index>`` and ``eiw`` are taken by the lifted
signature (accessibility relations and the existence predicate).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

DEFAULT_INDEX = "_"

FRAME_CLASSES = ("K", "KB", "KT", "S4", "S5universal", "S5equiv", "custom")
LOGIC_ALIASES = {"S5": "S5universal"}
FRAME_FLAGS = ("reflexive", "symmetric", "transitive", "euclidean", "universal")


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.col = col


class LogicSyntaxError(ParseError):
    pass


class UnknownSymbol(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class SortError(ParseError):
    pass


class DuplicateName(ParseError):
    pass


class UndeclaredLogic(ParseError):
    pass


# ---------------------------------------------------------------- sorts


@dataclass(frozen=True)
class SortBase:
    name: str  # "o" or "indiv"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SortArrow:
    dom: "Sort"
    cod: "Sort"

    def __str__(self) -> str:
        left = str(self.dom)
        if isinstance(self.dom, SortArrow):
            left = f"({left})"
        return f"{left} -> {self.cod}"


Sort = Union[SortBase, SortArrow]

PROP = SortBase("o")
INDIV = SortBase("indiv")


def sort_arrow(*sorts: Sort) -> Sort:
    if len(sorts) == 1:
        return sorts[0]
    return SortArrow(sorts[0], sort_arrow(*sorts[1:]))


def arg_sorts(sort: Sort) -> Tuple[Sort, ...]:
    """Argument sorts of a predicate sort ``A1 -> ... -> Ak -> o``."""
    out = []
    while isinstance(sort, SortArrow):
        out.append(sort.dom)
        sort = sort.cod
    return tuple(out)


def is_predicate_sort(sort: Sort) -> bool:
    """``o`` or ``A1 -> ... -> Ak -> o`` with every ``Ai`` valid."""
    while isinstance(sort, SortArrow):
        if not is_valid_sort(sort.dom):
            return False
        sort = sort.cod
    return sort == PROP


def is_valid_sort(sort: Sort) -> bool:
    return sort == INDIV or is_predicate_sort(sort)


def carrier_size(sort: Sort, n_worlds: int, n_indiv: int) -> int:
    """Number of elements of the world-lifted carrier of ``sort``.

    ``indiv`` has ``n_indiv`` elements; a predicate sort ``A1..Ak -> o`` is
    lifted to ``A1..Ak -> i -> o`` and has ``2 ** (|A1|...|Ak| * n_worlds)``.
    """
    if sort == INDIV:
        return n_indiv
    cells = n_worlds
    for a in arg_sorts(sort):
        cells *= carrier_size(a, n_worlds, n_indiv)
    return 2**cells


def table_shape(sort: Sort, n_worlds: int, n_indiv: int) -> Tuple[int, ...]:
    """Shape (argument radices..., worlds) of a predicate sort's truth table."""
    return tuple(carrier_size(a, n_worlds, n_indiv) for a in arg_sorts(sort)) + (n_worlds,)


def flat_index(indices: Sequence[int], shape: Sequence[int]) -> int:
    """Row-major position of ``indices`` in a table of ``shape``."""
    pos = 0
    for i, size in zip(indices, shape):
        pos = pos * size + i
    return pos


# ---------------------------------------------------------------- formula AST


@dataclass(frozen=True)
class Atom:
    name: str
    args: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Not:
    f: "ModalAst"


@dataclass(frozen=True)
class And:
    left: "ModalAst"
    right: "ModalAst"


@dataclass(frozen=True)
class Or:
    left: "ModalAst"
    right: "ModalAst"


@dataclass(frozen=True)
class Implies:
    left: "ModalAst"
    right: "ModalAst"


@dataclass(frozen=True)
class Iff:
    left: "ModalAst"
    right: "ModalAst"


@dataclass(frozen=True)
class Box:
    index: str
    f: "ModalAst"


@dataclass(frozen=True)
class Dia:
    index: str
    f: "ModalAst"


@dataclass(frozen=True)
class Forall:
    var: str
    sort: Sort
    f: "ModalAst"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    f: "ModalAst"


@dataclass(frozen=True)
class FreeForall:
    var: str
    f: "ModalAst"


@dataclass(frozen=True)
class FreeExists:
    var: str
    f: "ModalAst"


@dataclass(frozen=True)
class ExistsPred:
    term: str


@dataclass(frozen=True)
class CommonKnows:
    indices: FrozenSet[str]
    f: "ModalAst"


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


ModalAst = Union[
    Atom, Not, And, Or, Implies, Iff, Box, Dia, Forall, Exists,
    FreeForall, FreeExists, ExistsPred, CommonKnows, Top, Bottom,
]

BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists, FreeForall, FreeExists)


def children(f: ModalAst) -> Tuple[ModalAst, ...]:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Not, Box, Dia, Forall, Exists, FreeForall, FreeExists, CommonKnows)):
        return (f.f,)
    return ()


def subformulas(f: ModalAst):
    yield f
    for c in children(f):
        yield from subformulas(c)


def depth(f: ModalAst) -> int:
    return 1 + max((depth(c) for c in children(f)), default=0)


def is_propositional(f: ModalAst) -> bool:
    """No quantifiers, no predicate arguments, no free-logic nodes, no common knowledge."""
    for g in subformulas(f):
        if isinstance(g, (Forall, Exists, FreeForall, FreeExists, ExistsPred, CommonKnows)):
            return False
        if isinstance(g, Atom) and g.args:
            return False
    return True


def atoms_of(f: ModalAst) -> List[str]:
    seen: Dict[str, None] = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            seen.setdefault(g.name)
    return list(seen)


def symbols_of(f: ModalAst, bound: FrozenSet[str] = frozenset()) -> set:
    """Free names (constants and unbound variables) occurring in ``f``."""
    if isinstance(f, Atom):
        return {n for n in (f.name,) + f.args if n not in bound}
    if isinstance(f, ExistsPred):
        return set() if f.term in bound else {f.term}
    if isinstance(f, QUANTIFIERS):
        return symbols_of(f.f, bound | {f.var})
    out = set()
    for c in children(f):
        out |= symbols_of(c, bound)
    return out


def modal_indices(f: ModalAst) -> set:
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Box, Dia)):
            out.add(g.index)
        elif isinstance(g, CommonKnows):
            out |= set(g.indices)
    return out


# ---------------------------------------------------------------- declarations


# accessibility constants (r, r_<index>) and the existence predicate live in the lifted signature
EMBEDDING_RESERVED = frozenset({"r", "eiw"})


@dataclass
class Declarations:
    consts: Dict[str, Sort] = field(default_factory=dict)
    indices: Tuple[str, ...] = (DEFAULT_INDEX,)

    def declare(self, name: str, sort: Sort) -> None:
        if name in self.consts:
            raise DuplicateName(f"constant {name!r} declared twice")
        if name in KEYWORDS or name in ("o", "indiv") or _K_INDEX.fullmatch(name):
            raise LogicSyntaxError(f"{name!r} is a keyword")
        if name in EMBEDDING_RESERVED or name.startswith("r_"):
            raise DuplicateName(f"{name!r} is reserved for the embedding (accessibility or existence)")
        if not is_valid_sort(sort):
            raise SortError(f"unsupported sort {sort} for {name!r}")
        self.consts[name] = sort


def decls(indices: Sequence[str] = (DEFAULT_INDEX,), **consts: Union[str, Sort]) -> Declarations:
    """Shorthand: ``decls(p="o", P="indiv -> o")``."""
    d = Declarations(indices=tuple(indices))
    for name, s in consts.items():
        d.declare(name, parse_sort(s) if isinstance(s, str) else s)
    return d


# ---------------------------------------------------------------- lexer

KEYWORDS = frozenset(
    "not box dia forall exists all_free some_free E C top bot".split()
)
_K_INDEX = re.compile(r"K_([A-Za-z0-9][A-Za-z0-9_]*)")
_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<sym><->|->|[~&|()\[\]<>{},.:])
  | (?P<name>[A-Za-z][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "sym", "name", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str, line0: int = 1) -> List[Token]:
    tokens = []
    pos = 0
    line, line_start = line0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LogicSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            chunk = m.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
        else:
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, tokens: List[Token], decls: Declarations):
        self.toks = tokens
        self.i = 0
        self.decls = decls

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, cls, msg, tok: Optional[Token] = None):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text and (
            self.tok.kind == "sym" or text in KEYWORDS or text in ("o", "indiv")
        )

    def expect(self, text: str) -> Token:
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise self.error(LogicSyntaxError, f"expected {text!r}, found {got!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self) -> Token:
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS or _K_INDEX.fullmatch(t.text):
            raise self.error(LogicSyntaxError, f"expected a name, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    # sorts
    def sort(self) -> Sort:
        left = self.sort_atom()
        if self.at("->"):
            self.i += 1
            return SortArrow(left, self.sort())
        return left

    def sort_atom(self) -> Sort:
        if self.at("("):
            self.i += 1
            s = self.sort()
            self.expect(")")
            return s
        t = self.tok
        if t.kind == "name" and t.text in ("o", "indiv"):
            self.i += 1
            return PROP if t.text == "o" else INDIV
        raise self.error(LogicSyntaxError, f"expected a sort, found {t.text or 'end of input'!r}")

    # formulas
    def formula(self, env) -> ModalAst:
        left = self.imp(env)
        while self.at("<->"):
            self.i += 1
            left = Iff(left, self.imp(env))
        return left

    def imp(self, env) -> ModalAst:
        left = self.disj(env)
        if self.at("->"):
            self.i += 1
            return Implies(left, self.imp(env))
        return left

    def disj(self, env) -> ModalAst:
        left = self.conj(env)
        while self.at("|"):
            self.i += 1
            left = Or(left, self.conj(env))
        return left

    def conj(self, env) -> ModalAst:
        left = self.unary(env)
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary(env))
        return left

    def index(self) -> str:
        t = self.name()
        if t.text not in self.decls.indices:
            raise self.error(UnknownSymbol, f"unknown modality index {t.text!r}", t)
        return t.text

    def default_index(self, tok: Token) -> str:
        if DEFAULT_INDEX not in self.decls.indices:
            raise self.error(UnknownSymbol, "no default modality; use [index]", tok)
        return DEFAULT_INDEX

    def unary(self, env) -> ModalAst:
        t = self.tok
        if self.at("not") or self.at("~"):
            self.i += 1
            return Not(self.unary(env))
        if self.at("box"):
            self.i += 1
            return Box(self.default_index(t), self.unary(env))
        if self.at("dia"):
            self.i += 1
            return Dia(self.default_index(t), self.unary(env))
        if self.at("["):
            self.i += 1
            idx = self.index()
            self.expect("]")
            return Box(idx, self.unary(env))
        if self.at("<"):
            self.i += 1
            idx = self.index()
            self.expect(">")
            return Dia(idx, self.unary(env))
        if t.kind == "name" and _K_INDEX.fullmatch(t.text):
            idx = _K_INDEX.fullmatch(t.text).group(1)
            if idx not in self.decls.indices:
                raise self.error(UnknownSymbol, f"unknown agent {idx!r}", t)
            self.i += 1
            return Box(idx, self.unary(env))
        if self.at("C"):
            self.i += 1
            if self.at("{"):
                self.i += 1
                idxs = [self.index()]
                while self.at(","):
                    self.i += 1
                    idxs.append(self.index())
                self.expect("}")
            else:
                idxs = list(self.decls.indices)
            return CommonKnows(frozenset(idxs), self.unary(env))
        if self.at("forall") or self.at("exists"):
            self.i += 1
            binders = [self.binder()]
            while self.at("("):
                binders.append(self.binder())
            self.expect(".")
            inner = dict(env)
            for v, s in binders:
                inner[v] = s
            body = self.formula(inner)
            node = Forall if t.text == "forall" else Exists
            for v, s in reversed(binders):
                body = node(v, s, body)
            return body
        if self.at("all_free") or self.at("some_free"):
            self.i += 1
            v = self.name().text
            self.expect(".")
            inner = dict(env)
            inner[v] = INDIV
            body = self.formula(inner)
            return FreeForall(v, body) if t.text == "all_free" else FreeExists(v, body)
        return self.atomic(env)

    def binder(self) -> Tuple[str, Sort]:
        self.expect("(")
        v = self.name().text
        self.expect(":")
        start = self.tok
        s = self.sort()
        if not is_valid_sort(s):
            raise self.error(SortError, f"unsupported sort {s}", start)
        self.expect(")")
        return v, s

    def lookup(self, tok: Token, env) -> Sort:
        s = env.get(tok.text)
        if s is None:
            s = self.decls.consts.get(tok.text)
        if s is None:
            raise self.error(UnknownSymbol, f"unknown symbol {tok.text!r}", tok)
        return s

    def atomic(self, env) -> ModalAst:
        if self.at("top"):
            self.i += 1
            return Top()
        if self.at("bot"):
            self.i += 1
            return Bottom()
        if self.at("E"):
            self.i += 1
            a = self.name()
            if self.lookup(a, env) != INDIV:
                raise self.error(SortError, f"E expects an individual, {a.text!r} is not one", a)
            return ExistsPred(a.text)
        if self.at("("):
            self.i += 1
            f = self.formula(env)
            self.expect(")")
            return f
        head = self.name()
        hsort = self.lookup(head, env)
        args = []
        while self.tok.kind == "name" and self.tok.text not in KEYWORDS and not _K_INDEX.fullmatch(self.tok.text):
            args.append(self.name())
        expected = arg_sorts(hsort)
        if hsort == INDIV:
            raise self.error(SortError, f"{head.text!r} is an individual, not a formula", head)
        if len(args) != len(expected):
            raise self.error(
                ArityMismatch, f"{head.text!r} expects {len(expected)} argument(s), got {len(args)}", head
            )
        for a, s in zip(args, expected):
            if self.lookup(a, env) != s:
                raise self.error(SortError, f"argument {a.text!r} of {head.text!r} should have sort {s}", a)
        return Atom(head.text, tuple(a.text for a in args))


def _guard_depth(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RecursionError:
            raise LogicSyntaxError("input nested too deeply") from None

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_guard_depth
def parse_formula(text: str, decls: Optional[Declarations] = None, env: Optional[Mapping[str, Sort]] = None) -> ModalAst:
    """Parse one formula; ``env`` gives sorts of variables bound outside the text."""
    decls = decls if decls is not None else Declarations()
    p = _Parser(tokenize(text), decls)
    f = p.formula(dict(env or {}))
    if p.tok.kind != "eof":
        raise p.error(LogicSyntaxError, f"unexpected {p.tok.text!r}")
    return f


@_guard_depth
def parse_sort(text: str) -> Sort:
    p = _Parser(tokenize(text), Declarations())
    s = p.sort()
    if p.tok.kind != "eof":
        raise p.error(LogicSyntaxError, f"unexpected {p.tok.text!r}")
    return s


# ---------------------------------------------------------------- printer

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_UNARY = 5
_ATOM = 6


def _prec(f: ModalAst) -> int:
    return _PREC.get(type(f), _UNARY if not isinstance(f, (Atom, Top, Bottom, ExistsPred)) else _ATOM)


def print_formula(f: ModalAst) -> str:
    """Canonical text; ``parse_formula(print_formula(f))`` gives back ``f``."""
    return _print(f, True)


def _wrap(f: ModalAst, needs: bool, tail: bool) -> str:
    if needs:
        return "(" + _print(f, True) + ")"
    return _print(f, tail)


def _print(f: ModalAst, tail: bool) -> str:
    if isinstance(f, Atom):
        return " ".join((f.name,) + f.args)
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, ExistsPred):
        return f"E {f.term}"
    if isinstance(f, BINARY):
        p = _PREC[type(f)]
        right_assoc = isinstance(f, Implies)
        lp, rp = _prec(f.left), _prec(f.right)
        l_needs = lp < p or (right_assoc and lp == p) or isinstance(f.left, QUANTIFIERS)
        r_needs = rp < p or (not right_assoc and rp == p) or (isinstance(f.right, QUANTIFIERS) and not tail)
        return f"{_wrap(f.left, l_needs, False)} {_OPS[type(f)]} {_wrap(f.right, r_needs, tail)}"
    if isinstance(f, QUANTIFIERS):
        if isinstance(f, (Forall, Exists)):
            kw = "forall" if isinstance(f, Forall) else "exists"
            head = f"{kw} ({f.var}: {f.sort})."
        else:
            kw = "all_free" if isinstance(f, FreeForall) else "some_free"
            head = f"{kw} {f.var}."
        return f"{head} {_print(f.f, True)}"
    # prefix operators
    if isinstance(f, Not):
        op = "not"
    elif isinstance(f, Box):
        op = "box" if f.index == DEFAULT_INDEX else f"[{f.index}]"
    elif isinstance(f, Dia):
        op = "dia" if f.index == DEFAULT_INDEX else f"<{f.index}>"
    elif isinstance(f, CommonKnows):
        op = "C{" + ",".join(sorted(f.indices)) + "}"
    else:
        raise TypeError(f"not a formula: {f!r}")
    inner = f.f
    needs = _prec(inner) < _UNARY or (isinstance(inner, QUANTIFIERS) and not tail)
    body = _wrap(inner, needs, tail)
    sep = "" if body.startswith("(") and op.endswith(("]", ">", "}")) else " "
    return f"{op}{sep}{body}"


# ---------------------------------------------------------------- problem files


@dataclass
class Schema:
    name: str
    params: Tuple[Tuple[str, Sort], ...]
    body: ModalAst


@dataclass
class ProblemFile:
    logic: str = "K"
    frame_flags: FrozenSet[str] = frozenset()
    domains: str = "constant"
    grounding: str = "global"
    actual_world: str = "w0"
    decls: Declarations = field(default_factory=Declarations)
    axioms: Dict[str, ModalAst] = field(default_factory=dict)
    conjectures: Dict[str, ModalAst] = field(default_factory=dict)
    schemas: Dict[str, Schema] = field(default_factory=dict)

    def formula(self, name: str) -> ModalAst:
        if name in self.conjectures:
            return self.conjectures[name]
        if name in self.axioms:
            return self.axioms[name]
        raise KeyError(name)


def _statements(text: str):
    """Yield (line number, statement text) with comments stripped and continuations joined."""
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0] in " \t":
            if current is None:
                raise LogicSyntaxError("continuation line without a statement", lineno, 1)
            current[1].append(line.strip())
            continue
        if current is not None:
            yield current[0], " ".join(current[1])
        current = (lineno, [line.strip()])
    if current is not None:
        yield current[0], " ".join(current[1])


def _split_named(rest: str, lineno: int):
    name, sep, body = rest.partition(":")
    name = name.strip()
    if not sep or not re.fullmatch(r"[A-Za-z0-9][A-Za-z0-9_'\-]*", name):
        raise LogicSyntaxError("expected 'NAME : ...'", lineno, 1)
    return name, body


@_guard_depth
def parse_problem(text: str) -> ProblemFile:
    pf = ProblemFile()
    logic_seen = False
    indices_declared = False
    names: Dict[str, int] = {}
    pending = []  # formulas are parsed after all declarations are known
    for lineno, stmt in _statements(text):
        keyword, _, rest = stmt.partition(" ")
        rest = rest.strip()
        if keyword == "logic":
            name = LOGIC_ALIASES.get(rest, rest)
            if name not in FRAME_CLASSES:
                raise UndeclaredLogic(f"unknown logic {rest!r}", lineno, 1)
            pf.logic = name
            logic_seen = True
        elif keyword == "frame":
            flags = frozenset(rest.split())
            bad = flags - set(FRAME_FLAGS)
            if bad:
                raise LogicSyntaxError(f"unknown frame flag(s) {sorted(bad)}", lineno, 1)
            pf.frame_flags = flags
        elif keyword == "domains":
            if rest not in ("constant", "varying"):
                raise LogicSyntaxError("domains must be 'constant' or 'varying'", lineno, 1)
            pf.domains = rest
        elif keyword == "grounding":
            parts = rest.split()
            if not parts or parts[0] not in ("global", "actual") or len(parts) > 2:
                raise LogicSyntaxError("grounding must be 'global' or 'actual [WORLD]'", lineno, 1)
            pf.grounding = parts[0]
            if len(parts) == 2:
                pf.actual_world = parts[1]
        elif keyword == "indices":
            idxs = rest.split()
            if not idxs or len(set(idxs)) != len(idxs):
                raise LogicSyntaxError("indices needs distinct names", lineno, 1)
            for ix in idxs:
                if not re.fullmatch(r"[A-Za-z0-9][A-Za-z0-9_]*", ix):
                    raise LogicSyntaxError(f"bad index name {ix!r}", lineno, 1)
            pf.decls.indices = tuple(idxs)
            indices_declared = True
        elif keyword == "const":
            name, body = _split_named(rest, lineno)
            try:
                pf.decls.declare(name, parse_sort(body))
            except ParseError as exc:
                raise type(exc)(exc.message, lineno, exc.col) from None
        elif keyword in ("axiom", "conjecture", "schema"):
            if keyword == "schema":
                name, _, after = rest.partition(" ")
                name = name.strip()
                sig = body = None
                level = 0
                for pos, ch in enumerate(after):
                    level += {"(": 1, ")": -1}.get(ch, 0)
                    if ch == ":" and level == 0:
                        sig, body = after[:pos], after[pos + 1:]
                        break
                if sig is None or not sig.strip():
                    raise LogicSyntaxError("expected 'schema NAME (x: sort)... : formula'", lineno, 1)
            else:
                name, body = _split_named(rest, lineno)
                sig = ""
            if name in names:
                raise DuplicateName(f"{name!r} already used on line {names[name]}", lineno, 1)
            names[name] = lineno
            pending.append((keyword, name, sig, body, lineno))
        else:
            raise LogicSyntaxError(f"unknown statement {keyword!r}", lineno, 1)
    if not logic_seen:
        raise UndeclaredLogic("missing 'logic' declaration")
    if not indices_declared:
        pf.decls.indices = (DEFAULT_INDEX,)
    for keyword, name, sig, body, lineno in pending:
        try:
            if keyword == "schema":
                p = _Parser(tokenize(sig, lineno), pf.decls)
                params = [p.binder()]
                while p.at("("):
                    params.append(p.binder())
                if p.tok.kind != "eof":
                    raise p.error(LogicSyntaxError, f"unexpected {p.tok.text!r}")
                f = parse_formula(body, pf.decls, dict(params))
                pf.schemas[name] = Schema(name, tuple(params), f)
            else:
                f = parse_formula(body, pf.decls)
                (pf.axioms if keyword == "axiom" else pf.conjectures)[name] = f
        except ParseError as exc:
            raise type(exc)(exc.message, lineno, exc.col) from None
    return pf


def print_problem(pf: ProblemFile) -> str:
    """Canonical problem-file text (re-parses to an equal ``ProblemFile``)."""
    logic = "S5" if pf.logic == "S5universal" else pf.logic
    lines = [f"logic {logic}"]
    if pf.frame_flags:
        lines.append("frame " + " ".join(f for f in FRAME_FLAGS if f in pf.frame_flags))
    lines.append(f"domains {pf.domains}")
    lines.append(f"grounding {pf.grounding}" + (f" {pf.actual_world}" if pf.grounding == "actual" else ""))
    if pf.decls.indices != (DEFAULT_INDEX,):
        lines.append("indices " + " ".join(pf.decls.indices))
    for name, s in pf.decls.consts.items():
        lines.append(f"const {name} : {s}")
    for name, f in pf.axioms.items():
        lines.append(f"axiom {name} : {print_formula(f)}")
    for name, sc in pf.schemas.items():
        params = " ".join(f"({v}: {s})" for v, s in sc.params)
        lines.append(f"schema {name} {params} : {print_formula(sc.body)}")
    for name, f in pf.conjectures.items():
        lines.append(f"conjecture {name} : {print_formula(f)}")
    return "\n".join(lines) + "\n"
