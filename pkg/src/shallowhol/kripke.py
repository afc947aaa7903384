"""Possible-world semantics evaluated directly on finite Kripke models.

This module does not touch HOL terms at all; it is the reference oracle the
embedding is checked against.

Valuations are stored per constant, by sort:

* ``o``: frozenset of worlds where the proposition holds;
* ``indiv``: an element of the carrier ``range(carrier)``;
* predicate sorts ``A1 -> ... -> Ak -> o``: frozenset of tuples
  ``(a1, ..., ak, world)``, where an argument of predicate sort is given by
  its *code*.

The code of an element of a lifted predicate carrier is the bitmask of its
truth table, with bit ``flat_index((a1, ..., ak, w), table_shape(sort))``
set when the element holds of ``a1..ak`` at ``w``.  Variables of predicate
sort are bound to codes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from . import syntax as sx
from .embedding import LogicPreset


class KripkeError(Exception):
    pass


class UnboundVariable(KripkeError):
    pass


class SortError(KripkeError):
    pass


Edge = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class KripkeModel:
    n_worlds: int
    access: Mapping[str, FrozenSet[Edge]]
    carrier: int = 1
    domains: Optional[Tuple[FrozenSet[int], ...]] = None
    valuation: Mapping[str, object] = field(default_factory=dict)
    sorts: Mapping[str, sx.Sort] = field(default_factory=dict)
    actual: int = 0

    def __post_init__(self):
        if self.n_worlds < 1:
            raise KripkeError("a model needs at least one world")
        if self.carrier < 1:
            raise KripkeError("the global carrier must be nonempty")
        worlds = range(self.n_worlds)
        access = {}
        for idx, rel in self.access.items():
            rel = frozenset((int(a), int(b)) for a, b in rel)
            if any(a not in worlds or b not in worlds for a, b in rel):
                raise KripkeError(f"relation {idx!r} mentions unknown worlds")
            access[idx] = rel
        object.__setattr__(self, "access", access)
        if self.domains is None:
            object.__setattr__(self, "domains", tuple(frozenset(range(self.carrier)) for _ in worlds))
        else:
            doms = tuple(frozenset(d) for d in self.domains)
            if len(doms) != self.n_worlds or any(not d <= set(range(self.carrier)) for d in doms):
                raise KripkeError("per-world domains must be subsets of the carrier, one per world")
            object.__setattr__(self, "domains", doms)
        if self.actual not in worlds:
            raise KripkeError("actual world out of range")
        object.__setattr__(self, "valuation", dict(self.valuation))
        object.__setattr__(self, "sorts", dict(self.sorts))
        for name, s in self.sorts.items():
            if name not in self.valuation:
                raise KripkeError(f"constant {name!r} has no interpretation")
            self._check_value(name, s, self.valuation[name])

    def _check_value(self, name, s, value):
        if s == sx.INDIV:
            if value not in range(self.carrier):
                raise KripkeError(f"{name!r} must denote a carrier element")
            return
        shape = sx.table_shape(s, self.n_worlds, self.carrier)
        for t in value:
            t = (t,) if s == sx.PROP else t
            if len(t) != len(shape) or any(not 0 <= x < n for x, n in zip(t, shape)):
                raise KripkeError(f"{name!r}: bad table entry {t!r}")

    def __eq__(self, other):
        return isinstance(other, KripkeModel) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (
            self.n_worlds, self.carrier, self.actual, self.domains,
            tuple(sorted(self.access.items())),
            tuple(sorted((k, v if isinstance(v, int) else frozenset(v)) for k, v in self.valuation.items())),
        )

    @property
    def worlds(self) -> range:
        return range(self.n_worlds)

    def relation(self, index: str) -> FrozenSet[Edge]:
        try:
            return self.access[index]
        except KeyError:
            raise KripkeError(f"model has no relation for index {index!r}") from None

    @cached_property
    def successors(self) -> Dict[str, Tuple[Tuple[int, ...], ...]]:
        out = {}
        for idx, rel in self.access.items():
            out[idx] = tuple(tuple(v for v in self.worlds if (w, v) in rel) for w in self.worlds)
        return out

    @cached_property
    def codes(self) -> Dict[str, int]:
        """Code of every constant (carrier element for individuals, table bitmask otherwise)."""
        return {name: value_code(s, self.valuation[name], self.n_worlds, self.carrier) for name, s in self.sorts.items()}

    def size(self, sort: sx.Sort) -> int:
        return sx.carrier_size(sort, self.n_worlds, self.carrier)


def value_code(sort: sx.Sort, value, n_worlds: int, carrier: int) -> int:
    if sort == sx.INDIV:
        return int(value)
    if sort == sx.PROP:
        return sum(1 << w for w in value)
    shape = sx.table_shape(sort, n_worlds, carrier)
    return sum(1 << sx.flat_index(t, shape) for t in value)


def code_value(sort: sx.Sort, code: int, n_worlds: int, carrier: int):
    """Inverse of ``value_code``."""
    if sort == sx.INDIV:
        return code
    if sort == sx.PROP:
        return frozenset(w for w in range(n_worlds) if code >> w & 1)
    shape = sx.table_shape(sort, n_worlds, carrier)
    return frozenset(t for pos, t in enumerate(product(*map(range, shape))) if code >> pos & 1)


# ---------------------------------------------------------------- evaluation


def eval(model: KripkeModel, ast: sx.ModalAst, world: int, env: Optional[Mapping[str, Tuple[sx.Sort, int]]] = None) -> bool:
    """Satisfaction of ``ast`` at ``world``.

    ``env`` maps variable names to ``(sort, value)`` pairs, the value being a
    carrier element for individuals and a code otherwise.  Individual
    quantifiers range over the world's domain (the full carrier in
    constant-domain models); higher-sort quantifiers range over the whole
    lifted carrier.
    """
    return _Evaluator(model).holds(ast, world, dict(env or {}))


class _Evaluator:
    def __init__(self, model: KripkeModel):
        self.m = model
        self._closure: Dict[FrozenSet[str], Tuple[Tuple[int, ...], ...]] = {}

    def term(self, name: str, env) -> Tuple[sx.Sort, int]:
        if name in env:
            return env[name]
        s = self.m.sorts.get(name)
        if s is None:
            raise UnboundVariable(f"{name!r} is neither bound nor interpreted")
        return s, self.m.codes[name]

    def atom(self, ast: sx.Atom, w: int, env) -> bool:
        hsort, hcode = self.term(ast.name, env)
        expected = sx.arg_sorts(hsort)
        if hsort == sx.INDIV or len(expected) != len(ast.args):
            raise SortError(f"ill-sorted atom {sx.print_formula(ast)}")
        vals = []
        for a, s in zip(ast.args, expected):
            asort, aval = self.term(a, env)
            if asort != s:
                raise SortError(f"argument {a!r} has sort {asort}, expected {s}")
            vals.append(aval)
        shape = sx.table_shape(hsort, self.m.n_worlds, self.m.carrier)
        return bool(hcode >> sx.flat_index(vals + [w], shape) & 1)

    def reach(self, indices: FrozenSet[str]) -> Tuple[Tuple[int, ...], ...]:
        """Worlds reachable in one or more steps along the union of ``indices``."""
        if indices not in self._closure:
            n = self.m.n_worlds
            step = [set() for _ in range(n)]
            for idx in indices:
                for a, b in self.m.relation(idx):
                    step[a].add(b)
            out = []
            for w in range(n):
                seen, frontier = set(), list(step[w])
                while frontier:
                    v = frontier.pop()
                    if v not in seen:
                        seen.add(v)
                        frontier.extend(step[v])
                out.append(tuple(sorted(seen)))
            self._closure[indices] = tuple(out)
        return self._closure[indices]

    def holds(self, f, w, env) -> bool:
        if isinstance(f, sx.Atom):
            return self.atom(f, w, env)
        if isinstance(f, sx.Top):
            return True
        if isinstance(f, sx.Bottom):
            return False
        if isinstance(f, sx.Not):
            return not self.holds(f.f, w, env)
        if isinstance(f, sx.And):
            return self.holds(f.left, w, env) and self.holds(f.right, w, env)
        if isinstance(f, sx.Or):
            return self.holds(f.left, w, env) or self.holds(f.right, w, env)
        if isinstance(f, sx.Implies):
            return not self.holds(f.left, w, env) or self.holds(f.right, w, env)
        if isinstance(f, sx.Iff):
            return self.holds(f.left, w, env) == self.holds(f.right, w, env)
        if isinstance(f, sx.Box):
            self.m.relation(f.index)
            return all(self.holds(f.f, v, env) for v in self.m.successors[f.index][w])
        if isinstance(f, sx.Dia):
            self.m.relation(f.index)
            return any(self.holds(f.f, v, env) for v in self.m.successors[f.index][w])
        if isinstance(f, sx.CommonKnows):
            return all(self.holds(f.f, v, env) for v in self.reach(f.indices)[w])
        if isinstance(f, (sx.Forall, sx.Exists)):
            if f.sort == sx.INDIV:
                rng = sorted(self.m.domains[w])
            elif sx.is_predicate_sort(f.sort):
                rng = range(self.m.size(f.sort))
            else:
                raise SortError(f"unsupported sort {f.sort}")
            inner = dict(env)
            test = all if isinstance(f, sx.Forall) else any

            def body(x):
                inner[f.var] = (f.sort, x)
                return self.holds(f.f, w, inner)

            return test(body(x) for x in rng)
        if isinstance(f, (sx.FreeForall, sx.FreeExists, sx.ExistsPred)):
            raise SortError("free-logic operators are evaluated in HOL models, not Kripke models")
        raise TypeError(f"not a formula: {f!r}")


def truth_set(model: KripkeModel, ast: sx.ModalAst, env=None) -> FrozenSet[int]:
    ev = _Evaluator(model)
    env = dict(env or {})
    return frozenset(w for w in model.worlds if ev.holds(ast, w, env))


# ---------------------------------------------------------------- frames


def relation_has(flag: str, rel: FrozenSet[Edge], n: int) -> bool:
    W = range(n)
    if flag == "reflexive":
        return all((w, w) in rel for w in W)
    if flag == "symmetric":
        return all((b, a) in rel for a, b in rel)
    if flag == "transitive":
        return all((a, c) in rel for a, b in rel for b2, c in rel if b == b2)
    if flag == "euclidean":
        return all((b, c) in rel for a, b in rel for a2, c in rel if a == a2)
    if flag == "universal":
        return len(rel) == n * n
    raise ValueError(f"unknown frame flag {flag!r}")


def check_frame(model: KripkeModel, preset: LogicPreset) -> bool:
    """Every frame condition of ``preset`` holds for every index, and domains fit the preset."""
    for idx in preset.indices:
        rel = model.access.get(idx)
        if rel is None:
            return False
        if not all(relation_has(flag, rel, model.n_worlds) for flag in preset.flags):
            return False
    if preset.domains == "constant":
        full = frozenset(range(model.carrier))
        if any(d != full for d in model.domains):
            return False
    return True


def valid_in_model(model: KripkeModel, ast: sx.ModalAst, preset: LogicPreset, env=None) -> bool:
    """Truth at every world (global grounding) or at the model's actual world."""
    ev = _Evaluator(model)
    env = dict(env or {})
    if preset.grounding == "actual":
        return ev.holds(ast, model.actual, env)
    return all(ev.holds(ast, w, env) for w in model.worlds)


def generated_submodel(model: KripkeModel, root: int, indices: Optional[Iterable[str]] = None) -> Tuple[KripkeModel, Dict[int, int]]:
    """Submodel on the worlds reachable from ``root``; returns it with the old-to-new world map."""
    indices = list(model.access) if indices is None else list(indices)
    keep, frontier = {root}, [root]
    while frontier:
        w = frontier.pop()
        for idx in indices:
            for v in model.successors[idx][w]:
                if v not in keep:
                    keep.add(v)
                    frontier.append(v)
    return restrict(model, keep)


def restrict(model: KripkeModel, keep: Iterable[int]) -> Tuple[KripkeModel, Dict[int, int]]:
    """Submodel on the worlds ``keep`` (renumbered in ascending order)."""
    order = sorted(set(keep))
    if not order:
        raise KripkeError("cannot restrict a model to no worlds")
    new = {old: i for i, old in enumerate(order)}
    access = {idx: frozenset((new[a], new[b]) for a, b in rel if a in new and b in new) for idx, rel in model.access.items()}
    valuation = {}
    for name, s in model.sorts.items():
        v = model.valuation[name]
        if s == sx.INDIV:
            valuation[name] = v
        elif s == sx.PROP:
            valuation[name] = frozenset(new[w] for w in v if w in new)
        elif all(a == sx.INDIV for a in sx.arg_sorts(s)):
            valuation[name] = frozenset(t[:-1] + (new[t[-1]],) for t in v if t[-1] in new)
        else:
            raise KripkeError("restricting models with higher-order constants changes their argument carriers")
    m = KripkeModel(
        len(order), access, model.carrier, tuple(model.domains[w] for w in order),
        valuation, model.sorts, new.get(model.actual, 0),
    )
    return m, new


# ---------------------------------------------------------------- announcements


def announce(model: KripkeModel, ast: sx.ModalAst) -> Optional[KripkeModel]:
    """Public announcement: keep the worlds where ``ast`` holds (``None`` if none do)."""
    keep = truth_set(model, ast)
    if not keep:
        return None
    return restrict(model, keep)[0]


@dataclass
class ConsequenceReport:
    entailed: bool
    worlds_remaining: int
    failing_worlds: Tuple[int, ...]
    model: Optional[KripkeModel]


def model_consequence(model: KripkeModel, premises: Sequence[sx.ModalAst], conclusion: sx.ModalAst) -> ConsequenceReport:
    """Announce ``premises`` in order, then check ``conclusion`` at every remaining world.

    If some announcement leaves no world the premises are inconsistent with
    the model and the conclusion is reported as (vacuously) entailed.
    """
    current = model
    for p in premises:
        current = announce(current, p)
        if current is None:
            return ConsequenceReport(True, 0, (), None)
    failing = tuple(w for w in current.worlds if not eval(current, conclusion, w))
    return ConsequenceReport(not failing, current.n_worlds, failing, current)


def hat_puzzle_model(agents: Sequence[str], atoms: Sequence[str]) -> KripkeModel:
    """All mark assignments; agent ``i`` cannot tell apart worlds differing only in ``atoms[i]``.

    World ``w`` assigns atom ``j`` true iff bit ``j`` of ``w`` is set.
    """
    k = len(agents)
    if len(atoms) != k:
        raise ValueError("one atom per agent")
    n = 2**k
    access = {a: frozenset((w, v) for w in range(n) for v in range(n) if (w ^ v) & ~(1 << i) == 0) for i, a in enumerate(agents)}
    valuation = {p: frozenset(w for w in range(n) if w >> j & 1) for j, p in enumerate(atoms)}
    return KripkeModel(n, access, 1, None, valuation, {p: sx.PROP for p in atoms})


# ---------------------------------------------------------------- text format and DOT


def format_model(model: KripkeModel) -> str:
    """Text form of a model; ``parse_model`` reads it back.

    ::

        worlds 2
        carrier 1
        actual 0
        edges _ : 0>1 1>1
        domain 1 : 0
        const p : o = {1}
        const P : indiv -> o = {(0,1)}
        const c : indiv = 0
    """
    lines = [f"worlds {model.n_worlds}", f"carrier {model.carrier}", f"actual {model.actual}"]
    for idx in sorted(model.access):
        edges = " ".join(f"{a}>{b}" for a, b in sorted(model.access[idx]))
        lines.append(f"edges {idx} :" + (f" {edges}" if edges else ""))
    full = frozenset(range(model.carrier))
    for w, d in enumerate(model.domains):
        if d != full:
            lines.append(f"domain {w} :" + "".join(f" {x}" for x in sorted(d)))
    for name, s in model.sorts.items():
        v = model.valuation[name]
        if s == sx.INDIV:
            text = str(v)
        elif s == sx.PROP:
            text = "{" + ",".join(str(w) for w in sorted(v)) + "}"
        else:
            text = "{" + ", ".join("(" + ",".join(map(str, t)) + ")" for t in sorted(v)) + "}"
        lines.append(f"const {name} : {s} = {text}")
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> KripkeModel:
    n = carrier = None
    actual = 0
    access: Dict[str, FrozenSet[Edge]] = {}
    domains: Dict[int, FrozenSet[int]] = {}
    valuation, sorts = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "worlds":
                n = int(rest)
            elif key == "carrier":
                carrier = int(rest)
            elif key == "actual":
                actual = int(rest)
            elif key == "edges":
                idx, _, edges = rest.partition(":")
                access[idx.strip()] = frozenset(tuple(map(int, e.split(">"))) for e in edges.split())
            elif key == "domain":
                w, _, elems = rest.partition(":")
                domains[int(w)] = frozenset(int(x) for x in elems.split())
            elif key == "const":
                head, _, value = rest.partition("=")
                name, _, sort_text = head.partition(":")
                s = sx.parse_sort(sort_text)
                name = name.strip()
                value = value.strip()
                sorts[name] = s
                if s == sx.INDIV:
                    valuation[name] = int(value)
                else:
                    body = value.strip("{}").strip()
                    if s == sx.PROP:
                        valuation[name] = frozenset(int(x) for x in body.split(",") if x.strip())
                    else:
                        tuples = [t.strip(" ,()") for t in body.split(")") if t.strip(" ,")]
                        valuation[name] = frozenset(tuple(int(x) for x in t.split(",")) for t in tuples)
            else:
                raise KripkeError(f"unknown key {key!r}")
        except (ValueError, sx.ParseError) as exc:
            raise KripkeError(f"line {lineno}: {exc}") from None
    if n is None:
        raise KripkeError("missing 'worlds'")
    carrier = 1 if carrier is None else carrier
    full = frozenset(range(carrier))
    doms = tuple(domains.get(w, full) for w in range(n))
    return KripkeModel(n, access, carrier, doms, valuation, sorts, actual)


def to_dot(model: KripkeModel, name: str = "model") -> str:
    """Graphviz rendering: worlds labelled with their true propositions, edges with their index."""
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    props = [p for p, s in model.sorts.items() if s == sx.PROP]
    for w in model.worlds:
        true = [p for p in props if w in model.valuation[p]]
        label = f"w{w}" + ("\\n" + " ".join(true) if true else "")
        if model.domains[w] != frozenset(range(model.carrier)):
            label += "\\nD={" + ",".join(map(str, sorted(model.domains[w]))) + "}"
        shape = ' shape=doublecircle' if w == model.actual else ""
        lines.append(f'  w{w} [label="{label}"{shape}];')
    for idx in sorted(model.access):
        for a, b in sorted(model.access[idx]):
            attr = "" if idx == sx.DEFAULT_INDEX else f' [label="{idx}"]'
            lines.append(f"  w{a} -> w{b}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
