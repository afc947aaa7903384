"""Prefixed tableau prover for propositional multi-modal logic.

Nodes carry a prefix (a tuple naming a world; the root world is ``(1,)``)
and either a signed formula or an accessibility edge ``(index, src, dst)``.
Edges are explicit nodes so that frame conditions become ordinary rules:

* ``refl``  -- every prefix sees itself (reflexive frames)
* ``sym``   -- ``src -> dst`` gives ``dst -> src`` (symmetric frames)
* ``trans`` -- ``a -> b`` and ``b -> c`` give ``a -> c`` (transitive frames)

Under S5 (universal relation, or an equivalence relation) there are no edge
nodes: every prefix on the branch sees every other.

Logical rules: alpha (non-branching), beta (branching), nu (``T box`` /
``F dia`` propagate along edges) and pi (``F box`` / ``T dia`` open a fresh
prefix).  They are applied oldest-first in the order alpha, frame, beta, nu,
pi.  On transitive or universal frames, and whenever premises hold
globally, a prefix whose set of signed formulas equals that of an ancestor
prefix is blocked: its pi formulas are not expanded.  ``replay`` re-checks a closed tableau without using the prover.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import kripke
from . import syntax as sx
from .embedding import LogicPreset
from .kripke import KripkeModel


class TableauError(Exception):
    pass


class UnsupportedFragment(TableauError):
    pass


class ResourceLimit(TableauError):
    pass


class InvalidStep(TableauError):
    def __init__(self, node_id: int, reason: str = ""):
        super().__init__(f"node {node_id}: {reason}" if reason else f"node {node_id}")
        self.node_id = node_id
        self.reason = reason


Prefix = Tuple[int, ...]
EdgeKey = Tuple[str, Prefix, Prefix]
ROOT: Prefix = (1,)
DEFAULT_NODE_CAP = 10_000


@dataclass(frozen=True)
class TableauNode:
    id: int
    parent: Optional[int]
    prefix: Prefix
    sign: Optional[bool]  # None for edge nodes
    formula: Optional[sx.ModalAst]
    edge: Optional[EdgeKey]
    rule: str
    premises: Tuple[int, ...] = ()

    def describe(self) -> str:
        where = ".".join(map(str, self.prefix))
        if self.edge is not None:
            idx, a, b = self.edge
            body = f"R{'' if idx == sx.DEFAULT_INDEX else '_' + idx} {'.'.join(map(str, a))} {'.'.join(map(str, b))}"
        else:
            body = f"{'T' if self.sign else 'F'} {where} : {sx.print_formula(self.formula)}"
        just = f"{self.rule}" + (f" {list(self.premises)}" if self.premises else "")
        return f"{self.id:>4}  ^{'-' if self.parent is None else self.parent:<4}  {body:<48}  {just}"


@dataclass(frozen=True)
class Closure:
    leaf: int
    nodes: Tuple[int, ...]  # a complementary pair, or one node signing T bot / F top


@dataclass(frozen=True)
class Trace:
    conjecture: sx.ModalAst
    premises: Tuple[sx.ModalAst, ...]
    preset: LogicPreset
    nodes: Tuple[TableauNode, ...]
    closures: Tuple[Closure, ...]

    def render(self) -> str:
        lines = [f"conjecture: {sx.print_formula(self.conjecture)}", f"logic: {self.preset.frame_class}"]
        lines += [f"premise: {sx.print_formula(p)}" for p in self.premises]
        lines += [n.describe() for n in self.nodes]
        lines += [f"closed at {c.leaf} by {list(c.nodes)}" for c in self.closures]
        return "\n".join(lines)


@dataclass(frozen=True)
class Proved:
    trace: Trace

    label = "proved"


@dataclass(frozen=True)
class Refuted:
    model: KripkeModel
    world: int
    nodes: int

    label = "refuted"


@dataclass(frozen=True)
class GaveUp:
    reason: str
    nodes: int

    label = "gave-up"


ProofResult = Union[Proved, Refuted, GaveUp]


# ---------------------------------------------------------------- rule shapes


def _kind(sign: bool, f) -> str:
    if isinstance(f, (sx.Atom, sx.Top, sx.Bottom)):
        return "literal"
    if isinstance(f, sx.Not):
        return "alpha"
    if isinstance(f, sx.And):
        return "alpha" if sign else "beta"
    if isinstance(f, sx.Or):
        return "beta" if sign else "alpha"
    if isinstance(f, sx.Implies):
        return "beta" if sign else "alpha"
    if isinstance(f, sx.Iff):
        return "alpha" if sign else "beta"
    if isinstance(f, sx.Box):
        return "nu" if sign else "pi"
    if isinstance(f, sx.Dia):
        return "pi" if sign else "nu"
    raise UnsupportedFragment(f"no tableau rule for {type(f).__name__}")


def _components(sign: bool, f) -> List[Tuple[bool, sx.ModalAst]]:
    if isinstance(f, sx.Not):
        return [(not sign, f.f)]
    if isinstance(f, sx.And):
        return [(sign, f.left), (sign, f.right)]
    if isinstance(f, sx.Or):
        return [(sign, f.left), (sign, f.right)]
    if isinstance(f, sx.Implies):
        return [(not sign, f.left), (sign, f.right)]
    if isinstance(f, sx.Iff):
        return [(sign, sx.Implies(f.left, f.right)), (sign, sx.Implies(f.right, f.left))]
    if isinstance(f, (sx.Box, sx.Dia)):
        return [(sign, f.f)]
    raise TableauError(f"{type(f).__name__} has no components")


def _check_fragment(f) -> None:
    for g in sx.subformulas(f):
        if isinstance(g, sx.Atom) and g.args:
            raise UnsupportedFragment("the tableau handles propositional formulas only")
        if isinstance(g, (sx.Forall, sx.Exists, sx.FreeForall, sx.FreeExists, sx.ExistsPred)):
            raise UnsupportedFragment("quantifiers are not supported by the tableau")
        if isinstance(g, sx.CommonKnows):
            raise UnsupportedFragment("common knowledge has no tableau rule")


@dataclass(frozen=True)
class _Frame:
    universal: bool
    reflexive: bool
    symmetric: bool
    transitive: bool

    @property
    def blocking(self) -> bool:
        return self.universal or self.transitive


def _frame(preset: LogicPreset) -> _Frame:
    flags = preset.flags
    if "euclidean" in flags and "reflexive" not in flags:
        raise UnsupportedFragment("euclidean frames without reflexivity are not supported")
    # reflexive + euclidean, or reflexive + symmetric + transitive: an equivalence
    # relation, which validates the same formulas as the universal relation
    universal = "universal" in flags or "euclidean" in flags or {"reflexive", "symmetric", "transitive"} <= flags
    return _Frame(
        universal,
        "reflexive" in flags,
        "symmetric" in flags,
        "transitive" in flags,
    )


# ---------------------------------------------------------------- prover state


class _Budget(Exception):
    pass


class _Branch:
    def __init__(self):
        self.path: List[int] = []
        self.facts: Dict[Tuple[bool, Prefix, sx.ModalAst], int] = {}
        self.edges: Dict[EdgeKey, int] = {}
        self.prefixes: Dict[Prefix, int] = {}
        self.labels: Dict[Prefix, set] = {}
        self.children: Dict[Prefix, int] = {}
        self.alpha: deque = deque()
        self.frame: deque = deque()
        self.nu: deque = deque()
        self.beta: deque = deque()
        self.pi: List[int] = []
        self.pi_done: set = set()
        self.nu_nodes: List[int] = []
        self.closure: Optional[Closure] = None

    def fork(self) -> "_Branch":
        b = _Branch()
        b.path = list(self.path)
        b.facts = dict(self.facts)
        b.edges = dict(self.edges)
        b.prefixes = dict(self.prefixes)
        b.labels = {k: set(v) for k, v in self.labels.items()}
        b.children = dict(self.children)
        b.alpha = deque(self.alpha)
        b.frame = deque(self.frame)
        b.nu = deque(self.nu)
        b.beta = deque(self.beta)
        b.pi = list(self.pi)
        b.pi_done = set(self.pi_done)
        b.nu_nodes = list(self.nu_nodes)
        return b


class _Prover:
    def __init__(self, conjecture, premises, preset: LogicPreset, max_nodes: int):
        self.conjecture = conjecture
        self.premises = tuple(premises)
        self.preset = preset
        self.frame = _frame(preset)
        # global premises restart at every prefix, so even K needs loop checking
        self.blocking = self.frame.blocking or (bool(self.premises) and preset.grounding == "global")
        self.max_nodes = max_nodes
        self.nodes: List[TableauNode] = []
        self.closures: List[Closure] = []

    # -- node creation

    def _new(self, b: _Branch, prefix, sign, formula, edge, rule, premises) -> int:
        if len(self.nodes) >= self.max_nodes:
            raise _Budget
        nid = len(self.nodes)
        parent = b.path[-1] if b.path else None
        self.nodes.append(TableauNode(nid, parent, prefix, sign, formula, edge, rule, tuple(premises)))
        b.path.append(nid)
        return nid

    def _new_prefix(self, b: _Branch, prefix: Prefix, witness: int) -> None:
        if prefix in b.prefixes:
            return
        b.prefixes[prefix] = witness
        b.labels.setdefault(prefix, set())
        if self.frame.universal:
            for nu in b.nu_nodes:
                b.nu.append((nu, prefix, witness))
        elif self.frame.reflexive:
            for idx in self.preset.indices:
                b.frame.append(((idx, prefix, prefix), "refl", (witness,)))
        if self.preset.grounding == "global" or prefix == ROOT:
            for p in self.premises:
                self.add_formula(b, prefix, True, p, "premise", (witness,))
                if b.closure:
                    return

    def add_formula(self, b: _Branch, prefix, sign, f, rule, premises) -> Optional[int]:
        key = (sign, prefix, f)
        if key in b.facts or b.closure:
            return None
        nid = self._new(b, prefix, sign, f, None, rule, premises)
        b.facts[key] = nid
        b.labels[prefix].add((sign, f))
        other = b.facts.get((not sign, prefix, f))
        if other is not None:
            b.closure = Closure(nid, (other, nid))
            return nid
        if (sign and isinstance(f, sx.Bottom)) or (not sign and isinstance(f, sx.Top)):
            b.closure = Closure(nid, (nid,))
            return nid
        kind = _kind(sign, f)
        if kind == "alpha":
            b.alpha.append(nid)
        elif kind == "beta":
            b.beta.append(nid)
        elif kind == "nu":
            b.nu_nodes.append(nid)
            if self.frame.universal:
                for p, w in b.prefixes.items():
                    b.nu.append((nid, p, w))
            else:
                for (idx, src, dst), eid in b.edges.items():
                    if src == prefix and idx == f.index:
                        b.nu.append((nid, dst, eid))
        elif kind == "pi":
            b.pi.append(nid)
        return nid

    def add_edge(self, b: _Branch, edge: EdgeKey, rule, premises) -> Optional[int]:
        if edge in b.edges or b.closure:
            return None
        idx, src, dst = edge
        nid = self._new(b, src, None, None, edge, rule, premises)
        b.edges[edge] = nid
        for nu in b.nu_nodes:
            n = self.nodes[nu]
            if n.prefix == src and n.formula.index == idx:
                b.nu.append((nu, dst, nid))
        if self.frame.symmetric:
            b.frame.append(((idx, dst, src), "sym", (nid,)))
        if self.frame.transitive:
            for (j, a, c), other in list(b.edges.items()):
                if j != idx:
                    continue
                if c == src:
                    b.frame.append(((idx, a, dst), "trans", (other, nid)))
                if a == dst:
                    b.frame.append(((idx, src, c), "trans", (nid, other)))
        return nid

    # -- rules

    def blocked(self, b: _Branch, prefix: Prefix) -> bool:
        if not self.blocking:
            return False
        mine = b.labels[prefix]
        return any(prefix[:k] in b.prefixes and b.labels[prefix[:k]] == mine for k in range(1, len(prefix)))

    def step(self, b: _Branch) -> Optional[_Branch]:
        """Apply one rule.  Returns a forked right branch for beta, else None.

        Sets ``b.saturated`` when no rule applies.
        """
        while b.alpha:
            nid = b.alpha.popleft()
            n = self.nodes[nid]
            for sign, f in _components(n.sign, n.formula):
                self.add_formula(b, n.prefix, sign, f, "alpha", (nid,))
            return None
        while b.frame:
            edge, rule, prem = b.frame.popleft()
            if edge not in b.edges:
                self.add_edge(b, edge, rule, prem)
                return None
        while b.beta:
            nid = b.beta.popleft()
            n = self.nodes[nid]
            (s0, f0), (s1, f1) = _components(n.sign, n.formula)
            if (s0, n.prefix, f0) in b.facts or (s1, n.prefix, f1) in b.facts:
                continue
            right = b.fork()
            self.add_formula(b, n.prefix, s0, f0, "beta", (nid,))
            self.add_formula(right, n.prefix, s1, f1, "beta", (nid,))
            return right
        while b.nu:
            nid, target, via = b.nu.popleft()
            n = self.nodes[nid]
            (sign, f), = _components(n.sign, n.formula)
            if (sign, target, f) not in b.facts:
                self.add_formula(b, target, sign, f, "nu", (nid, via))
                return None
        for nid in b.pi:
            if nid in b.pi_done:
                continue
            n = self.nodes[nid]
            if self.blocked(b, n.prefix):
                continue
            b.pi_done.add(nid)
            k = b.children.get(n.prefix, 0) + 1
            while n.prefix + (k,) in b.prefixes:
                k += 1
            b.children[n.prefix] = k
            fresh = n.prefix + (k,)
            (sign, f), = _components(n.sign, n.formula)
            if self.frame.universal:
                b.labels[fresh] = set()
                fid = self.add_formula(b, fresh, sign, f, "pi", (nid,))
                self._new_prefix(b, fresh, fid)
            else:
                b.labels[fresh] = set()
                eid = self.add_edge(b, (n.formula.index, n.prefix, fresh), "pi-edge", (nid,))
                b.prefixes[fresh] = eid
                if self.frame.reflexive:
                    for idx in self.preset.indices:
                        b.frame.append(((idx, fresh, fresh), "refl", (eid,)))
                self.add_formula(b, fresh, sign, f, "pi", (nid, eid))
                if self.preset.grounding == "global":
                    for p in self.premises:
                        self.add_formula(b, fresh, True, p, "premise", (eid,))
            return None
        b.saturated = True
        return None

    def run(self) -> ProofResult:
        root = _Branch()
        root.labels[ROOT] = set()
        try:
            nid = self.add_formula(root, ROOT, False, self.conjecture, "root", ())
            root.prefixes[ROOT] = nid
            if self.frame.universal:
                for nu in root.nu_nodes:
                    root.nu.append((nu, ROOT, nid))
            elif self.frame.reflexive:
                for idx in self.preset.indices:
                    root.frame.append(((idx, ROOT, ROOT), "refl", (nid,)))
            for p in self.premises:
                self.add_formula(root, ROOT, True, p, "premise", (nid,))
            stack = [root]
            while stack:
                b = stack.pop()
                b.saturated = False
                while not b.closure and not b.saturated:
                    right = self.step(b)
                    if right is not None:
                        right.saturated = False
                        stack.append(right)
                if b.closure:
                    self.closures.append(b.closure)
                    continue
                return self.extract(b)
        except _Budget:
            return GaveUp(f"node cap {self.max_nodes} reached", len(self.nodes))
        trace = Trace(self.conjecture, self.premises, self.preset, tuple(self.nodes), tuple(self.closures))
        return Proved(trace)

    # -- countermodels

    def extract(self, b: _Branch) -> ProofResult:
        prefixes = sorted(b.prefixes, key=lambda p: b.prefixes[p])
        rep = {}
        for p in prefixes:
            rep[p] = p
            if self.blocking:
                for k in range(1, len(p)):
                    a = p[:k]
                    if a in b.labels and b.labels[a] == b.labels[p]:
                        rep[p] = a
                        break
        worlds = [p for p in prefixes if rep[p] == p]
        index = {p: i for i, p in enumerate(worlds)}
        n = len(worlds)
        access = {}
        for idx in self.preset.indices:
            if self.frame.universal:
                rel = {(a, c) for a in range(n) for c in range(n)}
            else:
                rel = {(index[rep[s]], index[rep[d]]) for (j, s, d) in b.edges if j == idx}
                if self.frame.reflexive:
                    rel |= {(w, w) for w in range(n)}
                if self.frame.symmetric:
                    rel |= {(c, a) for a, c in rel}
                if self.frame.transitive:
                    changed = True
                    while changed:
                        extra = {(a, d) for a, c in rel for c2, d in rel if c == c2} - rel
                        changed = bool(extra)
                        rel |= extra
            access[idx] = frozenset(rel)
        atoms = []
        for f in (self.conjecture,) + self.premises:
            for a in sx.atoms_of(f):
                if a not in atoms:
                    atoms.append(a)
        valuation = {
            a: frozenset(index[p] for p in worlds if (True, p, sx.Atom(a)) in b.facts) for a in atoms
        }
        model = KripkeModel(n, access, 1, None, valuation, {a: sx.PROP for a in atoms})
        world = index[rep[ROOT]]
        ok = (
            kripke.check_frame(model, self.preset)
            and not kripke.eval(model, self.conjecture, world)
            and all(kripke.valid_in_model(model, p, self.preset) for p in self.premises)
        )
        if not ok:
            return GaveUp("open branch did not yield a verified countermodel", len(self.nodes))
        return Refuted(model, world, len(self.nodes))


def prove(conjecture: sx.ModalAst, preset: LogicPreset, premises: Sequence[sx.ModalAst] = (),
          max_nodes: int = DEFAULT_NODE_CAP, strict: bool = False) -> ProofResult:
    """Try to close a tableau for ``F conjecture`` (with ``T premise`` at every prefix).

    Returns ``GaveUp`` at the node cap, or raises ``ResourceLimit`` if ``strict``.
    """
    for f in (conjecture, *premises):
        _check_fragment(f)
        unknown = sx.modal_indices(f) - set(preset.indices)
        if unknown:
            raise UnsupportedFragment(f"modality indices {sorted(unknown)} are not in the preset")
    result = _Prover(conjecture, premises, preset, max_nodes).run()
    if strict and isinstance(result, GaveUp):
        raise ResourceLimit(result.reason)
    return result


# ---------------------------------------------------------------- replay


def replay(trace: Trace) -> bool:
    """Check a closed tableau rule by rule; raises ``InvalidStep`` on the first bad node."""
    frame = _frame(trace.preset)
    nodes = trace.nodes
    by_id: Dict[int, TableauNode] = {}
    children: Dict[int, List[int]] = {}
    for pos, n in enumerate(nodes):
        if n.id in by_id:
            raise InvalidStep(n.id, "duplicate id")
        if n.parent is not None and n.parent not in by_id:
            raise InvalidStep(n.id, "parent must precede the node")
        by_id[n.id] = n
        if n.parent is not None:
            children.setdefault(n.parent, []).append(n.id)
    roots = [n for n in nodes if n.parent is None]
    if len(roots) != 1:
        raise InvalidStep(nodes[0].id if nodes else -1, "exactly one root expected")

    def ancestors(nid):
        p = by_id[nid].parent
        while p is not None:
            yield by_id[p]
            p = by_id[p].parent

    def on_branch(nid, target) -> bool:
        return any(a.id == target for a in ancestors(nid))

    def mentions(n: TableauNode, prefix) -> bool:
        return n.prefix == prefix if n.edge is None else prefix in (n.edge[1], n.edge[2])

    for n in nodes:
        fail = lambda why, n=n: InvalidStep(n.id, why)  # noqa: E731
        for p in n.premises:
            if p not in by_id or not on_branch(n.id, p):
                raise fail(f"premise {p} is not an ancestor")
        prem = [by_id[p] for p in n.premises]
        if n.parent is None:
            if n.rule != "root" or n.sign is not False or n.prefix != ROOT or n.formula != trace.conjecture:
                raise fail("root must be F conjecture at the root prefix")
            continue
        kids = children.get(n.parent, [])
        if len(kids) > 2:
            raise fail("more than two children")
        if n.rule == "premise":
            if len(prem) != 1 or not mentions(prem[0], n.prefix):
                raise fail("premise needs a witness for its prefix")
            if n.sign is not True or n.formula not in trace.premises or n.edge is not None:
                raise fail("not a premise")
            if trace.preset.grounding == "actual" and n.prefix != ROOT:
                raise fail("premises hold at the root only under actual grounding")
        elif n.rule in ("alpha", "beta"):
            if len(prem) != 1 or prem[0].edge is not None:
                raise fail("needs one formula premise")
            p = prem[0]
            if _kind(p.sign, p.formula) != n.rule or n.prefix != p.prefix:
                raise fail(f"premise is not a {n.rule} formula at this prefix")
            comps = _components(p.sign, p.formula)
            if (n.sign, n.formula) not in comps:
                raise fail("not a component of the premise")
            if n.rule == "beta":
                if len(kids) != 2:
                    raise fail("beta must split the branch in two")
                left, right = (by_id[k] for k in kids)
                if left.rule != "beta" or right.rule != "beta" or left.premises != right.premises:
                    raise fail("beta siblings disagree")
                if [(left.sign, left.formula), (right.sign, right.formula)] != comps:
                    raise fail("beta siblings are not the two components")
        elif n.rule == "nu":
            if len(prem) != 2 or prem[0].edge is not None:
                raise fail("nu needs a formula and an accessibility witness")
            p, via = prem
            if _kind(p.sign, p.formula) != "nu" or [(n.sign, n.formula)] != _components(p.sign, p.formula):
                raise fail("not a nu instance")
            if frame.universal:
                if not mentions(via, n.prefix):
                    raise fail("target prefix not on the branch")
            elif via.edge != (p.formula.index, p.prefix, n.prefix):
                raise fail("edge does not connect premise and conclusion")
        elif n.rule == "pi-edge":
            if frame.universal or len(prem) != 1 or n.edge is None:
                raise fail("malformed pi edge")
            p = prem[0]
            idx, src, dst = n.edge
            if _kind(p.sign, p.formula) != "pi" or idx != p.formula.index or src != p.prefix:
                raise fail("edge does not belong to the pi formula")
            _fresh(n, dst, src, ancestors, mentions)
        elif n.rule == "pi":
            if not prem or _kind(prem[0].sign, prem[0].formula) != "pi":
                raise fail("needs a pi premise")
            p = prem[0]
            if [(n.sign, n.formula)] != _components(p.sign, p.formula):
                raise fail("not the pi component")
            if frame.universal:
                if len(prem) != 1:
                    raise fail("malformed pi step")
                _fresh(n, n.prefix, p.prefix, ancestors, mentions)
            else:
                if len(prem) != 2 or prem[1].rule != "pi-edge" or prem[1].premises != (p.id,) or prem[1].edge[2] != n.prefix:
                    raise fail("pi must use its own fresh edge")
        elif n.rule in ("refl", "sym", "trans"):
            if n.edge is None or frame.universal:
                raise fail("frame rules produce edges")
            idx, a, c = n.edge
            if idx not in trace.preset.indices:
                raise fail("unknown index")
            if n.rule == "refl":
                if not frame.reflexive or a != c or len(prem) != 1 or not mentions(prem[0], a):
                    raise fail("bad reflexivity step")
            elif n.rule == "sym":
                if not frame.symmetric or len(prem) != 1 or prem[0].edge != (idx, c, a):
                    raise fail("bad symmetry step")
            else:
                if not frame.transitive or len(prem) != 2:
                    raise fail("bad transitivity step")
                e1, e2 = prem[0].edge, prem[1].edge
                if e1 is None or e2 is None or e1[0] != idx or e2[0] != idx or e1[1] != a or e1[2] != e2[1] or e2[2] != c:
                    raise fail("edges do not compose")
        else:
            raise fail(f"unknown rule {n.rule!r}")
        if n.rule != "beta" and len(kids) != 1:
            raise fail("only beta may branch")

    leaves = [n.id for n in nodes if n.id not in children]
    closed = {}
    for c in trace.closures:
        if c.leaf not in by_id or c.leaf in children:
            raise InvalidStep(c.leaf, "closure must sit on a leaf")
        closed[c.leaf] = c
    for leaf in leaves:
        c = closed.get(leaf)
        if c is None:
            raise InvalidStep(leaf, "open branch")
        branch = {leaf} | {a.id for a in ancestors(leaf)}
        if any(x not in branch for x in c.nodes):
            raise InvalidStep(leaf, "closing nodes are not on the branch")
        cn = [by_id[x] for x in c.nodes]
        if len(cn) == 1:
            x = cn[0]
            if not ((x.sign is True and isinstance(x.formula, sx.Bottom)) or (x.sign is False and isinstance(x.formula, sx.Top))):
                raise InvalidStep(leaf, "single-node closure needs T bot or F top")
        elif len(cn) == 2:
            x, y = cn
            if x.edge is not None or y.edge is not None:
                raise InvalidStep(leaf, "edges do not close branches")
            if x.prefix != y.prefix:
                raise InvalidStep(leaf, "closure on mismatched prefixes")
            if x.formula != y.formula or x.sign == y.sign:
                raise InvalidStep(leaf, "closing nodes are not complementary")
        else:
            raise InvalidStep(leaf, "malformed closure")
    return True


def _fresh(n, fresh, src, ancestors, mentions) -> None:
    if fresh[:-1] != src:
        raise InvalidStep(n.id, "fresh prefix must extend the premise prefix")
    if any(mentions(a, fresh) for a in ancestors(n.id)):
        raise InvalidStep(n.id, "prefix is not fresh")
