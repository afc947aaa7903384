"""Bounded model finding and bounded decision over finite Kripke models.

Models are enumerated in a fixed order: world count ascending, then carrier
size, then relation bitmasks (first modality index most significant; bit
``w * n + v`` is the edge ``w -> v``), then per-world domains (varying
domains only; world 0 most significant), then valuations.  A valuation is
the sequence of table entries of the constants the problem mentions, in
declaration order and row-major within a table; valuations are visited in
lexicographic order of that sequence.

Two engines walk this space:

* a bit-parallel engine for first-order signatures: for each frame it
  evaluates a formula on *all* valuations at once, a truth value being a
  bitset over valuation indices packed into ``uint64`` words;
* a backtracking engine for signatures with higher-order constants, where the
  valuation space is too large to enumerate: entries are fixed one at a time
  and branches are cut as soon as a premise is definitely false under
  three-valued evaluation.  Constants introduced by explicit definitions
  (``forall xs. c xs <-> body``) are computed rather than searched.

Every countermodel returned is re-checked with ``kripke``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import kripke
from . import syntax as sx
from .embedding import LogicPreset
from .kripke import KripkeModel


class SearchError(Exception):
    pass


class BoundsExceeded(SearchError):
    pass


@dataclass(frozen=True)
class Bounds:
    max_worlds: int = 4
    max_indiv: int = 3
    max_models: int = 2**30
    symmetry_breaking: bool = False

    def __post_init__(self):
        if self.max_worlds < 1 or self.max_indiv < 1 or self.max_models < 1:
            raise ValueError("bounds must be positive")

    def __str__(self) -> str:
        return f"w<={self.max_worlds},d<={self.max_indiv}"


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class ValidUpTo:
    bounds: Bounds
    models_checked: int
    premise_models: int

    label = "valid-up-to"

    @property
    def premises_satisfiable(self) -> bool:
        return self.premise_models > 0


@dataclass(frozen=True)
class ValidCertified:
    reason: str
    models_checked: int

    label = "certified"


@dataclass(frozen=True)
class Countermodel:
    model: KripkeModel
    world: int
    models_checked: int

    label = "countermodel"


@dataclass(frozen=True)
class Unknown:
    reason: str
    models_checked: int

    label = "unknown"


Verdict = Union[ValidUpTo, ValidCertified, Countermodel, Unknown]


# ---------------------------------------------------------------- problem preparation


def infer_decls(formulas: Sequence[sx.ModalAst], indices: Sequence[str] = (sx.DEFAULT_INDEX,)) -> sx.Declarations:
    """Guess declarations from usage: nullary atoms are ``o``, arguments are individuals."""
    d = sx.Declarations(indices=tuple(indices))
    found: Dict[str, sx.Sort] = {}

    def walk(f, bound):
        if isinstance(f, sx.Atom):
            if f.name not in bound:
                sorts = [bound.get(a, sx.INDIV) for a in f.args]
                found.setdefault(f.name, sx.sort_arrow(*sorts, sx.PROP))
            for a in f.args:
                if a not in bound:
                    found.setdefault(a, sx.INDIV)
        elif isinstance(f, (sx.Forall, sx.Exists)):
            walk(f.f, {**bound, f.var: f.sort})
        else:
            for c in sx.children(f):
                walk(c, bound)

    for f in formulas:
        walk(f, {})
    for name, s in found.items():
        d.declare(name, s)
    return d


def _uses_individuals(formulas, consts: Mapping[str, sx.Sort]) -> bool:
    def mentions(s):
        if s == sx.INDIV:
            return True
        return isinstance(s, sx.SortArrow) and (mentions(s.dom) or mentions(s.cod))

    if any(mentions(s) for s in consts.values()):
        return True
    return any(isinstance(g, (sx.Forall, sx.Exists)) and mentions(g.sort) for f in formulas for g in sx.subformulas(f))


def _first_order(sort: sx.Sort) -> bool:
    return sort in (sx.PROP, sx.INDIV) or all(a == sx.INDIV for a in sx.arg_sorts(sort))


@dataclass
class _Problem:
    premises: List[sx.ModalAst]
    conjecture: Optional[sx.ModalAst]
    preset: LogicPreset
    bounds: Bounds
    decls: sx.Declarations
    used: List[Tuple[str, sx.Sort]]
    individuals: bool
    params: Tuple[Tuple[str, sx.Sort], ...] = ()

    @property
    def formulas(self):
        return self.premises + ([self.conjecture] if self.conjecture is not None else [])

    def carrier_sizes(self):
        return range(1, self.bounds.max_indiv + 1) if self.individuals else range(1, 2)

    def batchable(self) -> bool:
        if any(not _first_order(s) for _, s in self.used):
            return False
        return not any(
            isinstance(g, (sx.FreeForall, sx.FreeExists, sx.ExistsPred))
            for f in self.formulas for g in sx.subformulas(f)
        )


def _prepare(premises, conjecture, preset, bounds, decls, params=()) -> _Problem:
    premises = list(premises)
    formulas = premises + ([conjecture] if conjecture is not None else [])
    if decls is None:
        decls = infer_decls(formulas, preset.indices)
    for f in formulas:
        unknown = sx.modal_indices(f) - set(preset.indices)
        if unknown:
            raise SearchError(f"modality indices {sorted(unknown)} are not in the preset")
        for g in sx.subformulas(f):
            if isinstance(g, (sx.FreeForall, sx.FreeExists, sx.ExistsPred)):
                raise SearchError("free-logic formulas are checked with holmodel, not Kripke search")
    names = set()
    param_names = {p for p, _ in params}
    for f in formulas:
        names |= sx.symbols_of(f)
    names -= param_names
    missing = names - set(decls.consts)
    if missing:
        raise SearchError(f"undeclared symbols {sorted(missing)}")
    used = [(n, s) for n, s in decls.consts.items() if n in names]
    individuals = _uses_individuals(formulas, dict(used)) or any(
        _uses_individuals([], {p: s}) for p, s in params
    )
    return _Problem(premises, conjecture, preset, bounds, decls, used, individuals, tuple(params))


# ---------------------------------------------------------------- frames


def _relation_candidates(n: int, flags) -> List[int]:
    """Bitmasks of relations on ``n`` worlds satisfying ``flags``, ascending."""
    cells = n * n
    if "universal" in flags:
        return [(1 << cells) - 1]
    diag = sum(1 << (w * n + w) for w in range(n))
    if "reflexive" in flags:
        free = [p for p in range(cells) if p % (n + 1) != 0]
        masks = np.zeros(1 << len(free), dtype=np.int64) + diag
        ar = np.arange(1 << len(free), dtype=np.int64)
        for j, p in enumerate(free):
            masks |= ((ar >> j) & 1) << p
        masks = np.sort(masks)
    else:
        masks = np.arange(1 << cells, dtype=np.int64)
    rest = set(flags) - {"reflexive"}
    if rest:
        R = _mask_matrices(masks, n)
        keep = np.ones(len(masks), dtype=bool)
        for flag in rest:
            keep &= _has_flag(R, flag)
        masks = masks[keep]
    return [int(x) for x in masks]


def _mask_matrices(masks, n: int) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n * n, dtype=np.int64)) & 1
    return bits.reshape(len(masks), n, n).astype(bool)


def _has_flag(R: np.ndarray, flag: str) -> np.ndarray:
    Ri = R.astype(np.int32)
    if flag == "reflexive":
        return np.all(np.diagonal(R, axis1=1, axis2=2), axis=1)
    if flag == "symmetric":
        return np.all(R == np.transpose(R, (0, 2, 1)), axis=(1, 2))
    if flag == "transitive":
        two = np.matmul(Ri, Ri) > 0
        return np.all(~two | R, axis=(1, 2))
    if flag == "euclidean":
        # w->v and w->u imply v->u, i.e. (R^T R) ⊆ R
        cross = np.matmul(np.transpose(Ri, (0, 2, 1)), Ri) > 0
        return np.all(~cross | R, axis=(1, 2))
    if flag == "universal":
        return np.all(R, axis=(1, 2))
    raise ValueError(flag)


@dataclass(frozen=True)
class _Frame:
    masks: Tuple[int, ...]  # one relation bitmask per preset index
    domains: Tuple[int, ...]  # per-world domain bitmask


def _domain_choices(n: int, m: int, preset: LogicPreset) -> List[Tuple[int, ...]]:
    full = (1 << m) - 1
    if preset.domains == "constant":
        return [(full,) * n]
    return list(product(range(1 << m), repeat=n))


def _permute_frame(frame: _Frame, perm, n: int) -> _Frame:
    masks = []
    for mask in frame.masks:
        out = 0
        for w in range(n):
            for v in range(n):
                if mask >> (w * n + v) & 1:
                    out |= 1 << (perm[w] * n + perm[v])
        masks.append(out)
    doms = [0] * n
    for w in range(n):
        doms[perm[w]] = frame.domains[w]
    return _Frame(tuple(masks), tuple(doms))


def _frames(n: int, m: int, problem: _Problem) -> List[_Frame]:
    preset = problem.preset
    per_index = [_relation_candidates(n, preset.flags) for _ in preset.indices]
    doms = _domain_choices(n, m, preset)
    frames = [_Frame(ms, d) for ms in product(*per_index) for d in doms]
    if problem.bounds.symmetry_breaking and n > 1:
        perms = [p for p in permutations(range(n)) if list(p) != list(range(n))]
        frames = [f for f in frames if all((g.masks, g.domains) >= (f.masks, f.domains)
                                           for g in (_permute_frame(f, p, n) for p in perms))]
    return frames


# ---------------------------------------------------------------- valuations


class _ValSpace:
    """Mixed-radix enumeration of the valuations of the used constants."""

    def __init__(self, used: Sequence[Tuple[str, sx.Sort]], n: int, m: int):
        self.n, self.m = n, m
        self.used = list(used)
        self.entries: List[Tuple[str, Optional[int], int]] = []
        self.shapes: Dict[str, Tuple[int, ...]] = {}
        for name, s in self.used:
            if s == sx.INDIV:
                self.entries.append((name, None, m))
            else:
                shape = sx.table_shape(s, n, m)
                self.shapes[name] = shape
                self.entries.extend((name, c, 2) for c in range(math.prod(shape)))
        self.radices = [r for _, _, r in self.entries]
        self.size = math.prod(self.radices)
        self.places = [math.prod(self.radices[j + 1:]) for j in range(len(self.radices))]

    @property
    def log2_size(self) -> float:
        return sum(math.log2(r) for r in self.radices)

    def digits(self, v: int) -> List[int]:
        return [v // p % r for p, r in zip(self.places, self.radices)]

    def codes_from_digits(self, digits: Sequence[int]) -> Dict[str, int]:
        codes = {name: 0 for name, _ in self.used}
        for (name, cell, _), d in zip(self.entries, digits):
            if cell is None:
                codes[name] = d
            elif d:
                codes[name] |= 1 << cell
        return codes


def _model(frame: _Frame, n: int, m: int, preset: LogicPreset, decls: sx.Declarations,
           codes: Mapping[str, int]) -> KripkeModel:
    access = {}
    for idx, mask in zip(preset.indices, frame.masks):
        access[idx] = frozenset((w, v) for w in range(n) for v in range(n) if mask >> (w * n + v) & 1)
    domains = tuple(frozenset(x for x in range(m) if d >> x & 1) for d in frame.domains)
    valuation = {}
    for name, s in decls.consts.items():
        valuation[name] = kripke.code_value(s, codes.get(name, 0), n, m)
    return KripkeModel(n, access, m, domains, valuation, decls.consts)


# ---------------------------------------------------------------- bit-parallel engine

ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
ZERO = np.uint64(0)
_BATCH_VALUATION_LIMIT = 1 << 20
_BATCH_BYTES = 1 << 25


def _pack(bits: np.ndarray) -> np.ndarray:
    V = len(bits)
    W = (V + 63) // 64
    padded = np.zeros(W * 64, dtype=bool)
    padded[:V] = bits
    return np.packbits(padded, bitorder="little").view(np.uint64)


class _BitEval:
    """Evaluates formulas for a batch of frames and every valuation at once.

    Results broadcast to shape ``(frames, worlds, words)``.
    """

    def __init__(self, space: _ValSpace, preset: LogicPreset, frames: Sequence[_Frame], decls: sx.Declarations):
        self.space = space
        self.n, self.m = space.n, space.m
        self.decls = decls
        self.W = (space.size + 63) // 64
        ar = np.arange(space.size, dtype=np.int64)
        self.pat: Dict[str, np.ndarray] = {}
        self.eq: Dict[str, np.ndarray] = {}
        cells: Dict[str, List[np.ndarray]] = {}
        for (name, cell, radix), place in zip(space.entries, space.places):
            digit = (ar // place) % radix
            if cell is None:
                self.eq[name] = np.stack([_pack(digit == e) for e in range(radix)])
            else:
                cells.setdefault(name, []).append(_pack(digit == 1))
        for name, pats in cells.items():
            self.pat[name] = np.stack(pats).reshape(space.shapes[name] + (self.W,))
        valid = np.zeros(self.W * 64, dtype=bool)
        valid[: space.size] = True
        self.valid = np.packbits(valid, bitorder="little").view(np.uint64)
        n = self.n
        self.R = {}
        for k, idx in enumerate(preset.indices):
            self.R[idx] = _mask_matrices([f.masks[k] for f in frames], n)
        doms = np.array([f.domains for f in frames], dtype=np.int64).reshape(len(frames), n)
        self.dom = ((doms[:, :, None] >> np.arange(self.m)) & 1).astype(bool)
        self.constant_domains = preset.domains == "constant"
        self._closures: Dict[frozenset, np.ndarray] = {}

    def const_bits(self, truth_per_world) -> np.ndarray:
        return np.array([ALL if t else ZERO for t in truth_per_world], dtype=np.uint64).reshape(1, self.n, 1)

    def value(self, name, env):
        if name in env:
            return env[name]
        return self.decls.consts[name], None

    def atom(self, f: sx.Atom, env) -> np.ndarray:
        hsort, hcode = self.value(f.name, env)
        shape = sx.table_shape(hsort, self.n, self.m)
        args = [self.value(a, env) for a in f.args]
        if hcode is not None:
            vals = [c for _, c in args]
            return self.const_bits(hcode >> sx.flat_index(vals + [w], shape) & 1 for w in range(self.n))
        free = [i for i, (_, c) in enumerate(args) if c is None]
        table = self.pat[f.name]
        if not free:
            return table[tuple(c for _, c in args)][None]
        out = np.zeros((1, self.n, self.W), dtype=np.uint64)
        for combo in product(range(self.m), repeat=len(free)):
            vals = [c for _, c in args]
            sel = np.full(self.W, ALL, dtype=np.uint64)
            for i, e in zip(free, combo):
                vals[i] = e
                sel &= self.eq[f.args[i]][e]
            out |= table[tuple(vals)][None] & sel
        return out

    def closure(self, indices) -> np.ndarray:
        key = frozenset(indices)
        if key not in self._closures:
            R = np.zeros_like(next(iter(self.R.values())))
            for idx in key:
                R = R | self.R[idx]
            step = R.astype(np.int32)
            reach = R.copy()
            for _ in range(self.n):
                reach = reach | (np.matmul(reach.astype(np.int32), step) > 0)
            self._closures[key] = reach
        return self._closures[key]

    @staticmethod
    def box(R: np.ndarray, phi: np.ndarray) -> np.ndarray:
        notR = np.where(R, ZERO, ALL)  # (F, n, n)
        return np.bitwise_and.reduce(phi[:, None, :, :] | notR[:, :, :, None], axis=2)

    @staticmethod
    def dia(R: np.ndarray, phi: np.ndarray) -> np.ndarray:
        Rm = np.where(R, ALL, ZERO)
        return np.bitwise_or.reduce(phi[:, None, :, :] & Rm[:, :, :, None], axis=2)

    def ev(self, f, env) -> np.ndarray:
        if isinstance(f, sx.Atom):
            return self.atom(f, env)
        if isinstance(f, sx.Top):
            return np.full((1, 1, 1), ALL, dtype=np.uint64)
        if isinstance(f, sx.Bottom):
            return np.zeros((1, 1, 1), dtype=np.uint64)
        if isinstance(f, sx.Not):
            return ~self.ev(f.f, env)
        if isinstance(f, sx.And):
            return self.ev(f.left, env) & self.ev(f.right, env)
        if isinstance(f, sx.Or):
            return self.ev(f.left, env) | self.ev(f.right, env)
        if isinstance(f, sx.Implies):
            return ~self.ev(f.left, env) | self.ev(f.right, env)
        if isinstance(f, sx.Iff):
            return ~(self.ev(f.left, env) ^ self.ev(f.right, env))
        if isinstance(f, sx.Box):
            return self.box(self.R[f.index], self.ev(f.f, env))
        if isinstance(f, sx.Dia):
            return self.dia(self.R[f.index], self.ev(f.f, env))
        if isinstance(f, sx.CommonKnows):
            return self.box(self.closure(f.indices), self.ev(f.f, env))
        if isinstance(f, (sx.Forall, sx.Exists)):
            universal = isinstance(f, sx.Forall)
            acc = None
            size = sx.carrier_size(f.sort, self.n, self.m)
            for x in range(size):
                inner = dict(env)
                inner[f.var] = (f.sort, x)
                body = self.ev(f.f, inner)
                if f.sort == sx.INDIV and not self.constant_domains:
                    exists = self.dom[:, :, x][:, :, None]
                    body = (body | np.where(exists, ZERO, ALL)) if universal else (body & np.where(exists, ALL, ZERO))
                if acc is None:
                    acc = body
                else:
                    acc = (acc & body) if universal else (acc | body)
            return acc
        raise SearchError(f"cannot evaluate {type(f).__name__} in the bit-parallel engine")

    def full(self, arr: np.ndarray, frames: int) -> np.ndarray:
        return np.broadcast_to(arr, (frames, self.n, self.W))


def _chunk_size(n: int, W: int) -> int:
    return max(1, min(8192, _BATCH_BYTES // (8 * n * n * W)))


# ---------------------------------------------------------------- three-valued engine


class _Partial:
    """Three-valued satisfaction over a model whose valuation is partly fixed.

    ``known[name]`` / ``value[name]`` are bitmasks over table cells for
    predicate constants; individual constants are in ``indiv`` (``None`` if
    open).  Constants with no entry at all are unknown.
    """

    def __init__(self, frame: _Frame, n: int, m: int, preset: LogicPreset, decls: sx.Declarations):
        self.n, self.m = n, m
        self.decls = decls
        self.succ = {}
        for idx, mask in zip(preset.indices, frame.masks):
            self.succ[idx] = [[v for v in range(n) if mask >> (w * n + v) & 1] for w in range(n)]
        self.dom = [[x for x in range(m) if d >> x & 1] for d in frame.domains]
        self.known: Dict[str, int] = {}
        self.value: Dict[str, int] = {}
        self.indiv: Dict[str, Optional[int]] = {}
        self._reach = {}

    def code(self, name, env):
        """(sort, code or None)."""
        if name in env:
            return env[name]
        s = self.decls.consts[name]
        if s == sx.INDIV:
            return s, self.indiv.get(name)
        k = self.known.get(name)
        if k is None:
            return s, None
        full = (1 << math.prod(sx.table_shape(s, self.n, self.m))) - 1
        return s, (self.value[name] if k == full else None)

    def atom(self, f, w, env):
        if f.name in env:
            hsort, hcode = env[f.name]
            hknown = -1
        else:
            hsort = self.decls.consts[f.name]
            if f.name not in self.known:
                return None
            hknown, hcode = self.known[f.name], self.value[f.name]
        vals = []
        for a in f.args:
            _, c = self.code(a, env)
            if c is None:
                return None
            vals.append(c)
        pos = sx.flat_index(vals + [w], sx.table_shape(hsort, self.n, self.m))
        if not hknown >> pos & 1:
            return None
        return bool(hcode >> pos & 1)

    def reach(self, indices):
        key = frozenset(indices)
        if key not in self._reach:
            out = []
            for w in range(self.n):
                seen, frontier = set(), [v for i in key for v in self.succ[i][w]]
                while frontier:
                    v = frontier.pop()
                    if v not in seen:
                        seen.add(v)
                        frontier.extend(u for i in key for u in self.succ[i][v])
                out.append(sorted(seen))
            self._reach[key] = out
        return self._reach[key]

    def holds(self, f, w, env):
        if isinstance(f, sx.Atom):
            return self.atom(f, w, env)
        if isinstance(f, sx.Top):
            return True
        if isinstance(f, sx.Bottom):
            return False
        if isinstance(f, sx.Not):
            r = self.holds(f.f, w, env)
            return None if r is None else not r
        if isinstance(f, sx.And):
            return _kleene_all(self.holds(g, w, env) for g in (f.left, f.right))
        if isinstance(f, sx.Or):
            return _kleene_any(self.holds(g, w, env) for g in (f.left, f.right))
        if isinstance(f, sx.Implies):
            a = self.holds(f.left, w, env)
            if a is False:
                return True
            b = self.holds(f.right, w, env)
            if b is True:
                return True
            return None if a is None or b is None else False
        if isinstance(f, sx.Iff):
            a = self.holds(f.left, w, env)
            if a is None:
                return None
            b = self.holds(f.right, w, env)
            return None if b is None else a == b
        if isinstance(f, sx.Box):
            return _kleene_all(self.holds(f.f, v, env) for v in self.succ[f.index][w])
        if isinstance(f, sx.Dia):
            return _kleene_any(self.holds(f.f, v, env) for v in self.succ[f.index][w])
        if isinstance(f, sx.CommonKnows):
            return _kleene_all(self.holds(f.f, v, env) for v in self.reach(f.indices)[w])
        if isinstance(f, (sx.Forall, sx.Exists)):
            rng = self.dom[w] if f.sort == sx.INDIV else range(sx.carrier_size(f.sort, self.n, self.m))
            inner = dict(env)

            def body(x):
                inner[f.var] = (f.sort, x)
                return self.holds(f.f, w, inner)

            agg = _kleene_all if isinstance(f, sx.Forall) else _kleene_any
            return agg(body(x) for x in rng)
        raise SearchError(f"cannot evaluate {type(f).__name__}")


def _kleene_all(values) -> Optional[bool]:
    unknown = False
    for v in values:
        if v is False:
            return False
        if v is None:
            unknown = True
    return None if unknown else True


def _kleene_any(values) -> Optional[bool]:
    unknown = False
    for v in values:
        if v is True:
            return True
        if v is None:
            unknown = True
    return None if unknown else False


@dataclass
class Definition:
    name: str
    params: Tuple[Tuple[str, sx.Sort], ...]
    body: sx.ModalAst


def split_definitions(premises: Sequence[sx.ModalAst], decls: sx.Declarations,
                      preset: LogicPreset) -> Tuple[List[Definition], List[sx.ModalAst]]:
    """Pick out premises of the form ``forall x1..xk. c x1..xk <-> body``.

    Only used under global grounding.  A definition must not mention its own
    constant (directly or through other definitions) and individual
    parameters must range over the whole carrier (constant domains).
    Definitions come back in dependency order.
    """
    if preset.grounding != "global":
        return [], list(premises)
    candidates: Dict[str, Tuple[Definition, sx.ModalAst]] = {}
    rest = []
    for p in premises:
        params, body = [], p
        while isinstance(body, sx.Forall):
            params.append((body.var, body.sort))
            body = body.f
        ok = isinstance(body, sx.Iff) and isinstance(body.left, sx.Atom)
        if ok:
            head = body.left
            ok = (
                head.name in decls.consts
                and head.name not in candidates
                and head.args == tuple(v for v, _ in params)
                and len(set(head.args)) == len(head.args)
                and head.name not in sx.symbols_of(body.right)
                and not (preset.domains == "varying" and any(s == sx.INDIV for _, s in params))
            )
        if ok:
            candidates[head.name] = (Definition(head.name, tuple(params), body.right), p)
        else:
            rest.append(p)
    ordered: List[Definition] = []
    done = set()
    pending = dict(candidates)
    while pending:
        progress = False
        for name, (d, p) in list(pending.items()):
            deps = sx.symbols_of(d.body) & set(pending)
            if not deps:
                ordered.append(d)
                done.add(name)
                del pending[name]
                progress = True
        if not progress:
            rest.extend(p for _, p in pending.values())
            break
    return ordered, rest


def _compute_definitions(defs: Sequence[Definition], frame: _Frame, n: int, m: int, preset: LogicPreset,
                         decls: sx.Declarations, codes: Dict[str, int]) -> Dict[str, int]:
    codes = dict(codes)
    for d in defs:
        model = _model(frame, n, m, preset, decls, codes)
        ev = kripke._Evaluator(model)
        shape = sx.table_shape(decls.consts[d.name], n, m)
        code = 0
        for pos, cell in enumerate(product(*map(range, shape))):
            env = {v: (s, c) for (v, s), c in zip(d.params, cell[:-1])}
            if ev.holds(d.body, cell[-1], env):
                code |= 1 << pos
        codes[d.name] = code
    return codes


# ---------------------------------------------------------------- driver


class _CapReached(Exception):
    pass


@dataclass
class _Walk:
    """Shared bookkeeping of one enumeration."""

    problem: _Problem
    visited: int = 0
    premise_models: int = 0

    def charge(self, k: int):
        if self.visited + k > self.problem.bounds.max_models:
            raise _CapReached
        self.visited += k


def _world_sizes(problem: _Problem):
    return range(1, problem.bounds.max_worlds + 1)


def _batch_hits(problem: _Problem, walk: _Walk, n: int, m: int, space: _ValSpace, frames: List[_Frame]):
    """Yield (frame, valuation index, world) countermodels in enumeration order, per chunk."""
    W = (space.size + 63) // 64
    step = _chunk_size(n, W)
    actual = problem.preset.grounding == "actual"
    for start in range(0, len(frames), step):
        chunk = frames[start:start + step]
        allowed = (problem.bounds.max_models - walk.visited) // space.size
        if allowed < len(chunk):
            chunk = chunk[:allowed]
            if not chunk:
                raise _CapReached
        walk.visited += len(chunk) * space.size
        ev = _BitEval(space, problem.preset, chunk, problem.decls)
        F = len(chunk)
        prem = np.broadcast_to(ev.valid, (F, W)).copy()
        for p in problem.premises:
            val = ev.full(ev.ev(p, {}), F)
            prem &= val[:, 0, :] if actual else np.bitwise_and.reduce(val, axis=1)
        walk.premise_models += int(np.bitwise_count(prem).sum())
        if problem.conjecture is None:
            hit = prem[:, None, :]
        else:
            conj = ev.full(ev.ev(problem.conjecture, {}), F)
            hit = prem[:, None, :] & ~conj
            if actual:
                hit = hit[:, :1, :]
        rows = np.flatnonzero(np.any(hit != 0, axis=(1, 2)))
        for f in rows:
            merged = np.bitwise_or.reduce(hit[f], axis=0)
            for j in np.flatnonzero(merged):
                word = int(merged[j])
                while word:
                    low = word & -word
                    bit = low.bit_length() - 1
                    world = next(w for w in range(hit.shape[1]) if int(hit[f, w, j]) >> bit & 1)
                    yield chunk[f], int(j) * 64 + bit, world
                    word ^= low
        if len(chunk) < len(frames[start:start + step]):
            raise _CapReached


def _pruned_models(problem: _Problem, walk: _Walk, n: int, m: int, frames: List[_Frame], want_all: bool):
    """Backtracking over valuations; yields (frame, codes, world) in enumeration order."""
    decls, preset = problem.decls, problem.preset
    defs, checks = split_definitions(problem.premises, decls, preset) if want_all or problem.premises else ([], [])
    defined = {d.name for d in defs}
    search = [(name, s) for name, s in problem.used if name not in defined]
    space = _ValSpace(search, n, m)
    actual = preset.grounding == "actual"
    worlds = [0] if actual else list(range(n))
    for frame in frames:
        part = _Partial(frame, n, m, preset, decls)
        for name, s in search:
            if s == sx.INDIV:
                part.indiv[name] = None
            else:
                part.known[name] = 0
                part.value[name] = 0
        digits: List[int] = []

        def consistent() -> bool:
            for p in checks:
                if any(part.holds(p, w, {}) is False for w in worlds):
                    return False
            if problem.conjecture is not None:
                if all(part.holds(problem.conjecture, w, {}) is True for w in worlds):
                    return False
            return True

        def leaf():
            codes = space.codes_from_digits(digits)
            codes = _compute_definitions(defs, frame, n, m, preset, decls, codes)
            model = _model(frame, n, m, preset, decls, codes)
            if not all(kripke.valid_in_model(model, p, preset) for p in problem.premises):
                return None
            walk.premise_models += 1
            if problem.conjecture is None:
                return model, 0
            for w in worlds:
                if not kripke.eval(model, problem.conjecture, w):
                    return model, w
            return None

        def dfs(j):
            walk.charge(1)
            if j == len(space.entries):
                found = leaf()
                if found is not None:
                    yield frame, found[0], found[1]
                return
            name, cell, radix = space.entries[j]
            for d in range(radix):
                digits.append(d)
                if cell is None:
                    part.indiv[name] = d
                else:
                    part.known[name] |= 1 << cell
                    if d:
                        part.value[name] |= 1 << cell
                    else:
                        part.value[name] &= ~(1 << cell)
                if consistent():
                    yield from dfs(j + 1)
                digits.pop()
                if cell is None:
                    part.indiv[name] = None
                else:
                    part.known[name] &= ~(1 << cell)
                    part.value[name] &= ~(1 << cell)

        yield from dfs(0)


def _engine(problem: _Problem, n: int, m: int) -> str:
    space = _ValSpace(problem.used, n, m)
    if problem.batchable() and space.size <= _BATCH_VALUATION_LIMIT:
        return "batch"
    return "pruned"


def _walk_countermodels(problem: _Problem, walk: _Walk):
    """All countermodels (or premise models if no conjecture) in enumeration order."""
    for n in _world_sizes(problem):
        for m in problem.carrier_sizes():
            frames = _frames(n, m, problem)
            if not frames:
                continue
            if _engine(problem, n, m) == "batch":
                space = _ValSpace(problem.used, n, m)
                for frame, v, world in _batch_hits(problem, walk, n, m, space, frames):
                    codes = space.codes_from_digits(space.digits(v))
                    yield _model(frame, n, m, problem.preset, problem.decls, codes), world
            else:
                for _, model, world in _pruned_models(problem, walk, n, m, frames, want_all=True):
                    yield model, world


def _reverify(problem: _Problem, model: KripkeModel, world: int) -> None:
    if not kripke.check_frame(model, problem.preset):
        raise SearchError("internal error: countermodel violates the frame conditions")
    for p in problem.premises:
        if not kripke.valid_in_model(model, p, problem.preset):
            raise SearchError("internal error: countermodel violates a premise")
    if problem.conjecture is not None and kripke.eval(model, problem.conjecture, world):
        raise SearchError("internal error: conjecture holds at the reported world")


def find_countermodel(premises: Sequence[sx.ModalAst], conjecture: sx.ModalAst, preset: LogicPreset,
                      bounds: Bounds = Bounds(), decls: Optional[sx.Declarations] = None
                      ) -> Optional[Tuple[KripkeModel, int]]:
    """First model in enumeration order that satisfies the frame conditions and all
    premises while falsifying ``conjecture`` (at some world, or at the actual
    world under actual grounding).  Raises ``BoundsExceeded`` at the cap."""
    problem = _prepare(premises, conjecture, preset, bounds, decls)
    walk = _Walk(problem)
    try:
        for model, world in _walk_countermodels(problem, walk):
            _reverify(problem, model, world)
            return model, world
    except _CapReached:
        raise BoundsExceeded(f"visited {walk.visited} models, cap is {bounds.max_models}") from None
    return None


def small_model_bound(formulas: Sequence[sx.ModalAst]) -> int:
    """World bound for propositional S5 with the universal relation.

    A countermodel can be cut down to the falsifying world plus one witness
    per modal subformula, and worlds agreeing on every atom are
    interchangeable, so ``min(#modal subformulas + 1, 2 ** #atoms)`` worlds
    suffice.
    """
    modal = set()
    atoms = set()
    for f in formulas:
        for g in sx.subformulas(f):
            if isinstance(g, (sx.Box, sx.Dia)):
                modal.add(g)
            elif isinstance(g, sx.Atom):
                atoms.add(g.name)
    return min(len(modal) + 1, 2 ** len(atoms))


def decide_bounded(premises: Sequence[sx.ModalAst], conjecture: sx.ModalAst, preset: LogicPreset,
                   bounds: Bounds = Bounds(), decls: Optional[sx.Declarations] = None) -> Verdict:
    problem = _prepare(premises, conjecture, preset, bounds, decls)
    walk = _Walk(problem)
    try:
        for model, world in _walk_countermodels(problem, walk):
            _reverify(problem, model, world)
            return Countermodel(model, world, walk.visited)
    except _CapReached:
        return Unknown(f"model cap {bounds.max_models} reached", walk.visited)
    formulas = problem.formulas
    if preset.universal and all(sx.is_propositional(f) for f in formulas):
        k = small_model_bound(formulas)
        if k <= bounds.max_worlds:
            return ValidCertified(f"S5 small-model property: {k} world(s) suffice, all checked", walk.visited)
    return ValidUpTo(bounds, walk.visited, walk.premise_models)


def find_models(premises: Sequence[sx.ModalAst], preset: LogicPreset, bounds: Bounds = Bounds(),
                decls: Optional[sx.Declarations] = None, limit: Optional[int] = None) -> Tuple[List[KripkeModel], int]:
    """Models of the premises in enumeration order (at most ``limit``) and the number visited."""
    problem = _prepare(premises, None, preset, bounds, decls)
    walk = _Walk(problem)
    out = []
    try:
        for model, _ in _walk_countermodels(problem, walk):
            out.append(model)
            if limit is not None and len(out) >= limit:
                break
    except _CapReached:
        raise BoundsExceeded(f"visited {walk.visited} models, cap is {bounds.max_models}") from None
    return out, walk.visited


# ---------------------------------------------------------------- consequence evidence


@dataclass
class EvidenceReport:
    """Outcome of checking a schema on every bounded model of an axiom set.

    This is bounded evidence only: it says nothing about models beyond the bounds.
    """

    bounds: Bounds
    schema: str
    models_visited: int
    axiom_models: int
    instances_checked: int
    all_hold: bool
    models_by_world_count: Dict[int, int] = field(default_factory=dict)
    first_failure: Optional[Tuple[KripkeModel, Dict[str, int], int]] = None
    kind: str = "bounded evidence"

    def summary(self) -> str:
        verdict = "all instances hold" if self.all_hold else "instance fails"
        sizes = ", ".join(f"{k} world(s): {v}" for k, v in sorted(self.models_by_world_count.items()))
        return (
            f"{self.kind} [{self.bounds}]: {verdict}; {self.axiom_models} axiom model(s)"
            f" ({sizes or 'none'}), {self.instances_checked} schema instance checks, {self.models_visited} nodes visited"
        )


def check_consequence_evidence(axioms: Sequence[sx.ModalAst], schema: sx.Schema, preset: LogicPreset,
                               bounds: Bounds = Bounds(), decls: Optional[sx.Declarations] = None) -> EvidenceReport:
    """For every bounded model of ``axioms``, test every instance of ``schema``.

    Schema parameters range over their full lifted carriers (for a parameter
    of sort ``o``: every set of worlds).  An instance holds in a model when
    it is valid there under the preset's grounding.
    """
    problem = _prepare(axioms, None, preset, bounds, decls, schema.params)
    walk = _Walk(problem)
    report = EvidenceReport(bounds, sx.print_formula(schema.body), 0, 0, 0, True)
    try:
        for model, _ in _walk_countermodels(problem, walk):
            report.axiom_models += 1
            report.models_by_world_count[model.n_worlds] = report.models_by_world_count.get(model.n_worlds, 0) + 1
            sizes = [model.size(s) for _, s in schema.params]
            for combo in product(*map(range, sizes)):
                env = {v: (s, c) for (v, s), c in zip(schema.params, combo)}
                report.instances_checked += 1
                if not kripke.valid_in_model(model, schema.body, preset, env):
                    report.all_hold = False
                    if report.first_failure is None:
                        world = model.actual if preset.grounding == "actual" else next(
                            w for w in model.worlds if not kripke.eval(model, schema.body, w, env))
                        report.first_failure = (model, {v: c for (v, _), c in zip(schema.params, combo)}, world)
    except _CapReached:
        raise BoundsExceeded(f"visited {walk.visited} models, cap is {bounds.max_models}") from None
    report.models_visited = walk.visited
    return report
