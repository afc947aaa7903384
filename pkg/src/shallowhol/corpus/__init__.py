"""Curated problem files with expected verdicts, and their runner.

Layout: ``<topic>/<name>.lgp`` holds a problem file, ``<name>.expect`` the
checks to run on it, one per line::

    VERB TARGET [key=value ...] expect=LABEL source=TAG

``source`` records where the expectation comes from (``LITERATURE`` for a
claim taken from the literature, ``DERIVED`` for a value computed by an
independent route, ``TRIVIAL``, or ``EXTERNAL`` for the sourced Scott
axioms).  Verbs:

``check NAME``
    ``decide_bounded`` with the file's axioms as premises.  Keys ``logic``,
    ``domains``, ``worlds``, ``indiv`` override the file and the default
    bounds.  ``model=PATH`` names a stored countermodel: it is re-checked
    with ``kripke`` and must equal the first countermodel found.
``prove NAME``
    tableau; proofs are replayed.  Key ``logic``.
``evidence SCHEMA``
    ``check_consequence_evidence`` of the schema over the axioms; label
    ``all-hold`` or ``fails``.
``announce NAME``
    axioms announced in file order on a hat-puzzle model
    (``agents=a,b,c atoms=ma,mb,mc``), then the conjecture checked
    everywhere; label ``entailed`` or ``not-entailed``.
``free NAME``
    free-logic reading (axioms as hypotheses) checked over standard HOL
    models up to ``indiv`` elements; label ``valid`` or ``countermodel``,
    optional ``elements=N`` for the size of the first countermodel.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .. import embedding as em
from .. import holmodel as hm
from .. import kernel as kn
from .. import kripke
from .. import search as se
from .. import syntax as sx
from .. import tableau as tb


class CorpusError(Exception):
    pass


class MissingFile(CorpusError):
    pass


SOURCES = ("LITERATURE", "DERIVED", "TRIVIAL", "EXTERNAL")


def corpus_root() -> Path:
    return Path(str(resources.files(__name__)))


@dataclass
class CorpusEntry:
    problem: Path
    verb: str
    target: str
    expect: str
    source: str
    options: Dict[str, str] = field(default_factory=dict)
    line: int = 0

    @property
    def name(self) -> str:
        topic = self.problem.parent.name
        extra = " ".join(f"{k}={v}" for k, v in self.options.items() if k != "model")
        return f"{topic}/{self.problem.stem}:{self.verb}:{self.target}" + (f"[{extra}]" if extra else "")


@dataclass
class EntryResult:
    entry: CorpusEntry
    passed: bool
    got: str
    detail: str = ""
    seconds: float = 0.0


@dataclass
class CorpusReport:
    results: List[EntryResult]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[EntryResult]:
        return [r for r in self.results if not r.passed]


def parse_expect(path: Path) -> List[CorpusEntry]:
    problem = path.with_suffix(".lgp")
    if not problem.exists():
        raise MissingFile(f"{problem} (referenced by {path})")
    entries = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if len(words) < 2:
            raise CorpusError(f"{path}:{lineno}: expected 'VERB TARGET key=value ...'")
        opts = {}
        for w in words[2:]:
            k, eq, v = w.partition("=")
            if not eq:
                raise CorpusError(f"{path}:{lineno}: bad option {w!r}")
            opts[k] = v
        if "expect" not in opts or opts.get("source") not in SOURCES:
            raise CorpusError(f"{path}:{lineno}: every entry needs expect= and source= ({'/'.join(SOURCES)})")
        expect, source = opts.pop("expect"), opts.pop("source")
        entries.append(CorpusEntry(problem, words[0], words[1], expect, source, opts, lineno))
    return entries


def load_entries(root: Optional[Path] = None, pattern: str = "") -> List[CorpusEntry]:
    root = Path(root) if root is not None else corpus_root()
    if not root.is_dir():
        raise MissingFile(str(root))
    entries = []
    for path in sorted(root.glob("*/*.expect")):
        entries.extend(e for e in parse_expect(path) if pattern in e.name)
    return entries


def _preset(pf: sx.ProblemFile, opts) -> em.LogicPreset:
    p = em.preset_from_problem(pf)
    if "logic" in opts:
        p = p.with_(frame_class=sx.LOGIC_ALIASES.get(opts["logic"], opts["logic"]), custom_flags=frozenset())
    if "domains" in opts:
        p = p.with_(domains=opts["domains"])
    return p


def _bounds(opts) -> se.Bounds:
    return se.Bounds(int(opts.get("worlds", 3)), int(opts.get("indiv", 1)))


def run_entry(entry: CorpusEntry) -> EntryResult:
    start = time.perf_counter()
    try:
        got, detail = _run(entry)
        passed = got == entry.expect and not detail.startswith("MISMATCH")
    except (CorpusError, sx.ParseError, se.SearchError, tb.TableauError, kripke.KripkeError, KeyError) as exc:
        got, detail, passed = "error", f"{type(exc).__name__}: {exc}", False
    return EntryResult(entry, passed, got, detail, time.perf_counter() - start)


def _run(entry: CorpusEntry) -> Tuple[str, str]:
    pf = sx.parse_problem(entry.problem.read_text())
    opts = entry.options
    preset = _preset(pf, opts)
    axioms = list(pf.axioms.values())
    if entry.verb == "check":
        conj = pf.conjectures[entry.target]
        verdict = se.decide_bounded(axioms, conj, preset, _bounds(opts), pf.decls)
        detail = ""
        if isinstance(verdict, se.Countermodel):
            detail = f"{verdict.model.n_worlds} world(s)"
        if "model" in opts:
            detail = _check_stored(entry, pf, preset, axioms, conj, verdict)
        return verdict.label, detail
    if entry.verb == "prove":
        conj = pf.conjectures[entry.target]
        result = tb.prove(conj, preset, axioms)
        if isinstance(result, tb.Proved):
            tb.replay(result.trace)
            return result.label, f"{len(result.trace.nodes)} nodes, replayed"
        if isinstance(result, tb.Refuted):
            return result.label, f"{result.model.n_worlds} world(s)"
        return result.label, result.reason
    if entry.verb == "evidence":
        schema = pf.schemas[entry.target]
        report = se.check_consequence_evidence(axioms, schema, preset, _bounds(opts), pf.decls)
        if report.axiom_models == 0:
            return "no-models", report.summary()
        return ("all-hold" if report.all_hold else "fails"), report.summary()
    if entry.verb == "announce":
        agents = opts["agents"].split(",")
        atoms = opts["atoms"].split(",")
        model = kripke.hat_puzzle_model(agents, atoms)
        rep = kripke.model_consequence(model, axioms, pf.conjectures[entry.target])
        return ("entailed" if rep.entailed else "not-entailed"), f"{rep.worlds_remaining} world(s) remain"
    if entry.verb == "free":
        sig = em.free_signature(pf.decls)
        term = em.embed_free(pf.conjectures[entry.target], sig)
        for ax in axioms:
            term = kn.apply(kn.IMP, em.embed_free(ax, sig), term)
        verdict = hm.find_hol_countermodel(term, sig, 1, int(opts.get("indiv", 3)))
        if verdict.valid:
            return "valid", f"{verdict.models_checked} models"
        size = verdict.countermodel.n_indiv
        detail = f"{size} element(s)"
        if "elements" in opts and int(opts["elements"]) != size:
            detail = f"MISMATCH: expected {opts['elements']} element(s), got {size}"
        return "countermodel", detail
    raise CorpusError(f"unknown verb {entry.verb!r}")


def _check_stored(entry, pf, preset, axioms, conj, verdict) -> str:
    path = entry.problem.parent / entry.options["model"]
    if not path.exists():
        raise MissingFile(str(path))
    stored = kripke.parse_model(path.read_text())
    if not kripke.check_frame(stored, preset):
        return "MISMATCH: stored model violates the frame conditions"
    if not all(kripke.valid_in_model(stored, a, preset) for a in axioms):
        return "MISMATCH: stored model violates an axiom"
    if all(kripke.eval(stored, conj, w) for w in stored.worlds):
        return "MISMATCH: stored model does not falsify the conjecture"
    if isinstance(verdict, se.Countermodel) and verdict.model != stored:
        return "MISMATCH: search found a different first countermodel"
    return f"stored model re-checked ({stored.n_worlds} world(s))"


def run_corpus(pattern: str = "", root: Optional[Path] = None) -> CorpusReport:
    """Run every entry whose name contains ``pattern``."""
    return CorpusReport([run_entry(e) for e in load_entries(root, pattern)])
