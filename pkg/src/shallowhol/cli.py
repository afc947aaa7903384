"""Command line: ``shallowhol SUBCOMMAND ...``.

stdout carries deterministic, tab-separated summary lines
(``name<TAB>verdict<TAB>details``); timings go to stderr.  Exit status: 0 on
success, 1 when a conjecture is refuted (or a corpus entry fails), 2 on
usage, file or parse errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import embedding as em
from . import kernel as kn
from . import kripke
from . import search as se
from . import syntax as sx
from . import tableau as tb
from .corpus import CorpusError, run_corpus


class UsageError(Exception):
    pass


def _load(path: str) -> sx.ProblemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        return sx.parse_problem(text)
    except sx.ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _conjectures(pf: sx.ProblemFile, names: List[str], path: str):
    if not names:
        return list(pf.conjectures.items())
    out = []
    for n in names:
        try:
            out.append((n, pf.formula(n)))
        except KeyError:
            raise UsageError(f"{path}: no formula named {n!r}") from None
    return out


def _bounds(args) -> se.Bounds:
    if args.max_worlds < 1 or args.max_indiv < 1 or args.cap < 1:
        raise UsageError("bounds must be positive")
    return se.Bounds(args.max_worlds, args.max_indiv, args.cap)


def _timing(name: str, start: float) -> None:
    print(f"{name}\ttime_ms={(time.perf_counter() - start) * 1000:.0f}", file=sys.stderr)


def cmd_embed(args) -> int:
    pf = _load(args.file)
    preset = em.preset_from_problem(pf)
    sig = em.signature_for(pf.decls, preset)
    for name, f in _conjectures(pf, args.names, args.file):
        term = kn.normalize(em.ground(em.embed(f, preset, sig), preset, sig))
        print(f"{name}\t{kn.render(term)}")
    return 0


def cmd_check(args) -> int:
    pf = _load(args.file)
    preset = em.preset_from_problem(pf)
    bounds = _bounds(args)
    axioms = list(pf.axioms.values())
    status = 0
    for name, f in _conjectures(pf, args.names, args.file):
        start = time.perf_counter()
        v = se.decide_bounded(axioms, f, preset, bounds, pf.decls)
        _timing(name, start)
        if isinstance(v, se.Countermodel):
            print(f"{name}\t{v.label}\t{bounds}\tworld={v.world}")
            print(f"# countermodel for {name}, falsified at world {v.world}")
            print(kripke.format_model(v.model), end="")
            status = 1
        elif isinstance(v, se.ValidUpTo):
            note = "" if v.premises_satisfiable or not axioms else "\tpremises unsatisfiable within bounds"
            print(f"{name}\t{v.label}\t{bounds}\tmodels={v.models_checked}{note}")
        elif isinstance(v, se.ValidCertified):
            print(f"{name}\t{v.label}\t{bounds}\t{v.reason}")
        else:
            print(f"{name}\t{v.label}\t{bounds}\t{v.reason}")
    return status


def cmd_prove(args) -> int:
    pf = _load(args.file)
    preset = em.preset_from_problem(pf)
    axioms = list(pf.axioms.values())
    status = 0
    traces = []
    for name, f in _conjectures(pf, args.names, args.file):
        start = time.perf_counter()
        r = tb.prove(f, preset, axioms, max_nodes=args.max_nodes)
        _timing(name, start)
        if isinstance(r, tb.Proved):
            tb.replay(r.trace)
            print(f"{name}\t{r.label}\tnodes={len(r.trace.nodes)}\treplayed")
            traces.append(r.trace.render())
        elif isinstance(r, tb.Refuted):
            print(f"{name}\t{r.label}\tnodes={r.nodes}\tworld={r.world}")
            print(f"# countermodel for {name}, falsified at world {r.world}")
            print(kripke.format_model(r.model), end="")
            status = 1
        else:
            print(f"{name}\t{r.label}\tnodes={r.nodes}\t{r.reason}")
    if args.trace:
        Path(args.trace).write_text("\n\n".join(traces) + ("\n" if traces else ""))
    return status


def cmd_models(args) -> int:
    pf = _load(args.file)
    preset = em.preset_from_problem(pf)
    bounds = _bounds(args)
    start = time.perf_counter()
    models, visited = se.find_models(list(pf.axioms.values()), preset, bounds, pf.decls, limit=args.limit)
    _timing("models", start)
    print(f"models\t{len(models)}\t{bounds}\tvisited={visited}" + ("\tlimit reached" if len(models) == args.limit else ""))
    for k, m in enumerate(models):
        print(f"# model {k}")
        print(kripke.format_model(m), end="")
    if args.dot:
        Path(args.dot).write_text("\n".join(kripke.to_dot(m, f"model{k}") for k, m in enumerate(models)))
    return 0


def cmd_corpus(args) -> int:
    report = run_corpus(args.filter or "")
    for r in report.results:
        print(f"{r.entry.name}\t{'PASS' if r.passed else 'FAIL'}\t{r.got}\texpected={r.entry.expect}\t{r.entry.source}")
        print(f"{r.entry.name}\ttime_ms={r.seconds * 1000:.0f}\t{r.detail}", file=sys.stderr)
    print(f"corpus\t{len(report.results) - len(report.failures)}/{len(report.results)} passed")
    return 0 if report.ok else 1


def cmd_print(args) -> int:
    print(sx.print_problem(_load(args.file)), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shallowhol", description="Modal logics embedded in HOL: embed, check, prove, find models.")
    sub = ap.add_subparsers(dest="command", required=True)

    def bounded(p):
        p.add_argument("--max-worlds", type=int, default=3)
        p.add_argument("--max-indiv", type=int, default=2)
        p.add_argument("--cap", type=int, default=se.Bounds().max_models, help="maximum number of models visited")

    p = sub.add_parser("embed", help="print the normalized HOL term of conjectures")
    p.add_argument("file")
    p.add_argument("names", nargs="*")
    p.set_defaults(run=cmd_embed)

    p = sub.add_parser("check", help="bounded validity check with countermodel search")
    p.add_argument("file")
    p.add_argument("names", nargs="*")
    bounded(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("prove", help="tableau proof (propositional fragment)")
    p.add_argument("file")
    p.add_argument("names", nargs="*")
    p.add_argument("--trace", help="write proof traces to this file")
    p.add_argument("--max-nodes", type=int, default=tb.DEFAULT_NODE_CAP)
    p.set_defaults(run=cmd_prove)

    p = sub.add_parser("models", help="enumerate models of the axioms")
    p.add_argument("file")
    p.add_argument("--dot", help="write the models as Graphviz DOT")
    p.add_argument("--limit", type=int, default=1)
    bounded(p)
    p.set_defaults(run=cmd_models)

    p = sub.add_parser("corpus", help="run the bundled corpus")
    p.add_argument("filter", nargs="?")
    p.set_defaults(run=cmd_corpus)

    p = sub.add_parser("print", help="print a problem file in canonical form")
    p.add_argument("file")
    p.set_defaults(run=cmd_print)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (UsageError, CorpusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (se.SearchError, tb.UnsupportedFragment, em.EmbeddingError, sx.ParseError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
