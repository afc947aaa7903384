import shutil

import pytest

from shallowhol import corpus
from shallowhol import kripke
from shallowhol import syntax as sx
from shallowhol import tableau as tb
from shallowhol.embedding import preset_from_problem

ENTRIES = corpus.load_entries()


def test_every_topic_present():
    topics = {e.problem.parent.name for e in ENTRIES}
    assert topics == {"alc", "barcan", "correspondence", "free", "scott", "wise_men"}
    assert all(e.source in corpus.SOURCES for e in ENTRIES)


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_entry(entry):
    r = corpus.run_entry(entry)
    assert r.passed, f"{entry.name}: got {r.got} ({r.detail}), expected {entry.expect}"


def test_correspondence_table_shape():
    cells = {(e.target, e.options.get("logic")): e.expect for e in ENTRIES
             if e.problem.stem == "axioms" and e.verb == "check"}
    invalid = {k for k, v in cells.items() if v == "countermodel"}
    assert ("T", "K") in invalid and ("4", "KT") in invalid and ("5", "S4") in invalid
    assert ("T", "S4") not in invalid and ("B", "KB") not in invalid and ("K", "K") not in invalid


def test_stored_proofs_replay():
    for e in ENTRIES:
        if e.verb != "prove" or e.expect != "proved":
            continue
        pf = sx.parse_problem(e.problem.read_text())
        p = corpus._preset(pf, e.options)
        r = tb.prove(pf.conjectures[e.target], p, list(pf.axioms.values()))
        assert isinstance(r, tb.Proved) and tb.replay(r.trace)


def test_stored_countermodels_recheck():
    seen = 0
    for e in ENTRIES:
        if "model" not in e.options:
            continue
        pf = sx.parse_problem(e.problem.read_text())
        p = corpus._preset(pf, e.options)
        m = kripke.parse_model((e.problem.parent / e.options["model"]).read_text())
        assert kripke.check_frame(m, p)
        assert not kripke.valid_in_model(m, pf.conjectures[e.target], p.with_(grounding="global"))
        seen += 1
    assert seen >= 10


def test_filter():
    report = corpus.run_corpus("barcan/")
    assert report.ok and report.results
    assert all(r.entry.problem.parent.name == "barcan" for r in report.results)


def test_missing_root(tmp_path):
    with pytest.raises(corpus.MissingFile):
        corpus.run_corpus(root=tmp_path / "nowhere")


def test_missing_problem_file(tmp_path):
    (tmp_path / "t").mkdir()
    (tmp_path / "t" / "x.expect").write_text("check a expect=countermodel source=TRIVIAL\n")
    with pytest.raises(corpus.MissingFile):
        corpus.load_entries(tmp_path)


def test_malformed_expect(tmp_path):
    (tmp_path / "t").mkdir()
    (tmp_path / "t" / "x.lgp").write_text("logic K\nconst p : o\nconjecture a : p\n")
    (tmp_path / "t" / "x.expect").write_text("check a expect=countermodel\n")
    with pytest.raises(corpus.CorpusError):
        corpus.load_entries(tmp_path)


def test_runner_reports_mismatch(tmp_path):
    (tmp_path / "t").mkdir()
    (tmp_path / "t" / "x.lgp").write_text("logic K\nconst p : o\nconjecture a : box p -> p\n")
    (tmp_path / "t" / "x.expect").write_text("check a expect=valid-up-to source=TRIVIAL\nprove a expect=refuted source=TRIVIAL\n")
    report = corpus.run_corpus(root=tmp_path)
    assert [r.passed for r in report.results] == [False, True]
    assert not report.ok and len(report.failures) == 1


def test_corrupted_stored_model_fails(tmp_path):
    src = corpus.corpus_root() / "barcan"
    dst = tmp_path / "barcan"
    shutil.copytree(src, dst)
    path = dst / "models" / "BF.varying.model"
    text = path.read_text().replace("edges _ : 0>1", "edges _ :")
    path.write_text(text)
    report = corpus.run_corpus("BF[domains=varying", root=tmp_path)
    assert report.results and not report.ok
    assert "MISMATCH" in report.failures[0].detail


def test_preset_override():
    pf = sx.parse_problem((corpus.corpus_root() / "correspondence" / "axioms.lgp").read_text())
    assert preset_from_problem(pf).frame_class == "K"
    assert corpus._preset(pf, {"logic": "S5"}).frame_class == "S5universal"
