import subprocess
import sys

import pytest

from shallowhol import kripke
from shallowhol.cli import main
from shallowhol.corpus import corpus_root

CORR = str(corpus_root() / "correspondence" / "axioms.lgp")


@pytest.fixture
def demo(tmp_path):
    path = tmp_path / "demo.lgp"
    path.write_text("logic K\nconst p : o\nconst q : o\nconjecture t1 : p & q\nconjecture t2 : box p -> p\n")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_embed(capsys, demo):
    code, out, _ = run(capsys, "embed", demo, "t1")
    assert code == 0
    assert out == "t1\tall (\\w:i. and (p w) (q w))\n"


def test_check_refutes_t_and_exits_1(capsys):
    code, out, err = run(capsys, "check", CORR, "T", "--max-worlds", "3")
    assert code == 1
    first = out.splitlines()[0].split("\t")
    assert first[:3] == ["T", "countermodel", "w<=3,d<=2"]
    model = kripke.parse_model("\n".join(out.splitlines()[1:]))
    assert model.n_worlds == 1
    assert "time_ms=" in err and "time_ms" not in out


def test_check_valid(capsys):
    code, out, _ = run(capsys, "check", CORR, "K", "--max-worlds", "2")
    assert code == 0 and out.startswith("K\tvalid-up-to\tw<=2,d<=2\t")


def test_prove(capsys, demo, tmp_path):
    trace = tmp_path / "trace.txt"
    code, out, _ = run(capsys, "prove", CORR, "K", "--trace", str(trace))
    assert code == 0 and out.startswith("K\tproved\t") and "replayed" in out
    assert trace.read_text().startswith("conjecture: box (p -> q) -> box p -> box q")
    code, out, _ = run(capsys, "prove", demo, "t2")
    assert code == 1 and out.startswith("t2\trefuted")


def test_models_and_dot(capsys, tmp_path):
    dot = tmp_path / "m.dot"
    path = tmp_path / "ax.lgp"
    path.write_text("logic KT\nconst p : o\naxiom a : dia p & dia not p\n")
    code, out, _ = run(capsys, "models", str(path), "--max-worlds", "2", "--limit", "2", "--dot", str(dot))
    assert code == 0 and out.startswith("models\t2\tw<=2,d<=2")
    assert dot.read_text().count("digraph") == 2


def test_print(capsys, demo):
    code, out, _ = run(capsys, "print", demo)
    assert code == 0 and "conjecture t2 : box p -> p" in out


def test_corpus_subset(capsys):
    code, out, _ = run(capsys, "corpus", "wise_men")
    assert code == 0 and out.splitlines()[-1] == "corpus\t2/2 passed"


def test_usage_errors(capsys, demo, tmp_path):
    assert run(capsys, "check", str(tmp_path / "absent.lgp"))[0] == 2
    assert run(capsys, "check", demo, "nope")[0] == 2
    assert run(capsys, "check", demo, "--max-worlds", "0")[0] == 2
    bad = tmp_path / "bad.lgp"
    bad.write_text("logic K\nconjecture t : box zz\n")
    code, _, err = run(capsys, "embed", str(bad))
    assert code == 2 and "zz" in err
    with pytest.raises(SystemExit) as exc:
        main(["check", demo, "--frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_prove_rejects_quantifiers(capsys):
    path = str(corpus_root() / "barcan" / "barcan.lgp")
    code, _, err = run(capsys, "prove", path, "BF")
    assert code == 2 and "UnsupportedFragment" in err


def test_stdout_is_deterministic():
    cmd = [sys.executable, "-m", "shallowhol", "check", CORR, "--max-worlds", "2"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == b.returncode == 1
    assert a.stdout == b.stdout and a.stdout
