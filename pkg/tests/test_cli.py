import json
import subprocess
import sys

import pytest

from brouwer_entropy.cli import main
from brouwer_entropy.coding import GrowthSeries
from brouwer_entropy.entropy import ExponentEstimate
from brouwer_entropy.glued_plane import GluingSpec
from brouwer_entropy.oracles import random_system
from brouwer_entropy.singularity import SingularityVerdict


@pytest.fixture
def spec_path(tmp_path):
    path = tmp_path / "f3.json"
    assert main(["build", "--L", "3", "--alpha", "3", "--k-max", "600", "--out", str(path)]) == 0
    return path


def test_build_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["build", "--L", "4", "--alpha", "3.5", "--k-max", "300", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    spec = GluingSpec.from_json(a.read_text())
    assert (spec.L, spec.k_max) == (4, 300)


def test_build_to_stdout(capsys):
    assert main(["build", "--L", "2", "--alpha", "2", "--k-max", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["L"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["build", "--L", "3", "--alpha", "5"],
        ["build", "--L", "3"],
        ["frobnicate"],
        ["count", "--system", "translation", "--n", "8,4"],
        ["verify", "--suite", "nonsense"],
        ["count", "--system", "/no/such/file.json", "--n", "4"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    capsys.readouterr()


def test_layout_bound_exit(spec_path, capsys):
    assert main(["count", "--system", str(spec_path), "--n", "5000"]) == 3
    assert "k_max" in capsys.readouterr().err


def test_count_estimate_pipeline(spec_path, tmp_path):
    counts = tmp_path / "counts.csv"
    args = ["count", "--system", str(spec_path), "--n", "128,256,512", "--strategy", "plateau", "--out", str(counts)]
    assert main(args) == 0
    series = GrowthSeries.from_csv(counts.read_text())
    assert [c for _, c, _ in series.rows] == [7084, 52976, 423980]
    out = tmp_path / "est.json"
    assert main(["estimate", "--counts", str(counts), "--out", str(out)]) == 0
    est = ExponentEstimate.from_json(out.read_text())
    assert est.exponent == pytest.approx(3.0, abs=0.1)
    assert est.fit_window == (128, 512)


def test_sample_count_repeatable(spec_path, tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        argv = ["count", "--system", str(spec_path), "--n", "16,32", "--seed", "7", "--random-fill", "20", "--out", str(path)]
        assert main(argv) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_exact_on_translation(capsys):
    assert main(["count", "--system", "translation", "--n", "4,8", "--strategy", "exact"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["n,count,strategy", "4,8,exact", "8,16,exact"]


def test_exact_on_oracle_file(tmp_path, capsys):
    path = tmp_path / "oracle.json"
    sys_ = random_system(3, 2, 2, 4)
    path.write_text(sys_.to_json())
    assert main(["count", "--system", str(path), "--n", "2,3", "--strategy", "exact"]) == 0
    assert capsys.readouterr().out.startswith("n,count,strategy\n")
    assert main(["count", "--system", str(path), "--n", "2,3", "--strategy", "exact", "--family", "Y1"]) == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("2,")


def test_exact_rejected_on_glued(spec_path, capsys):
    assert main(["count", "--system", str(spec_path), "--n", "4", "--strategy", "exact"]) == 2
    capsys.readouterr()


def test_singular(spec_path, tmp_path):
    out = tmp_path / "v.json"
    assert main(["singular", "--system", str(spec_path), "--gap", "100", "--horizon", "1000", "--out", str(out)]) == 0
    verdict = SingularityVerdict.from_json(out.read_text())
    assert verdict.singular and verdict.witness["hits"]["U3"] == [202]


def test_verify_passes(capsys):
    assert main(["verify", "--suite", "sandwich", "--seed", "1", "--systems", "5"]) == 0
    assert "all inequalities hold" in capsys.readouterr().out


def test_verify_reports_violation(monkeypatch, capsys):
    from brouwer_entropy import cli, suites

    bad = suites.Violation("fake", 3, 5, 4, random_system(0, 1, 2, 3))
    monkeypatch.setitem(cli.SUITES, "lemmas", lambda **kw: [bad])
    assert main(["verify", "--suite", "lemmas"]) == 1
    out = capsys.readouterr().out
    assert "fake at n=3" in out
    assert '"orbits"' in out


def test_module_entry_point(tmp_path):
    done = subprocess.run(
        [sys.executable, "-m", "brouwer_entropy", "build", "--L", "2", "--alpha", "2", "--k-max", "3"],
        capture_output=True,
        text=True,
    )
    assert done.returncode == 0
    assert json.loads(done.stdout)["k_max"] == 3
