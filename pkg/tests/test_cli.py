import subprocess
import sys

import pytest

from crcp.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_gen_deterministic(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    assert run_cli("gen", "--generator", "uniform", "--n", "30", "--seed", "9", "--out", str(a)) == 0
    assert run_cli("gen", "--generator", "uniform", "--n", "30", "--seed", "9", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_empty_has_header(tmp_path):
    out = tmp_path / "empty.txt"
    assert run_cli("gen", "--generator", "uniform", "--n", "0", "--out", str(out)) == 0
    text = out.read_text()
    assert text.startswith("#") and "n=0" in text


def test_gen_adversarial_values(tmp_path):
    out = tmp_path / "adv.txt"
    assert run_cli("gen", "--generator", "adv-strip", "--n", "8", "--out", str(out)) == 0
    first = [l for l in out.read_text().splitlines() if not l.startswith("#")][0]
    assert first.split() == ["-1", "56", "0"]


def test_gen_bad_generator(tmp_path):
    assert run_cli("gen", "--generator", "banana", "--n", "4", "--out", str(tmp_path / "x")) == 2


def test_build_query_verify_bench(tmp_path, capsys):
    data = tmp_path / "data.txt"
    run_cli("gen", "--generator", "uniform", "--n", "40", "--colors", "3", "--seed", "4", "--out", str(data))

    stats = tmp_path / "stats.txt"
    assert run_cli("build", "--data", str(data), "--kind", "strip", "--eps", "0.5", "--out", str(stats)) == 0
    assert "nodes.total" in stats.read_text()

    queries = tmp_path / "queries.txt"
    queries.write_text("STRIP 0 0.1 0.9\nSTRIP 1 0.0 0.5\n# comment\nSTRIP 0 0.4 0.4\n")
    answers = tmp_path / "answers.txt"
    assert run_cli(
        "query", "--data", str(data), "--queries", str(queries),
        "--kind", "strip", "--eps", "0.5", "--out", str(answers),
    ) == 0
    lines = answers.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("pair ") or lines[0] == "none"

    assert run_cli("verify", "--data", str(data), "--kind", "strip", "--eps", "0.5") == 0
    out = capsys.readouterr().out
    assert "result PASS" in out

    report = tmp_path / "report.txt"
    assert run_cli(
        "bench", "--data", str(data), "--queries", str(queries),
        "--kind", "strip", "--eps", "0.5", "--out", str(report),
    ) == 0
    assert "max_ratio" in capsys.readouterr().out
    assert "# summary" in report.read_text()


def test_verify_corrupt_exits_one(tmp_path, capsys):
    data = tmp_path / "data.txt"
    run_cli("gen", "--generator", "uniform", "--n", "40", "--colors", "2", "--seed", "6", "--out", str(data))
    code = run_cli("verify", "--data", str(data), "--kind", "strip", "--eps", "0.5", "--corrupt")
    assert code == 1
    err = capsys.readouterr().err
    assert "FAIL" in err and "range" in err


def test_verify_rect_and_anchored(tmp_path):
    data = tmp_path / "data.txt"
    run_cli("gen", "--generator", "uniform", "--n", "25", "--colors", "3", "--seed", "8", "--out", str(data))
    assert run_cli("verify", "--data", str(data), "--kind", "rect2", "--eps", "0.5", "--rects", "40") == 0
    assert run_cli(
        "verify", "--data", str(data), "--kind", "anchored2d", "--eps", "0.5",
        "--anchored-queries", "10",
    ) == 0


def test_query_anchored_kind(tmp_path):
    data = tmp_path / "data.txt"
    run_cli("gen", "--generator", "uniform", "--n", "20", "--colors", "2", "--seed", "3", "--out", str(data))
    queries = tmp_path / "queries.txt"
    queries.write_text("RECT 0 1 0 1 0.5 0.5\n")
    answers = tmp_path / "ans.txt"
    assert run_cli(
        "query", "--data", str(data), "--queries", str(queries),
        "--kind", "anchored2d", "--eps", "0.5", "--out", str(answers),
    ) == 0
    assert answers.read_text().strip() in ("none",) or answers.read_text().startswith("pair")


def test_bad_eps_exits_two(tmp_path):
    data = tmp_path / "data.txt"
    run_cli("gen", "--generator", "uniform", "--n", "10", "--out", str(data))
    assert run_cli("build", "--data", str(data), "--kind", "strip", "--eps", "-1") == 2


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "crcp.cli", "--help"], capture_output=True, text=True
    )
    assert out.returncode == 0
    assert "verify" in out.stdout
