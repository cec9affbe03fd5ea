import json
import shutil
import subprocess
import sys

import pytest

import oracles
from conftest import GOLDEN, FIXTURES
from phh.cli import main

PARTIAL = ('variant = "NT"\nantes = [0, 0]\nblinds_or_straddles = [1, 2]\nmin_bet = 2\n'
           'starting_stacks = [100, 100]\nactions = ["d dh p1 ????"]\n')


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_golden(capsys):
    code, out, _ = run(capsys, "validate", GOLDEN)
    assert code == 0 and "\tPass\t" in out


def test_validate_missing_actions(capsys, tmp_path, golden_text):
    start = golden_text.index("actions = [")
    bad = tmp_path / "bad.phh"
    bad.write_text(golden_text[:start] + golden_text[golden_text.index("]\n", start) + 2:])
    code, out, _ = run(capsys, "validate", "--json", bad)
    assert code == 1
    record = json.loads(out)
    assert record["verdict"] == "Fail"
    assert "MissingRequiredField" in [d["code"] for d in record["diagnostics"]]


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", tmp_path / "nope.phh")
    assert code == 2 and err


def test_validate_lenient_allows_warnings(capsys, tmp_path, golden_text):
    path = tmp_path / "w.phh"
    path.write_text(golden_text + "bring_in = 5\n")
    assert run(capsys, "validate", path)[0] == 1
    assert run(capsys, "validate", "--lenient", path)[0] == 0


def test_validate_many_parallel(capsys):
    files = sorted(FIXTURES.glob("*.phh"))
    code, out, _ = run(capsys, "validate", "--parallel", 4, *files)
    assert code == 0 and len(out.splitlines()) == len(files)


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["validate", "--bogus", str(GOLDEN)])
    assert info.value.code == 2


def test_replay_final(capsys):
    code, out, _ = run(capsys, "replay", GOLDEN, "--final")
    assert code == 0
    assert out.strip() == " ".join(map(str, oracles.golden_finishing_by_hand()))


def test_replay_snapshots(capsys):
    code, out, _ = run(capsys, "replay", GOLDEN, "--snapshots")
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(records) == 27 and records[-1]["terminal"]


def test_replay_partial(capsys, tmp_path):
    path = tmp_path / "partial.phh"
    path.write_text(PARTIAL)
    code, out, err = run(capsys, "replay", path, "--final")
    assert code == 1 and "NonTerminalState" in err and out == ""


def test_stats_matches_wc(capsys):
    files = sorted(FIXTURES.glob("*.phh"))
    code, out, _ = run(capsys, "stats", *files)
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()[1:-1]]
    for path, row in zip(files, rows):
        assert tuple(map(int, row[1:])) == oracles.wc_counts(path.read_bytes())


def test_stats_empty_and_duplicates(capsys, tmp_path):
    empty = tmp_path / "empty.phh"
    empty.write_bytes(b"")
    code, out, _ = run(capsys, "stats", "--json", empty)
    stats = json.loads(out)
    assert code == 0 and (stats["newlines"], stats["words"], stats["bytes"]) == (0, 0, 0)
    code, out, _ = run(capsys, "stats", "--json", GOLDEN, GOLDEN)
    stats = json.loads(out)
    assert (stats["newlines"], stats["words"], stats["bytes"]) == oracles.wc_counts(GOLDEN.read_bytes())


def test_stats_figure(capsys, tmp_path):
    figure = tmp_path / "stats.png"
    assert run(capsys, "stats", "--figure", figure, GOLDEN)[0] == 0
    assert figure.read_bytes()[:4] == b"\x89PNG"


def test_bench(capsys, tmp_path):
    figure = tmp_path / "bench.png"
    code, out, _ = run(capsys, "bench", "--copies", 1000, "--repeat", 3, "--json", "--figure", figure, GOLDEN)
    result = json.loads(out)
    assert code == 0 and result["hands"] == 3000 and result["hands_per_second"] > 0
    assert len(result["round_seconds"]) == 3
    assert figure.exists()


def test_bench_refuses_invalid(capsys, tmp_path):
    bad = tmp_path / "bad.phh"
    bad.write_text("not = [toml")
    code, _, err = run(capsys, "bench", GOLDEN, bad)
    assert code == 1 and "refusing" in err


def test_canon(capsys, tmp_path, golden_text):
    code, out, _ = run(capsys, "canon", GOLDEN)
    assert code == 0
    for name in ("# Yockey", "# Esposito", "# A bad beat between Yockey and Arieh."):
        assert name in out
    path = tmp_path / "c.phh"
    path.write_text(out)
    code, again, _ = run(capsys, "canon", path)
    assert again == out


def test_canon_in_place_leaves_invalid_files(capsys, tmp_path):
    path = tmp_path / "bad.phh"
    path.write_bytes(b'variant = "NT"\nstarting_stacks = [1]\n')
    before = path.read_bytes()
    assert run(capsys, "canon", "--in-place", path)[0] == 1
    assert path.read_bytes() == before


def test_canon_in_place(capsys, tmp_path, golden_text):
    path = tmp_path / "f.phh"
    path.write_text(golden_text)
    assert run(capsys, "canon", "--in-place", path)[0] == 0
    assert run(capsys, "validate", path)[0] == 0


@pytest.mark.skipif(shutil.which("phh") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["phh", "replay", str(GOLDEN)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.split() == ["0", "4190000", "5910000", "12095000"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "phh.cli", "validate", str(GOLDEN)], capture_output=True, text=True)
    assert proc.returncode == 0
