import csv
import io
import json
import subprocess
import sys

import pytest

from trinet.cli import main


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def netfile(tmp_path, capsys):
    path = tmp_path / "net.trinet"
    assert main(["gen", "--na", "48", "--nb", "48", "--ma", "90", "--mb", "90", "--mc", "220",
                 "--seed", "3", "-o", str(path)]) == 0
    capsys.readouterr()
    return path


def test_gen_checksums_repeat(tmp_path, capsys):
    digests = []
    for i in range(2):
        code, out, _ = run(["gen", "--kind", "random", "--na", "16", "--nb", "16", "--ma", "20", "--mb", "20",
                            "--mc", "40", "--seed", "7", "-o", str(tmp_path / f"g{i}")], capsys)
        assert code == 0
        digests.append(json.loads(out)["sha256"])
    assert digests[0] == digests[1]
    assert (tmp_path / "g0").read_bytes() == (tmp_path / "g1").read_bytes()


def test_gen_power_of_two_error(capsys, caplog):
    code, _, _ = run(["gen", "--kind", "rmat", "--na", "15", "--nb", "16", "--ma", "5", "--mb", "5",
                        "--mc", "5"], capsys)
    assert code == 1 and "power-of-two" in caplog.text


def test_gen_grid_round_trip(tmp_path, capsys):
    path = tmp_path / "t2"
    assert run(["gen", "--grid-row", "0", "--scale", "1/64", "-o", str(path)], capsys)[0] == 0
    code, out, _ = run(["stats", str(path)], capsys)
    st = json.loads(out)
    assert (st["n_a"], st["m_a"], st["m_b"], st["m_c"]) == (8192, 78125, 78125, 156250)


def test_mine_cdc_and_verify(netfile, tmp_path, capsys):
    code, out, _ = run(["mine", str(netfile), "--pattern", "cdc", "--algo", "grd", "--top-k", "2"], capsys)
    assert code == 0
    reps = [json.loads(line) for line in out.splitlines()]
    assert len(reps) == 2 and all(r["connected_a"] and r["connected_b"] for r in reps)
    assert set(reps[0]["timings_ms"]) == {"load", "decompose", "dense", "post"}
    report = tmp_path / "r.jsonl"
    report.write_text(out)
    code, out, _ = run(["verify", str(netfile), str(report)], capsys)
    assert code == 0 and json.loads(out) == {"checked": 2, "mismatches": 0}
    tampered = dict(reps[0], density=reps[0]["density"] + 1e-9)
    report.write_text(json.dumps(tampered) + "\n")
    assert run(["verify", str(netfile), str(report)], capsys)[0] == 1


def test_mine_seeded_contains_seed(netfile, capsys):
    code, out, _ = run(["mine", str(netfile), "--pattern", "ocd-seed", "--algo", "ls", "--seeds-a", "4"], capsys)
    rep = json.loads(out)
    assert code == 0 and 4 in rep["nodes_a"] and rep["pattern"] == "ocd-seed"
    code, out, _ = run(["mine", str(netfile), "--pattern", "cdc-seeds", "--seeds-a", "4", "--seeds-b", "1",
                        "--ls-return", "final", "--omit-timings"], capsys)
    rep = json.loads(out)
    assert code == 0 and "timings_ms" not in rep and rep["params"]["ls_return"] == "final"


def test_seed_labels(tmp_path, capsys):
    path = tmp_path / "lab.trinet"
    path.write_text("trinet 2 2\n#A\n0 1\n#C\n0 0\n1 1\n#LABELS-A\n0 alice\n1 bob\n")
    code, out, _ = run(["mine", str(path), "--pattern", "ocd-seed", "--seeds-a", "bob"], capsys)
    rep = json.loads(out)
    assert code == 0 and 1 in rep["nodes_a"] and "bob" in rep["labels_a"]
    assert run(["mine", str(path), "--pattern", "ocd-seed", "--seeds-a", "carol"], capsys)[0] == 1


@pytest.mark.parametrize("args", [
    ["--pattern", "cdc-seeds", "--seeds-a", "1"],
    ["--pattern", "ocd-seed", "--seeds-a", "1", "--seeds-b", "2"],
    ["--pattern", "cdc", "--algo", "ls"],
    ["--pattern", "cdc", "--seeds-a", "1"],
    ["--pattern", "cdc", "--algo", "grd", "--epsilon", "0.2"],
    ["--pattern", "cdc", "--algo", "frd", "--epsilon", "1.5"],
    ["--pattern", "cdc", "--algo", "mds", "--snapshots", "3"],
    ["--pattern", "cdc", "--unknown-flag"],
    ["--pattern", "triangle"],
])
def test_incoherent_flags_rejected_before_loading(args, capsys, caplog):
    # the network path does not exist: a usage error must come first
    code, out, _ = run(["mine", "/nonexistent/net", *args], capsys)
    assert code == 1 and out == "" and caplog.text and "No such file" not in caplog.text


def test_no_candidate_exit_code(tmp_path, capsys):
    path = tmp_path / "p.trinet"
    path.write_text("trinet 3 1\n#A\n0 1\n1 2\n#C\n0 0\n1 0\n2 0\n")
    assert run(["mine", str(path), "--pattern", "ocd"], capsys)[0] == 2
    assert run(["mine", str(tmp_path / "missing"), "--pattern", "cdc"], capsys)[0] == 1


def test_mds_cap(netfile, capsys, caplog):
    code, _, _ = run(["mine", str(netfile), "--pattern", "cdc", "--algo", "mds", "--mds-cap", "10"], capsys)
    assert code == 1 and "MDS cap of 10" in caplog.text


def test_bench_sweep(capsys):
    code, out, _ = run(["bench", "--gen", "na=256,nb=256,ma=512,mb=512,mc=2048,seed=1",
                        "--algo", "grd", "frd", "--epsilon", "-0.4", "-0.2", "0", "0.2", "0.4"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6
    assert list(rows[0]) == ["network", "algo", "params", "seconds", "density", "passes"]
    frd = [r for r in rows if r["algo"] == "frd"]
    assert [int(r["passes"]) for r in frd] == sorted((int(r["passes"]) for r in frd), reverse=True)


def test_bench_usage_errors(capsys):
    assert run(["bench", "--gen", "na=8,nb=8,ma=0,mb=0,mc=8"], capsys)[0] == 1
    assert run(["bench", "--algo"], capsys)[0] == 1
    assert run(["bench", "--algo", "grd"], capsys)[0] == 1


def test_oracle_guard(netfile, tmp_path, capsys):
    assert run(["oracle", str(netfile)], capsys)[0] == 1
    small = tmp_path / "s.trinet"
    small.write_text("trinet 5 1\n#C\n0 0\n1 0\n2 0\n3 0\n4 0\n")
    code, out, _ = run(["oracle", str(small), "--pattern", "ocd", "--i-know-this-is-exponential"], capsys)
    assert code == 0 and abs(json.loads(out)["density"] - 5 ** 0.5) < 1e-12


def test_module_entry_point(netfile):
    proc = subprocess.run([sys.executable, "-m", "trinet", "stats", str(netfile)],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["n_a"] == 48
