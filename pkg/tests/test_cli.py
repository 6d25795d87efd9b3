import json

import pytest

from arrival_workbench.cli import main
from conftest import I2_TEXT


@pytest.fixture
def trap_file(tmp_path):
    path = tmp_path / "trap.arrival"
    path.write_text("arrival v1\nn 2\no 0\n0 1 1\n1 0 0\n")
    return path


def test_validate(capsys, i2_file):
    assert main(["validate", str(i2_file)]) == 0
    assert "ell: 1" in capsys.readouterr().out


def test_validate_reports_parse_errors(capsys, tmp_path):
    path = tmp_path / "bad.arrival"
    path.write_text("arrival v1\nn 2\no D0\n")
    assert main(["validate", str(path)]) == 1
    assert "line 3" in capsys.readouterr().err


def test_missing_file_is_invalid_input(tmp_path):
    assert main(["validate", str(tmp_path / "nothing.arrival")]) == 1


def test_non_terminating_is_invalid_input(trap_file):
    assert main(["validate", str(trap_file)]) == 1
    assert main(["decide", str(trap_file), "--method", "sim"]) == 1


def test_run_writes_trace_and_profile(capsys, tmp_path, i2_file):
    trace, profile = tmp_path / "trace.csv", tmp_path / "profile.csv"
    assert main(["run", str(i2_file), "--trace", str(trace), "--profile", str(profile)]) == 0
    out = capsys.readouterr().out
    assert "destination: D1 | traversals: 3" in out
    assert "visits: 0:2 1:1" in out
    assert len(trace.read_text().splitlines()) == 4
    assert main(["verify", str(i2_file), str(profile)]) == 0
    assert "valid-to-D1" in capsys.readouterr().out


def test_multi_run(capsys, i2_file):
    assert main(["multi-run", str(i2_file), "--set", "1", "--weights", "3", "--scheduler", "random:7"]) == 0
    assert "D0: 1 | D1: 1 | inflows: 1:2" in capsys.readouterr().out


def test_multi_run_dimension_mismatch(i2_file):
    assert main(["multi-run", str(i2_file), "--set", "1", "--weights", "1,2"]) == 1


@pytest.mark.parametrize("method", ["sim", "subexp", "fvs", "all"])
def test_decide(capsys, tmp_path, i2_file, method):
    certificate = tmp_path / "cert.csv"
    args = ["decide", str(i2_file), "--method", method, "--certificate", str(certificate)]
    assert main(args + ["--base-dir", str(tmp_path)]) == 0
    assert "destination: D1" in capsys.readouterr().out
    assert main(["verify", str(i2_file), str(certificate)]) == 0


def test_decide_json(capsys, tmp_path, i2_file):
    assert main(["decide", str(i2_file), "--method", "subexp", "--phi", "0.5", "--json"]) == 0
    assert '"destination": "D1"' in capsys.readouterr().out


def test_fvs_refusal_is_invalid_input(capsys, i2_file):
    assert main(["fvs", str(i2_file), "--kmax", "0"]) == 1
    assert main(["fvs", str(i2_file), "--kmax", "1"]) == 0
    assert "fvs: 0 | size: 1" in capsys.readouterr().out


def test_phi_set(capsys, i2_file):
    assert main(["phi-set", str(i2_file), "--phi", "1/2"]) == 0
    assert "set: - | size: 0" in capsys.readouterr().out


def test_gen(capsys, tmp_path):
    assert main(["gen", "--family", "long_run_counter", "--n", "3", "--seed", "4"]) == 0
    assert capsys.readouterr().out.startswith("arrival v1\nn 3\no 0\n")

    output = tmp_path / "grid.arrival"
    assert main(["gen", "--family", "two_cycle_grid", "--n", "6", "--cycles", "2", "--output", str(output)]) == 0
    assert main(["validate", str(output)]) == 0


def test_unknown_family_is_invalid_input():
    assert main(["gen", "--family", "complete"]) == 1


def test_verify_rejects_broken_certificate(capsys, tmp_path, i2_file):
    certificate = tmp_path / "broken.csv"
    certificate.write_text("tail,slot,head,count\nY,yard,0,1\n0,even,1,1\n")
    assert main(["verify", str(i2_file), str(certificate)]) == 1
    assert "conservation" in capsys.readouterr().err


def test_bench(capsys, tmp_path, i2_file):
    output = tmp_path / "bench.csv"
    args = ["bench", "--inputs", str(i2_file), "--output", str(output), "--num-workers", "1"]
    assert main(args + ["--base-dir", str(tmp_path)]) == 0
    lines = output.read_text().splitlines()
    assert len(lines) == 4
    assert lines[1].startswith("i2,sim,2,1,0,D1,3,")
    assert (tmp_path / "results" / "bench" / ".config.json").exists()


def test_bench_generated_corpus(tmp_path):
    output = tmp_path / "bench.csv"
    args = ["bench", "--families", "layered_chain", "--n-max", "3", "--count", "1", "--methods", "sim"]
    assert main(args + ["--output", str(output), "--num-workers", "1", "--base-dir", str(tmp_path)]) == 0
    assert len(output.read_text().splitlines()) == 3


def test_i2_text_fixture_parses(i2_file):
    assert i2_file.read_text() == I2_TEXT


def test_bench_json_summaries(capsys, tmp_path, i2_file):
    args = ["bench", "--inputs", str(i2_file), "--output", str(tmp_path / "bench.csv"), "--num-workers", "1"]
    assert main(args + ["--json", "--base-dir", str(tmp_path)]) == 0
    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [line["method"] for line in lines] == ["sim", "subexp", "fvs"]
    assert all(line["bound_failures"] == 0 for line in lines)


def test_bench_resumes_stored_settings(tmp_path, i2_file):
    config = tmp_path / "results" / "resumed" / ".config.json"
    args = ["bench", "--inputs", str(i2_file), "--output", str(tmp_path / "bench.csv"), "--num-workers", "1"]
    args += ["--name", "resumed", "--base-dir", str(tmp_path)]

    assert main(args + ["--phi", "1/3", "--k-max", "2"]) == 0
    assert main(args) == 0
    stored = json.loads(config.read_text())
    assert (stored["phi"], stored["k_max"]) == ("1/3", 2)

    assert main(args + ["--new", "--k-max", "5"]) == 0
    stored = json.loads(config.read_text())
    assert (stored["phi"], stored["k_max"]) == (None, 5)


def test_non_utf8_instance_is_invalid_input(capsys, tmp_path):
    path = tmp_path / "binary.arrival"
    path.write_bytes(b"arrival v1\nn 1\no 0\n0 D0 \xff\n")
    assert main(["validate", str(path)]) == 1
    assert "line 4: invalid UTF-8 byte 0xff" in capsys.readouterr().err
