# tests/test_cli.py
import io
import json

import pandas as pd
import pytest

from skipless.cli import main


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


@pytest.fixture
def built_a2(tmp_path, capsys):
    path = tmp_path / "a2.json"
    status, _, err = run(capsys, "build", "--construction", "a", "--m", "2", "--out", str(path))
    assert status == 0
    assert "[DONE] wrote" in err
    return path


class TestBuild:
    def test_construction_a(self, built_a2):
        descriptor = json.loads(built_a2.read_text())
        assert descriptor["kind"] == "zigzag-code"
        assert descriptor["k"] + len(descriptor["patterns"]) == 6
        assert 2 ** descriptor["m"] == 4
        assert descriptor["seed"] is not None

    def test_construction_c(self, capsys):
        status, out, _ = run(capsys, "build", "--construction", "c", "--m", "2", "--k", "6")
        assert status == 0
        descriptor = json.loads(out)
        assert descriptor["k"] + len(descriptor["patterns"]) == 10

    def test_sqs_design(self, capsys):
        status, out, _ = run(capsys, "build", "--construction", "sqs", "--v", "10")
        assert status == 0
        descriptor = json.loads(out)
        assert descriptor["kind"] == "design"
        assert len(descriptor["blocks"]) == 30
        assert descriptor["certificate"]["verified"]

    def test_unsupported_order(self, capsys):
        status, _, err = run(capsys, "build", "--construction", "sqs", "--v", "12")
        assert status == 1
        assert "unsupported order" in err

    def test_deterministic(self, tmp_path, capsys):
        first, second = tmp_path / "one.json", tmp_path / "two.json"
        for path in (first, second):
            assert run(capsys, "build", "--construction", "b", "--m", "2", "--seed", "4", "--out", str(path))[0] == 0
        assert first.read_bytes() == second.read_bytes()

    @pytest.mark.parametrize("argv", [
        ["build", "--construction", "a"],
        ["build", "--construction", "a", "--m", "9"],
        ["build", "--construction", "c", "--m", "2"],
        ["build", "--construction", "sqs"],
        ["build", "--construction", "zz", "--m", "2"],
        ["build", "--construction", "a", "--m", "2", "--field-w", "40"],
        ["frobnicate"],
    ])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2


class TestVerify:
    def test_mds_on_built_descriptor(self, built_a2, capsys):
        status, out, _ = run(capsys, "verify", str(built_a2), "--check", "mds")
        assert status == 0
        assert out.startswith("PASS MDS over all 20 column subsets")

    def test_sqs14(self, capsys):
        status, out, _ = run(capsys, "verify", "--construction", "sqs", "--v", "14", "--check", "sqs")
        assert status == 0
        assert out.strip() == "PASS SQS verified (364 triples)"

    def test_baseline_zero_skip_witness(self, capsys):
        status, out, _ = run(capsys, "verify", "--construction", "baseline", "--m", "2", "--check", "zero-skip")
        assert status == 1
        assert out.strip() == "FAIL s=2 skip 4"

    def test_construction_b_zero_skip(self, capsys):
        status, out, _ = run(capsys, "verify", "--construction", "b", "--m", "3", "--check", "zero-skip")
        assert status == 0
        assert out.startswith("PASS 4 repairs")

    def test_differences(self, capsys):
        status, out, _ = run(capsys, "verify", "--construction", "sqs", "--v", "26", "--check", "differences")
        assert status == 0
        assert "sqs26" in out

    def test_differences_needs_a_table(self, capsys):
        assert run(capsys, "verify", "--construction", "sqs", "--v", "8", "--check", "differences")[0] == 2

    def test_adjacent_pairs_fail_on_sqs14(self, capsys):
        status, out, _ = run(capsys, "verify", "--construction", "sqs", "--v", "14", "--check", "adjacent-pairs")
        assert status == 1
        assert out.startswith("FAIL pair {")

    def test_mds_check_on_design(self, capsys):
        assert run(capsys, "verify", "--construction", "sqs", "--v", "8", "--check", "mds")[0] == 2

    def test_missing_descriptor(self, tmp_path, capsys):
        status, _, err = run(capsys, "verify", str(tmp_path / "nope.json"))
        assert status == 2
        assert "descriptor not found" in err

    def test_broken_descriptor(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"kind": "telemetry"}')
        assert run(capsys, "verify", str(path))[0] == 1


class TestSimulate:
    def test_construction_a(self, capsys):
        status, out, _ = run(capsys, "simulate", "--construction", "a", "--m", "2", "--fail-node", "2")
        assert status == 0
        summary = json.loads(out)["summary"]
        assert summary["recovered"]
        assert summary["skip_total"] == 0
        assert summary["locality"] == 4
        assert summary["max_helper_fraction"] == 0.5

    def test_fr_sqs8(self, capsys):
        status, out, _ = run(capsys, "simulate", "--construction", "fr", "--v", "8", "--fail-node", "10")
        assert status == 0
        summary = json.loads(out)["summary"]
        assert summary["construction"] == "sqs8:double"
        assert summary["locality"] == 2
        assert summary["skip_total"] == 0

    def test_csv(self, capsys):
        status, out, _ = run(capsys, "simulate", "--construction", "baseline", "--m", "2", "--fail-node", "2",
                             "--format", "csv")
        assert status == 0
        frame = pd.read_csv(io.StringIO(out))
        assert frame["skip"].tolist() == [1, 1, 1, 1]
        assert set(frame["skip_total"]) == {4}

    def test_node_out_of_range(self, capsys):
        assert run(capsys, "simulate", "--construction", "a", "--m", "2", "--fail-node", "99")[0] == 2

    def test_parity_node_unsupported(self, capsys):
        status, _, err = run(capsys, "simulate", "--construction", "a", "--m", "2", "--fail-node", "4")
        assert status == 1
        assert "parity" in err

    def test_from_descriptor(self, built_a2, capsys):
        status, out, _ = run(capsys, "simulate", str(built_a2), "--fail-node", "0")
        assert status == 0
        assert json.loads(out)["summary"]["recovered"]


class TestSweep:
    def test_construction_a_csv(self, capsys):
        status, out, _ = run(capsys, "sweep", "--construction", "a", "--m", "3", "--format", "csv")
        assert status == 0
        frame = pd.read_csv(io.StringIO(out))
        assert len(frame) == 4 * 5
        assert (frame["skip"] == 0).all()

    def test_compare(self, capsys):
        status, out, _ = run(capsys, "sweep", "--compare", "--m", "2")
        assert status == 0
        rows = {r["construction"]: r for r in json.loads(out)["comparison"]}
        assert rows["BASELINE"]["aggregate_skip"] == 4
        assert rows["BASELINE"]["skip_s0"] is None
        assert rows["A"]["aggregate_skip"] == 0

    def test_compare_needs_m(self, capsys):
        assert run(capsys, "sweep", "--compare")[0] == 2

    def test_gapped_descriptor_fails(self, capsys):
        from conftest import FIXTURES

        status, out, err = run(capsys, "sweep", str(FIXTURES / "sqs8_gapped.json"))
        assert status == 1
        assert json.loads(out)["summary"]["failed_cases"] == 2
        assert "[ERROR]" in err

    def test_all_orders(self, capsys):
        status, out, _ = run(capsys, "sweep", "--all-orders", "--v", "16", "--jobs", "2")
        assert status == 0
        summary = json.loads(out)["summary"]
        assert summary["orders"] == [8, 10, 14, 16]
        assert summary["zero_skip"]

    def test_deterministic(self, tmp_path, capsys):
        paths = [tmp_path / "one.csv", tmp_path / "two.csv"]
        for path in paths:
            run(capsys, "sweep", "--construction", "fr", "--v", "10", "--seed", "3", "--format", "csv",
                "--out", str(path))
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestEnvironment:
    def test_data_dir_override(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SKIPLESS_DATA_DIR", str(tmp_path))
        status, _, err = run(capsys, "build", "--construction", "sqs", "--v", "26")
        assert status == 1
        assert "not found" in err

    def test_diag_log(self, tmp_path, monkeypatch, capsys):
        log = tmp_path / "diag" / "skipless.log"
        monkeypatch.setenv("SKIPLESS_DIAG_LOG", str(log))
        run(capsys, "build", "--construction", "sqs", "--v", "8")
        run(capsys, "build", "--construction", "sqs", "--v", "12")
        lines = log.read_text().splitlines()
        assert lines[0].endswith("build exit 0")
        assert "build failed: UnsupportedOrder" in lines[1]

    @pytest.mark.parametrize("name", ["SKIPLESS_JOBS", "SKIPLESS_SQS_BOUND"])
    def test_malformed_integer_setting(self, monkeypatch, capsys, name):
        monkeypatch.setenv(name, "four")
        status, _, err = run(capsys, "build", "--construction", "sqs", "--v", "8")
        assert status == 2
        assert f"{name} must be an integer" in err
