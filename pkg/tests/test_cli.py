"""Command-line interface: flows, exit codes, and determinism."""
import json

import pytest

from subsidy_fairdiv import serialize_instance, six_agent_reference_instance
from subsidy_fairdiv.cli import main


@pytest.fixture()
def istar_file(tmp_path):
    path = tmp_path / "reference.json"
    path.write_text(serialize_instance(six_agent_reference_instance()))
    return path


def test_allocate_reference(istar_file, tmp_path, capsys):
    out = tmp_path / "alloc.json"
    cert = tmp_path / "cert.json"
    dot = tmp_path / "graph.dot"
    code = main(
        [
            "allocate",
            "--input", str(istar_file),
            "--out", str(out),
            "--certificate", str(cert),
            "--emit-graph", str(dot),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["total_subsidy"] == "7/10"
    assert doc["bound_holds"] is True
    assert doc["global_bound"] == "11/6"
    cert_doc = json.loads(cert.read_text())
    assert cert_doc["holds"] is True
    assert cert_doc["strong_bound"] == "5/3"
    assert dot.read_text().startswith("digraph")
    assert "total subsidy 7/10" in capsys.readouterr().out


def test_allocate_single_agent(tmp_path, capsys):
    path = tmp_path / "one.json"
    path.write_text(
        '{"kind": "chores", "weights": ["1"], "costs": [["0.4", "0.9"]]}\n'
    )
    out = tmp_path / "alloc.json"
    assert main(["allocate", "--input", str(path), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["subsidies"] == ["0"]
    assert doc["owner"] == [0, 0]


def test_allocate_baseline_flag(istar_file, tmp_path):
    out = tmp_path / "alloc.json"
    assert main(["allocate", "--input", str(istar_file), "--out", str(out), "--baseline"]) == 0
    doc = json.loads(out.read_text())
    assert doc["method"] == "baseline"
    assert doc["global_bound"] == "5/2"


def test_allocate_decimal_rendering(istar_file, tmp_path):
    out = tmp_path / "alloc.json"
    assert main(
        ["allocate", "--input", str(istar_file), "--out", str(out), "--decimal", "4"]
    ) == 0
    doc = json.loads(out.read_text())
    assert doc["total_subsidy_decimal"] == "0.7000"


def test_allocate_malformed_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"kind": "chores", "weights": [0.5], "costs"')
    assert main(["allocate", "--input", str(path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_allocate_invalid_instance(tmp_path, capsys):
    path = tmp_path / "invalid.json"
    path.write_text(
        '{"kind": "chores", "weights": ["1/2", "1/3"], "costs": [["1"], ["1"]]}'
    )
    assert main(["allocate", "--input", str(path)]) == 2
    assert "sum" in capsys.readouterr().err


def test_allocate_missing_file(tmp_path):
    assert main(["allocate", "--input", str(tmp_path / "nope.json")]) == 2


def test_allocate_is_byte_deterministic(istar_file, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    main(["allocate", "--input", str(istar_file), "--out", str(a)])
    main(["allocate", "--input", str(istar_file), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_verify_pipeline_output(istar_file, tmp_path, capsys):
    out = tmp_path / "alloc.json"
    main(["allocate", "--input", str(istar_file), "--out", str(out)])
    code = main(["verify", "--input", str(istar_file), "--allocation", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "total subsidy 7/10" in text
    assert text.count("ok") >= 6


def test_goods_flow_end_to_end(tmp_path, capsys):
    gen = tmp_path / "goods.json"
    out = tmp_path / "alloc.json"
    assert main(
        ["gen", "--agents", "5", "--items", "9", "--kind", "goods",
         "--seed", "11", "--out", str(gen)]
    ) == 0
    assert main(["allocate", "--input", str(gen), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "goods"
    assert doc["global_bound"] == "5/3"
    assert doc["bound_holds"] is True
    assert main(["verify", "--input", str(gen), "--allocation", str(out)]) == 0
    assert main(["oracle", "--input", str(gen)]) == 0


def test_verify_rejects_wrong_dimensions(istar_file, tmp_path, capsys):
    path = tmp_path / "alloc.json"
    path.write_text('{"owner": [0, 1]}')
    assert main(["verify", "--input", str(istar_file), "--allocation", str(path)]) == 2


def test_verify_reports_underfunded_agent(istar_file, tmp_path, capsys):
    path = tmp_path / "alloc.json"
    # all items to agent 0 with a claimed subsidy that is too small
    path.write_text(
        json.dumps(
            {
                "owner": [0, 0, 0, 0, 0, 0],
                "subsidies": ["1", "0", "0", "0", "0", "0"],
            }
        )
    )
    code = main(["verify", "--input", str(istar_file), "--allocation", str(path)])
    assert code == 1
    text = capsys.readouterr().out
    assert "VIOLATED" in text
    assert "agent 0" in text


def test_verify_recomputes_minimum_subsidies(istar_file, tmp_path, capsys):
    path = tmp_path / "alloc.json"
    path.write_text(json.dumps({"owner": [0, 0, 0, 0, 0, 0]}))
    assert main(["verify", "--input", str(istar_file), "--allocation", str(path)]) == 0


def test_oracle_command(istar_file, capsys):
    assert main(["oracle", "--input", str(istar_file)]) == 0
    text = capsys.readouterr().out
    assert "optimum subsidy 7/10" in text
    assert "pipeline subsidy 7/10" in text
    assert "gap 0" in text


def test_oracle_cap_exceeded(tmp_path, capsys):
    # n agents over n-1 unit-cost items: every agent fills mid-item, so
    # all n-1 items are shared and the assignment space is 2^(n-1).
    n = 12
    doc = {
        "kind": "chores",
        "weights": [f"1/{n}"] * n,
        "costs": [["1"] * (n - 1) for _ in range(n)],
    }
    path = tmp_path / "big.json"
    path.write_text(json.dumps(doc))
    assert main(["oracle", "--input", str(path), "--cap", "4"]) == 3


def test_gen_command(tmp_path):
    out = tmp_path / "gen.json"
    assert main(
        ["gen", "--agents", "3", "--items", "5", "--seed", "7", "--out", str(out)]
    ) == 0
    text = out.read_text()
    doc = json.loads(text)
    assert len(doc["weights"]) == 3
    assert len(doc["costs"][0]) == 5
    # deterministic: regenerating gives identical bytes
    out2 = tmp_path / "gen2.json"
    main(["gen", "--agents", "3", "--items", "5", "--seed", "7", "--out", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


def test_gen_single_agent(tmp_path):
    out = tmp_path / "one.json"
    assert main(["gen", "--agents", "1", "--items", "3", "--seed", "7", "--out", str(out)]) == 0
    assert main(["allocate", "--input", str(out)]) == 0


def test_gen_rejects_bad_params(capsys):
    assert main(["gen", "--agents", "0", "--items", "3"]) == 2


def test_bench_writes_csv(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--count", "5", "--seed", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,total_subsidy,bound"
    assert len(lines) == 6


def test_thread_cap_env(monkeypatch):
    from subsidy_fairdiv.cli import thread_cap

    monkeypatch.setenv("SUBSIDY_FAIRDIV_THREADS", "4")
    assert thread_cap() == 4
    monkeypatch.setenv("SUBSIDY_FAIRDIV_THREADS", "broken")
    assert thread_cap() == 1
    monkeypatch.setenv("SUBSIDY_FAIRDIV_THREADS", "-2")
    assert thread_cap() == 1
