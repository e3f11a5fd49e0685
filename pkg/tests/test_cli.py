import json
import math
import os

import pytest

from subsetsieve import cli
from subsetsieve.cli import (
    EXIT_BUDGET,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY_FAIL,
    JobConfig,
    run_bound,
    run_count,
    run_sweep,
    run_verify,
)


def _main_json(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_count_mass_conservation(capsys):
    code, doc = _main_json(capsys, ["count", "--zn", "12", "--domain", "full",
                                    "--poly", "0,1", "--k", "3", "--b", "all", "--no-meta"])
    assert code == EXIT_OK
    rows = doc["rows"]
    assert len(rows) == 12
    assert sum(r["N"] for r in rows) == math.comb(12, 3)
    assert "meta" not in doc and "wall_ms" not in rows[0]


def test_count_fq_crosscheck_matches_bruteforce(capsys):
    base = ["--fq", "3,2", "--domain", "complement:0", "--poly", "0,0,1", "--k", "2", "--b", "0,0", "--no-meta"]
    code1, doc1 = _main_json(capsys, ["count", "--method", "crosscheck", *base])
    code2, doc2 = _main_json(capsys, ["count", "--method", "bruteforce", *base])
    assert code1 == code2 == EXIT_OK
    assert doc1["rows"][0]["N"] == doc2["rows"][0]["N"]


def test_count_abelian_closedform_equals_dp(capsys):
    base = ["--abelian", "2,2,3", "--k", "4", "--b", "all", "--no-meta"]
    _, doc1 = _main_json(capsys, ["count", "--method", "closedform", *base])
    _, doc2 = _main_json(capsys, ["count", "--method", "dp", *base])
    assert [r["N"] for r in doc1["rows"]] == [r["N"] for r in doc2["rows"]]


def test_count_rows_ordered_k_then_mixed_radix(capsys):
    _, doc = _main_json(capsys, ["count", "--abelian", "2,3", "--k", "0..2", "--b", "all", "--no-meta"])
    keys = [(r["k"], r["b"]) for r in doc["rows"]]
    expected_b = ["0,0", "0,1", "0,2", "1,0", "1,1", "1,2"]
    assert keys == [(k, b) for k in (0, 1, 2) for b in expected_b]


def test_bound_prime_power_emits_cz(capsys):
    code, doc = _main_json(capsys, ["bound", "--zn", "9", "--domain", "full",
                                    "--poly", "0,1", "--k", "0..2", "--no-meta"])
    assert code == EXIT_OK
    rows = doc["rows"]
    assert all(r["constant"] == "cz" for r in rows)
    assert rows[0]["k"] == 0 and rows[0]["bound"] == 1.0


def test_bound_fq_degree_divisible_by_p(capsys):
    _, doc = _main_json(capsys, ["bound", "--fq", "2,2", "--domain", "full",
                                 "--poly", "0,0,1", "--k", "1", "--no-meta"])
    assert doc["rows"][0]["applicable"] is False


def test_verify_summary_and_ratio(capsys):
    code, doc = _main_json(capsys, ["verify", "--abelian", "2,2", "--domain", "complement:0,1",
                                    "--k", "0..3", "--b", "all", "--theorem", "abelian", "--no-meta"])
    assert code == EXIT_OK
    s = doc["summary"]
    assert s["instances"] == 16 and s["failures"] == 0
    assert s["applicable"] == s["holds"]
    assert s["max_ratio"] <= 1.0
    row = doc["rows"][0]
    assert "/" in row["main_term"] and "/" in row["deviation"]


def test_verify_failure_exit_code(capsys, monkeypatch):
    from subsetsieve import bounds as bounds_mod
    from subsetsieve.numtheory import RealBound

    monkeypatch.setattr(bounds_mod, "bound_abelian", lambda *a: RealBound(0.0, "up"))
    code = cli.main(["verify", "--abelian", "2,2", "--domain", "complement:0,1",
                     "--k", "1", "--b", "all", "--theorem", "abelian", "--no-meta"])
    capsys.readouterr()
    assert code == EXIT_VERIFY_FAIL


def test_budget_exit_code(capsys):
    code = cli.main(["count", "--zn", "16", "--domain", "full", "--k", "8",
                     "--b", "all", "--method", "bruteforce", "--budget", "5", "--no-meta"])
    out = capsys.readouterr().out
    assert code == EXIT_BUDGET
    doc = json.loads(out)
    assert all(r.get("skipped") for r in doc["rows"])


def test_usage_errors(capsys):
    assert cli.main(["count", "--zn", "10", "--domain", "bogus:1", "--k", "1"]) == EXIT_USAGE
    assert cli.main(["count", "--k", "1"]) == EXIT_USAGE  # no structure
    assert cli.main(["count", "--zn", "10", "--k", "1", "--poly", "0,0"]) == EXIT_USAGE
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        cli.main(["count", "--zn", "10", "--method", "warp", "--k", "1"])
    assert exc.value.code == EXIT_USAGE
    capsys.readouterr()


def test_sweep_crosscheck(capsys):
    code, doc = _main_json(capsys, ["sweep", "--sweep-zn", "4..8", "--k", "1..3", "--b", "all",
                                    "--method", "crosscheck", "--jobs", "1", "--no-meta"])
    assert code == EXIT_OK
    assert doc["summary"]["cells"] == 5
    assert not any("error" in r for r in doc["rows"])
    ns = {r["structure"] for r in doc["rows"]}
    assert ns == {f"zn:{n}" for n in range(4, 9)}


def test_sweep_empty_is_ok(capsys):
    code, doc = _main_json(capsys, ["sweep", "--sweep-zn", "5..4", "--k", "1", "--no-meta"])
    assert code == EXIT_OK
    assert doc["summary"] == {"cells": 0, "rows": 0, "failures": 0}


def test_output_determinism(capsys):
    argv = ["count", "--zn", "11", "--domain", "complement:3", "--poly", "1,2,1",
            "--k", "0..4", "--b", "all", "--method", "crosscheck", "--no-meta"]
    _, out1 = cli.main(argv), capsys.readouterr().out
    _, out2 = cli.main(argv), capsys.readouterr().out
    assert out1 == out2 and len(out1) > 100


def test_csv_projection(capsys):
    code = cli.main(["count", "--zn", "6", "--k", "2", "--b", "all", "--format", "csv", "--no-meta"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("structure,domain,poly,k,b,method,N")
    assert len(lines) == 7


def test_output_file_atomic(tmp_path, capsys):
    target = tmp_path / "rows.json"
    code = cli.main(["count", "--zn", "5", "--k", "1", "--b", "all", "--no-meta",
                     "--output", str(target)])
    capsys.readouterr()
    assert code == EXIT_OK
    doc = json.loads(target.read_text())
    assert len(doc["rows"]) == 5
    assert not [p for p in os.listdir(tmp_path) if ".tmp." in p]


def test_emit_cleans_up_on_failure(tmp_path):
    missing_dir = tmp_path / "nope" / "out.json"
    with pytest.raises(OSError):
        cli.emit("data", str(missing_dir))
    assert not list(tmp_path.glob("**/*.tmp.*"))


def test_config_round_trip(tmp_path):
    text = """
[structure]
kind = "fq"
p = 3
t = 2
modulus = "1:0:1"

[job]
domain = "complement:0"
poly = "0,0,1"
k = "0..3"
b = "all"
method = "crosscheck"
tolerance = 1e-6
budget = 1000000
format = "json"
jobs = 2
no_meta = true

[sweep]
zn = "4..6"
"""
    cfg = JobConfig.from_toml(text)
    assert cfg.kind == "fq" and cfg.p == 3 and cfg.no_meta is True and cfg.sweep_zn == "4..6"
    again = JobConfig.from_toml(cfg.to_toml())
    assert again == cfg
    # and once more through a file plus flag override
    path = tmp_path / "job.toml"
    path.write_text(cfg.to_toml())
    args = cli.build_parser().parse_args(["count", "--config", str(path), "--k", "5"])
    merged = cli.config_from_args(args)
    assert merged.k == "5" and merged.p == 3 and merged.domain == "complement:0"


def test_config_rejects_unknown_keys():
    with pytest.raises(cli.ConfigError):
        JobConfig.from_toml("[job]\nwibble = 1\n")
    with pytest.raises(cli.ConfigError):
        JobConfig.from_toml("[wibble]\nx = 1\n")
    with pytest.raises(cli.ConfigError):
        JobConfig.from_toml("not toml [")


def test_run_handlers_directly():
    rows, summary, code = run_bound(JobConfig(kind="zn", n=25, k="0..1", poly="0,1"))
    assert code == EXIT_OK and rows[0]["constant"] == "cz"
    rows, summary, code = run_count(JobConfig(kind="abelian", moduli=[2, 2], k="2", b="all"))
    assert sum(r["N"] for r in rows) == math.comb(4, 2)
    rows, summary, code = run_verify(
        JobConfig(kind="abelian", moduli=[3, 3], domain="complement:0,1", k="0..4", b="all",
                  theorem="abelian")
    )
    assert code == EXIT_OK and summary["failures"] == 0
    rows, summary, code = run_sweep(JobConfig(sweep_fq="4;5", k="1..2", b="all", method="crosscheck", jobs=1))
    assert code == EXIT_OK and summary["cells"] == 2
