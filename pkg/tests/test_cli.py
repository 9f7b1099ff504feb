import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from defectlab import cli, codes


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, out


def parse_csv(out):
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_grid_parsing():
    assert cli.parse_grid("0.1") == [0.1]
    assert cli.parse_grid("0.05,0.2") == [0.05, 0.2]
    assert cli.parse_grid("0.05:0.2:0.05") == [0.05, 0.1, 0.15, 0.2]
    with pytest.raises(cli.ConfigError):
        cli.parse_grid("0.2:0.1:0.05")
    with pytest.raises(cli.ConfigError):
        cli.parse_grid("a:b:c")


def test_code_spec_parsing():
    assert cli.parse_code_spec("hamming:3").name == "hamming(3)"
    assert cli.parse_code_spec("bch:4,2").k == 7
    assert cli.parse_code_spec("rm:1,3").n == 8
    with pytest.raises(cli.ConfigError):
        cli.parse_code_spec("hamming:99")
    with pytest.raises(cli.ConfigError):
        cli.parse_code_spec("martian:1")


def test_code_info_runs(capsys):
    rc, out = run_cli(["code-info", "--code", "hamming:3"], capsys)
    assert rc == 0
    rows = parse_csv(out)
    values = {r["side"]: r["estimate"] for r in rows}
    assert values["n"] == "7.0"
    assert values["k"] == "4.0"
    assert values["d"] == "3.0"


def test_duality_exhaustive_rows_are_equal(capsys):
    rc, out = run_cli(["duality", "--code", "hamming:3", "--alpha", "0.1",
                       "--mode", "exhaustive"], capsys)
    assert rc == 0
    rows = parse_csv(out)
    assert [r["side"] for r in rows] == ["bec", "bdc"]
    assert rows[0]["exact"] == rows[1]["exact"]
    assert Fraction(rows[0]["exact"]) == Fraction(118569, 32000000)


def test_duality_with_self_audit(capsys):
    rc, out = run_cli(["duality", "--code", "two_block:8", "--alpha", "0.1",
                       "--mode", "exhaustive", "--self-audit"], capsys)
    assert rc == 0


def test_bounds_rows_hamming(capsys):
    rc, out = run_cli(["bounds", "--code", "hamming:3", "--self-audit"], capsys)
    assert rc == 0
    rows = [r for r in parse_csv(out) if r["side"] == "bec"]
    by_e = {float(r["param"]): r for r in rows}
    assert by_e[2.0]["regime"] == "zero" and Fraction(by_e[2.0]["bound"]) == 0
    assert by_e[3.0]["regime"] == "exact" and Fraction(by_e[3.0]["bound"]) == Fraction(1, 10)
    assert by_e[4.0]["regime"] == "exact" and Fraction(by_e[4.0]["bound"]) == Fraction(1, 2)
    # the defect side mirrors the erasure side exactly
    bdc_rows = [r for r in parse_csv(out) if r["side"] == "bdc"]
    assert [r["bound"] for r in bdc_rows] == [r["bound"] for r in rows]


def test_lwc_audit_two_block(capsys):
    rc, out = run_cli(["lwc-audit", "--code", "two_block:8", "--mode", "exhaustive"], capsys)
    assert rc == 0
    rows = parse_csv(out)
    profile = next(r for r in rows if r["side"] == "profile")
    assert profile["regime"] == "optimal"
    assert float(profile["estimate"]) == 2.0  # masking distance
    assert float(profile["param"]) == 3.0     # locality
    rewrite = {float(r["param"]): r for r in rows if r["side"] == "rewrite"}
    assert float(rewrite[1.0]["estimate"]) == 3.0  # worst single-bit update cost
    assert all(r["regime"] == "ok" for r in rows if r["side"] in ("rewrite", "write"))


def test_lwc_audit_single_parity_worst_cost(capsys):
    rc, out = run_cli(["lwc-audit", "--code", "single_parity:8", "--mode", "monte_carlo",
                       "--trials", "4000", "--seed", "5"], capsys)
    assert rc == 0
    rows = parse_csv(out)
    rewrite = {float(r["param"]): r for r in rows if r["side"] == "rewrite"}
    assert float(rewrite[1.0]["estimate"]) == 7.0  # all-ones masking word drags 7 cells


def test_quaternity_zero_violations(capsys):
    rc, out = run_cli(["quaternity", "--code", "two_block:8", "--alpha", "0.5",
                       "--trials", "500", "--seed", "2"], capsys)
    assert rc == 0
    rows = parse_csv(out)
    assert all(r["regime"] == "ok" for r in rows)
    beq = next(r for r in rows if r["side"] == "beq")
    assert float(beq["estimate"]) == 0.0


def test_unknown_code_gives_config_exit(capsys):
    assert cli.main(["duality", "--code", "martian:1", "--alpha", "0.1"]) == cli.EXIT_CONFIG


def test_missing_code_gives_config_exit(capsys):
    assert cli.main(["duality", "--alpha", "0.1"]) == cli.EXIT_CONFIG


def test_invariant_violation_exits_3(capsys, monkeypatch):
    from defectlab import bdc
    from defectlab.stats import FailureEstimate

    def wrong(code, beta, mode="exhaustive", **kwargs):
        return FailureEstimate.from_exact(Fraction(1, 3))

    monkeypatch.setattr(cli.bdc, "enc_failure_prob", wrong)
    rc = cli.main(["duality", "--code", "hamming:3", "--alpha", "0.1", "--mode", "exhaustive"])
    assert rc == cli.EXIT_AUDIT


def test_config_file_provides_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("code = hamming:3\nalpha = 0.1\nmode = exhaustive\n")
    rc, out = run_cli(["duality", "--config", str(cfg)], capsys)
    assert rc == 0
    assert parse_csv(out)[0]["code"] == "hamming(3)"


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("code = hamming:3\nalpha = 0.1\nmode = exhaustive\n")
    rc, out = run_cli(["duality", "--config", str(cfg), "--code", "two_block:8"], capsys)
    assert rc == 0
    assert parse_csv(out)[0]["code"] == "two_block(8)"


def test_jsonl_format(capsys):
    import json

    rc, out = run_cli(["code-info", "--code", "repetition:3", "--format", "jsonl"], capsys)
    assert rc == 0
    rows = [json.loads(line) for line in out.strip().splitlines()]
    assert {r["side"] for r in rows} >= {"n", "k", "d"}


def test_file_code_spec(tmp_path, capsys):
    path = tmp_path / "ham.code"
    codes.save_code(codes.hamming(3), path)
    rc, out = run_cli(["code-info", "--code", f"file:{path}"], capsys)
    assert rc == 0
    rows = parse_csv(out)
    assert next(r for r in rows if r["side"] == "d")["estimate"] == "3.0"


def test_output_file_and_determinism(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    base = [sys.executable, "-m", "defectlab", "duality", "--code", "hamming:3",
            "--alpha", "0.05:0.15:0.05", "--mode", "monte_carlo",
            "--trials", "2000", "--seed", "9"]
    for out in (out_a, out_b):
        proc = subprocess.run(base + ["--out", str(out)], capture_output=True)
        assert proc.returncode == 0, proc.stderr
    assert out_a.read_bytes() == out_b.read_bytes()


def test_stdout_determinism_across_processes():
    base = [sys.executable, "-m", "defectlab", "quaternity", "--code", "two_block:8",
            "--alpha", "0.4", "--trials", "200", "--seed", "4", "--format", "jsonl"]
    first = subprocess.run(base, capture_output=True)
    second = subprocess.run(base, capture_output=True)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout


def test_workers_do_not_change_results(capsys):
    args = ["duality", "--code", "hamming:3", "--alpha", "0.1,0.2",
            "--mode", "monte_carlo", "--trials", "1000", "--seed", "3"]
    rc1, out1 = run_cli(args, capsys)
    rc2, out2 = run_cli(args + ["--workers", "2"], capsys)
    assert rc1 == rc2 == 0
    assert out1 == out2
