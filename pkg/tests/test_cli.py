import json

import pytest

from rootshell.main import main


def run(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


def test_tables_weyl(capsys):
    status, out = run(capsys, "tables", "weyl")
    assert status == 0
    payload = json.loads(out)
    assert payload["command"] == "tables weyl"
    assert payload["results"]["E7/7"]["coset_count"] == 56
    assert payload["verdicts"] == {"coset_identity": True}
    assert "timestamp" not in payload


def test_rootsys(capsys):
    status, out = run(capsys, "rootsys", "--type", "G", "--rank", "2")
    assert status == 0
    results = json.loads(out)["results"]
    assert results["roots"] == 12
    assert results["w0_length"] == 6
    assert results["extremal_nodes"] == [1, 2]


def test_semidense_answer_is_not_a_failure(capsys):
    status, out = run(capsys, "semidense", "check", "--type", "B", "--rank", "3", "--nodes", "1,3")
    assert status == 0
    results = json.loads(out)["results"]
    assert results["holds"] is False
    assert results["witness"]["psi_nodes"] == [1, 2, 3]

    # 期待値を付けると検証になる
    status, _ = run(capsys, "semidense", "check", "--type", "B", "--rank", "3", "--nodes", "1,3", "--expect", "holds")
    assert status == 1


def test_exit_codes(capsys):
    status, _ = run(capsys, "rootsys", "--type", "E", "--rank", "9")
    assert status == 2
    status, _ = run(capsys, "semidense", "check", "--type", "B")
    assert status == 2
    with pytest.raises(SystemExit) as info:
        main(["rootsys", "--type", "A", "--rank", "2", "--no-such-flag"])
    assert info.value.code == 2


def test_csv_output(capsys):
    status, out = run(capsys, "rootsys", "--type", "A", "--rank", "2", "--csv")
    assert status == 0
    lines = out.splitlines()
    assert lines[0] == "index,root,positive"
    assert len(lines) == 1 + 6

    # 表のないコマンドは --csv を受け付けない
    status, _ = run(capsys, "semidense", "check", "--type", "A", "--rank", "2", "--csv")
    assert status == 2


def test_config_file_sets_defaults(capsys, tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("# defaults\nseed = 5\nclassical-rank = 3\n", encoding="utf-8")
    status, out = run(capsys, "tables", "weyl", "--config", str(config))
    assert status == 0
    payload = json.loads(out)
    assert payload["seed"] == 5
    assert payload["parameters"]["classical_rank"] == 3

    # 明示したフラグが優先される
    status, out = run(capsys, "tables", "weyl", "--config", str(config), "--seed", "9")
    assert json.loads(out)["seed"] == 9

    status, _ = run(capsys, "tables", "weyl", "--config", str(tmp_path / "missing.conf"))
    assert status == 2


def test_output_is_byte_stable(capsys, tmp_path):
    argv = ["mc", "intersect", "--n", "2", "--H0", "1/2,-1/2", "--t", "6", "--H", "0.5,-0.5",
            "--samples", "2000", "--seed", "4"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--output", str(first)]) == 0
    assert main(argv + ["--output", str(second), "--threads", "3"]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_baseline_round_trip(capsys, tmp_path):
    baseline = tmp_path / "baseline.json"
    argv = ["rootsys", "--type", "B", "--rank", "3"]
    status, _ = run(capsys, *argv, "--write-baseline", str(baseline))
    assert status == 0
    stored = json.loads(baseline.read_text(encoding="utf-8"))
    assert stored["tolerances"] == {}

    status, out = run(capsys, *argv, "--baseline", str(baseline))
    assert status == 0
    assert json.loads(out)["verdicts"]["baseline"] is True

    status, out = run(capsys, "rootsys", "--type", "C", "--rank", "3", "--baseline", str(baseline))
    assert status == 1
    assert json.loads(out)["results"]["baseline_drift"]


def test_spherical_khat_defaults(capsys):
    status, out = run(capsys, "spherical", "khat")
    assert status == 0
    payload = json.loads(out)
    assert payload["verdicts"] == {"khat-decay-sl2r": True}
    assert len(payload["results"]["grid"]["lambda"]) == 41


def test_exponent_verify_with_spectral_integral(capsys):
    status, out = run(capsys, "exponent", "verify", "--type", "A", "--rank", "1", "--spectral")
    assert status in (0, 1)
    spectral = json.loads(out)["results"]["spectral"]
    assert spectral["t_grid"] == [10.0, 100.0, 1000.0]
    assert all(v > 0 for v in spectral["values"])


def test_exponent_table_checks_rootsize_constants(capsys):
    status, out = run(capsys, "exponent", "table", "--type", "B", "--rank", "2")
    assert status == 0
    payload = json.loads(out)
    assert payload["verdicts"]["rootsize_constants"] is True
    assert payload["results"]["rootsize_violations"] == []
