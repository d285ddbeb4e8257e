import json
import subprocess
import sys

import jsonschema
import pytest

from oco_frugal.cli import cli_main
from oco_frugal.config import CONFIG_SCHEMA, merged, parse_seeds, parse_values


def test_parse_values():
    assert parse_values("2:50:8") == [2, 10, 18, 26, 34, 42, 50]
    assert parse_values("2,10,50") == [2, 10, 50]
    assert parse_values("2:4,7") == [2, 3, 4, 7]
    assert parse_values([1, 2.5]) == [1.0, 2.5]
    assert parse_values(None) == []
    with pytest.raises(ValueError):
        parse_values("1:5:0")


def test_parse_seeds():
    assert parse_seeds(3) == [0, 1, 2]
    assert parse_seeds("4") == [0, 1, 2, 3]
    assert parse_seeds("0,3,7") == [0, 3, 7]


def test_merged_precedence():
    c = merged({"T": 50, "alpha": 0.1}, {"T": 20, "alpha": None})
    assert c["T"] == 20 and c["alpha"] == 0.1 and c["seeds"] == 5


def test_schema_matches_shipped_file():
    from pathlib import Path
    shipped = json.loads((Path(__file__).parents[1] / "docs" / "config.schema.json").read_text())
    assert shipped == CONFIG_SCHEMA
    example = json.loads((Path(__file__).parents[1] / "docs" / "sweep.example.json").read_text())
    jsonschema.validate(example, CONFIG_SCHEMA)


def test_run_prints_ledger(capsys, tmp_path):
    rep = tmp_path / "r.json"
    code = cli_main(["run", "--setting", "fresh", "--M", "10", "--T", "20", "--grid-n", "401",
                     "--report", str(rep)])
    out = capsys.readouterr().out
    assert code == 0
    assert "total=" in out and "check sandwich: PASS" in out
    doc = json.loads(rep.read_text())
    assert doc["setting"] == "fresh" and len(doc["trajectory"]) == 20
    assert doc["reports"]["sandwich"]["ok"]


@pytest.mark.parametrize("setting", ["stale", "noisy", "noisy-stale"])
def test_run_settings(setting, capsys):
    assert cli_main(["run", "--setting", setting, "--M", "5", "--T", "15", "--grid-n", "301"]) == 0


def test_sweep_writes_csv_and_svgs(tmp_path, capsys):
    out = tmp_path / "o"
    code = cli_main(["sweep", "--M", "2,10", "--T", "15", "--seeds", "2", "--grid-n", "301",
                     "--settings", "fresh,stale,noisy", "--workers", "1", "--out", str(out)])
    assert code == 0
    assert (out / "sweep.csv").exists() and (out / "cost_vs_M.svg").exists()
    code = cli_main(["sweep", "--M", "10", "--L", "16,30", "--T", "15", "--seeds", "1",
                     "--grid-n", "301", "--settings", "stale,noisy", "--workers", "1",
                     "--out", str(out / "L")])
    assert code == 0 and (out / "L" / "cost_vs_L.svg").exists()


def test_sweep_config_and_override(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"M": [2, 4], "T": 10, "seeds": 1, "settings": ["fresh"],
                                "grid_n": 201, "workers": 1, "out": str(tmp_path / "c")}))
    assert cli_main(["sweep", "--config", str(conf), "--T", "12"]) == 0
    rows = (tmp_path / "c" / "sweep.csv").read_text().splitlines()
    assert len(rows) == 3 and rows[1].split(",")[6] == "12"


def test_sweep_bad_config(tmp_path, capsys):
    conf = tmp_path / "bad.json"
    conf.write_text(json.dumps({"T": 0}))
    assert cli_main(["sweep", "--config", str(conf)]) == 2


def test_sweep_outputs_byte_identical(tmp_path, capsys):
    args = ["sweep", "--M", "2,6", "--T", "10", "--seeds", "2", "--grid-n", "201", "--workers", "2"]
    cli_main(args + ["--out", str(tmp_path / "a")])
    cli_main(args + ["--out", str(tmp_path / "b")])
    for name in ("sweep.csv", "cost_vs_M.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_lowerbound(capsys):
    assert cli_main(["lowerbound", "--M", "50"]) == 0
    out = capsys.readouterr().out
    assert "min_max_ratio=" in out and "I3" in out and "stale game" in out


def test_verify_quick(capsys):
    assert cli_main(["verify", "--quick"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_plot(tmp_path, capsys):
    out = tmp_path / "o"
    cli_main(["sweep", "--M", "2,4", "--T", "8", "--seeds", "1", "--grid-n", "201", "--workers", "1",
              "--out", str(out)])
    assert cli_main(["plot", "--csv", str(out / "sweep.csv"), "--out", str(tmp_path / "p.svg")]) == 0
    assert (tmp_path / "p.svg").read_text().startswith("<?xml") or "<svg" in (tmp_path / "p.svg").read_text()


@pytest.mark.parametrize("argv", [[], ["bogus"], ["run", "--T", "x"], ["sweep", "--M", "a:b"]])
def test_usage_errors(argv, capsys):
    assert cli_main(argv) == 2
    assert capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "oco_frugal", "lowerbound", "--M", "10"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "M=10" in res.stdout
