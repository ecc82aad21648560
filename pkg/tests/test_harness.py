import dataclasses
import json

import pytest

from commnash import harness
from commnash.cli import main
from commnash.generators import random_game
from commnash.harness import (
    ConfigError, GameFileError, SweepConfig, SweepRecord, load_game, read_records, recheck,
    run_sweep, save_game, summarize,
)
from commnash.protocols import PROTOCOLS, ProtocolParams


def strip_time(records):
    return [dataclasses.replace(r, wall_time=0.0) for r in records]


def test_no_comm_sweep():
    records = run_sweep(SweepConfig(["no-comm"], ["random"], [8], count=10))
    assert len(records) == 10
    assert all(r.bits_total == 0 and r.eps_ne <= 0.75 for r in records)
    assert [r.seed for r in records] == list(range(10))


def test_polylog_bits_match_closed_form():
    k, b = 12, 4
    records = run_sweep(SweepConfig(["polylog-ne"], ["random"], [16], count=10,
                                    params=ProtocolParams(delta=0.5)))
    for r in records:
        assert r.bits_total == (2 + 2 * k * b if r.case_label == "case1" else 2 + k * b + b)


@pytest.mark.parametrize("bad", [
    dict(protocols=[], families=["random"], n_values=[4]),
    dict(protocols=["no-comm"], families=[], n_values=[4]),
    dict(protocols=["bogus"], families=["random"], n_values=[4]),
    dict(protocols=["no-comm"], families=["bogus"], n_values=[4]),
    dict(protocols=["no-comm"], families=["wsne2x2"], n_values=[4]),
    dict(protocols=["no-comm"], families=["random"], n_values=[4], format="xml"),
    dict(protocols=["no-comm"], families=["random"], n_values=[4], count=0),
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        run_sweep(SweepConfig(**bad))


def test_parse_family():
    assert harness.parse_family("indicator:ell=3") == ("indicator", {"ell": "3"})
    assert harness.parse_family("random") == ("random", {})
    with pytest.raises(ConfigError):
        harness.parse_family("indicator:ell")


def test_family_n_option_overrides_n_values():
    records = run_sweep(SweepConfig(["no-comm"], ["wsne2x2:n=2", "random"], [5], count=2))
    assert sorted({(r.family, r.n) for r in records}) == [("random", 5), ("wsne2x2:n=2", 2)]


def test_failures_are_records():
    records = run_sweep(SweepConfig(["polylog-ne"], ["random"], [6], count=2,
                                    params=ProtocolParams(resample_cap=1, delta=0.01)))
    # the tiny cap may or may not trip; any failure must be carried as data
    for r in records:
        assert r.error == "" or "SamplingError" in r.error
    bad = run_sweep(SweepConfig(["no-comm"], ["padded-mn:m=6"], [10]))
    assert len(bad) == 1 and "ValueError" in bad[0].error


def test_summary_counts_violations():
    records = run_sweep(SweepConfig(list(PROTOCOLS), ["random"], [6], count=5))
    table = summarize(records)
    assert set(table) == set(PROTOCOLS)
    assert all(s["violations"] == 0 and s["errors"] == 0 for s in table.values())
    for s in table.values():
        assert s["mean_eps_ne"] <= s["max_eps_ne"]
        assert s["mean_eps_wsne"] <= s["max_eps_wsne"]
    fake = SweepRecord("no-comm", "random", 6, 6, 99, eps_ne=0.9, eps_wsne=0.9)
    assert summarize(records + [fake])["no-comm"]["violations"] == 1
    with pytest.raises(ValueError):
        summarize([])


def test_sweep_is_deterministic():
    cfg = SweepConfig(list(PROTOCOLS), ["random", "indicator"], [4, 9], count=3)
    assert strip_time(run_sweep(cfg)) == strip_time(run_sweep(cfg))


def test_parallel_matches_serial():
    cfg = SweepConfig(list(PROTOCOLS), ["random"], [7], count=4)
    serial = strip_time(run_sweep(cfg))
    cfg.jobs = 2
    assert strip_time(run_sweep(cfg)) == serial


def test_records_recompute_from_profile():
    cfg = SweepConfig(list(PROTOCOLS), ["random"], [10], count=4)
    for r in run_sweep(cfg):
        ne, ws = recheck(r, random_game(10, r.seed))
        assert ne == pytest.approx(r.eps_ne, abs=1e-12)
        assert ws == pytest.approx(r.eps_wsne, abs=1e-12)


@pytest.mark.parametrize("fmt,suffix", [("csv", ".csv"), ("json", ".json")])
def test_records_round_trip(tmp_path, fmt, suffix):
    path = tmp_path / f"out{suffix}"
    records = run_sweep(SweepConfig(list(PROTOCOLS), ["random"], [5], count=2, output=str(path), format=fmt))
    assert read_records(path) == records


def test_csv_header_is_fixed(tmp_path):
    path = tmp_path / "out.csv"
    run_sweep(SweepConfig(["no-comm"], ["random"], [3], output=str(path)))
    assert path.read_text().splitlines()[0].split(",") == list(harness.COLUMNS)


def test_run_files_replay(tmp_path):
    run_sweep(SweepConfig(list(PROTOCOLS), ["random"], [6], count=2, transcripts_dir=str(tmp_path)))
    files = sorted(tmp_path.glob("*.json"))
    assert len(files) == 2 * len(PROTOCOLS)
    assert all(harness.replay_run_file(f) for f in files)
    target = next(f for f in files if f.name.startswith("polylog-ne"))
    d = json.loads(target.read_text())
    d["seeds"] = [1, 2]
    target.write_text(json.dumps(d))
    assert not harness.replay_run_file(target)


# --- game files --------------------------------------------------------------------

def test_game_round_trip(tmp_path):
    g = random_game(7, 3)
    save_game(g, tmp_path / "g.json")
    assert load_game(tmp_path / "g.json") == g


def test_game_file_range_error(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 2, "R": [[1.5, 0], [0, 1]], "C": [[0, 1], [1, 0]]}))
    with pytest.raises(GameFileError, match=r"R\[0\]\[0\]"):
        load_game(path)


def test_game_file_ragged_rows(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 2, "R": [[1, 0], [0]], "C": [[0, 1], [1, 0]]}))
    with pytest.raises(GameFileError, match="row 1"):
        load_game(path)


def test_game_file_bad_json(tmp_path):
    path = tmp_path / "g.json"
    path.write_text('{"n": 2,\n "R": [[1, 0], [0, 1]]\n "C": []}')
    with pytest.raises(GameFileError, match="line 3"):
        load_game(path)


def test_game_file_missing_field(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 1, "R": [[0]]}))
    with pytest.raises(GameFileError, match="'C'"):
        load_game(path)


# --- command line ---------------------------------------------------------------------

def test_cli_run_and_replay(tmp_path, capsys):
    out, runs = tmp_path / "r.csv", tmp_path / "runs"
    code = main(["run", "--protocol", "polylog-ne", "--protocol", "no-comm", "--n", "6", "--count", "3",
                 "--out", str(out), "--transcripts", str(runs)])
    assert code == 0
    assert "polylog-ne" in capsys.readouterr().out
    assert len(read_records(out)) == 6
    files = [str(p) for p in sorted(runs.glob("*.json"))]
    assert main(["replay", *files]) == 0


def test_cli_run_from_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"protocols": ["dmp-oneway"], "families": ["indicator:ell=1"],
                               "n_values": [4], "count": 2, "params": {"delta": 0.1}}))
    out = tmp_path / "r.json"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--format", "json"]) == 0
    records = read_records(out)
    assert len(records) == 2 and all(r.bits_col_to_row == 2 for r in records)


def test_cli_gen_and_eval(tmp_path, capsys):
    game, prof = tmp_path / "g.json", tmp_path / "p.json"
    assert main(["gen", "--family", "wsne2x2", "--n", "2", "--seed", "1", "--out", str(game)]) == 0
    prof.write_text(json.dumps({"row": [0.5, 0.5], "col": [0, 1]}))
    capsys.readouterr()
    assert main(["eval", str(game), str(prof)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["eps_wsne"] == 1.0 and rep["eps_ne"] == 0.5


def test_cli_run_on_game_file(tmp_path):
    game = tmp_path / "g.json"
    save_game(random_game(5, 0), game)
    out = tmp_path / "r.csv"
    assert main(["run", "--game", str(game), "--count", "1", "--out", str(out)]) == 0
    assert {r.protocol for r in read_records(out)} == set(PROTOCOLS)


def test_cli_exit_codes(tmp_path, monkeypatch):
    assert main(["run", "--family", "bogus"]) == 2
    bad = tmp_path / "g.json"
    bad.write_text("[")
    assert main(["eval", str(bad), str(bad)]) == 2
    # a broken guarantee makes the run fail
    monkeypatch.setattr(harness, "is_violation", lambda record, params=None: True)
    assert main(["run", "--protocol", "no-comm", "--n", "3", "--count", "1"]) == 1


def test_cli_replay_detects_tampering(tmp_path):
    runs = tmp_path / "runs"
    assert main(["run", "--protocol", "polylog-ne", "--n", "8", "--count", "1", "--transcripts", str(runs)]) == 0
    path = next(runs.glob("*.json"))
    d = json.loads(path.read_text())
    d["seeds"] = [d["seeds"][0] + 1, d["seeds"][1]]
    path.write_text(json.dumps(d))
    assert main(["replay", str(path)]) == 1
