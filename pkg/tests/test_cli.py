import json
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from wealthflow.charity import StrategyA, StrategyB, StrategyC
from wealthflow.cli import UsageError, main, parse_cli
from wealthflow.engine import CANONICAL_SEEDS
from wealthflow.svg import histogram_svg, nice_ticks, series_svg

SVG_NS = "{http://www.w3.org/2000/svg}"


def test_parse_batch_strategy_b():
    cfg = parse_cli(["batch", "--strategy", "B", "--params", "c=100,d=20"])
    assert cfg.sim.strategy == StrategyB(100, 20)
    assert cfg.seeds == list(CANONICAL_SEEDS)


def test_parse_run_defaults():
    cfg = parse_cli(["run"])
    s = cfg.sim
    assert (s.num_agents, s.initial_money, s.max_ticks, s.seed, s.critical_threshold) == (500, 100, 9000, 1000, 0)
    assert s.strategy is None


def test_parse_strategy_c():
    cfg = parse_cli(["run", "--strategy", "C", "--params", "k=100,p=60,v=40,x=100,y=60,z=40"])
    assert cfg.sim.strategy == StrategyC()


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--bogus"],
        ["run", "--strategy", "B", "--params", "c=1,,d"],
        ["run", "--strategy", "B", "--params", "c=abc"],
        ["run", "--agents", "5"],
        ["run", "--params", "c=1"],
        ["batch", "--seeds", "1,x"],
        ["run", "--format", "xml"],
        ["plot", "pie", "x.json"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "usage error" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text("# canonical B\nagents = 200\nticks=50\nstrategy=B\nparams=c=50,d=10\nseed=7\n")
    cfg = parse_cli(["run", "--config", str(conf), "--seed", "9"])
    assert cfg.sim.num_agents == 200 and cfg.sim.max_ticks == 50
    assert cfg.sim.strategy == StrategyB(50, 10)
    assert cfg.sim.seed == 9


def test_config_file_bad_key(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("colour=blue\n")
    with pytest.raises(UsageError):
        parse_cli(["run", "--config", str(conf)])


def test_out_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.delenv("WEALTHFLOW_OUT", raising=False)
    assert parse_cli(["run"]).out_dir == Path("out")
    monkeypatch.setenv("WEALTHFLOW_OUT", str(tmp_path / "env"))
    assert parse_cli(["run"]).out_dir == tmp_path / "env"
    assert parse_cli(["run", "--out", str(tmp_path / "flag")]).out_dir == tmp_path / "flag"


def test_metrics_equal_file(tmp_path, capsys):
    f = tmp_path / "m.txt"
    f.write_text("100\n" * 500)
    assert main(["metrics", str(f), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["gini"] == 0 and rep["variance"] == 0 and rep["n"] == 500
    assert rep["ks_stat"] is None


def test_metrics_single_owner(tmp_path, capsys):
    f = tmp_path / "m.csv"
    f.write_text("agent,money\n0,0\n1,0\n2,0\n3,100\n")
    assert main(["metrics", str(f), "--column", "money", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["gini"] == pytest.approx(0.75)
    assert main(["metrics", str(f), "--column", "money"]) == 0
    assert "gini" in capsys.readouterr().out


@pytest.mark.parametrize("content, lineno", [("1\n2\n-3\n", 3), ("1\nabc\n", 2)])
def test_metrics_bad_line(tmp_path, capsys, content, lineno):
    f = tmp_path / "bad.txt"
    f.write_text(content)
    assert main(["metrics", str(f)]) == 1
    assert f":{lineno}:" in capsys.readouterr().err


def test_metrics_empty(tmp_path, capsys):
    f = tmp_path / "empty.txt"
    f.write_text("\n")
    assert main(["metrics", str(f)]) == 1


def _run_cli(tmp_path, *extra):
    out = tmp_path / "out"
    assert main(["run", "--agents", "50", "--ticks", "400", "--money", "4", "--out", str(out), *extra]) == 0
    return out


def test_run_outputs(tmp_path):
    out = _run_cli(tmp_path, "--name", "demo")
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "demo_plot-gap_none.svg",
        "demo_plot-histogram_none.svg",
        "demo_run_none.json",
        "demo_series-gap_none.csv",
        "demo_snapshots_none.csv",
    ]
    doc = json.loads((out / "demo_run_none.json").read_text())
    assert doc["config"]["num_agents"] == 50
    series = (out / "demo_series-gap_none.csv").read_bytes().decode().split("\r\n")
    assert series[0].startswith("# config:") and series[1].startswith("# seeds:")
    assert series[2] == "tick,gap" and len([s for s in series if s]) == 403


def test_plot_histogram_equal_init_single_bar(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--agents", "40", "--ticks", "0", "--out", str(out)]) == 0
    svg_path = tmp_path / "h.svg"
    assert main(["plot", "histogram", str(out / "baseline_run_none.json"), "-o", str(svg_path)]) == 0
    root = ET.fromstring(svg_path.read_text())
    bars = root.findall(f".//{SVG_NS}g[@class='bars']/{SVG_NS}rect")
    assert len(bars) == 1
    assert bars[0].find(f"{SVG_NS}title").text == "[100, 110): 40"


def test_plot_gap_crosses_zero(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--agents", "20", "--money", "3", "--ticks", "500", "--seed", "2", "--out", str(out)]) == 0
    run_json = out / "baseline_run_none.json"
    doc = json.loads(run_json.read_text())
    gaps = doc["gap_history"]["gap"]
    assert max(gaps) > 0 and min(gaps) <= 0
    svg_path = tmp_path / "g.svg"
    assert main(["plot", "gap", str(run_json), "-o", str(svg_path)]) == 0
    root = ET.fromstring(svg_path.read_text())
    assert root.find(f".//{SVG_NS}line[@class='zero']") is not None
    assert root.find(f"{SVG_NS}metadata") is not None


def test_plot_returns_three_strategies_log_axis(tmp_path):
    reports = []
    for strat in ("A", "B", "C"):
        out = tmp_path / strat
        assert main(["batch", "--agents", "50", "--money", "4", "--ticks", "800", "--seeds", "1,2,3",
                     "--strategy", strat, "--out", str(out), "--format", "csv"]) == 0
        reports.append(str(out / f"sadaqah_batch_{strat}.json"))
    svg_path = tmp_path / "r.svg"
    assert main(["plot", "returns", *reports, "-o", str(svg_path)]) == 0
    root = ET.fromstring(svg_path.read_text())
    groups = root.findall(f".//{SVG_NS}g[@class='series']")
    assert [g.get("data-name") for g in groups] == ["strategy A", "strategy B", "strategy C"]
    assert "log scale" in svg_path.read_text()


def test_plot_wrong_input(tmp_path):
    out = _run_cli(tmp_path)
    assert main(["plot", "returns", str(out / "baseline_run_none.json")]) == 2
    assert main(["plot", "gap", str(tmp_path / "missing.json")]) == 1


def test_batch_byte_identical(tmp_path):
    args = ["batch", "--agents", "40", "--money", "5", "--ticks", "500", "--seeds", "1,2",
            "--strategy", "B", "--params", "c=100,d=40", "--snapshot-ticks", "100,500"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b")]) == 0
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files_a == sorted(p.name for p in (tmp_path / "b").iterdir())
    assert any(f.endswith(".svg") for f in files_a) and any(f.endswith(".json") for f in files_a)
    for name in files_a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_svg_helpers():
    assert nice_ticks(0, 100) == [0, 20, 40, 60, 80, 100]
    doc = histogram_svg([(0, 2), (10, 0), (20, 5)], 10, metadata={"a": 1})
    root = ET.fromstring(doc)
    assert len(root.findall(f".//{SVG_NS}g[@class='bars']/{SVG_NS}rect")) == 2
    doc = series_svg({"s": ([1, 2, 3], [10, None, 1000])}, "t", "x", "y", log_y=True, markers=True)
    ET.fromstring(doc)
    assert doc == series_svg({"s": ([1, 2, 3], [10, None, 1000])}, "t", "x", "y", log_y=True, markers=True)


def test_run_with_strategy_writes_transfers(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--agents", "30", "--money", "3", "--ticks", "300", "--threshold", "20",
                 "--strategy", "B", "--params", "c=100,d=40", "--out", str(out)]) == 0
    lines = (out / "sadaqah_transfers_B.csv").read_bytes().decode().split("\r\n")
    assert lines[2] == "tick,strategy,units_moved,gap_before,gap_after"
    doc = json.loads((out / "sadaqah_run_B.json").read_text())
    rows = [ln.split(",") for ln in lines[3:] if ln]
    assert len(rows) == doc["charity_ledger"]["interventions"] > 0
    assert all(r[1] == "B" and int(r[2]) == 3 for r in rows)
