import copy
import json

import pytest

from qnl import cli
from qnl import experiments as ex

SMALL = {
    "integrals": ["integrals", "--cubics", "20"],
    "circuit": ["circuit"],
    "rabi": ["rabi", "--gamma", "2", "--points", "51"],
    "cavity": ["cavity", "--atoms", "4", "--jumps", "3e5", "--small-atoms", "0", "--spectrum-atoms", "0"],
}


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(SMALL))
def test_summary_schema_round_trip(name, capsys):
    code, out, _ = run(SMALL[name], capsys)
    assert code == cli.EXIT_OK
    report = json.loads(out)
    cli.validate_report(report)
    assert report["experiment"] == name
    assert len(report["metrics"]) >= 1
    assert json.loads(cli.dump_json(report)) == report


def test_validate_rejects_malformed():
    good = cli.summarize(ex.run_integrals(cubics=5, bicomplex=5))
    cli.validate_report(good)
    for mutate in (
        lambda r: r.update(schema=2),
        lambda r: r.update(metrics=[]),
        lambda r: r["metrics"][0].pop("stderr"),
        lambda r: r["metrics"][0].update({"pass": "yes"}),
    ):
        bad = copy.deepcopy(good)
        mutate(bad)
        with pytest.raises(ValueError):
            cli.validate_report(bad)


def test_failing_tolerance_flips_pass():
    assert ex.Metric("x", 1.0, 1.0, 0.1).passed
    assert not ex.Metric("x", 1.2, 1.0, 0.1).passed
    assert not ex.sigma_metric("x", 1.4, 0.1, 1.0).passed
    assert ex.sigma_metric("x", 1.2, 0.1, 1.0).passed
    result = ex.ExperimentResult("demo", {}, ["a"], [[1]], [ex.Metric("x", 1.0, 1.0, 0.1), ex.Metric("y", 5.0, 1.0, 0.1)])
    report = cli.summarize(result)
    assert [m["pass"] for m in report["metrics"]] == [True, False]
    assert report["pass"] is False


def test_non_finite_values_become_null():
    result = ex.ExperimentResult("demo", {}, ["a"], [[1]], [ex.Metric("x", 1.0, 1.0, float("inf"))])
    report = cli.summarize(result)
    assert report["metrics"][0]["tolerance"] is None
    json.loads(cli.dump_json(report))


def test_usage_error(capsys):
    assert run(["integrals", "--bogus"], capsys)[0] == cli.EXIT_USAGE
    assert run([], capsys)[0] == cli.EXIT_USAGE
    assert run(["cavity", "--jumps", "1.5"], capsys)[0] == cli.EXIT_USAGE


def test_help_exits_cleanly(capsys):
    code, out, _ = run(["cavity", "--help"], capsys)
    assert code == cli.EXIT_OK
    assert "--atoms" in out


def test_domain_error(capsys):
    code, _, err = run(["cavity", "--atoms", "0", "--jumps", "10"], capsys)
    assert code == cli.EXIT_DOMAIN
    assert err.startswith("qnl:")


def test_io_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, _ = run(SMALL["circuit"] + ["--out", str(blocker / "sub" / "out.csv")], capsys)
    assert code == cli.EXIT_IO


def test_failing_experiment_exit_code(capsys):
    # the distance table at gamma = 0.001 is not reproduced
    code, _, err = run(["waiting"], capsys)
    assert code == cli.EXIT_FAIL
    assert "FAIL distance" in err


def test_count_parsing():
    assert cli.count("1e7") == 10**7
    assert cli.count("42") == 42
    for bad in ("1.5", "-3", "abc"):
        with pytest.raises(Exception):
            cli.count(bad)


def test_csv_output_and_summary_file(tmp_path, capsys):
    out = tmp_path / "cav.csv"
    code, stdout, _ = run(SMALL["cavity"] + ["--out", str(out)], capsys)
    assert code == cli.EXIT_OK and stdout == ""
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "m,pr_empirical,pr_exact"
    assert len(lines) == 6
    summary = json.loads(cli.summary_path(out).read_text())
    cli.validate_report(summary)
    assert summary["params"]["atoms"] == 4


def test_json_output_includes_data(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(SMALL["rabi"] + ["--out", str(out), "--format", "json"], capsys)[0] == cli.EXIT_OK
    report = json.loads(out.read_text())
    cli.validate_report(report)
    assert len(report["data"]["rows"]) == 51
    assert not cli.summary_path(out).exists()


def test_darkroom_events_file(tmp_path, capsys):
    events = tmp_path / "events.csv"
    argv = ["darkroom", "--runs", "3", "--horizon", "2000", "--events", str(events), "--out", str(tmp_path / "d.csv")]
    run(argv, capsys)
    lines = events.read_text().splitlines()
    assert lines[0] == "run,time"
    runs = {int(line.split(",")[0]) for line in lines[1:]}
    assert runs == {0, 1, 2}


def test_format_value():
    assert cli.format_value(0.1) == "0.1"
    assert cli.format_value(3) == "3"
    assert cli.format_value(True) == "1"
    assert cli.to_csv(["a", "b"], [[1, 0.5]]) == "a,b\n1,0.5\n"
