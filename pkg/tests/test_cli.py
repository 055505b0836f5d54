import csv
import json

import numpy as np
import pytest

from crudecal.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "cal.csv").write_text("mu,sigma,y\n0,1,-1\n0,1,0\n0,1,1\n")
    (tmp_path / "pred.csv").write_text("mu,sigma\n5,2\n0,1\n")
    return tmp_path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run(*args):
    return main(["-q", *map(str, args)])


def test_fit_then_quantile(workdir):
    assert run("fit", "--method", "crude", "--input", "cal.csv", "--output", "m.json") == EXIT_OK
    doc = json.loads((workdir / "m.json").read_text())
    assert doc["z_sorted"] == [-1.0, 0.0, 1.0]
    assert run("quantile", "--model", "m.json", "--input", "pred.csv", "--p", 0.5, "--output", "q.csv") == EXIT_OK
    rows = read_rows(workdir / "q.csv")
    assert float(rows[0]["quantile"]) == 5.0
    assert rows[0]["mu"] == "5.0"


@pytest.mark.parametrize("method", ["none", "crude", "mle", "kuleshov", "conformal"])
def test_interval_lower_below_upper(workdir, method):
    assert run("fit", "--method", method, "--input", "cal.csv", "--output", "m.json") == EXIT_OK
    assert run("interval", "--model", "m.json", "--input", "pred.csv", "--output", "i.csv") == EXIT_OK
    for row in read_rows(workdir / "i.csv"):
        assert float(row["lower"]) <= float(row["upper"])


def test_interval_example(workdir):
    run("fit", "--method", "conformal", "--input", "cal.csv", "--output", "m.json")
    run("interval", "--model", "m.json", "--input", "pred.csv", "--output", "i.csv")
    row = read_rows(workdir / "i.csv")[0]
    assert (float(row["lower"]), float(row["upper"])) == (3.0, 7.0)


def test_evaluate_identity_on_calibrated_data(workdir):
    assert run("synth", "--family", "gaussian", "--n", 10000, "--seed", 5, "--output", "s.csv") == EXIT_OK
    assert run("evaluate", "--method", "none", "--input", "s.csv", "--split", "0.0001,0.0001,0.9998",
               "--output", "rep") == EXIT_OK
    report = json.loads((workdir / "rep" / "report_none.json").read_text())
    assert report["calibration_rmse"] < 0.02
    assert set(report) == {"method", "calibration_rmse", "sharpness", "seed"}


def test_evaluate_all_methods_with_cal_and_test(workdir):
    run("synth", "--n", 300, "--seed", 1, "--output", "cal_s.csv")
    run("synth", "--n", 300, "--seed", 2, "--output", "test_s.csv")
    assert run("evaluate", "--cal", "cal_s.csv", "--test", "test_s.csv", "--output", "rep") == EXIT_OK
    assert sorted(p.name for p in (workdir / "rep").iterdir()) == [
        f"report_{m}.json" for m in sorted(["none", "crude", "mle", "kuleshov", "conformal"])
    ]


def test_curve(workdir):
    run("synth", "--n", 2000, "--seed", 1, "--output", "s.csv")
    assert run("curve", "--method", "crude", "--input", "s.csv", "--steps", 10, "--output", "c.csv") == EXIT_OK
    rows = read_rows(workdir / "c.csv")
    assert list(rows[0]) == ["p", "p_hat"]
    assert [float(r["p"]) for r in rows] == [j / 10 for j in range(11)]


def test_bench_skewed_crude_is_best(workdir):
    assert run("synth", "--family", "lognormal_shifted", "--n", 4000, "--seed", 7, "--output", "s.csv") == EXIT_OK
    assert run("bench", "--input", "s.csv", "--methods", "all", "--output", "b") == EXIT_OK
    summary = {r["method"]: r for r in read_rows(workdir / "b" / "summary.csv")}
    assert all(int(r["trials"]) == 20 for r in summary.values())
    scores = {m: float(r["calibration_rmse_mean"]) for m, r in summary.items()}
    assert scores["crude"] == min(scores.values())


def test_bench_crude_and_conformal_intervals_identical(workdir):
    run("synth", "--family", "student_t", "--n", 1000, "--seed", 3, "--output", "s.csv")
    assert run("bench", "--input", "s.csv", "--methods", "crude,conformal", "--trials", 5, "--output", "b") == EXIT_OK
    rows = read_rows(workdir / "b" / "intervals.csv")
    crude = [(r["trial"], r["row"], r["lower"], r["upper"]) for r in rows if r["method"] == "crude"]
    conformal = [(r["trial"], r["row"], r["lower"], r["upper"]) for r in rows if r["method"] == "conformal"]
    assert len(crude) == 5 * 100
    assert crude == conformal


def test_bench_knn_model(workdir):
    run("synth", "--n", 600, "--seed", 3, "--output", "s.csv")
    assert run("bench", "--input", "s.csv", "--model", "knn", "--k", 15, "--trials", 2, "--output", "b") == EXIT_OK
    assert len(read_rows(workdir / "b" / "trials.csv")) == 2 * 5


def test_bench_knn_needs_features(workdir):
    run("synth", "--n", 600, "--seed", 3, "--output", "s.csv")
    rows = read_rows(workdir / "s.csv")
    with open(workdir / "plain.csv", "w") as fh:
        fh.write("mu,sigma,y\n" + "".join(f"{r['mu']},{r['sigma_reported']},{r['y']}\n" for r in rows))
    assert run("bench", "--input", "plain.csv", "--model", "knn", "--trials", 2, "--output", "b") == EXIT_DATA
    assert run("bench", "--input", "plain.csv", "--trials", 2, "--output", "b") == EXIT_OK


COMMANDS = [
    ["fit", "--method", "kuleshov", "--input", "s.csv", "--output", "out/m.json"],
    ["quantile", "--model", "out/m.json", "--input", "s.csv", "--p", "0.3", "--output", "out/q.csv"],
    ["interval", "--model", "out/m.json", "--input", "s.csv", "--output", "out/i.csv"],
    ["evaluate", "--input", "s.csv", "--output", "out/eval"],
    ["curve", "--method", "mle", "--input", "s.csv", "--output", "out/c.csv"],
    ["synth", "--family", "student_t", "--param", "4", "--n", "500", "--seed", "8", "--output", "out/s2.csv"],
    ["bench", "--input", "s.csv", "--trials", "3", "--output", "out/bench"],
]


def snapshot(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_every_command_is_byte_deterministic(workdir):
    run("synth", "--family", "lognormal_shifted", "--n", 800, "--seed", 2, "--output", "s.csv")
    snaps = []
    for _ in range(2):
        (workdir / "out").mkdir(exist_ok=True)
        for cmd in COMMANDS:
            assert run(*cmd) == EXIT_OK, cmd
        snaps.append(snapshot(workdir / "out"))
        for p in sorted((workdir / "out").rglob("*"), reverse=True):
            p.unlink() if p.is_file() else p.rmdir()
    assert len(snaps[0]) == 3 + 5 + 1 + 1 + 4
    assert snaps[0] == snaps[1]


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["fit", "--method", "bogus", "--input", "cal.csv", "--output", "m.json"],
        ["quantile", "--model", "m.json", "--input", "pred.csv", "--p", "1.5", "--output", "q.csv"],
        ["interval", "--model", "m.json", "--input", "pred.csv", "--p-lower", "0.9", "--p-upper", "0.1",
         "--output", "i.csv"],
        ["evaluate", "--methods", "crude,bogus", "--input", "cal.csv", "--output", "r"],
        ["evaluate", "--method", "crude", "--test", "pred.csv", "--output", "r"],
        ["bench", "--input", "cal.csv", "--split", "0.5,0.5,0.5", "--output", "b"],
    ],
)
def test_usage_errors(workdir, args):
    run("fit", "--method", "crude", "--input", "cal.csv", "--output", "m.json")
    assert main(args) == EXIT_USAGE


@pytest.mark.parametrize(
    "content",
    ["mu,sigma,y\n0,abc,0\n", "mu,sigma,y\n0,0,1\n0,1,1\n", "mu,sigma\n0,1\n0,1\n"],
)
def test_data_errors(workdir, content, capsys):
    (workdir / "bad.csv").write_text(content)
    assert run("fit", "--method", "crude", "--input", "bad.csv", "--output", "m.json") == EXIT_DATA
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("crudecal: data error:")


def test_missing_file_is_data_error(workdir):
    assert run("fit", "--method", "crude", "--input", "nope.csv", "--output", "m.json") == EXIT_DATA


def test_corrupt_model_is_data_error(workdir):
    (workdir / "m.json").write_text('{"method": "gaussian_mle", "m": 1.0}')
    assert run("quantile", "--model", "m.json", "--input", "pred.csv", "--p", "0.5", "--output", "q.csv") == EXIT_DATA
