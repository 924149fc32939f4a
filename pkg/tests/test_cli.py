import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from rgd.cli import UsageError, main, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize(
    "text,kind,expected",
    [("3", int, [3]), ("2:6:2", int, [2, 4, 6]), ("0.1:0.3:0.1", float, [0.1, 0.2, 0.3]), ("1:2", int, [1, 2])],
)
def test_parse_range(text, kind, expected):
    assert parse_range(text, kind) == expected


@pytest.mark.parametrize("text", ["1:2:0", "3:1", "a:b", "1:2:3:4"])
def test_parse_range_rejects(text):
    with pytest.raises(UsageError):
        parse_range(text, float)


def test_zeta(capsys):
    code, out, _ = run(capsys, "zeta", "--m", "2", "--sigma2", "0.1")
    assert code == 0
    assert round(float(rows(out)[0]["log_value"]), 3) == -0.680


def test_partition_beta2_m1(capsys):
    code, out, _ = run(capsys, "partition", "--beta", "2", "--m", "1", "--sigma2", "0.7")
    assert code == 0
    assert out.splitlines() == ["m,sigma2,log_value", "1,0.7,0.000000"]


def test_partition_sp_m1(capsys):
    _, out, _ = run(capsys, "partition", "--family", "sp", "--m", "1", "--sigma2", "1", "--decimals", "12")
    expected = math.log(math.sqrt(2) * math.exp(0.5) * math.erf(1 / math.sqrt(2)))
    assert float(rows(out)[0]["log_value"]) == pytest.approx(expected, abs=1e-12)


def test_grid_order_and_threads(capsys):
    args = ["partition", "--beta", "1", "--m", "2:4", "--sigma2", "0.2:0.6:0.2"]
    _, single, _ = run(capsys, *args)
    _, multi, _ = run(capsys, *args, "--threads", "3")
    assert single == multi
    cells = [(int(r["m"]), float(r["sigma2"])) for r in rows(single)]
    assert cells == [(m, s) for m in (2, 3, 4) for s in (0.2, 0.4, 0.6)]


def test_json_matches_csv(capsys):
    args = ["partition", "--beta", "4", "--m", "1:3", "--sigma2", "0.5"]
    _, text, _ = run(capsys, *args)
    _, js, _ = run(capsys, *args, "--format", "json")
    records = json.loads(js)
    for r, j in zip(rows(text), records):
        assert float(r["log_value"]) == j["log_value"]
        assert int(r["m"]) == j["m"]


def test_linear(capsys):
    _, out, _ = run(capsys, "partition", "--beta", "2", "--m", "2", "--sigma2", "0.5", "--linear")
    assert float(rows(out)[0]["value"]) == pytest.approx(math.expm1(0.25), rel=1e-14)


def test_table_layout(capsys):
    code, out, _ = run(capsys, "table", "--beta", "1", "--m", "2", "--sigma2", "0.1")
    assert code == 0
    assert out.splitlines() == ["m,sigma2,log_zeta", "2,0.1,-0.680"]
    _, out, _ = run(capsys, "table", "--beta", "4", "--layout", "small", "--m", "1", "--convention", "variance")
    assert out.splitlines()[1] == "1,0.02,0.693"


def test_density(capsys, tmp_path):
    path = tmp_path / "rho.csv"
    code, _, _ = run(capsys, "density", "--beta", "2", "--m", "1", "--sigma2", "0.5", "--grid", "-1:1:0.5",
                     "--out", str(path))
    assert code == 0
    data = rows(path.read_text())
    assert [float(r["r"]) for r in data] == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert float(data[2]["rho"]) == pytest.approx(1 / math.sqrt(math.pi * 0.5), rel=1e-14)


def test_density_mixture(capsys):
    _, out, _ = run(capsys, "density", "--beta", "2", "--m", "3", "--sigma2", "0.5", "--mixture")
    assert len(rows(out)) == 5


@pytest.mark.parametrize(
    "argv",
    [["density", "--beta", "1", "--m", "3", "--sigma2", "1"],
     ["density", "--beta", "4", "--m", "3", "--sigma2", "1"],
     ["kernel", "--x", "0,0.5", "--eta", "1,0", "--t", "1"],
     ["partition", "--m", "0", "--sigma2", "1"],
     ["partition", "--family", "so", "--beta", "2", "--m", "2", "--sigma2", "1"],
     ["zeta", "--m", "2", "--sigma2", "1:0.5"],
     ["zeta", "--m", "2", "--sigma2", "0.5", "--threads", "0"]],
)
def test_invalid_arguments_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["partition", "--beta", "3", "--m", "1", "--sigma2", "1"])
    assert exc.value.code == 2


def test_numerical_failure_exit_3(capsys):
    code, _, err = run(capsys, "partition", "--m", "60", "--sigma2", "1e-200")
    assert code == 3
    assert "numerical failure" in err


def test_kernel(capsys):
    _, out, _ = run(capsys, "kernel", "--x", "0.5", "--eta", "0", "--t", "1")
    r = rows(out)[0]
    assert int(r["sign"]) == 1
    assert float(r["log_magnitude"]) == pytest.approx(-0.125 - 0.5 * math.log(2 * math.pi), abs=1e-15)


def test_kernel_b_negative_looking_values(capsys):
    code, out, _ = run(capsys, "kernel", "--x", "1.5,0.2", "--eta", "1,0.5", "--t", "0.5", "--chamber", "b")
    assert code == 0
    assert int(rows(out)[0]["sign"]) == 1


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--criteria", "3,10")
    assert code == 0
    data = rows(out)
    assert list(data[0]) == ["check_id", "status", "observed", "expected", "tolerance"]
    assert {r["status"] for r in data} == {"pass"}


def test_verify_failure_names_first_check(capsys):
    code, _, err = run(capsys, "verify", "--criteria", "1")
    assert code == 1
    assert "ac1.table1.m9" in err


@pytest.mark.skipif(shutil.which("rgd") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["rgd", "zeta", "--m", "2", "--sigma2", "0.1"], capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[1].startswith("2,0.1,-0.680")
