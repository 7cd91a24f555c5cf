import csv
import json
import math
from decimal import Decimal, getcontext

import pytest

from parrondo.catalog import F1, F2, X1, X2
from parrondo.cli import alpha_from_pi_fraction, main
from parrondo.jets import MapJet, dumps_jet, jet_to_dict, loads_jet

getcontext().prec = 60


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, jet in {"f1": F1(), "f2": F2(), "x1": X1(), "x2": X2()}.items():
        p = tmp_path / f"{name}.json"
        p.write_text(dumps_jet(jet))
        paths[name] = str(p)
    obs = tmp_path / "obs.json"
    # alpha is overridden on the command line
    obs.write_text(dumps_jet(MapJet(2.0, 2, {(0, 2): 1.0})))
    paths["obs"] = str(obs)
    sched = tmp_path / "sched.json"
    sched.write_text(json.dumps({"seasons": [
        {"field": jet_to_dict(X1()), "duration": 1},
        {"field": jet_to_dict(X2()), "duration": 1},
    ]}))
    paths["sched"] = str(sched)
    paths["dir"] = tmp_path
    return paths


PI_50 = Decimal("3.14159265358979323846264338327950288419716939937510")


@pytest.mark.parametrize("text, num, den", [("2/3", 2, 3), ("1/2", 1, 2), ("1", 1, 1), ("7/5", 7, 5)])
def test_alpha_pi_is_correctly_rounded(text, num, den):
    alpha = alpha_from_pi_fraction(text)
    exact = PI_50 * num / den
    # no neighbouring double is closer to the exact value
    err = abs(Decimal(alpha) - exact)
    for other in (math.nextafter(alpha, 0), math.nextafter(alpha, 10)):
        assert err <= abs(Decimal(other) - exact)


def test_invert_second_map(capsys, files):
    code, out, _ = run(capsys, "invert", files["f2"])
    assert code == 0
    assert loads_jet(out).max_abs_diff(X2()) < 1e-12


def test_invert_obstruction_exit_zero(capsys, files):
    code, out, _ = run(capsys, "invert", files["obs"], "--alpha-pi", "2/3")
    assert code == 0
    data = json.loads(out)
    assert data["status"] == "obstructed" and data["at"] == [0, 2]
    assert data["defect"]["re"] == pytest.approx(1.0)


def test_invert_free_value_and_report(capsys, files):
    code, out, _ = run(capsys, "invert", files["f1"], "--free", "0,3=1,2", "--report", "resonances")
    assert code == 0
    data = json.loads(out)
    assert data["resonances"] == [[0, 3]] and data["free"] == [[0, 3]]
    field = loads_jet(json.dumps(data["result"]))
    assert field.max_abs_diff(X1(1 + 2j)) < 1e-10


def test_invert_from_stdin(capsys, monkeypatch, files):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(dumps_jet(F2())))
    code, out, _ = run(capsys, "invert")
    assert code == 0 and loads_jet(out).max_abs_diff(X2()) < 1e-12


def test_usage_errors_are_json(capsys, files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "map", "alpha": 1, "degree": 2, "coeffs": [{"j": 5, "k": 0, "re": 1, "im": 0}]}')
    code, _, err = run(capsys, "invert", str(bad))
    assert code == 2
    msg = json.loads(err)
    assert msg["error"] == "usage" and "coeffs[0]" in msg["message"]
    code, _, err = run(capsys, "invert", files["f1"], "--free", "2,0=1,0")
    assert code == 2 and json.loads(err)["error"] == "usage"
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_domain_error_exit_one(capsys, files):
    code, _, err = run(capsys, "birkhoff", files["obs"], "--alpha-pi", "2/3")
    assert code == 1
    assert "low-order root of unity" in json.loads(err)["message"]


def test_birkhoff_with_oracle(capsys, files):
    code, out, _ = run(capsys, "birkhoff", files["f1"], "--oracle", "0.01,2000")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "LAS"
    assert data["B1"]["im"] == pytest.approx(-5.5)
    assert data["oracle"]["V1_fit"] == pytest.approx(-0.5, rel=0.15)


def test_flow_with_oracle_csv(capsys, files):
    csv_path = files["dir"] / "oracle.csv"
    code, out, _ = run(capsys, "flow", files["x1"], "--time", "1", "--oracle", str(csv_path))
    assert code == 0
    assert loads_jet(out).max_abs_diff(F1()) < 1e-10
    rows = list(csv.DictReader(csv_path.open()))
    assert list(rows[0]) == ["z0_re", "z0_im", "jet_re", "jet_im", "ode_re", "ode_im", "abs_err"]
    assert max(float(r["abs_err"]) for r in rows) < 1e-10


def test_simulate_csv(capsys, files):
    code, out, _ = run(capsys, "simulate", files["sched"], "--z0", "0.05,0", "--periods", "3", "--samples-per-period", "4")
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert list(rows[0]) == ["t", "z_re", "z_im", "r2", "season"]
    assert float(rows[-1]["t"]) == pytest.approx(6.0)
    assert {r["season"] for r in rows} == {"0", "1"}


def test_simulate_bad_schedule(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"seasons": [{"field": {}, "duration": 1}]}')
    code, _, err = run(capsys, "simulate", str(p))
    assert code == 2 and "seasons[0].field" in json.loads(err)["message"]


def test_output_is_deterministic(capsys, files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "invert", files["f1"], "-o", str(a))
    run(capsys, "invert", files["f1"], "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("target", ["quadratic", "cubic-a30", "quarter-turn", "maps", "fields", "obstructions"])
def test_repro_targets(capsys, target):
    code, out, _ = run(capsys, "repro", target)
    assert code == 0 and out.strip().endswith("PASS")


@pytest.mark.slow
def test_paradox_demo_command(capsys, tmp_path):
    code, out, _ = run(capsys, "paradox-demo", "--periods", "2000", "--csv-dir", str(tmp_path / "csv"))
    assert code == 0
    data = json.loads(out)
    assert data["verdicts"] == ["LAS", "LAS", "Repeller"]
    assert data["reversed_verdicts"] == ["Repeller", "Repeller", "LAS"]
    assert len(list((tmp_path / "csv").glob("*.csv"))) == 6
