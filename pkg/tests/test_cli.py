import csv
import io
import json

import pytest

from flattorus.cli import main
from flattorus.torus import in_modular_domain


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_square(capsys):
    code, out, _ = run(capsys, "eval", "--tau", "0,1")
    assert code == 0
    assert float(out) == 0.5625


def test_eval_reduce(capsys):
    code, out, err = run(capsys, "eval", "--tau", "2.3,0.4", "--reduce")
    assert code == 0
    assert "reduced" in err
    assert float(out) == pytest.approx(0.5664215087890625, abs=1e-12)


def test_eval_outside_domain_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--tau", "2.3,0.4"])
    assert exc.value.code == 2
    assert "--reduce" in capsys.readouterr().err


def test_eval_nonpositive_b(capsys):
    with pytest.raises(SystemExit):
        main(["eval", "--tau", "0,-1", "--reduce"])


def test_dirichlet_json(capsys):
    code, out, _ = run(capsys, "dirichlet", "--tau", "0.3,1.2")
    rec = json.loads(out)
    assert set(rec) == {"tau", "alpha", "beta", "vertices", "area"}
    assert rec["tau"] == [0.3, 1.2]
    assert len(rec["vertices"]) == 6
    assert rec["area"] == pytest.approx(1.2, abs=1e-12)


def test_mc_reproducible(capsys):
    args = ("mc", "--tau", "0.2,1.1", "--samples", "5000", "--seed", "11", "--workers", "2")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    rec = json.loads(first)
    assert rec["seed"] == 11 and rec["n"] == 5000


def test_scan_csv(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan", "--grid", "6,5", "--mc-samples", "200", "--seed", "3",
                     "-o", str(path))
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["a", "b", "p_closed", "p_mc", "mc_stderr", "n", "seed"]
    na, nb, lo, hi = 6, 5, 0.8660254037844386, 3.0
    expected = sum(in_modular_domain(-0.5 + (i + 1) / na, lo + (hi - lo) * j / (nb - 1))
                   for i in range(na) for j in range(nb))
    assert len(rows) - 1 == expected < na * nb
    _, again, _ = run(capsys, "scan", "--grid", "6,5", "--mc-samples", "200", "--seed", "3")
    assert again == path.read_text()


def test_scan_without_mc(capsys):
    _, out, _ = run(capsys, "scan", "--grid", "3,3")
    rows = list(csv.reader(io.StringIO(out)))
    assert all(r[3:] == ["", "", "", ""] for r in rows[1:])


def test_average(capsys):
    code, out, _ = run(capsys, "average", "--b-max", "100", "--tol", "1e-6")
    rec = json.loads(out)
    assert set(rec) == {"value", "b_max", "tol", "tail_included", "cells"}
    assert rec["value"] == pytest.approx(0.5673007, abs=5e-4)


def test_overlap(capsys):
    code, out, err = run(capsys, "overlap", "--sets", "HHT", "--st", "0.3,0.2",
                         "--budget", "20000", "--seed", "4")
    rec = json.loads(out)
    assert set(rec) == {"value", "std_error", "n", "method", "seed"}
    assert rec["seed"] == 4 and rec["method"] == "monte-carlo"
    assert abs(rec["value"] - 0.00835) <= 4 * rec["std_error"]
    assert "closed form" in err


def test_overlap_dirichlet_quadrature(capsys):
    _, out, _ = run(capsys, "overlap", "--sets", "DDD", "--tau", "0,1.5",
                    "--method", "midpoint-quadrature", "--budget", "5000")
    rec = json.loads(out)
    assert rec["std_error"] == 0
    assert rec["value"] / 1.5 ** 2 == pytest.approx(0.5625, abs=1e-3)


def test_overlap_bad_sets(capsys):
    with pytest.raises(SystemExit):
        main(["overlap", "--sets", "HX"])


def test_verify_quick(capsys):
    code, out, err = run(capsys, "verify", "--budget", "quick")
    assert code == 0
    results = json.loads(out)
    assert len(results) == 8 and all(r["passed"] for r in results)
    assert err.count("PASS") == 8
