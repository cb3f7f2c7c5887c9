import json

import numpy as np
import pytest

from katlas.cli import main
from katlas.report import dumps, read_csv_columns


def write_cfg(path, **kw):
    cfg = {"nonlinearity": {"omega": 1.0, "terms": [{"coeff": 1.0, "p": kw.pop("p", 4.0)}]}, **kw}
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture
def run(cache_dir, capsys):
    def go(*argv):
        code = main([*argv, "--cache", str(cache_dir)] if argv[0] != "verify" else list(argv))
        return code, capsys.readouterr()
    return go


def test_check_f_exit_codes(tmp_path, run):
    assert run("check-f", write_cfg(tmp_path / "ok.json", N=3))[0] == 0
    code, out = run("check-f", write_cfg(tmp_path / "sup.json", N=3, p=7.0))
    assert code == 1 and json.loads(out.out)["f3_ok"] is False
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("check-f", str(bad))[0] == 2
    assert run("check-f", str(tmp_path / "missing.json"))[0] == 2


def test_usage_errors(tmp_path, run):
    cfg = write_cfg(tmp_path / "c.json", N=3)
    assert run("atlas", cfg, "--k-max", "0")[0] == 2
    assert run("atlas", write_cfg(tmp_path / "g.json", N=3, p=0.5))[0] == 2
    (tmp_path / "nonl.json").write_text(json.dumps({"N": 3}))
    assert run("atlas", str(tmp_path / "nonl.json"))[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_solve_q_one_dimension(tmp_path, run):
    code, out = run("solve-q", write_cfg(tmp_path / "c.json", N=1), "--out", str(tmp_path / "q"))
    assert code == 0
    meta = json.loads((tmp_path / "q" / "state_k0.json").read_text())
    assert meta["D"] == pytest.approx(4 / 3, rel=1e-10)
    cols = read_csv_columns(tmp_path / "q" / "state_k0.csv")
    assert list(cols) == ["r", "v", "dv"]


def test_solve_q_nodes_and_repeat(tmp_path, run):
    cfg = write_cfg(tmp_path / "c.json", N=3, k_max=2)
    code, first = run("solve-q", cfg, "--out", str(tmp_path / "a"))
    assert code == 0
    metas = [json.loads((tmp_path / "a" / f"state_k{k}.json").read_text()) for k in (0, 1)]
    assert [m["nodes"] for m in metas] == [0, 1]
    code, second = run("solve-q", cfg, "--out", str(tmp_path / "b"))
    assert first.out == second.out
    for k in (0, 1):
        assert (tmp_path / "a" / f"state_k{k}.csv").read_bytes() == (tmp_path / "b" / f"state_k{k}.csv").read_bytes()


def test_thresholds(tmp_path, run, state):
    code, out = run("thresholds", write_cfg(tmp_path / "c.json", N=5, p=2.5, a=1.0, b=1e-5),
                    "--out", str(tmp_path))
    th = json.loads(out.out)
    assert code == 0 and th["b_dstar"] < th["b_star"]
    assert "a_star" in th and "a_dstar" in th
    code, out = run("thresholds", write_cfg(tmp_path / "c4.json", N=4, p=3.0, a=1.0), "--out", str(tmp_path))
    assert code == 0 and json.loads(out.out)["b_star"] == pytest.approx(1 / state(4, 3.0).D, rel=1e-14)
    assert run("thresholds", write_cfg(tmp_path / "c3.json", N=3), "--out", str(tmp_path))[0] == 1


def test_atlas_verify_and_tamper(tmp_path, run):
    out = tmp_path / "atlas"
    code, _ = run("atlas", write_cfg(tmp_path / "c.json", N=3, a=1.0, b=1.0, k_max=2), "--out", str(out))
    assert code == 0
    doc = json.loads((out / "atlas.json").read_text())
    assert doc["ground_state"] == {"k": 0, "label": "Unique"}
    assert [len(e["branches"]) for e in doc["entries"]] == [1, 1]
    cols = read_csv_columns(out / doc["entries"][0]["branches"][0]["profile_csv"])
    assert list(cols) == ["r", "u", "du"]
    assert run("verify", str(out / "atlas.json"))[0] == 0

    doc["entries"][0]["branches"][0]["t"] *= 1.01
    (out / "tampered.json").write_text(json.dumps(doc))
    code, res = run("verify", str(out / "tampered.json"))
    assert code == 1 and "FAIL" in res.out

    (out / doc["entries"][1]["branches"][0]["profile_csv"]).unlink()
    assert run("verify", str(out / "atlas.json"))[0] == 2


def test_atlas_nonexistence_exits_one(tmp_path, run, state):
    b = 1.1 / state(4, 3.0).D
    code, _ = run("atlas", write_cfg(tmp_path / "c.json", N=4, p=3.0, a=0.0, b=b), "--out", str(tmp_path / "o"))
    assert code == 1


def test_continuum_report(tmp_path, run, state):
    b = 1.0 / state(4, 3.0).D
    out = tmp_path / "c4"
    code, _ = run("atlas", write_cfg(tmp_path / "c.json", N=4, p=3.0, a=0.0, b=b, lambdas=[0.5, 1, 2]),
                  "--out", str(out))
    assert code == 0
    doc = json.loads((out / "atlas.json").read_text())
    brs = doc["entries"][0]["branches"]
    assert [br["t"] for br in brs] == [0.5, 1.0, 2.0]
    assert all(br["phi_formula"] == 0 and abs(br["phi_quadrature"]) < 1e-6 for br in brs)
    assert run("verify", str(out / "atlas.json"))[0] == 0


def test_sweep_crosses_thresholds(tmp_path, run, state):
    out = tmp_path / "sw"
    sweep = {"min": "0.5*b_dstar", "max": "1.1*b_star", "count": 5}
    code, _ = run("atlas", write_cfg(tmp_path / "c.json", N=5, p=2.5, a=1.0, b=sweep), "--out", str(out))
    assert code == 0
    cols = read_csv_columns(out / "sweep.csv")
    assert list(cols) == ["b", "branch_count", "phi_lower", "phi_upper"]
    counts = cols["branch_count"].astype(int).tolist()
    assert counts[0] == 2 and counts[-1] == 0 and 1 in counts
    assert all(x >= y for x, y in zip(counts, counts[1:]))
    i = counts.index(1)
    assert cols["phi_lower"][i] == cols["phi_upper"][i]
    assert np.isnan(cols["phi_lower"][-1])
    assert run("verify", str(out / "sweep.json"))[0] == 0


def test_dumps_seventeen_digits():
    assert dumps(0.1) == "0.10000000000000001"
    assert json.loads(dumps({"x": [1.0 / 3, float("nan")]})) == {"x": [1.0 / 3, None]}
    assert dumps(2.0) == "2.0" and dumps(True) == "true"
