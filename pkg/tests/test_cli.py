import json
import math
from importlib import resources

import numpy as np
import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from quasih import cli
from quasih import dynamics as dy
from quasih import verify as vf
from quasih.config import ConfigError, ScenarioConfig

BASE = {
    "model": {"nu": 1.0, "g": 1.0, "kappa": 0.6, "n_bath": 1, "x": 1.0},
    "initial": {"mode": "alpha", "alpha": 0.3},
    "unitary": {"mode": "real_cd", "c": 0.5},
    "grid": {"samples": 513},
}


def schema_validator(name):
    files = resources.files("quasih") / "schemas"
    docs = {p.name: json.loads(p.read_text()) for p in files.iterdir() if p.name.endswith(".json")}
    registry = Registry().with_resources((k, Resource.from_contents(v)) for k, v in docs.items())
    return Draft202012Validator(docs[name], registry=registry)


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_evolve_csv_fig5(tmp_path, capsys):
    code, out, _ = run(capsys, "evolve", "--config", write(tmp_path, BASE))
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "t,p,q,entropy_H,entropy_hW"
    assert "\r" not in out and out.endswith("\n")
    data = np.loadtxt(out.splitlines()[1:], delimiter=",")
    assert data.shape == (513, 5)
    omega = 0.8
    q0 = 0.5 + 2 * math.sqrt(0.1875) * math.sqrt(0.21)
    assert np.max(np.abs(data[:, 2] - (q0 + 0.1 * np.cos(2 * omega * data[:, 0])))) < 1e-14
    assert np.all(np.diff(data[:, 0]) > 0)


def test_csv_values_are_exact(tmp_path, capsys):
    cfg = ScenarioConfig.from_dict(BASE)
    traj = cfg.trajectory()
    ts = cfg.times(traj)
    _, out, _ = run(capsys, "evolve", "--config", write(tmp_path, BASE))
    row = out.splitlines()[100].split(",")
    assert float(row[0]) == ts[99]
    assert float(row[2]) == dy.population_q(traj, ts)[99]


def test_evolve_stationary_and_bits(tmp_path, capsys):
    doc = dict(BASE, initial={"mode": "alpha", "alpha": 0.5}, unitary={"mode": "real_cd", "c": 0.0})
    _, out, _ = run(capsys, "evolve", "--config", write(tmp_path, doc), "--bits")
    data = np.loadtxt(out.splitlines()[1:], delimiter=",")
    assert np.allclose(data[:, 1:3], 0.5, atol=1e-15)
    assert np.allclose(data[:, 3:], 1.0, atol=1e-15)


def test_evolve_json_schema(tmp_path, capsys):
    out_path = tmp_path / "curve.json"
    code, _, _ = run(capsys, "evolve", "--config", write(tmp_path, BASE), "--format", "json", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    schema_validator("evolve.schema.json").validate(doc)
    assert ScenarioConfig.from_dict(doc["meta"]["config"]) == ScenarioConfig.from_dict(BASE)
    assert len(doc["rows"]) == 513


def test_determinism(tmp_path, capsys):
    doc = dict(BASE, unitary={"mode": "random", "seed": 0})
    path = write(tmp_path, doc)
    outs = [run(capsys, "evolve", "--config", path, "--seed", "12345", "--format", "json")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    other = run(capsys, "evolve", "--config", path, "--seed", "54321", "--format", "json")[1]
    assert other != outs[0]


def test_config_round_trip():
    cfg = ScenarioConfig.from_dict(dict(BASE, sweep={"param": "c", "values": [0.0, 0.5]}))
    again = ScenarioConfig.from_json(cfg.to_json())
    assert again == cfg
    assert ScenarioConfig.from_json(again.to_json()).to_json() == cfg.to_json()
    schema_validator("config.schema.json").validate(cfg.to_dict())


@pytest.mark.parametrize("doc,where", [
    ({"model": {"g": -1.0}}, "model.g"),
    ({"model": {"kappa": 1.5}}, "model.kappa"),
    ({"model": {"n_bath": 1.5}}, "model.n_bath"),
    ({"model": {"colour": 1}}, "model.colour"),
    ({"initial": {"alpha": 1.5}}, "initial.alpha"),
    ({"initial": {"mode": "amplitudes"}}, "initial"),
    ({"unitary": {"mode": "matrix", "entries": {"a": [1, 0], "b": [1, 0], "c": [0, 0], "d": [1, 0]}}}, "unitary"),
    ({"unitary": {"mode": "real_cd", "c": 2}}, "unitary"),
    ({"grid": {"samples": 3}}, "grid.samples"),
    ({"sweep": {"param": "alpha", "values": []}}, "sweep.values"),
    ({"sweep": {"param": "kappa", "values": [1]}}, "sweep.param"),
    ({"extra": {}}, "extra"),
])
def test_config_errors(doc, where):
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_dict(doc)
    assert exc.value.where == where


def test_config_json_syntax_error_reports_line():
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_json('{\n  "model": {"g": 1,}\n}')
    assert exc.value.where.startswith("line 2")


def test_exit_codes(tmp_path, capsys):
    code, _, err = run(capsys, "evolve", "--config", write(tmp_path, {"model": {"g": -1}}))
    assert code == 2 and "model.g" in err
    code, _, _ = run(capsys, "sweep", "--config", write(tmp_path, dict(BASE, sweep={"param": "alpha", "values": []})))
    assert code == 2
    code, _, _ = run(capsys, "evolve", "--config", str(tmp_path / "missing.json"))
    assert code == 3
    code, _, _ = run(capsys, "evolve", "--config", write(tmp_path, BASE), "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 3
    code, _, _ = run(capsys, "bogus")
    assert code == 2


def test_sweep_alpha_blocks(tmp_path, capsys, monkeypatch):
    doc = dict(BASE, grid={"samples": 4097}, sweep={"param": "alpha", "values": [0.0, 0.15, 0.3, 0.45]})
    monkeypatch.setenv("QUASIH_THREADS", "3")
    code, out, _ = run(capsys, "sweep", "--config", write(tmp_path, doc), "--format", "json")
    assert code == 0
    parsed = json.loads(out)
    schema_validator("sweep.schema.json").validate(parsed)
    assert [b["value"] for b in parsed["blocks"]] == [0.0, 0.15, 0.3, 0.45]
    from quasih.analytics import EntropyCurve, estimate_period
    # at alpha = 0 the curve is symmetric about 1/2, so only alpha > 0 is checked
    for block in parsed["blocks"][1:]:
        ts = np.array([r["t"] for r in block["rows"]])
        vals = np.array([r["entropy_hW"] for r in block["rows"]])
        est = estimate_period(EntropyCurve(ts, vals))
        assert est.period == pytest.approx(math.pi / 0.8, rel=1e-6)
    monkeypatch.setenv("QUASIH_THREADS", "1")
    assert run(capsys, "sweep", "--config", write(tmp_path, doc), "--format", "json")[1] == out


def test_sweep_c_blocks_csv(tmp_path, capsys):
    doc = dict(BASE, sweep={"param": "c", "values": [0.0, 0.5]})
    code, out, _ = run(capsys, "sweep", "--config", write(tmp_path, doc))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "block,t,p,q,entropy_H,entropy_hW"
    first = [l.split(",") for l in lines[1:] if l.startswith("c=0,")]
    assert len(first) == 513
    assert all(r[4] == r[5] for r in first)


def test_bad_thread_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QUASIH_THREADS", "zero")
    doc = dict(BASE, sweep={"param": "c", "values": [0.5]})
    assert run(capsys, "sweep", "--config", write(tmp_path, doc))[0] == 2


def test_entanglement_report(tmp_path, capsys):
    code, out, _ = run(capsys, "entanglement", "--config", write(tmp_path, BASE))
    assert code == 0
    doc = json.loads(out)
    schema_validator("entanglement.schema.json").validate(doc)
    assert doc["sides"]["non_hermitian"]["classification"] == "always_entangled"
    split = 2 * math.sqrt(0.21)
    assert doc["averaged_state"]["hermitian"]["eigenvalue_splitting"] == pytest.approx(split, abs=1e-12)


def test_entanglement_random_unitaries(tmp_path, capsys):
    splits = []
    for seed in range(5):
        doc = dict(BASE, unitary={"mode": "random", "seed": seed})
        doc["initial"] = {"mode": "alpha", "alpha": 0.3, "phase2": 0.4}
        out = run(capsys, "entanglement", "--config", write(tmp_path, doc))[1]
        splits.append(json.loads(out)["averaged_state"]["hermitian"]["eigenvalue_splitting"])
    assert np.ptp(splits) < 1e-12


def test_entanglement_separable_and_csv(tmp_path, capsys):
    doc = dict(BASE, initial={"mode": "alpha", "alpha": 0.3, "phase2": math.pi / 2})
    out = run(capsys, "entanglement", "--config", write(tmp_path, doc))[1]
    report = json.loads(out)
    for side in ("non_hermitian", "hermitian"):
        assert report["averaged_state"][side]["concurrence"] < 1e-15
    assert report["sides"]["non_hermitian"]["classification"] == "periodic_touch"
    code, out, _ = run(capsys, "entanglement", "--config", write(tmp_path, doc), "--format", "csv")
    assert code == 0 and out.startswith("field,value\n")


def test_dyson_demo_cli(capsys):
    code, out, _ = run(capsys, "dyson-demo", "h_zero")
    assert code == 0 and json.loads(out)["max_deviation"] <= 1e-6
    code, out, _ = run(capsys, "dyson-demo", "constant_A", "--format", "csv", "--samples", "5")
    assert code == 0 and out.startswith("field,value\n")


def test_verify_suite_passes(capsys):
    code, out, _ = run(capsys, "verify", "dyson", "--seed", "42")
    doc = json.loads(out)
    schema_validator("verify.schema.json").validate(doc)
    assert code == 0 and doc["failed"] == []
    assert any(c["name"] == "demo_h_zero" for c in doc["checks"])


def test_verify_all_has_twenty_groups():
    assert len(vf.CHECKS) >= 20
    assert {c.group for c in vf.CHECKS} == {"linalg", "model", "dynamics", "analytics", "dyson"}


def test_verify_catches_sign_flip(monkeypatch, capsys):
    # a sign error in the sine term of q(t) must be detected
    original = dy.population_q

    def flipped(traj, t):
        w2 = 2.0 * traj.omega * np.asarray(t)
        alpha, ab, cd = traj.alpha, traj.ab, traj.cd
        c2 = abs(traj.w.c) ** 2
        x = traj.params.x
        sin_coef = (1 - 2 * alpha) * cd.imag + x * (1 - 2 * c2) * ab.imag
        return original(traj, t) - 2 * sin_coef * np.sin(w2)

    monkeypatch.setattr(dy, "population_q", flipped)
    code, out, err = run(capsys, "verify", "analytics", "--seed", "42")
    assert code == 1
    assert "period_doubling" in json.loads(out)["failed"]
    assert "period_doubling" in err


def test_verify_seed_is_reproducible():
    a = [r.residual for r in vf.run_suite("model", 7)]
    b = [r.residual for r in vf.run_suite("model", 7)]
    assert a == b
