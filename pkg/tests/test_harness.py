import math

import pytest

from christoffel_asymptotics import cli
from christoffel_asymptotics.christoffel import lambda_n
from christoffel_asymptotics.geometry import RealInterval
from christoffel_asymptotics.harness import (
    CSV_HEADER,
    DEFAULT_LADDER,
    ScenarioConfig,
    ScenarioError,
    export,
    ladder_for,
    list_scenarios,
    parse_config_blocks,
    report_from_json,
    run_scenario,
    to_csv,
    to_json,
)
from christoffel_asymptotics.measures import make_measure


def test_registry():
    cat = list_scenarios()
    assert len(cat) == 13
    assert "model1" in cat and "lemniscate_power" in cat
    assert all(sc.kind in ("convergence", "identity", "construction") for sc in cat.values())


def test_ladders():
    assert ladder_for("model1") == DEFAULT_LADDER
    assert ladder_for("model1", 50) == (16, 25, 40, 50)
    with pytest.raises(ScenarioError):
        ladder_for("nope")


def test_model1_row():
    rep = run_scenario(ScenarioConfig("model1", alpha=0, n_ladder=(100,)))
    (row,) = rep.rows
    assert math.isclose(row.lam, 1 / 101**2, rel_tol=1e-13)
    assert math.isclose(row.scaled, 100**2 / 101**2, rel_tol=1e-13)
    assert abs(row.scaled - 0.9803) < 1e-4
    assert row.predicted == pytest.approx(1.0, rel=1e-14) and row.kappa == 2


def test_circle_lebesgue_row():
    (row,) = run_scenario(ScenarioConfig("circle_lebesgue", n_ladder=(9,))).rows
    assert math.isclose(row.lam, 2 * math.pi / 10, rel_tol=1e-14)
    assert math.isclose(row.scaled, 9 * 2 * math.pi / 10, rel_tol=1e-14)
    assert math.isclose(row.predicted, 2 * math.pi, rel_tol=1e-14)


def test_identity_mod01_row():
    (row,) = run_scenario(ScenarioConfig("identity_mod01", alpha=2, n_ladder=(20,))).rows
    left = lambda_n(make_measure(RealInterval(0, 1), 0, alpha=0.5), 20).value
    right = lambda_n(make_measure(RealInterval(-1, 1), 0, alpha=2.0), 40).value
    assert abs(left - right) < 1e-8 * right
    assert abs(row.ratio - 1) < 1e-8


def test_csv_schema_and_determinism(tmp_path):
    cfg = ScenarioConfig("circle_lebesgue", n_ladder=(4, 8, 16))
    paths = []
    for k in range(2):
        p = tmp_path / f"run{k}.csv"
        export(run_scenario(cfg), "csv", p)
        paths.append(p)
    text = paths[0].read_text()
    assert text.splitlines()[0] == ",".join(CSV_HEADER) == "n,lambda,kappa,scaled,predicted,ratio"
    assert len(text.splitlines()) == 4 and "\r" not in text
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_json_round_trip(tmp_path):
    rep = run_scenario(ScenarioConfig("model2", n_ladder=(8, 16, 32)))
    back = report_from_json(to_json(rep))
    assert back == rep
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    export(rep, "json", p1)
    export(run_scenario(ScenarioConfig("model2", n_ladder=(8, 16, 32))), "json", p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert "timing" not in p1.read_text() and "timing" in to_json(rep, include_timing=True)


def test_config_validation():
    with pytest.raises(ScenarioError):
        ScenarioConfig("model1", n_ladder=(10, 5))
    with pytest.raises(ScenarioError):
        ScenarioConfig("model1", output="xml")
    with pytest.raises(ScenarioError):
        run_scenario(ScenarioConfig("missing"))


CONFIG = """
# two scenarios
scenario = model1
alpha = 1
n_ladder = 4, 8, 16
format = csv

scenario=two_intervals_interior
z0 = 0.5
nmax = 30
out = two.json
format = json
"""


def test_parse_config_blocks():
    blocks = parse_config_blocks(CONFIG)
    assert len(blocks) == 2
    (c1, o1), (c2, o2) = blocks
    assert c1.scenario_id == "model1" and c1.alpha == 1.0 and c1.n_ladder == (4, 8, 16) and o1 is None
    assert c2.z0 == 0.5 and c2.n_ladder == ladder_for("two_intervals_interior", 30) and o2 == "two.json"
    assert c2.output == "json"
    with pytest.raises(ScenarioError):
        parse_config_blocks("scenario = model1\nbogus = 3\n")
    with pytest.raises(ScenarioError):
        parse_config_blocks("alpha = 1\n")
    with pytest.raises(ScenarioError):
        parse_config_blocks("scenario = model1\nthis line has no equals\n")


def test_override_kappa_and_endpoints():
    rep = run_scenario(ScenarioConfig("model2", n_ladder=(10, 20, 40), kappa=2.0))
    assert all(r.kappa == 2.0 for r in rep.rows)
    rep = run_scenario(ScenarioConfig("two_intervals_interior", n_ladder=(10, 20, 40), endpoints=(-1, -0.5, 0.5, 1), z0=0.7))
    assert all(r.ratio > 0 for r in rep.rows)


# ------------------------------------------------------------------ CLI


def test_cli_list(capsys):
    assert cli.main(["list"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert len(out.strip().splitlines()) == 13


def test_cli_run_csv(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code = cli.main(["run", "--scenario", "model1", "--alpha", "0", "--ladder", "10,20", "--out", str(out), "--format", "csv"])
    assert code == cli.EXIT_OK
    assert out.read_text().startswith("n,lambda,kappa,scaled,predicted,ratio\n10,")
    assert cli.main(["run", "--scenario", "circle_lebesgue", "--nmax", "9"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[-1].startswith("9,")


def test_cli_run_config(tmp_path):
    cfg = tmp_path / "runs.cfg"
    cfg.write_text(f"scenario = circle_lebesgue\nn_ladder = 2,4\nout = {tmp_path / 'c.csv'}\n\n"
                   f"scenario = model2\nn_ladder = 4,8,16\nformat = json\nout = {tmp_path / 'm.json'}\n")
    assert cli.main(["run", "--config", str(cfg)]) == cli.EXIT_OK
    assert (tmp_path / "c.csv").exists() and (tmp_path / "m.json").read_text().startswith("{")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["run"],
        ["run", "--scenario", "nope"],
        ["run", "--scenario", "model1", "--nmax", "10", "--ladder", "4,8"],
        ["run", "--scenario", "model1", "--format", "xml"],
        ["run", "--scenario", "model1", "--alpha", "-2", "--ladder", "4"],
        ["frobnicate"],
    ],
)
def test_cli_usage_errors(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == cli.EXIT_USAGE


def test_cli_numerical_failure(monkeypatch, capsys):
    def boom(cfg):
        raise ArithmeticError("no convergence")

    monkeypatch.setattr(cli, "run_scenario", boom)
    assert cli.main(["run", "--scenario", "model1", "--ladder", "4"]) == cli.EXIT_NUMERICAL


def test_cli_row_failure_sets_numerical_exit(monkeypatch, capsys):
    rep = run_scenario(ScenarioConfig("model1", n_ladder=(4,)))
    rep.rows[0].error = "Cholesky breakdown"
    monkeypatch.setattr(cli, "run_scenario", lambda cfg: rep)
    assert cli.main(["run", "--scenario", "model1", "--ladder", "4"]) == cli.EXIT_NUMERICAL


def test_cli_verify_subset(capsys):
    assert cli.main(["verify", "--only", "1,11"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "criterion  1 PASS" in out and "criterion 11 PASS" in out


@pytest.mark.slow
@pytest.mark.parametrize("sid", sorted(list_scenarios()))
def test_every_scenario_on_defaults(sid):
    rep = run_scenario(ScenarioConfig(sid))
    assert not rep.failed
    ratios = [r.ratio for r in rep.rows]
    assert all(r > 0 for r in ratios)
    if rep.kind == "identity":
        assert all(abs(r - 1) < 1e-8 for r in ratios)
        return
    tail = [abs(r - 1) for r in ratios[len(ratios) // 2:]]
    assert all(b <= a for a, b in zip(tail, tail[1:]))
