from __future__ import annotations

import json

import pytest

from listdecode.experiment import (
    CSV_HEADER,
    ExperimentConfig,
    aggregate,
    records_from_csv,
    records_to_csv,
    run_experiment,
)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(kind="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(kind="rank", k=2, n=3, trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="sweep", n=10, epsilons=[], k=2)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="rank", k=2)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"kind": "rank", "k": 2, "n": 3, "bogus": 1})
    assert ExperimentConfig(kind="decodability_sweep", n=8, k=2, epsilons=[0.5]).kind == "sweep"
    assert ExperimentConfig(kind="rm_puncture", r=1, m=3, rate_constant=1, epsilons=[0.5]).kind == "rm-puncture"


def test_expectation_single_column_zero_variance():
    res = run_experiment(ExperimentConfig(kind="expectation", q=3, k=2, n=6, L=1, pattern=[4], trials=20), write=False)
    c = res.cell("l2_norm_sq")
    assert c["mean"] == pytest.approx(12) and c["stderr"] == 0


def test_rank_degenerate_and_reference():
    res = run_experiment(ExperimentConfig(kind="rank", k=1, n=12, trials=50, master_seed=2), write=False)
    assert res.cell("full_rank")["mean"] == 1.0
    assert res.extras["reference"]["exact"] == "4095/4096"


def test_concentration_single_n_nonnegative():
    res = run_experiment(ExperimentConfig(kind="concentration", ns=[16], k_ratio=0.125, trials=1, pilot_factor=3), write=False)
    assert res.cell("deviation")["mean"] >= 0
    assert res.extras["plan_check"]["satisfied"]


def test_sweep_degenerate_epsilon():
    res = run_experiment(ExperimentConfig(kind="sweep", n=10, k=3, epsilons=[1.0], trials=10, master_seed=4), write=False)
    c = res.cell("max_list")
    assert c["params"]["t"] == 0
    assert c["success_prob"] == 1.0
    assert c["quantiles"]["0.9"] <= 2


def test_rm_puncture_small():
    res = run_experiment(
        ExperimentConfig(kind="rm-puncture", r=1, m=3, rate_constant=1.0, epsilons=[0.5], trials=6, monitor_L=[2, 3]),
        write=False,
    )
    cell = res.extras["cells"][0]
    assert cell["A"] == 1 and cell["L"] == 4 and cell["n"] == 16
    assert res.cell("soundness_violations")["mean"] == 0


def test_aggregate_recomputes_from_csv(tmp_path):
    cfg = ExperimentConfig(kind="sweep", n=10, k=2, epsilons=[0.4, 0.2], trials=4, master_seed=9, output=str(tmp_path / "s.csv"))
    res = run_experiment(cfg)
    text = (tmp_path / "s.csv").read_text(encoding="utf-8")
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert "\r" not in text
    again = aggregate(records_from_csv(text))
    assert again == res.cells
    assert records_to_csv("sweep", records_from_csv(text)) == text
    summary = json.loads((tmp_path / "s.summary.json").read_text())
    assert summary["cells"] == json.loads(json.dumps(res.cells))
    assert summary["config_echo"]["master_seed"] == 9


def test_reproducible_across_jobs(tmp_path):
    base = dict(kind="expectation", q=3, k=3, n=8, L=2, trials=30, master_seed=5)
    a = ExperimentConfig(**base, output=str(tmp_path / "a.csv"))
    b = ExperimentConfig(**base, jobs=3, output=str(tmp_path / "b.csv"))
    run_experiment(a)
    run_experiment(b)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_cells_over_budget_are_skipped():
    res = run_experiment(ExperimentConfig(kind="sweep", n=40, k=2, epsilons=[0.5], trials=1), write=False)
    assert res.cells == []
    assert res.extras["skipped"][0]["reason"] == "oracle budget"
