"""Acceptance criteria, each run at its stated scale and tolerance.

Every test records a one-line summary; the conftest hook prints one PASS/FAIL
line per criterion at the end of the session.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from listdecode.certify import (
    dimension_for_length,
    floor_radius,
    l1_certificate,
    plan_parameters,
    rip_constant,
    rip_implied_decodability,
)
from listdecode.code import full_rank_probability, low_weight_count, random_generator, reed_muller
from listdecode.experiment import ExperimentConfig, run_experiment
from listdecode.oracle import char_equivalence_check, list_profile, worst_case_list_size
from listdecode.simplex import simplex_inner_product

pytestmark = pytest.mark.acceptance


def report(record_property, n: int, detail: str) -> None:
    record_property("criterion", n)
    record_property("detail", detail)


def test_01_inner_product_identity(record_property):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst, exact_ok = 0.0, True
    for _ in range(10_000):
        q = int(rng.choice([2, 3, 5, 7]))
        n = int(rng.integers(1, 33))
        x, y = rng.integers(0, q, n), rng.integers(0, q, n)
        expected = (q - 1) * n - q * int(np.count_nonzero(x != y))
        worst = max(worst, abs(simplex_inner_product(q, x, y, mode="complex") - expected))
        exact_ok &= simplex_inner_product(q, x, y) == expected
    elapsed = time.perf_counter() - start
    report(record_property, 1, f"10^4 pairs, max complex error {worst:.2e}, exact mode ok={exact_ok}, {elapsed:.1f}s")
    assert worst <= 1e-6
    assert exact_ok
    assert elapsed < 10


def test_02_characterization_and_methods(record_property):
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        q = int(rng.choice([2, 3]))
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, min(3, n) + 1))
        code = random_generator(q, k, n, int(rng.integers(2**63)))
        coset = list_profile(code, "coset").max_list
        exhaustive = list_profile(code, "exhaustive").max_list
        mismatches += int(not np.array_equal(coset, exhaustive))
        for t in range(n + 1):
            mismatches += int(not char_equivalence_check(code, t))
    elapsed = time.perf_counter() - start
    report(record_property, 2, f"200 codes, all radii, {mismatches} mismatches, {elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 60


def test_03_l1_certificate_soundness(record_property):
    rng = np.random.default_rng(303)
    confirmed = counterexamples = drawn = 0
    while confirmed + counterexamples < 500:
        drawn += 1
        q = int(rng.choice([2, 3]))
        n = int(rng.integers(2, 11))
        k = int(rng.integers(1, 4))
        code = random_generator(q, k, n, int(rng.integers(2**63)))
        L = int(rng.integers(2, 4))
        if L > code.N:
            continue
        eps = float(rng.uniform(0.05, 1.0))
        cert = l1_certificate(code, L, eps)
        if cert.verdict != "holds":
            continue
        got = worst_case_list_size(code, floor_radius(q, n, eps)).max_list
        if got <= L - 1:
            confirmed += 1
        else:
            counterexamples += 1
    report(record_property, 3, f"{confirmed + counterexamples} holding certificates ({drawn} draws), "
           f"{counterexamples} counterexamples")
    assert counterexamples == 0


def test_04_rip_soundness(record_property):
    rng = np.random.default_rng(404)
    confirmed = counterexamples = drawn = 0
    by_L = {3: 0, 4: 0}
    while confirmed + counterexamples < 200:
        drawn += 1
        L = int(rng.choice([3, 4]))
        q = int(rng.choice([2, 3]))
        k = 2 if q == 2 or L == 4 else int(rng.integers(1, 3))
        n = int(rng.integers(4, 13))
        code = random_generator(q, k, n, int(rng.integers(2**63)))
        if L > code.N:
            continue
        if rip_constant(code, L).delta > 0.5:
            continue
        radius = rip_implied_decodability(Fraction(1, 2), L, q)
        t = radius.radius_count(n)
        got = worst_case_list_size(code, t).max_list
        by_L[L] += 1
        if got <= L - 1:
            confirmed += 1
        else:
            counterexamples += 1
    report(record_property, 4, f"{confirmed + counterexamples} codes with delta <= 1/2 "
           f"(L=3: {by_L[3]}, L=4: {by_L[4]}; {drawn} draws), {counterexamples} counterexamples")
    assert counterexamples == 0


def test_05_expectation(record_property):
    res = run_experiment(
        ExperimentConfig(kind="expectation", q=3, n=16, k=4, L=2, trials=10_000, master_seed=505), write=False
    )
    l2 = res.cell("l2_norm_sq")
    l1 = res.cell("l1_norm")
    bound = 32 * math.sqrt(2)
    report(record_property, 5, f"mean |Phi x|_2^2 = {l2['mean']:.3f} +- {l2['stderr']:.3f} (target 64); "
           f"mean |Phi x|_1 = {l1['mean']:.3f} +- {l1['stderr']:.3f} (bound {bound:.3f}); T=10^4")
    assert abs(l2["mean"] - 64) <= 3 * l2["stderr"]
    assert l1["mean"] <= bound + 3 * l1["stderr"]


def test_06_rank_probability(record_property):
    res = run_experiment(ExperimentConfig(kind="rank", q=2, k=3, n=5, trials=100_000, master_seed=606), write=False)
    p = float(full_rank_probability(2, 3, 5))
    sigma = math.sqrt(p * (1 - p) / 100_000)
    got = res.cell("full_rank")["mean"]
    report(record_property, 6, f"empirical {got:.5f} vs 3255/4096 = {p:.5f}, sigma {sigma:.5f}, "
           f"z = {(got - p) / sigma:+.2f}; T=10^5")
    assert abs(got - p) <= 3 * sigma


@pytest.fixture(scope="module")
def concentration():
    cfg = ExperimentConfig(kind="concentration", q=2, ns=[16, 32, 64, 128], k_ratio=1 / 8, L=2, trials=200, master_seed=707)
    start = time.perf_counter()
    res = run_experiment(cfg, write=False)
    return res, time.perf_counter() - start


def test_07_concentration_scaling(record_property, concentration):
    res, elapsed = concentration
    fit = res.extras["fit"]
    se = [res.cell("deviation", n=n)["stderr"] for n in fit["n"]]
    report(record_property, 7, f"exponent vs n = {fit['exponent_vs_n']:.3f} (window [0.35, 0.65]); "
           f"exponent vs sqrt(n ln N) = {fit['exponent_vs_sqrt_n_lnN']:.3f}; "
           f"D(n) = {[round(d, 2) for d in fit['mean_deviation']]} +- {[round(s, 2) for s in se]}; "
           f"C0 ~ {fit['C0_estimate']:.3f}; {elapsed:.0f}s")
    assert elapsed < 600
    assert res.extras["plan_check"]["satisfied"]
    assert 0.35 <= fit["exponent_vs_n"] <= 0.65


def test_08_epsilon_scaling(record_property, concentration):
    C0 = concentration[0].extras["fit"]["C0_estimate"]
    k = dimension_for_length(24, 0.4, 2, C0)
    res = run_experiment(
        ExperimentConfig(kind="sweep", q=2, n=24, epsilons=[0.4, 0.2], C0=C0, plan_epsilon=0.4, trials=50, master_seed=808),
        write=False,
    )
    easy = res.cell("max_list", epsilon=0.4)
    hard = res.cell("max_list", epsilon=0.2)
    ratio = hard["quantiles"]["0.5"] / easy["quantiles"]["0.5"]
    succ = easy["success_prob"]
    se = math.sqrt(succ * (1 - succ) / easy["n_trials"])
    violations = res.cell("soundness_violations", epsilon=0.4)["mean"] + res.cell("soundness_violations", epsilon=0.2)["mean"]
    report(record_property, 8, f"k = {k} from plan with C0 = {C0:.3f}; median list {easy['quantiles']['0.5']:g} "
           f"(eps=0.4, t={easy['params']['t']}) -> {hard['quantiles']['0.5']:g} (eps=0.2, t={hard['params']['t']}), "
           f"ratio {ratio:.2f} (window [2.5, 6]); success at 4/eps^2 = {succ:.2f} +- {se:.2f}; 50 trials/cell")
    assert easy["params"]["k"] == k
    assert violations == 0
    assert succ >= 0.9
    assert 2.5 <= ratio <= 6


def test_09_punctured_reed_muller(record_property):
    mother = reed_muller(2, 4)
    A = low_weight_count(mother, 6)
    res = run_experiment(
        ExperimentConfig(kind="rm-puncture", r=2, m=4, rate_constant=1.85, epsilons=[0.5], trials=30,
                         master_seed=909, monitor_L=[2, 3]),
        write=False,
    )
    cell = res.extras["cells"][0]
    frac = res.cell("max_list")
    checks = res.cell("monitor_checks")["mean"] * frac["n_trials"]
    violations = len(res.extras["monitor"]["violations"])
    report(record_property, 9, f"A = {A}, L = {cell['L']}, n = {cell['n']}, t = {cell['t']}; fraction with list <= L-1 "
           f"= {frac['success_prob']:.3f} +- {math.sqrt(frac['success_prob'] * (1 - frac['success_prob']) / 30):.3f}; "
           f"median list {frac['quantiles']['0.5']:g}; {int(checks)} monitor checks, {violations} violations; 30 trials")
    assert cell["A"] == A and cell["L"] == math.ceil(A / 0.25)
    assert cell["t"] == cell["n"] // 4
    assert violations == 0


def test_10_reproducibility(record_property, tmp_path):
    configs = [
        dict(kind="expectation", q=3, n=8, k=3, L=2, trials=40),
        dict(kind="sweep", q=2, n=12, k=3, epsilons=[0.4, 0.2], trials=16),
        dict(kind="rm-puncture", r=1, m=3, rate_constant=1.0, epsilons=[0.5], trials=8, monitor_L=[2, 3]),
    ]
    same = []
    for i, base in enumerate(configs):
        outs = []
        for jobs in (1, 8):
            path = tmp_path / f"{i}_{jobs}.csv"
            run_experiment(ExperimentConfig(**base, master_seed=1010, jobs=jobs, output=str(path)))
            outs.append(path.read_bytes())
        again = tmp_path / f"{i}_again.csv"
        run_experiment(ExperimentConfig(**base, master_seed=1010, output=str(again)))
        same.append(outs[0] == outs[1] == again.read_bytes())
    report(record_property, 10, f"{sum(same)}/{len(same)} experiments byte-identical at jobs 1 and 8 and on rerun")
    assert all(same)
