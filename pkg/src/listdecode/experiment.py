"""Seeded Monte Carlo experiments over random code ensembles.

Every trial draws its randomness from ``derive_seed(master_seed, trial)``, where
``trial`` is a global index running across all cells of the sweep, so results
do not depend on how trials are distributed over worker processes.  Trial
records are written one row per measured quantity to CSV; cell aggregates are
recomputed from those rows and written to a JSON sidecar.

Each experiment that evaluates codes also runs a soundness monitor: exact l1
certificates at small sparsity are checked against the exhaustive oracle, and
any certified code that the oracle refutes aborts the run.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from listdecode.certify import (
    DEFAULT_SUBSET_BUDGET,
    as_fraction,
    dimension_for_length,
    floor_radius,
    iter_supports,
    l1_certificate,
    plan_parameters,
    subset_count,
)
from listdecode.code import (
    LinearCode,
    codeword_matrix,
    full_rank_probability,
    index_to_message,
    low_weight_count,
    puncture,
    rank_mod_q,
    reed_muller,
)
from listdecode.oracle import DEFAULT_PAIR_BUDGET, ListProfile, list_profile
from listdecode.seeding import derive_seed, make_rng
from listdecode.simplex import encode_words, l1_norms

log = logging.getLogger(__name__)

KINDS = ("expectation", "rank", "concentration", "sweep", "rm-puncture")
KIND_ALIASES = {"decodability_sweep": "sweep", "rm_puncture": "rm-puncture"}
CSV_HEADER = [
    "kind", "trial", "seed", "q", "n", "k", "L", "epsilon", "t",
    "measure_name", "measure_value", "pass",
]
QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)
# Distinguishes pilot-pool seeds from trial seeds.
PILOT_TAG = 0x70696C6F74


class SoundnessViolation(RuntimeError):
    """A certified code was refuted by the oracle."""


@dataclass
class ExperimentConfig:
    kind: str
    q: int = 2
    k: int | None = None
    n: int | None = None
    ns: list[int] | None = None
    k_ratio: float | None = None
    epsilons: list[float] | None = None
    L: int = 2
    pattern: list[int] | None = None
    trials: int = 100
    master_seed: int = 0
    jobs: int = 1
    output: str | None = None
    # concentration
    pilot_factor: int = 10
    sample_patterns: int = 4096
    subset_budget: int = DEFAULT_SUBSET_BUDGET
    # sweep
    C0: float | None = None
    plan_epsilon: float | None = None
    # rm-puncture
    r: int | None = None
    m: int | None = None
    rate_constant: float | None = None
    # soundness monitor sparsities
    monitor_L: list[int] = field(default_factory=lambda: [2])

    def __post_init__(self):
        self.kind = KIND_ALIASES.get(self.kind, self.kind)
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        for name in ("ns", "epsilons", "pattern", "monitor_L"):
            v = getattr(self, name)
            if v is not None and len(v) == 0:
                raise ValueError(f"{name} must be nonempty when given")
        need = {
            "expectation": ("k", "n"),
            "rank": ("k", "n"),
            "concentration": ("ns",),
            "sweep": ("n", "epsilons"),
            "rm-puncture": ("r", "m", "rate_constant", "epsilons"),
        }[self.kind]
        missing = [a for a in need if getattr(self, a) is None]
        if missing:
            raise ValueError(f"{self.kind} experiment needs {', '.join(missing)}")
        if self.kind == "concentration" and self.k is None and self.k_ratio is None:
            raise ValueError("concentration experiment needs k or k_ratio")
        if self.kind == "sweep" and self.k is None and self.C0 is None:
            raise ValueError("sweep experiment needs k or C0")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | Path) -> ExperimentConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def echo(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("jobs")
        return d


@dataclass
class TrialRecord:
    trial_index: int
    derived_seed: int
    params: dict[str, Any]
    measures: dict[str, float]
    passes: dict[str, bool | None]


@dataclass
class SweepResult:
    config_echo: dict[str, Any]
    cells: list[dict[str, Any]]
    records: list[TrialRecord] = field(repr=False)
    extras: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"config_echo": self.config_echo, "cells": self.cells, **self.extras}

    def cell(self, measure: str, **params: Any) -> dict[str, Any]:
        for c in self.cells:
            if c["params"]["measure"] == measure and all(
                c["params"].get(k) == v for k, v in params.items()
            ):
                return c
        raise KeyError(f"no cell for {measure} with {params}")


# ---------------------------------------------------------------- cells


def _cells(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    q = cfg.q
    if cfg.kind in ("expectation", "rank"):
        return [dict(q=q, n=cfg.n, k=cfg.k, L=cfg.L if cfg.kind == "expectation" else None,
                     epsilon=None, t=None)]
    if cfg.kind == "concentration":
        out = []
        for n in cfg.ns:
            k = cfg.k if cfg.k is not None else math.ceil(n * cfg.k_ratio)
            out.append(dict(q=q, n=n, k=k, L=cfg.L, epsilon=None, t=None))
        return out
    if cfg.kind == "sweep":
        k = cfg.k
        if k is None:
            eps_plan = cfg.plan_epsilon if cfg.plan_epsilon is not None else max(cfg.epsilons)
            k = dimension_for_length(cfg.n, eps_plan, q, cfg.C0)
        return [
            dict(q=q, n=cfg.n, k=k, L=math.floor(4 / as_fraction(e) ** 2), epsilon=e,
                 t=floor_radius(q, cfg.n, e))
            for e in cfg.epsilons
        ]
    # rm-puncture
    mother = reed_muller(cfg.r, cfg.m)
    out = []
    for e in cfg.epsilons:
        eps = as_fraction(e)
        A = low_weight_count(mother, math.floor(mother.n * (1 - eps**2) / 2))
        L = math.ceil(A / eps**2)
        n = math.ceil(Fraction(mother.k) / (as_fraction(cfg.rate_constant) * eps**2))
        t = math.floor(n * (1 - eps) / 2)
        out.append(dict(q=2, n=n, k=mother.k, L=L, epsilon=e, t=t, A=A))
    return out


# ---------------------------------------------------------------- trials


class _Monitor:
    """Checks exact l1 certificates against the oracle for one code."""

    def __init__(self, sparsities: list[int], budget: int):
        self.sparsities = sparsities
        self.budget = budget

    def check(self, code: LinearCode, profile: ListProfile) -> tuple[int, list[dict]]:
        checks = 0
        violations = []
        for L in self.sparsities:
            if L > code.N or subset_count(code.N, L) > self.budget:
                continue
            cert = l1_certificate(code, L, 1.0, self.budget)
            t = cert.certified_radius()
            if t is None or t > code.n:
                continue
            checks += 1
            got = int(profile.max_list[t])
            if got > L - 1:
                violations.append(
                    dict(L=L, t=t, value=cert.value, max_list=got,
                         witness=[int(s) for s in profile.witnesses[t]],
                         generator=code.G.tolist())
                )
        return checks, violations


def _expectation_trial(cfg, cell, seed):
    q, n, k, L = cell["q"], cell["n"], cell["k"], cell["L"]
    pattern = cfg.pattern if cfg.pattern is not None else list(range(L))
    rng = make_rng(seed)
    G = rng.integers(0, q, size=(k, n), dtype=np.int64)
    words = np.stack([index_to_message(i, q, k) @ G % q for i in pattern])
    v = encode_words(q, words).sum(axis=0)
    l1 = float(np.abs(v).sum())
    l2 = float(np.vdot(v, v).real)
    bound = n * (q - 1) * math.sqrt(L)
    return {"l2_norm_sq": l2, "l1_norm": l1}, {"l2_norm_sq": None, "l1_norm": l1 <= bound}


def _rank_trial(cfg, cell, seed):
    q, n, k = cell["q"], cell["n"], cell["k"]
    G = make_rng(seed).integers(0, q, size=(k, n), dtype=np.int64)
    r = rank_mod_q(G, q)
    return {"rank": float(r), "full_rank": float(r == k)}, {"rank": None, "full_rank": None}


def _concentration_trial(cfg, cell, seed):
    q, n, k, L = cell["q"], cell["n"], cell["k"], cell["L"]
    rng = make_rng(seed)
    code = LinearCode(q, rng.integers(0, q, size=(k, n), dtype=np.int64))
    words = codeword_matrix(code)
    center = cell["pilot_mean"]
    exact = subset_count(code.N, L) <= cfg.subset_budget
    if exact:
        dev = 0.0
        for block in iter_supports(code.N, L):
            dev = max(dev, float(np.abs(l1_norms(q, words, block) - center).max()))
    else:
        pats = _random_supports(rng, code.N, L, cfg.sample_patterns)
        dev = float(np.abs(l1_norms(q, words, pats) - center).max())
    D = dev / L
    scale = (q - 1) * math.sqrt(n * code.k * math.log(q))
    return (
        {"deviation": D, "c0_ratio": D / scale, "exact_max": float(exact)},
        {"deviation": None, "c0_ratio": None, "exact_max": None},
    )


def _sweep_trial(cfg, cell, seed):
    q, n, k, t = cell["q"], cell["n"], cell["k"], cell["t"]
    code = LinearCode(q, make_rng(seed).integers(0, q, size=(k, n), dtype=np.int64))
    prof = list_profile(code)
    got = int(prof.max_list[t])
    checks, violations = _Monitor(cfg.monitor_L, cfg.subset_budget).check(code, prof)
    list_bound = 4 / as_fraction(cell["epsilon"]) ** 2
    return (
        {"max_list": float(got), "monitor_checks": float(checks),
         "soundness_violations": float(len(violations))},
        {"max_list": got <= list_bound, "monitor_checks": None,
         "soundness_violations": not violations},
        violations,
    )


def _rm_puncture_trial(cfg, cell, seed):
    n, t, L = cell["n"], cell["t"], cell["L"]
    code = puncture(reed_muller(cfg.r, cfg.m), n, seed)
    prof = list_profile(code)
    got = int(prof.max_list[t])
    checks, violations = _Monitor(cfg.monitor_L, cfg.subset_budget).check(code, prof)
    return (
        {"max_list": float(got), "rank": float(rank_mod_q(code.G, 2)),
         "monitor_checks": float(checks), "soundness_violations": float(len(violations))},
        {"max_list": got <= L - 1, "rank": None, "monitor_checks": None,
         "soundness_violations": not violations},
        violations,
    )


_TRIALS: dict[str, Callable] = {
    "expectation": _expectation_trial,
    "rank": _rank_trial,
    "concentration": _concentration_trial,
    "sweep": _sweep_trial,
    "rm-puncture": _rm_puncture_trial,
}


def _random_supports(rng: np.random.Generator, N: int, L: int, count: int) -> np.ndarray:
    return np.stack([np.sort(rng.choice(N, size=L, replace=False)) for _ in range(count)])


def _run_one(args: tuple[ExperimentConfig, dict, int]) -> tuple[TrialRecord, list[dict]]:
    cfg, cell, trial = args
    seed = derive_seed(cfg.master_seed, trial)
    out = _TRIALS[cfg.kind](cfg, cell, seed)
    measures, passes = out[0], out[1]
    violations = out[2] if len(out) > 2 else []
    params = {k: cell[k] for k in ("q", "n", "k", "L", "epsilon", "t")}
    return TrialRecord(trial, seed, params, measures, passes), violations


def _pilot_mean(cfg: ExperimentConfig, cell_index: int, cell: dict) -> float:
    """Pooled mean of ``||Phi x||_1`` over fresh codes and random L-sets."""
    q, n, k, L = cell["q"], cell["n"], cell["k"], cell["L"]
    total = 0.0
    size = cfg.pilot_factor * cfg.trials
    for j in range(size):
        rng = make_rng(derive_seed(cfg.master_seed, PILOT_TAG, cell_index, j))
        G = rng.integers(0, q, size=(k, n), dtype=np.int64)
        idx = np.sort(rng.choice(q**k, size=L, replace=False))
        words = np.stack([index_to_message(int(i), q, k) @ G % q for i in idx])
        total += float(l1_norms(q, words, np.arange(L)[None, :])[0])
    return total / size


# ---------------------------------------------------------------- aggregation


def aggregate(records: list[TrialRecord]) -> list[dict[str, Any]]:
    """Per (cell, measure) statistics, in order of first appearance."""
    groups: dict[tuple, dict[str, Any]] = {}
    for rec in records:
        key_params = tuple(sorted(rec.params.items()))
        for name, value in rec.measures.items():
            g = groups.setdefault((key_params, name), {"params": dict(rec.params), "values": [], "passes": []})
            g["params"]["measure"] = name
            g["values"].append(value)
            p = rec.passes.get(name)
            if p is not None:
                g["passes"].append(bool(p))
    cells = []
    for g in groups.values():
        x = np.array(g["values"], dtype=float)
        n = x.size
        stderr = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        qs = np.quantile(x, QUANTILES)
        cells.append({
            "params": g["params"],
            "n_trials": n,
            "mean": float(x.mean()),
            "stderr": stderr,
            "quantiles": {str(p): float(v) for p, v in zip(QUANTILES, qs)},
            "success_prob": (sum(g["passes"]) / len(g["passes"])) if g["passes"] else None,
        })
    return cells


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def records_to_csv(kind: str, records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        p = rec.params
        for name, value in rec.measures.items():
            w.writerow([
                kind, rec.trial_index, rec.derived_seed, _fmt(p["q"]), _fmt(p["n"]),
                _fmt(p["k"]), _fmt(p["L"]), _fmt(p["epsilon"]), _fmt(p["t"]),
                name, _fmt(value), _fmt(rec.passes.get(name)),
            ])
    return buf.getvalue()


def _parse(v: str, conv: Callable) -> Any:
    return None if v == "" else conv(v)


def records_from_csv(text: str) -> list[TrialRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out: list[TrialRecord] = []
    for row in rows:
        trial = int(row["trial"])
        if not out or out[-1].trial_index != trial:
            params = {
                "q": _parse(row["q"], int), "n": _parse(row["n"], int), "k": _parse(row["k"], int),
                "L": _parse(row["L"], int), "epsilon": _parse(row["epsilon"], float),
                "t": _parse(row["t"], int),
            }
            out.append(TrialRecord(trial, int(row["seed"]), params, {}, {}))
        rec = out[-1]
        rec.measures[row["measure_name"]] = float(row["measure_value"])
        rec.passes[row["measure_name"]] = _parse(row["pass"], lambda s: s == "1")
    return out


# ---------------------------------------------------------------- drivers


def _execute(cfg: ExperimentConfig, cells: list[dict]) -> tuple[list[TrialRecord], list[dict]]:
    tasks = [(cfg, cell, ci * cfg.trials + j) for ci, cell in enumerate(cells) for j in range(cfg.trials)]
    if cfg.jobs == 1:
        results = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))
    records = [r for r, _ in results]
    violations = []
    for rec, vs in results:
        for v in vs:
            violations.append({"trial": rec.trial_index, "seed": rec.derived_seed, **v})
    return records, violations


def _fit_concentration(cells: list[dict], sweep_cells: list[dict]) -> dict[str, Any]:
    ns, Ds, scales, ratios = [], [], [], []
    for cell in cells:
        agg = next(c for c in sweep_cells
                   if c["params"]["measure"] == "deviation" and c["params"]["n"] == cell["n"])
        ns.append(cell["n"])
        Ds.append(agg["mean"])
        scale = (cell["q"] - 1) * math.sqrt(cell["n"] * cell["k"] * math.log(cell["q"]))
        scales.append(scale)
        ratios.append(agg["mean"] / scale)
    fit: dict[str, Any] = {"n": ns, "mean_deviation": Ds, "c0_by_n": ratios}
    if len(ns) >= 2 and all(d > 0 for d in Ds):
        fit["exponent_vs_n"] = float(np.polyfit(np.log(ns), np.log(Ds), 1)[0])
        fit["exponent_vs_sqrt_n_lnN"] = float(
            np.polyfit(np.log(np.array(scales) / (cells[0]["q"] - 1)), np.log(Ds), 1)[0]
        )
    fit["C0_estimate"] = float(max(ratios))
    return fit


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> SweepResult:
    cells = _cells(cfg)
    for c in cells:
        if cfg.kind == "rank" and c["k"] > c["n"]:
            log.info("k > n: every trial is rank-deficient")
    extras: dict[str, Any] = {}
    if cfg.kind == "concentration":
        for i, c in enumerate(cells):
            c["pilot_mean"] = _pilot_mean(cfg, i, c)
    skipped = []
    if cfg.kind in ("sweep", "rm-puncture"):
        runnable = []
        for c in cells:
            # cosets times codewords is q^n distance evaluations
            if c["q"] ** c["n"] > DEFAULT_PAIR_BUDGET:
                skipped.append({**c, "reason": "oracle budget"})
            else:
                runnable.append(c)
        cells = runnable
    records, violations = _execute(cfg, cells)
    sweep_cells = aggregate(records)
    if cfg.kind == "expectation":
        c = cells[0]
        extras["reference"] = {
            "l2_norm_sq": (c["q"] - 1) * c["n"] * c["L"],
            "l1_bound": c["n"] * (c["q"] - 1) * math.sqrt(c["L"]),
        }
    elif cfg.kind == "rank":
        c = cells[0]
        p = full_rank_probability(c["q"], c["k"], c["n"])
        extras["reference"] = {"full_rank_probability": float(p), "exact": str(p)}
    elif cfg.kind == "concentration":
        extras["pilot_means"] = {str(c["n"]): c["pilot_mean"] for c in cells}
        extras["fit"] = _fit_concentration(cells, sweep_cells)
        fit = extras["fit"]
        if fit["C0_estimate"] > 0:
            plans = [plan_parameters(0.5, c["q"], fit["C0_estimate"], c["k"]) for c in cells]
            extras["plan_check"] = {
                "epsilon": 0.5,
                "C0": fit["C0_estimate"],
                "plans": [p.to_json() for p in plans],
                "satisfied": all(p.satisfied for p in plans),
            }
    elif cfg.kind == "rm-puncture":
        extras["cells"] = [{k: c[k] for k in ("n", "k", "L", "epsilon", "t", "A")} for c in cells]
    if skipped:
        extras["skipped"] = skipped
    extras["monitor"] = {"violations": violations}
    result = SweepResult(cfg.echo(), sweep_cells, records, extras)
    if write and cfg.output:
        write_result(cfg, result)
    if violations:
        dump = Path(cfg.output).with_suffix(".violations.json") if cfg.output else None
        if dump is not None:
            dump.write_text(json.dumps(violations, indent=2) + "\n", encoding="utf-8")
        raise SoundnessViolation(f"{len(violations)} certified codes refuted; see {dump}")
    return result


def write_result(cfg: ExperimentConfig, result: SweepResult) -> None:
    out = Path(cfg.output)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(records_to_csv(cfg.kind, result.records))
    with open(out.with_suffix(".summary.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(result.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_expectation_check(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_with_kind(cfg, "expectation"))


def run_rank_check(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_with_kind(cfg, "rank"))


def run_concentration_probe(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_with_kind(cfg, "concentration"))


def run_decodability_sweep(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_with_kind(cfg, "sweep"))


def run_rm_puncture_experiment(
    r: int, m: int, rate_constant: float, epsilon: float, trials: int, seed: int, **kw: Any
) -> SweepResult:
    cfg = ExperimentConfig(
        kind="rm-puncture", r=r, m=m, rate_constant=rate_constant, epsilons=[epsilon],
        trials=trials, master_seed=seed, **kw,
    )
    return run_experiment(cfg)


def _with_kind(cfg: ExperimentConfig, kind: str) -> ExperimentConfig:
    if cfg.kind != kind:
        raise ValueError(f"config kind is {cfg.kind!r}, expected {kind!r}")
    return cfg
