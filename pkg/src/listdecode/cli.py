"""Command-line interface.

JSON results go to stdout, human-readable tables to stderr under ``--verbose``.
Exit codes: 0 success, 1 domain failure (certificate does not hold, code not
decodable, soundness violation), 2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import defaultdict
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from listdecode.certify import (
    DEFAULT_SUBSET_BUDGET,
    avg_distance_certificate,
    l1_certificate,
    plan_parameters,
    rip_constant,
)
from listdecode.code import (
    DEFAULT_ENUM_BUDGET,
    load_gen,
    puncture,
    random_generator,
    reed_muller,
    save_gen,
    wozencraft,
)
from listdecode.errors import ListDecodeError, SizeOverBudget
from listdecode.experiment import KIND_ALIASES, ExperimentConfig, SoundnessViolation, run_experiment
from listdecode.oracle import is_list_decodable, worst_case_list_size

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(_jsonable(obj), sort_keys=True) + "\n")


def _table(args: argparse.Namespace, rows: list[tuple[str, Any]]) -> None:
    if args.verbose:
        width = max(len(k) for k, _ in rows)
        for k, v in rows:
            print(f"{k:<{width}}  {v}", file=sys.stderr)


# ---------------------------------------------------------------- gen


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.family == "random":
        code = random_generator(args.q, args.k, args.n, args.seed)
    elif args.family == "rm":
        code = reed_muller(args.r, args.m)
    elif args.family == "wozencraft":
        code = wozencraft(args.k, args.r, args.seed, int(args.modulus, 0))
    else:
        code = puncture(load_gen(args.code), args.n, args.seed, retain=args.retain)
    save_gen(code, args.out)
    _emit({"q": code.q, "k": code.k, "n": code.n, "out": str(args.out)})
    _table(args, [("q", code.q), ("k", code.k), ("n", code.n)])
    return EXIT_OK


# ---------------------------------------------------------------- check-ld


def _cmd_check_ld(args: argparse.Namespace) -> int:
    code = load_gen(args.code)
    if args.L is None:
        rep = worst_case_list_size(code, args.t, args.method, args.budget)
        _emit(rep.to_json())
        _table(args, [("t", rep.t), ("max_list", rep.max_list), ("witness", rep.witness)])
        return EXIT_OK
    res = is_list_decodable(code, args.t, args.L, args.method, args.budget)
    out = {"t": args.t, "L": args.L, "max_list": res.max_list, "decodable": res.decodable,
           "method": args.method,
           "witness": None if res.witness is None else list(res.witness)}
    _emit(out)
    _table(args, [("t", args.t), ("L", args.L), ("max_list", res.max_list),
                  ("decodable", res.decodable)])
    return EXIT_OK if res.decodable else EXIT_DOMAIN


# ---------------------------------------------------------------- cert


def _cmd_cert(args: argparse.Namespace) -> int:
    code = load_gen(args.code)
    if args.kind == "l1":
        cert = l1_certificate(code, args.L, args.epsilon, args.budget, args.mode)
        out = cert.to_json()
        out["radius"] = cert.radius
        _emit(out)
        _table(args, [("value", cert.value), ("threshold", cert.threshold),
                      ("verdict", cert.verdict), ("radius", cert.radius)])
        return EXIT_OK if cert.verdict == "holds" else EXIT_DOMAIN
    if args.kind == "rip":
        rep = rip_constant(code, args.L, args.budget)
        _emit(rep.to_json())
        _table(args, [("s", rep.s), ("delta", rep.delta), ("witness", rep.witness)])
        return EXIT_OK
    cert = avg_distance_certificate(code, args.L, args.budget)
    _emit(cert.to_json())
    _table(args, [("min_avg_distance", cert.min_avg_distance), ("eta", cert.eta),
                  ("epsilon_sq", cert.epsilon_sq)])
    return EXIT_DOMAIN if cert.vacuous else EXIT_OK


# ---------------------------------------------------------------- plan


def _cmd_plan(args: argparse.Namespace) -> int:
    plan = plan_parameters(args.epsilon, args.q, args.c0, args.k)
    out = plan.to_json()
    out["satisfied"] = plan.satisfied
    _emit(out)
    _table(args, [(k, v) for k, v in out.items()])
    return EXIT_OK if plan.satisfied else EXIT_DOMAIN


# ---------------------------------------------------------------- exp


def _cmd_exp(args: argparse.Namespace) -> int:
    with open(args.config, encoding="utf-8") as fh:
        raw = json.load(fh)
    raw["master_seed"] = args.seed
    raw["jobs"] = args.jobs
    if args.out is not None:
        raw["output"] = str(args.out)
    cfg = ExperimentConfig.from_dict(raw)
    want = KIND_ALIASES.get(args.kind.replace("-", "_"), args.kind)
    if cfg.kind != want:
        raise ValueError(f"config kind {cfg.kind!r} does not match subcommand {args.kind!r}")
    try:
        result = run_experiment(cfg)
    except SoundnessViolation as exc:
        print(f"soundness violation: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(result.to_json())
    if args.verbose:
        for c in result.cells:
            p = {k: v for k, v in c["params"].items() if v is not None}
            print(f"{p}  mean={c['mean']:.6g}  se={c['stderr']:.3g}  "
                  f"success={c['success_prob']}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- plot

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def render_svg(csv_text: str, width: int = 640, panel_height: int = 180) -> str:
    """One panel per measure: per-cell means (with min and max) against cell order.

    The output depends only on the CSV content.
    """
    groups: dict[str, dict[tuple, list[float]]] = defaultdict(dict)
    for row in csv.DictReader(csv_text.splitlines()):
        key = tuple(row[c] for c in ("q", "n", "k", "L", "epsilon", "t"))
        groups[row["measure_name"]].setdefault(key, []).append(float(row["measure_value"]))
    margin, gap = 60, 40
    height = max(1, len(groups)) * (panel_height + gap) + gap
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    for p, (name, cells) in enumerate(groups.items()):
        top = gap + p * (panel_height + gap)
        keys = list(cells)
        lo = min(min(v) for v in cells.values())
        hi = max(max(v) for v in cells.values())
        if hi == lo:
            hi, lo = hi + 1, lo - 1
        plot_w = width - 2 * margin

        def X(i: int) -> float:
            return margin + (plot_w * (i + 0.5) / len(keys))

        def Y(v: float) -> float:
            return top + panel_height - panel_height * (v - lo) / (hi - lo)

        color = _PALETTE[p % len(_PALETTE)]
        out.append(f'<text x="{margin}" y="{top - 8}" font-family="sans-serif" '
                   f'font-size="12">{_escape(name)}</text>')
        out.append(f'<rect x="{margin}" y="{top}" width="{plot_w}" height="{panel_height}" '
                   'fill="none" stroke="black"/>')
        out.append(f'<text x="{margin - 4}" y="{top + 10}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{hi:.4g}</text>')
        out.append(f'<text x="{margin - 4}" y="{top + panel_height}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{lo:.4g}</text>')
        pts = []
        for i, key in enumerate(keys):
            v = cells[key]
            mean = sum(v) / len(v)
            x = X(i)
            out.append(f'<line x1="{x:.2f}" y1="{Y(min(v)):.2f}" x2="{x:.2f}" '
                       f'y2="{Y(max(v)):.2f}" stroke="{color}" stroke-opacity="0.4"/>')
            out.append(f'<circle cx="{x:.2f}" cy="{Y(mean):.2f}" r="3" fill="{color}"/>')
            label = ",".join(f"{c}={s}" for c, s in zip(("n", "k", "eps"), (key[1], key[2], key[4])) if s)
            out.append(f'<text x="{x:.2f}" y="{top + panel_height + 14}" text-anchor="middle" '
                       f'font-family="sans-serif" font-size="9">{_escape(label)}</text>')
            pts.append(f"{x:.2f},{Y(mean):.2f}")
        if len(pts) > 1:
            out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _cmd_plot(args: argparse.Namespace) -> int:
    text = Path(args.csv).read_text(encoding="utf-8")
    svg = render_svg(text)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    _emit({"out": str(args.out)})
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="listdecode", description=__doc__.splitlines()[0])
    ap.add_argument("--verbose", action="store_true", help="print tables to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a generator matrix to a .gen file")
    fam = gen.add_subparsers(dest="family", required=True)
    g = fam.add_parser("random")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g = fam.add_parser("rm")
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g = fam.add_parser("wozencraft")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--r", type=int, required=True, help="number of random multipliers")
    g.add_argument("--modulus", default="0", help="irreducible modulus; 0 uses the default")
    g.add_argument("--seed", type=int, required=True)
    g = fam.add_parser("puncture")
    g.add_argument("--code", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--retain", action="store_true", help="keep each coordinate with probability n/n_in")
    g.add_argument("--seed", type=int, required=True)
    for p in fam.choices.values():
        p.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    c = sub.add_parser("check-ld", help="exact worst-case list size")
    c.add_argument("--code", required=True)
    c.add_argument("--t", type=int, required=True)
    c.add_argument("--L", type=int)
    c.add_argument("--method", choices=("coset", "exhaustive"), default="coset")
    c.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    c.set_defaults(func=_cmd_check_ld)

    cert = sub.add_parser("cert", help="matrix certificates")
    kinds = cert.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("l1")
    k.add_argument("--L", type=int, required=True)
    k.add_argument("--epsilon", type=float, required=True)
    k.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    k = kinds.add_parser("rip")
    k.add_argument("--L", "--s", dest="L", type=int, required=True, help="sparsity")
    k = kinds.add_parser("avgdist")
    k.add_argument("--L", type=int, required=True)
    for p in kinds.choices.values():
        p.add_argument("--code", required=True)
        p.add_argument("--budget", type=int, default=DEFAULT_SUBSET_BUDGET)
    cert.set_defaults(func=_cmd_cert)

    p = sub.add_parser("plan", help="parameters satisfying the certificate inequality")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_plan)

    e = sub.add_parser("exp", help="seeded Monte Carlo experiments")
    e.add_argument("kind", choices=("expectation", "rank", "concentration", "sweep", "rm-puncture"))
    e.add_argument("--config", required=True)
    e.add_argument("--seed", type=int, required=True, help="master seed; overrides the config")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--out", help="CSV path; the JSON summary goes next to it")
    e.set_defaults(func=_cmd_exp)

    p = sub.add_parser("plot", help="SVG summary of an experiment CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeOverBudget as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ListDecodeError, ValueError, OSError, IndexError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
