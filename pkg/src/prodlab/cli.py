"""Batch front end: instance generators and suite runners.

Exit codes: 0 all assertions passed, 2 an assertion failed, 3 a budget was
exceeded, 4 a usage or parameter error.  With a fixed seed every run is
fully deterministic, including across worker-thread counts.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds, dirichlet, energy, structure, sunit
from . import sets as setops
from .errors import DEFAULT_SAMPLE_BUDGET, DEFAULT_TUPLE_BUDGET, BudgetError, ProdlabError
from .primes import first_primes
from .rationals import FactoredRational
from .sets import RationalSet, read_set_file, write_set_file

EXIT_OK = 0
EXIT_ASSERTION = 2
EXIT_BUDGET = 3
EXIT_USAGE = 4

OUTPUT_DIR_ENV = "PRODLAB_OUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    set_paths: list[str] = field(default_factory=list)
    k: int = 2
    shift: str = "1"
    tuple_budget: int = DEFAULT_TUPLE_BUDGET
    sample_budget: int = DEFAULT_SAMPLE_BUDGET
    seed: int = 0
    threads: int = 1
    out_dir: str = "."
    fmt: str = "json"


def _json_dump(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _parse_primes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"bad prime list {text!r}") from None


def _parse_box(text: str) -> list[tuple[int, int]]:
    box = []
    for part in text.split(","):
        lo, sep, hi = part.partition("..")
        if not sep:
            raise UsageError(f"bad exponent range {part!r}, expected lo..hi")
        try:
            box.append((int(lo), int(hi)))
        except ValueError:
            raise UsageError(f"bad exponent range {part!r}") from None
    return box


def _out_path(cfg: RunConfig, name: str) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _load_set(cfg: RunConfig) -> RationalSet:
    if not cfg.set_paths:
        raise UsageError("this suite needs --set")
    path = cfg.set_paths[0]
    if not os.path.exists(path):
        raise UsageError(f"set file {path} does not exist")
    return read_set_file(path)


def _cmd_gen(args) -> int:
    out = args.out or f"{args.kind}.txt"
    if args.kind == "ggp":
        primes = _parse_primes(args.primes)
        box = _parse_box(args.box)
        if len(primes) != len(box):
            raise UsageError("need one exponent range per prime")
        A = setops.ggp(primes, box, budget=args.tuple_budget)
        header = f"ggp primes={args.primes} box={args.box}"
    elif args.kind == "primes":
        if args.count < 1:
            raise UsageError("--count must be positive")
        A = RationalSet.from_integers(first_primes(args.count))
        header = f"primes count={args.count}"
    elif args.kind == "random-subset":
        if not args.source:
            raise UsageError("random-subset needs --from")
        if not os.path.exists(args.source):
            raise UsageError(f"set file {args.source} does not exist")
        parent = read_set_file(args.source)
        if args.size > len(parent):
            raise UsageError(
                f"subset size {args.size} exceeds parent size {len(parent)}"
            )
        rng = random.Random(args.seed)
        A = RationalSet(rng.sample(parent.elements, args.size))
        header = f"random-subset from={args.source} size={args.size} seed={args.seed}"
    else:
        raise UsageError(f"unknown generator {args.kind!r}")
    write_set_file(out, A, header=header)
    print(f"wrote {len(A)} elements to {out}")
    return EXIT_OK


def _suite_energy(cfg: RunConfig, A: RationalSet) -> tuple[dict, bool]:
    table = energy.gamma_k(A, cfg.k, budget=cfg.tuple_budget, threads=cfg.threads)
    e = sum(c * c for c in table.entries.values())
    product = setops.k_fold_product(A, cfg.k, budget=cfg.tuple_budget, threads=cfg.threads)
    ok_trivial = e >= len(A) ** cfg.k
    ok_cs = e * len(product) >= len(A) ** (2 * cfg.k)
    with open(_out_path(cfg, "gamma.csv"), "w", encoding="utf-8") as fh:
        table.to_csv(fh)
    report = {
        "schema": "prodlab.energy_run/1",
        "k": cfg.k,
        "set_size": len(A),
        "energy": str(e),
        "product_set_size": len(product),
        "checks": {"trivial_lower": ok_trivial, "cauchy_schwarz": ok_cs},
    }
    print(f"E_{cfg.k} = {e}, |A^({cfg.k})| = {len(product)}")
    return report, ok_trivial and ok_cs


def _suite_lambda(cfg: RunConfig, A: RationalSet) -> tuple[dict, bool]:
    est = bounds.lambda_lower_estimate(
        A, cfg.k, seed=cfg.seed, budget=cfg.tuple_budget, threads=cfg.threads
    )
    check = energy.weighted_energy(A, cfg.k, est.witness, budget=cfg.tuple_budget)
    ok = abs(check ** (1.0 / cfg.k) - est.value) <= 1e-9 * max(1.0, est.value)
    report = est.to_json_dict()
    report["witness_reproduces_value"] = ok
    print(f"lambda_{cfg.k} >= {est.value:.9f}  (converged={est.converged})")
    return report, ok


def _suite_bounds(cfg: RunConfig, A: RationalSet) -> tuple[dict, bool]:
    verify = bounds.verify_bounds(
        A, cfg.k, FactoredRational.parse(cfg.shift),
        budget=cfg.tuple_budget, threads=cfg.threads,
    )
    report_b, est = bounds.sandwich_check(
        A, cfg.k, FactoredRational.parse(cfg.shift),
        seed=cfg.seed, budget=cfg.tuple_budget, threads=cfg.threads,
    )
    ok = verify.passed and bool(report_b.passed)
    report = {
        "schema": "prodlab.bounds_run/1",
        "verify": verify.to_json_dict(),
        "sandwich": report_b.to_json_dict(),
        "estimate": est.to_json_dict(),
    }
    print(f"K = {verify.K_integer}, E_k(A+{cfg.shift}) = {verify.shifted_energy}, "
          f"|(A+{cfg.shift})^({cfg.k})| = {verify.shifted_product_size}")
    for name, passed in verify.checks.items():
        print(f"  {name}: {'ok' if passed else 'FAIL'}")
    print(f"  sandwich lambda<=bound: {'ok' if report_b.passed else 'FAIL'}")
    return report, ok


def _suite_dirichlet(cfg: RunConfig, A: RationalSet, T_list, plot: bool) -> tuple[dict, bool]:
    w = energy.WeightVector.uniform(A)
    f = dirichlet.build(A, w, FactoredRational.parse(cfg.shift) if cfg.shift != "0" else 0)
    rep = dirichlet.convergence_report(
        f, cfg.k, T_list,
        sample_budget=cfg.sample_budget, budget=cfg.tuple_budget, threads=cfg.threads,
    )
    with open(_out_path(cfg, "dirichlet.csv"), "w", encoding="utf-8") as fh:
        rep.to_csv(fh)
    if plot:
        with open(_out_path(cfg, "dirichlet.dat"), "w", encoding="utf-8") as fh:
            for row in rep.rows:
                fh.write(f"{row.T!r} {row.abs_error!r}\n")
    slope = rep.slope
    ok = slope is None or slope <= 0.0
    report = {
        "schema": "prodlab.dirichlet_run/1",
        "k": cfg.k,
        "rows": [
            {"T": repr(r.T), "numeric": repr(r.numeric), "exact": repr(r.exact),
             "abs_error": repr(r.abs_error)}
            for r in rep.rows
        ],
        "slope": None if slope is None else repr(slope),
        "checks": {"error_trend_nonincreasing": ok},
    }
    for r in rep.rows:
        print(f"T={r.T:g}: numeric={r.numeric:.9f} exact={r.exact:.9f} err={r.abs_error:.3g}")
    return report, ok


def _suite_sunit(cfg: RunConfig, args) -> tuple[dict, bool]:
    inst = sunit.SUnitInstance(
        _parse_primes(args.primes),
        args.height,
        FactoredRational.parse(args.c1),
        FactoredRational.parse(args.c2),
    )
    sol = sunit.solve(inst, budget=cfg.tuple_budget, threads=cfg.threads)
    diag = sunit.bound_diagnostic(sol)
    ok = True
    if inst.candidate_count**2 <= cfg.tuple_budget:
        oracle = sunit.solve_oracle(inst, budget=cfg.tuple_budget)
        ok = oracle.pairs == sol.pairs
    with open(_out_path(cfg, "solutions.csv"), "w", encoding="utf-8") as fh:
        sol.to_csv(fh)
    report = {
        "schema": "prodlab.sunit_run/1",
        "primes": list(inst.primes),
        "height": inst.height,
        "c1": str(inst.c1),
        "c2": str(inst.c2),
        "count": sol.count,
        "pairs": [[str(a), str(b)] for a, b in sol.pairs],
        "diagnostic": diag.to_json_dict(),
        "checks": {"oracle_agreement": ok},
    }
    print(f"{sol.count} solutions at height {inst.height} over primes {list(inst.primes)}")
    return report, ok


def _suite_claim(cfg: RunConfig, A: RationalSet) -> tuple[dict, bool]:
    rep = structure.check_collision_claim(A, cfg.k, budget=cfg.tuple_budget)
    report = rep.to_json_dict()
    print(f"{len(rep.groups)} groups, {rep.total_collisions} collisions, "
          f"{rep.total_violations} violations")
    return report, rep.passed


def _suite_dimension(cfg: RunConfig, A: RationalSet) -> tuple[dict, bool]:
    image = structure.valuation_image(A)
    form = structure.canonical_affine_form(image)
    check = structure.dimension_doubling_check(
        A, budget=cfg.tuple_budget, threads=cfg.threads
    )
    decomposition = structure.sign_pattern_decompose(image.rows)
    ok = check.passed is not False
    report = {
        "schema": "prodlab.dimension_run/1",
        "dimension": check.dimension,
        "canonical_form": form.to_json_dict(),
        "doubling_check": check.to_json_dict(),
        "sign_patterns": decomposition.to_json_dict(),
    }
    print(f"dimension = {check.dimension}, K = {check.K_integer}, "
          f"threshold = {check.threshold}, applicable = {check.applicable}")
    return report, ok


def _cmd_run(args) -> int:
    cfg = RunConfig(
        command=args.suite,
        set_paths=[args.set] if args.set else [],
        k=args.k,
        shift=args.shift,
        tuple_budget=args.tuple_budget,
        sample_budget=args.sample_budget,
        seed=args.seed,
        threads=args.threads,
        out_dir=args.out_dir,
        fmt=args.format,
    )
    if args.suite == "sunit":
        if not args.primes:
            raise UsageError("sunit needs --primes")
        report, ok = _suite_sunit(cfg, args)
    else:
        A = _load_set(cfg)
        if args.suite == "energy":
            report, ok = _suite_energy(cfg, A)
        elif args.suite == "lambda":
            report, ok = _suite_lambda(cfg, A)
        elif args.suite == "bounds":
            report, ok = _suite_bounds(cfg, A)
        elif args.suite == "dirichlet":
            T_list = [float(t) for t in args.T.split(",")]
            report, ok = _suite_dirichlet(cfg, A, T_list, args.plot)
        elif args.suite == "claim":
            report, ok = _suite_claim(cfg, A)
        elif args.suite == "dimension":
            report, ok = _suite_dimension(cfg, A)
        else:
            raise UsageError(f"unknown suite {args.suite!r}")
    _json_dump(report, _out_path(cfg, f"{args.suite}.json"))
    if not ok:
        print("FAILED: see report for counterexample details")
        return EXIT_ASSERTION
    print("all checks passed")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="prodlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a set file")
    gen.add_argument("kind", choices=["ggp", "primes", "random-subset"])
    gen.add_argument("--primes", default="2,3")
    gen.add_argument("--box", default="0..1,0..1")
    gen.add_argument("--count", type=int, default=3)
    gen.add_argument("--from", dest="source", default=None)
    gen.add_argument("--size", type=int, default=4)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.add_argument("--tuple-budget", type=int, default=DEFAULT_TUPLE_BUDGET)

    run = sub.add_parser("run", help="run a verification suite")
    run.add_argument(
        "suite",
        choices=["energy", "lambda", "bounds", "dirichlet", "sunit", "claim", "dimension"],
    )
    run.add_argument("--set", default=None)
    run.add_argument("--k", type=int, default=2)
    run.add_argument("--shift", default="1")
    run.add_argument("--T", default="10,100,1000")
    run.add_argument("--plot", action="store_true")
    run.add_argument("--primes", default=None)
    run.add_argument("--height", type=int, default=2)
    run.add_argument("--c1", default="1")
    run.add_argument("--c2", default="1")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--tuple-budget", type=int, default=DEFAULT_TUPLE_BUDGET)
    run.add_argument("--sample-budget", type=int, default=DEFAULT_SAMPLE_BUDGET)
    run.add_argument("--format", choices=["json", "csv"], default="json")
    run.add_argument(
        "--out-dir", default=os.environ.get(OUTPUT_DIR_ENV, "."),
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen":
            return _cmd_gen(args)
        return _cmd_run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ProdlabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    raise SystemExit(main())
