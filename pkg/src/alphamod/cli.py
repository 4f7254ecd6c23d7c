"""Command-line front end.

Subcommands
-----------
``index``
    Exact index values and embedding verdicts.
``experiment``
    Run experiments from a JSON configuration and write reports.
``verify-covering``
    Build an alpha-covering and print its four-condition table.
``norm``
    Evaluate a space norm of a closed-form function.

Every command ends its output with one JSON line.  Exit codes: 0 when the
statement holds or every check passes, 3 when it fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import List, Optional

from . import __version__
from .errors import AlphamodError, CoveringGapError, DomainError
from .index_calculus import (ENDPOINT_CASES, Exponent, IndexQuery, SpaceParams, classify_region,
                             embeds_alpha_modulation, embeds_sequence, index_A, index_B,
                             parse_rational, verdict_endpoint, verdict_hardy_alpha)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 2, 3

STATEMENTS = ("A", "B", "hardy-to-mod", "mod-to-hardy", "L1-to-mod", "mod-to-L1", "Linf-to-mod",
              "mod-to-Linf", "alpha-embed", "seq-embed")


class UsageError(Exception):
    pass


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _exp(text) -> Exponent:
    try:
        return Exponent.of(text)
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad exponent {text!r}: {exc}") from exc


def _rat(text) -> Fraction:
    try:
        return parse_rational(text)
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# index


def cmd_index(args) -> int:
    stmt = args.stmt
    n = args.n
    out = {"command": "index", "statement": stmt, "n": n}
    alpha = _rat(args.alpha) if args.alpha is not None else Fraction(0)
    if stmt in ("A", "B"):
        _need(args, "p", "q")
        q = IndexQuery(_exp(args.p).recip, _exp(args.q).recip, n)
        value = index_A(q) if stmt == "A" else index_B(q)
        regions = sorted(classify_region(q, stmt))
        print(f"{stmt}(1/p={q.inv_p}, 1/q={q.inv_q}) = {value}")
        print(f"regions: {', '.join(regions)}")
        out.update({"value": str(value), "regions": regions, "holds": None})
        _emit(out)
        return EXIT_OK
    if stmt in ("hardy-to-mod", "mod-to-hardy"):
        if stmt == "hardy-to-mod":
            _need(args, "p1", "p2", "q2", "s2")
            hardy, sp = _exp(args.p1), SpaceParams(_exp(args.p2), _exp(args.q2), _rat(args.s2), alpha, n)
        else:
            _need(args, "p1", "q1", "s1", "p2")
            hardy, sp = _exp(args.p2), SpaceParams(_exp(args.p1), _exp(args.q1), _rat(args.s1), alpha, n)
        verdict = verdict_hardy_alpha(stmt.replace("-", "_"), hardy, sp)
    elif stmt in ("L1-to-mod", "mod-to-L1", "Linf-to-mod", "mod-to-Linf"):
        _need(args, "p", "q", "s")
        case = {"L1-to-mod": "L1_to_mod", "mod-to-L1": "mod_to_L1",
                "Linf-to-mod": "Linf_to_mod", "mod-to-Linf": "mod_to_Linf"}[stmt]
        assert case in ENDPOINT_CASES
        verdict = verdict_endpoint(case, SpaceParams(_exp(args.p), _exp(args.q), _rat(args.s), alpha, n))
    elif stmt == "alpha-embed":
        _need(args, "p1", "q1", "s1", "p2", "q2", "s2")
        sp1 = SpaceParams(_exp(args.p1), _exp(args.q1), _rat(args.s1), alpha, n)
        sp2 = SpaceParams(_exp(args.p2), _exp(args.q2), _rat(args.s2), alpha, n)
        holds = embeds_alpha_modulation(sp1, sp2)
        print("holds" if holds else "fails")
        out["holds"] = holds
        _emit(out)
        return EXIT_OK if holds else EXIT_FAIL
    elif stmt == "seq-embed":
        _need(args, "q1", "s1", "q2", "s2")
        holds = embeds_sequence(_exp(args.q1), _rat(args.s1), _exp(args.q2), _rat(args.s2), alpha, n)
        print("holds" if holds else "fails")
        out["holds"] = holds
        _emit(out)
        return EXIT_OK if holds else EXIT_FAIL
    else:  # argparse restricts the choices
        raise UsageError(f"unknown statement {stmt!r}")
    print(f"regions: {', '.join(sorted(verdict.region)) or '-'}")
    print(f"threshold: {verdict.threshold} ({'strict' if verdict.strict_required else 'non-strict'})")
    print(f"verdict: {'holds' if verdict.holds else 'fails'} ({verdict.detail})")
    out.update(verdict.to_dict())
    _emit(out)
    return EXIT_OK if verdict.holds else EXIT_FAIL


# ---------------------------------------------------------------------------
# experiment


def load_schema() -> dict:
    text = resources.files("alphamod").joinpath("schemas/run_config.schema.json").read_text()
    return json.loads(text)


def default_config_path() -> Path:
    return Path(str(resources.files("alphamod").joinpath("configs/default.json")))


def _check_alpha(value, where: str):
    try:
        a = parse_rational(value) if not isinstance(value, float) else Fraction(str(value))
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{where}: {exc}") from exc
    if not 0 <= a < 1:
        raise UsageError(f"{where}: alpha must lie in [0, 1), got {value}")


def validate_config(cfg: dict) -> None:
    """Schema validation plus the alpha range check JSON Schema cannot express for rationals.

    Raises
    ------
    UsageError
        Naming the offending field.
    """
    import jsonschema

    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"config field {path}: {exc.message}") from exc
    if "alpha" in cfg.get("covering", {}):
        _check_alpha(cfg["covering"]["alpha"], "config field covering/alpha")
    for name, block in cfg["experiments"].items():
        if "alpha" in block:
            _check_alpha(block["alpha"], f"config field experiments/{name}/alpha")
        for i, a in enumerate(block.get("alphas", [])):
            _check_alpha(a, f"config field experiments/{name}/alphas/{i}")


def _block_for(name: str, cfg: dict) -> dict:
    block = dict(cfg["experiments"].get(name, {}))
    block.pop("enabled", None)
    if name in ("plancherel", "young") and "grid" not in block and "grid" in cfg:
        block["grid"] = cfg["grid"]
    cov = cfg.get("covering", {})
    if name in ("partition", "plancherel"):
        block.setdefault("kmax", cov.get("kmax", 64))
    if name == "partition":
        for key in ("c", "C"):
            if cov.get(key) is not None:
                block.setdefault(key, cov[key])
    return block


def cmd_experiment(args) -> int:
    from .experiments import run_experiment, write_reports

    path = Path(args.config) if args.config else default_config_path()
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    validate_config(cfg)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    names = [n for n, b in cfg["experiments"].items() if b.get("enabled", True)]
    if args.only:
        if args.only not in cfg["experiments"]:
            raise UsageError(f"experiment {args.only!r} is not in the config")
        names = [args.only]
    out_root = Path(args.out or cfg.get("output_dir", "runs"))
    stamp = time.strftime("%Y%m%dT%H%M%S")
    summary = {}
    all_ok = True
    for name in names:
        block = _block_for(name, cfg)
        run_dir = out_root / f"{name}_{stamp}_seed{seed}"
        try:
            reports = run_experiment(name, block, seed)
        except AlphamodError as exc:
            print(f"{name}: error: {exc}", file=sys.stderr)
            summary[name] = {"passed": False, "error": str(exc)}
            all_ok = False
            continue
        write_reports(reports, run_dir, {"experiment": name, "seed": seed, "config": block})
        ok = all(r.passed for r in reports)
        all_ok = all_ok and ok
        for r in reports:
            print(f"{'PASS' if r.passed else 'FAIL'}  {name}: {r.name}")
        summary[name] = {"passed": ok, "dir": str(run_dir)}
    _emit({"command": "experiment", "seed": seed, "passed": all_ok, "experiments": summary})
    return EXIT_OK if all_ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify-covering


def cmd_verify_covering(args) -> int:
    from .decomposition import build_alpha_covering, covering_summary, verify_covering
    from .grid import Grid

    _check_alpha(args.alpha, "--alpha")
    grid = Grid(args.L, args.N) if args.L is not None and args.N is not None else None
    try:
        cov = build_alpha_covering(args.alpha, args.c, args.C, kmax=args.kmax, grid=grid)
    except CoveringGapError as exc:
        print(f"covering gap: {exc}")
        _emit({"command": "verify-covering", "passed": False, "error": "CoveringGapError", "detail": str(exc)})
        return EXIT_FAIL
    report = verify_covering(cov)
    print(f"alpha={cov.alpha_label} c={cov.inner:.6g} C={cov.outer:.6g} kmax={cov.kmax} "
          f"band={cov.covered_band:.6g}")
    print(f"{'condition':<22}{'result':<8}value")
    for name, cond in report.conditions.items():
        print(f"{name:<22}{'pass' if cond.passed else 'FAIL':<8}{cond.value:.6g}  {cond.detail}")
    summary = covering_summary(cov, report)
    _emit({"command": "verify-covering", "passed": report.all_passed, "report": summary["report"],
           "alpha": cov.alpha_label, "c": cov.inner, "C": cov.outer, "kmax": cov.kmax})
    return EXIT_OK if report.all_passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# norm


def cmd_norm(args) -> int:
    from .decomposition import build_alpha_covering, build_dyadic, kmax_for_band
    from .grid import Grid, lebesgue_norm, synthesize
    from .norms import alpha_modulation_norm, besov_norm, local_hardy_norm, triebel_norm

    try:
        desc = json.loads(args.function)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--function is not JSON: {exc}") from exc
    grid = Grid(args.L, args.N)
    f = synthesize(grid, desc)
    p = float(_exp(args.p).value) if not _exp(args.p).is_infinite else float("inf")
    q = _exp(args.q) if args.q is not None else None
    qf = None if q is None else (float("inf") if q.is_infinite else float(q.value))
    s = float(_rat(args.s)) if args.s is not None else 0.0
    if args.space == "lebesgue":
        value = lebesgue_norm(f, p)
    elif args.space == "alpha-modulation":
        _check_alpha(args.alpha, "--alpha")
        _need(args, "q")
        cov = build_alpha_covering(args.alpha, kmax=kmax_for_band(args.alpha, grid.nyquist), band=grid.nyquist)
        value = alpha_modulation_norm(f, p, qf, s, cov)
    else:
        dp = build_dyadic(None, grid)
        if args.space == "besov":
            _need(args, "q")
            value = besov_norm(f, p, qf, s, dp)
        elif args.space == "triebel":
            _need(args, "q")
            value = triebel_norm(f, p, qf, s, dp)
        else:
            value = local_hardy_norm(f, p, dp)
    print(f"{args.space} norm: {value:.12g}")
    _emit({"command": "norm", "space": args.space, "value": value})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alphamod", description="Alpha-modulation and local Hardy space laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ix = sub.add_parser("index", help="exact index values and embedding verdicts")
    ix.add_argument("--stmt", required=True, choices=STATEMENTS)
    for name in ("p", "q", "s", "p1", "q1", "s1", "p2", "q2", "s2"):
        ix.add_argument(f"--{name}", default=None, help="rational literal such as 1/2 or inf")
    ix.add_argument("--alpha", default=None, help="rational in [0, 1)")
    ix.add_argument("--n", type=int, default=1, help="dimension")
    ix.set_defaults(func=cmd_index)

    ex = sub.add_parser("experiment", help="run experiments from a configuration")
    ex.add_argument("config", nargs="?", default=None, help="JSON config; the packaged default when omitted")
    ex.add_argument("--only", default=None, help="run a single named experiment")
    ex.add_argument("--seed", type=int, default=None)
    ex.add_argument("--out", default=None, help="output root (overrides output_dir)")
    ex.set_defaults(func=cmd_experiment)

    vc = sub.add_parser("verify-covering", help="check the four covering conditions")
    vc.add_argument("--alpha", default="1/2")
    vc.add_argument("--c", type=float, default=None, help="inner ball constant")
    vc.add_argument("--C", type=float, default=None, help="outer ball constant")
    vc.add_argument("--kmax", type=int, default=64)
    vc.add_argument("--L", type=float, default=None, help="grid half width")
    vc.add_argument("--N", type=int, default=None, help="grid size")
    vc.set_defaults(func=cmd_verify_covering)

    nm = sub.add_parser("norm", help="space norm of a closed-form function")
    nm.add_argument("--function", required=True, help='JSON descriptor, e.g. {"kind": "gaussian"}')
    nm.add_argument("--space", default="lebesgue",
                    choices=("lebesgue", "alpha-modulation", "besov", "triebel", "local-hardy"))
    nm.add_argument("--p", default="2")
    nm.add_argument("--q", default=None)
    nm.add_argument("--s", default=None)
    nm.add_argument("--alpha", default="0")
    nm.add_argument("--L", type=float, default=256.0)
    nm.add_argument("--N", type=int, default=1 << 16)
    nm.set_defaults(func=cmd_norm)
    return parser


_NEGATIVE = re.compile(r"^-[0-9.]")


def _attach_negatives(argv: List[str]) -> List[str]:
    """Glue values such as ``-1/4`` to their option so argparse does not read them as flags."""
    out: List[str] = []
    for tok in argv:
        if out and _NEGATIVE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = _attach_negatives(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"command": args.command, "error": str(exc)})
        return EXIT_USAGE
    except AlphamodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"command": args.command, "error": str(exc)})
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
