"""Command-line front end: deterministic JSON artifacts for the worked example.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 computation error. Errors are also written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .brandt import hecke_matrix
from .errors import ConfigError, HilbertShimuraError
from .halfint import xi_range
from .numfield import FieldElement
from .pipeline import Example, load_config, verify_example
from .shimlift import level_check, xi_factor


def _write(out_dir: Path, name: str, data) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return path


def _parse_norms(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--prime-norms expects comma separated integers, got {text!r}")


def _parse_xi(text: str, D: int) -> FieldElement:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--xi expects a,b (meaning a + b w), got {text!r}")
    try:
        return FieldElement(int(parts[0]), int(parts[1]), D)
    except ValueError:
        raise ConfigError(f"--xi expects integers, got {text!r}")


def cmd_classes(ex: Example, args, out: Path) -> int:
    S = ex.S
    data = S.to_json()
    data["mass"] = str(sum(Fraction(1, w) for w in S.weights))
    if ex.I is not None:
        data["fixture_ideal_class"] = S.classify(ex.I)
    path = _write(out, "classes.json", data)
    print(f"{len(S)} classes -> {path}")
    return 0


def cmd_brandt(ex: Example, args, out: Path) -> int:
    norms = _parse_norms(args.prime_norms) if args.prime_norms else None
    if norms is None:
        primes = ex.good_primes(ex.cfg.prime_norm_bound)
        norms = sorted({P.norm for P in primes})
    for n in norms:
        primes = ex.primes_of_norms([n])
        if not primes:
            ideals = [I for I in ex.K.ideals_up_to(n) if I.norm() == n]
            if not ideals:
                raise ConfigError(f"no ideal of norm {n}")
            mats = [hecke_matrix(ex.S, I) for I in ideals]
        else:
            mats = list(ex.matrices(primes).values())
        data = {"norm": n, "matrices": [T.to_json() for T in mats], "column_sums": [T.column_sums() for T in mats]}
        path = _write(out, f"brandt_{n}.json", data)
        print(f"norm {n}: {len(mats)} matrices -> {path}")
    return 0


def cmd_theta(ex: Example, args, out: Path) -> int:
    T = ex.cfg.trace_bound
    v = ex.cusp_vector
    if T > ex.engine.table_bound:
        ex.engine.ensure_table(T)
    if T == 0:
        table = ex.theta(v, 0, xis=[])
    else:
        table = ex.theta(v, T, xis=xi_range(T, ex.K.D, include_zero=False))
    table.header.update({"class_vector": v.to_json(), "constant_term": str(v.degree())})
    label = "_".join(v.to_json())
    path = _write(out, f"theta_{label}.json", table.to_json())
    print(f"{len(table.entries)} coefficients -> {path}")
    return 0


def cmd_lift(ex: Example, args, out: Path) -> int:
    xi = _parse_xi(args.xi, ex.K.D) if args.xi else ex.first_lift_xi()
    if not xi.is_totally_positive():
        raise ConfigError(f"xi = {xi} is not totally positive")
    q, r = xi_factor(xi)
    lift = ex.lift(xi)
    try:
        alpha, residual = level_check(lift, ex.newform)
        alpha_s, residual_s = str(alpha), str(residual)
    except HilbertShimuraError:
        alpha_s, residual_s = None, None
    data = {
        "xi": xi.to_json(),
        "q": q.to_json(),
        "r": r.to_json(),
        "alpha": alpha_s,
        "entries": lift.to_json(),
        "even_residual": residual_s,
    }
    path = _write(out, f"lift_{xi}.json", data)
    print(f"lift at {xi}: alpha = {alpha_s}, even residual = {residual_s} -> {path}")
    return 0


def cmd_zeros(ex: Example, args, out: Path) -> int:
    rep = ex.zero_report()
    path = _write(out, f"zeros_T{rep.T}.json", rep.to_json())
    print(f"{len(rep.trivial)} trivial, {len(rep.nontrivial)} nontrivial zeros -> {path}")
    return 0


def cmd_verify(ex: Example, args, out: Path) -> int:
    report = verify_example(ex.cfg, log=print)
    path = _write(out, "verify_report.json", report)
    print(f"{'PASS' if report['ok'] else 'FAIL'} -> {path}")
    return 0 if report["ok"] else 1


COMMANDS = {
    "classes": cmd_classes,
    "brandt": cmd_brandt,
    "theta": cmd_theta,
    "lift": cmd_lift,
    "zeros": cmd_zeros,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hilbert-shimura", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (default: bundled example)")
    common.add_argument("--trace-bound", type=int, help="trace bound T for theta coefficients")
    common.add_argument("--norm-bound", type=int, help="norm bound for lift and newform series")
    common.add_argument("--prime-norms", help="comma separated norms for brandt")
    common.add_argument("--xi", help="lift discriminant a,b meaning a + b w")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="worker processes for Hecke matrices")
    common.add_argument("--seed", type=int, help="seed for the randomized cross-checks in verify")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _error(code: int, exc: BaseException) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = load_config(args.config, trace_bound=args.trace_bound, norm_bound=args.norm_bound,
                          out=args.out, workers=args.workers, seed=args.seed)
        ex = Example(cfg)
        return COMMANDS[args.command](ex, args, Path(cfg.out))
    except ConfigError as exc:
        return _error(2, exc)
    except (HilbertShimuraError, ArithmeticError) as exc:
        return _error(3, exc)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
