"""Command-line surface for the toolkit.

One executable, eight subcommands: digit generation (logdigits), quotient
extraction (cf), the gate scan (scan), multi-row reproduction (table), the
power-sum solver (solve), factor-count bounds (omega), tracked prime
profiles (primes), and the self-check suites (verify).

Every report embeds a manifest recording the command, its configuration,
the sha256 of any cached artifact used, the outcome, and the wall time.
Reports are deterministic byte for byte apart from the wall-time field:
derived reals are printed as decimal strings, never binary floats, and
mantissas are truncated rather than rounded so emitted bounds are always
safe to quote.

Exit codes: 0 success/accepted, 1 failed checks or corrupt cache,
2 budget exhaustion or usage errors.
"""

from __future__ import annotations

import argparse
import decimal
import json
import shutil
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from decimal import Decimal
from pathlib import Path

from . import arithmetic, asymptotics, cfengine, logcomp, scanner
from . import omega as omega_mod
from . import verify as verify_mod
from .cache import ArtifactCache, CacheCorruptionError, default_cache_dir

__all__ = ["main"]


# ---------------------------------------------------------------------------
# small shared helpers


def _parse_n(text: str) -> int:
    """Parse N given plainly (768) or factored (2^8*3)."""
    total = 1
    for factor in text.replace(" ", "").split("*"):
        if not factor:
            raise ValueError(f"empty factor in {text!r}")
        base, _, exp = factor.partition("^")
        b = int(base)
        e = int(exp) if exp else 1
        if b < 1 or e < 0:
            raise ValueError(f"bad factor {factor!r}")
        total *= b**e
    if total < 1:
        raise ValueError(f"N must be positive, got {text!r}")
    return total


def _factor_label(N: int) -> str:
    """Render N as 2^a*3^b*5^c when it factors that way, else plainly."""
    parts = []
    rest = N
    for p in (2, 3, 5):
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        if e == 1:
            parts.append(str(p))
        elif e > 1:
            parts.append(f"{p}^{e}")
    if rest != 1 or not parts:
        return str(N)
    return "*".join(parts)


def _manifest(command: str, config: dict, artifacts: dict, outcome: str, started: float) -> dict:
    return {
        "command": command,
        "config": config,
        "artifacts": artifacts,
        "outcome": outcome,
        "wall_time_s": f"{time.perf_counter() - started:.3f}",
    }


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _manifest_line(man: dict) -> str:
    arts = " ".join(f"{k}={v[:12]}" for k, v in sorted(man["artifacts"].items()))
    return f"manifest: command={man['command']} {arts} outcome={man['outcome']} wall={man['wall_time_s']}s"


def _open_cache(args) -> ArtifactCache | None:
    if args.no_cache:
        return None
    return ArtifactCache(args.cache_dir or default_cache_dir())


def _fmt(x, sig: int) -> str:
    """Scientific decimal string with sig significant digits."""
    sig = max(sig, 2)
    if x == 0:
        return "0"
    ds, exp, _ = x.digits(10, sig)
    sign = ""
    if ds.startswith("-"):
        sign, ds = "-", ds[1:]
    return f"{sign}{ds[0]}.{ds[1:]}e{exp - 1}"


# ---------------------------------------------------------------------------
# scan plumbing shared by scan and table


def _scan_pipeline(cfg: scanner.ScanConfig, cache: ArtifactCache | None, cf_method: str):
    """Run a scan, serving and feeding the cache when one is given."""
    artifacts = {}
    quotients = None
    if cache is not None:
        try:
            quotients, cfsha, dsha = cache.get_cf(2 * cfg.N, cfg.digit_budget, method=cf_method)
            artifacts = {"digits": dsha, "quotients": cfsha}
        except (logcomp.DigitBudgetError, cfengine.EmptyCertificationError):
            quotients = None  # run_scan reports the same condition canonically
    result = scanner.run_scan(cfg, quotients=quotients, cf_method=cf_method)
    return result, artifacts


def _row_payload(res: scanner.ScanResult) -> dict:
    """Table-style summary of one scan: the first gate-passing row."""
    out = {
        "N": res.config.N,
        "label": _factor_label(res.config.N),
        "status": "ok" if res.candidates else "budget_exhausted",
        "accepted": res.accepted is not None,
        "log10_m_bound": res.log10_m_bound,
    }
    if res.candidates:
        first = res.candidates[0]
        out.update(
            j=first.j,
            a_next=first.a_next,
            q=f"{first.q_mantissa}e{first.q_exponent}",
            q_mod6=first.q_mod6,
            violating_prime=first.violating_prime,
        )
    if res.exhausted:
        out["reason"] = res.reason or "certified prefix exhausted"
    return out


def _candidate_payload(row: scanner.TableRow) -> dict:
    return {
        "j": row.j,
        "a_next": row.a_next,
        "q": f"{row.q_mantissa}e{row.q_exponent}",
        "q_mod6": row.q_mod6,
        "violating_prime": row.violating_prime,
    }


_TABLE_HEADER = f"{'N':<12} {'j':>10} {'a_(j+1)':>12}  {'q_j':<22} {'mod 6':>5}  p"


def _table_line(row: dict) -> str:
    if row["status"] != "ok":
        return f"{row['label']:<12} -- {row['status']}: {row.get('reason', '')}"
    prime = "" if row["violating_prime"] is None else str(row["violating_prime"])
    mod = f"+{row['q_mod6']}" if row["q_mod6"] > 0 else str(row["q_mod6"])
    return (
        f"{row['label']:<12} {row['j']:>10} {row['a_next']:>12}  "
        f"{row['q']:<22} {mod:>5}  {prime}"
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_logdigits(args) -> int:
    started = time.perf_counter()
    config = {"digits": args.digits, "method": args.method}
    cache = _open_cache(args)
    artifacts = {}
    try:
        if cache is not None and args.method == "auto":
            iv, sha = cache.get_log2(args.digits)
            artifacts["digits"] = sha
            stored = cache.digit_file(cache.find_digits(args.digits))
        else:
            iv = logcomp.compute_log2(args.digits, method=args.method)
            sha, stored = None, None
    except logcomp.DigitBudgetError as exc:
        report = {
            "constant": "log2",
            "error": str(exc),
            "manifest": _manifest("logdigits", config, {}, "budget_exhausted", started),
        }
        _emit_simple(report, args, [f"budget exhausted: {exc}"])
        return 2

    if args.out:
        if stored is not None:
            shutil.copyfile(stored, args.out)
        else:
            sha = logcomp.write_digit_file(args.out, "log2", iv)
    preview = logcomp.interval_digit_string(iv, min(60, iv.digits_valid))
    report = {
        "constant": "log2",
        "digits_valid": iv.digits_valid,
        "preview": "0." + preview,
        "sha256": sha,
        "file": str(args.out) if args.out else (str(stored) if stored else None),
        "manifest": _manifest("logdigits", config, artifacts, "ok", started),
    }
    _emit_simple(report, args, [
        f"log 2 to {iv.digits_valid} certified digits",
        f"starts 0.{preview}...",
        f"file: {report['file']}" if report["file"] else "not written to disk",
    ])
    return 0


def cmd_cf(args) -> int:
    started = time.perf_counter()
    config = {"digits": args.digits, "denominator": args.denominator, "cf_method": args.cf_method}
    cache = _open_cache(args)
    artifacts = {}
    try:
        if cache is not None:
            pq, cfsha, dsha = cache.get_cf(args.denominator, args.digits, method=args.cf_method)
            artifacts = {"digits": dsha, "quotients": cfsha}
        else:
            iv = logcomp.compute_log2(args.digits)
            scaled = logcomp.scale_interval(iv, args.denominator) if args.denominator != 1 else iv
            pq = cfengine.cf_certified(scaled, method=args.cf_method)
    except logcomp.DigitBudgetError as exc:
        report = {"error": str(exc),
                  "manifest": _manifest("cf", config, {}, "budget_exhausted", started)}
        _emit_simple(report, args, [f"budget exhausted: {exc}"])
        return 2
    except cfengine.EmptyCertificationError as exc:
        report = {"error": str(exc),
                  "manifest": _manifest("cf", config, {}, "no_certified_terms", started)}
        _emit_simple(report, args, [f"no certified terms: {exc}"])
        return 2

    report = {
        "constant": f"log2/{args.denominator}" if args.denominator != 1 else "log2",
        "certified_count": pq.certified_count,
        "terms_preview": list(pq.terms[:12]),
        "manifest": _manifest("cf", config, artifacts, "ok", started),
    }
    _emit_simple(report, args, [
        f"{pq.certified_count} certified partial quotients of {report['constant']}",
        f"starts {list(pq.terms[:12])}",
    ])
    return 0


def cmd_scan(args) -> int:
    started = time.perf_counter()
    N = _parse_n(args.N)
    cfg = scanner.ScanConfig(N=N, digit_budget=args.digits, prime_bound=args.prime_bound)
    config = {"N": N, "digits": args.digits, "prime_bound": args.prime_bound,
              "threshold": cfg.threshold, "cf_method": args.cf_method}
    cache = _open_cache(args)
    result, artifacts = _scan_pipeline(cfg, cache, args.cf_method)

    bound = None
    if result.accepted is not None:
        mant, expo = scanner.bound_mantissa_exponent(result.accepted)
        bound = {"log10_m": result.log10_m_bound, "mantissa": mant, "exponent": expo}
    report = {
        "status": result.status,
        "reason": result.reason,
        "candidates": [_candidate_payload(r) for r in result.candidates],
        "accepted": _candidate_payload(result.accepted) if result.accepted else None,
        "bound": bound,
        "manifest": _manifest("scan", config, artifacts, result.status, started),
    }

    lines = [f"N = {N} ({_factor_label(N)})  digits = {args.digits}  "
             f"prime bound = {args.prime_bound}  threshold = {cfg.threshold}",
             "", _TABLE_HEADER]
    for cand in result.candidates:
        lines.append(_table_line({**_row_payload_from_candidate(N, cand), "status": "ok"}))
    if not result.candidates:
        lines.append("(no rows passed the parity/quotient/coprimality gates)")
    lines.append("")
    if result.accepted is not None:
        lines.append(f"accepted j = {result.accepted.j}: every tracked divisibility class matches")
        lines.append(f"lower bound: m > {bound['mantissa']}e{bound['exponent']}"
                     f"  (log10 = {bound['log10_m']})")
    else:
        lines.append(f"budget exhausted: {result.reason}")
    _emit_simple(report, args, lines)
    return 0 if result.status == "accepted" else 2


def _row_payload_from_candidate(N: int, row: scanner.TableRow) -> dict:
    return {
        "N": N,
        "label": _factor_label(N),
        "j": row.j,
        "a_next": row.a_next,
        "q": f"{row.q_mantissa}e{row.q_exponent}",
        "q_mod6": row.q_mod6,
        "violating_prime": row.violating_prime,
    }


def _table_worker(packed) -> dict:
    N, digits, prime_bound, cf_method, cache_dir = packed
    cache = ArtifactCache(cache_dir) if cache_dir else None
    try:
        cfg = scanner.ScanConfig(N=N, digit_budget=digits, prime_bound=prime_bound)
        result, _ = _scan_pipeline(cfg, cache, cf_method)
        return _row_payload(result)
    except Exception as exc:  # isolate the row; siblings continue
        return {"N": N, "label": _factor_label(N), "status": "error",
                "accepted": False, "log10_m_bound": None, "reason": str(exc)}


def cmd_table(args) -> int:
    started = time.perf_counter()
    rows = [_parse_n(tok) for tok in args.rows.split(",") if tok.strip()]
    if not rows:
        raise ValueError("no rows given")
    config = {"rows": rows, "digits": args.digits, "prime_bound": args.prime_bound,
              "cf_method": args.cf_method, "threads": args.threads}
    cache = _open_cache(args)
    artifacts = {}
    if cache is not None:
        try:  # warm the shared digit artifact once, not once per worker
            _, dsha = cache.get_log2(args.digits)
            artifacts["digits"] = dsha
        except logcomp.DigitBudgetError:
            pass  # every row will report the same exhaustion on its own
    cache_dir = str(cache.root) if cache is not None else None
    packed = [(N, args.digits, args.prime_bound, args.cf_method, cache_dir) for N in rows]
    if args.threads > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            payloads = list(pool.map(_table_worker, packed))
    else:
        payloads = [_table_worker(p) for p in packed]

    outcome = "ok" if all(p["status"] == "ok" for p in payloads) else "partial"
    report = {
        "rows": payloads,
        "manifest": _manifest("table", config, artifacts, outcome, started),
    }
    lines = [_TABLE_HEADER]
    lines.extend(_table_line(p) for p in payloads)
    _emit_simple(report, args, lines)
    return 0


def cmd_solve(args) -> int:
    started = time.perf_counter()
    config = {"m": args.m, "precision": args.precision}
    root = asymptotics.solve_k(args.m, precision=args.precision)
    approx = asymptotics.expansion_k(args.m, 3, precision=args.precision)
    sig = min(args.precision, 40)
    report = {
        "m": args.m,
        "k": _fmt(root.k, sig),
        "residual": _fmt(root.residual, 3),
        "C_m": _fmt(root.C_m, min(sig, 20)),
        "expansion_k": _fmt(approx, sig),
        "solver_minus_expansion": _fmt(root.k - approx, 3),
        "manifest": _manifest("solve", config, {}, "ok", started),
    }
    _emit_simple(report, args, [
        f"m = {args.m}",
        f"k = {report['k']}   (power-sum residual {report['residual']})",
        f"second-order correction C = {report['C_m']}",
        f"closed-form expansion gap = {report['solver_minus_expansion']}",
    ])
    return 0


def cmd_omega(args) -> int:
    started = time.perf_counter()
    try:
        target = Decimal(args.log10m)
    except decimal.InvalidOperation:
        raise ValueError(f"--log10m must be a decimal number, got {args.log10m!r}")
    config = {"log10m": str(target)}
    caught = []
    with warnings.catch_warnings(record=True) as log:
        warnings.simplefilter("always")
        w = omega_mod.min_omega_from_bound(target)
        caught = [str(x.message) for x in log]
    if w < 58:
        branch = "unit-fraction branch: the forced integer is 1 and Sylvester growth applies"
    else:
        branch = "reciprocal-sum branch: fewer than 58 primes cannot reach the required total"
    syl = omega_mod.sylvester_log10(w + 1)
    report = {
        "log10_m": str(target),
        "omega_lower_bound": w,
        "branch": branch,
        "sylvester_index": w + 1,
        "sylvester_log10_lo": str(syl.log10_lo),
        "sylvester_log10_hi": str(syl.log10_hi),
        "warnings": caught,
        "manifest": _manifest("omega", config, {}, "ok", started),
    }
    lines = [f"any solution needs omega(m-1) >= {w}", branch]
    lines.extend(f"note: {c}" for c in caught)
    _emit_simple(report, args, lines)
    return 0


def cmd_primes(args) -> int:
    started = time.perf_counter()
    N = _parse_n(args.N)
    config = {"N": N, "bound": args.bound}
    profiles = arithmetic.prime_set(N, bound=args.bound)
    records = [
        {"p": pr.p, "reason": pr.reason, "fermat_order": pr.fermat_order,
         "nu_N": pr.nu_N, "required_order": pr.required_order,
         "tracking_modulus": str(pr.tracking_modulus)}
        for pr in profiles
    ]
    report = {
        "N": N,
        "count": len(records),
        "profiles": records,
        "manifest": _manifest("primes", config, {}, "ok", started),
    }
    lines = [f"{len(records)} tracked primes for N = {N} up to {args.bound}",
             f"{'p':>8}  {'reason':<18} {'order':>5} {'nu_N':>4} {'e_p':>4}  modulus"]
    for r in records:
        lines.append(f"{r['p']:>8}  {r['reason']:<18} {r['fermat_order']:>5} "
                     f"{r['nu_N']:>4} {r['required_order']:>4}  {r['tracking_modulus']}")
    _emit_simple(report, args, lines)
    return 0


def cmd_verify(args) -> int:
    started = time.perf_counter()
    config = {"level": args.level, "suites": args.suites or None}

    def progress(res):
        if args.json:
            print(json.dumps({"check": res.name, "suite": res.suite,
                              "status": "pass" if res.ok else "fail",
                              "detail": res.detail}, sort_keys=True))
        else:
            mark = "PASS" if res.ok else "FAIL"
            print(f"{mark}  {res.suite}/{res.name}  {res.detail}")
        sys.stdout.flush()

    results = verify_mod.run_checks(level=args.level, suites=args.suites or None,
                                    progress=progress)
    failed = [r for r in results if not r.ok]
    outcome = "ok" if not failed else "fail"
    summary = {
        "passed": len(results) - len(failed),
        "failed": len(failed),
        "manifest": _manifest("verify", config, {}, outcome, started),
    }
    if args.json:
        print(json.dumps({"summary": summary}, indent=2, sort_keys=True))
    else:
        man = summary["manifest"]
        print(f"{summary['passed']}/{len(results)} checks passed "
              f"({args.level}) in {man['wall_time_s']}s")
    return 0 if not failed else 1


# ---------------------------------------------------------------------------
# wiring


def _emit_simple(report: dict, args, lines) -> None:
    if args.json:
        _print_json(report)
    else:
        for line in lines:
            print(line)
        print(_manifest_line(report["manifest"]))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", default=None, metavar="DIR",
                        help="artifact cache directory (default: user cache)")
    common.add_argument("--no-cache", action="store_true",
                        help="compute everything in memory, touch no cache")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes for multi-row commands")
    common.add_argument("--json", action="store_true",
                        help="emit the full JSON report instead of text")

    parser = argparse.ArgumentParser(
        prog="emcf",
        description="Certified continued-fraction scans of (log 2)/(2N) "
                    "and the surrounding power-sum machinery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("logdigits", parents=[common],
                       help="compute and cache certified digits of log 2")
    p.add_argument("--digits", type=int, required=True)
    p.add_argument("--method", choices=("auto", "atanh", "machin"), default="auto")
    p.add_argument("--out", metavar="FILE", default=None,
                   help="also write the digit file here")
    p.set_defaults(func=cmd_logdigits)

    p = sub.add_parser("cf", parents=[common],
                       help="certified partial quotients of log2/denominator")
    p.add_argument("--digits", type=int, required=True)
    p.add_argument("--denominator", type=int, default=1)
    p.add_argument("--cf-method", choices=("auto", "quadratic", "hgcd"), default="auto")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("scan", parents=[common],
                       help="walk convergents of (log 2)/(2N) through the four gates")
    p.add_argument("--N", required=True, help="N, plain or factored like 2^8*3")
    p.add_argument("--digits", type=int, required=True, help="digit budget")
    p.add_argument("--prime-bound", type=int, default=100_000)
    p.add_argument("--cf-method", choices=("auto", "quadratic", "hgcd"), default="auto")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("table", parents=[common],
                       help="scan several N and print the reference-style table")
    p.add_argument("--rows", required=True,
                   help="comma-separated N values, factored forms allowed")
    p.add_argument("--digits", type=int, required=True, help="digit budget per row")
    p.add_argument("--prime-bound", type=int, default=100_000)
    p.add_argument("--cf-method", choices=("auto", "quadratic", "hgcd"), default="auto")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("solve", parents=[common],
                       help="solve the power-sum equation for k at a given m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--precision", type=int, default=40)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("omega", parents=[common],
                       help="distinct-prime-factor lower bound from a size bound")
    p.add_argument("--log10m", required=True,
                   help="decimal log10 of the m lower bound")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("primes", parents=[common],
                       help="tracked prime profiles for a given N")
    p.add_argument("--N", required=True)
    p.add_argument("--bound", type=int, default=100_000)
    p.set_defaults(func=cmd_primes)

    p = sub.add_parser("verify", parents=[common],
                       help="run the named self-check suites")
    p.add_argument("suites", nargs="*",
                   help=f"limit to suites: {', '.join(verify_mod.available_suites())}")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CacheCorruptionError as exc:
        print(f"cache integrity error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
