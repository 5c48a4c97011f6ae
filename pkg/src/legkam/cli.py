"""Command-line entry point: exact table building, divisor certification,
normal-form summaries, simulation, and the full verification suite.

Every subcommand writes a `<output>.manifest.json` next to its first output
recording the subcommand, parameters, a content hash, output paths and wall
time. Exact-arithmetic outputs are byte-reproducible for identical inputs.
"""

import argparse
import csv
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import acceptance
from .divisors import CONVENTIONS, MASS_SINGULAR, MASS_UPPER, certify_range
from .dynamics import (BlowUpError, MIN_FREQ_SAMPLES, SimConfig,
                       frequency_report, integrate, save_trajectory_csv)
from .normalform import (DET_G, build_normal_form, mode_pair_terms,
                         normal_form_summary, single_mode_terms)
from .quartic import build_p_table


def parse_rational(text: str) -> Fraction:
    """Accept 'p/q' or decimal syntax without float contamination."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _mass_list(text: str):
    return [parse_rational(tok) for tok in text.split(",") if tok.strip()]


def _check_admissible(masses, parser):
    for m in masses:
        if not 0 < m < MASS_UPPER or m == MASS_SINGULAR:
            parser.error(f"mass {m} outside (0, 41/4) or equal to 1/4")


def write_manifest(first_output, subcommand, params, outputs, started,
                   extra_bytes=b""):
    digest = hashlib.sha256()
    digest.update(json.dumps({"subcommand": subcommand, "params": params},
                             sort_keys=True, default=str).encode())
    digest.update(extra_bytes)
    manifest = {
        "subcommand": subcommand,
        "parameters": params,
        "content_hash": digest.hexdigest(),
        "outputs": [str(p) for p in outputs],
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    path = f"{first_output}.manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, default=str)
    return path


def cmd_table(args, parser) -> int:
    if args.max_m < 3:
        parser.error(f"--max-m must be >= 3, got {args.max_m}")
    if args.max_n < args.max_m:
        parser.error(f"--max-n must be >= --max-m, got {args.max_n}")
    started = time.perf_counter()
    try:
        table = build_p_table(args.max_m, args.max_n, method=args.method)
    except ArithmeticError as exc:
        print(f"table self-check failed: {exc}", file=sys.stderr)
        return 1
    try:
        if args.format == "json" or (args.format == "auto"
                                     and args.out.endswith(".json")):
            table.to_json(args.out)
        else:
            table.to_csv(args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    write_manifest(args.out, "table",
                   {"max_m": args.max_m, "max_n": args.max_n,
                    "method": args.method, "format": args.format},
                   [args.out], started)
    print(f"wrote {args.max_m + 1}x{args.max_n + 1} exact table to {args.out}")
    return 0


def cmd_certify(args, parser) -> int:
    masses = args.masses
    if not masses:
        parser.error("--masses must contain at least one value")
    _check_admissible(masses, parser)
    if args.max_index < 2:
        parser.error(f"--max-index must be >= 2, got {args.max_index}")
    started = time.perf_counter()

    def run(m):
        return certify_range(args.max_index, float(m),
                             convention=args.convention,
                             include_all=args.include_all)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            certs = list(pool.map(run, masses))
    else:
        certs = [run(m) for m in masses]

    try:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mass", "max_index", "convention", "min_abs_divisor",
                        "min_ratio", "witness", "resonant_skipped",
                        "sigma_clamped", "n_evaluated"])
            for m, c in zip(masses, certs):
                w.writerow([str(m), c.max_index, c.convention,
                            repr(c.min_abs_divisor), repr(c.min_ratio),
                            " ".join(str(v) for v in c.min_abs_witness),
                            c.resonant_skipped, c.sigma_clamped,
                            c.n_evaluated])
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    write_manifest(args.out, "certify",
                   {"max_index": args.max_index,
                    "masses": [str(m) for m in masses],
                    "convention": args.convention,
                    "include_all": args.include_all},
                   [args.out], started)
    bad = [m for m, c in zip(masses, certs) if not c.min_abs_divisor > 0]
    if bad:
        print(f"nonpositive min divisor at masses {bad}", file=sys.stderr)
        return 1
    print(f"wrote {len(certs)} certificates to {args.out}; "
          f"all min divisors positive")
    return 0


def cmd_normalform(args, parser) -> int:
    mass = args.mass
    _check_admissible([mass], parser)
    if args.dim < 3:
        parser.error(f"--dim must be >= 3, got {args.dim}")
    started = time.perf_counter()
    data = build_normal_form(args.dim, float(mass))
    summary = normal_form_summary(data)

    failures = []
    if data.det_g != DET_G:
        failures.append(f"det g {data.det_g} != {DET_G}")
    if not summary["twist_nondegenerate"]:
        failures.append("twist condition failed")
    if not summary["tail_frequencies_ok"]:
        failures.append("tail frequency check failed")
    sweeps = {}
    for j in range(3, min(args.dim, 50) + 1):
        first, second = single_mode_terms(j, float(mass))
        sweeps[f"single_mode_{j}"] = [first, second]
        if not (first > 618 and second < 441):
            failures.append(f"single-mode straddle fails at j={j}")
    for i in range(3, min(args.dim, 12) + 1):
        for j in range(i + 1, min(args.dim, 12) + 1):
            first, second = mode_pair_terms(i, j, float(mass))
            if not (first > 27 and second < 27):
                failures.append(f"pair straddle fails at ({i},{j})")
    summary["single_mode_terms"] = sweeps
    summary["checks_failed"] = failures

    try:
        with open(args.out, "w") as fh:
            json.dump(summary, fh, indent=1)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    write_manifest(args.out, "normalform",
                   {"dim": args.dim, "mass": str(mass)}, [args.out], started)
    if failures:
        print("; ".join(failures), file=sys.stderr)
        return 1
    print(f"normal form for dim={args.dim}, mass={mass}: all checks pass; "
          f"det g = {data.det_g}")
    return 0


_BOOL = {"true": True, "1": True, "yes": True,
         "false": False, "0": False, "no": False}


def parse_sim_config(lines) -> SimConfig:
    """Flat key=value config; '#' starts a comment."""
    fields = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {raw!r}")
        key, value = (tok.strip() for tok in line.split("=", 1))
        if key in ("dim", "steps", "seed", "save_stride"):
            fields[key] = int(value)
        elif key in ("mass", "dt", "tail_amplitude"):
            fields[key] = float(Fraction(value))
        elif key == "initial_action":
            parts = [float(Fraction(tok)) for tok in value.split(",")]
            fields[key] = tuple(parts)
        elif key == "include_coupling":
            fields[key] = _BOOL[value.lower()]
        else:
            raise ValueError(f"unknown config key: {key!r}")
    return SimConfig(**fields)


def cmd_simulate(args, parser) -> int:
    started = time.perf_counter()
    try:
        with open(args.config) as fh:
            raw = fh.read()
        config = parse_sim_config(raw.splitlines())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"bad config {args.config}: {exc}", file=sys.stderr)
        return 2

    code = 0
    try:
        traj = integrate(config)
    except BlowUpError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        traj = exc.trajectory
        code = 1

    outputs = []
    if traj is not None and traj.n_samples:
        save_trajectory_csv(traj, args.out)
        outputs.append(args.out)
        if args.report:
            if traj.n_samples >= MIN_FREQ_SAMPLES:
                report = frequency_report(traj)
            else:
                report = {"error": "trajectory too short for frequency "
                                   "extraction", "samples": traj.n_samples}
            report["aborted"] = code != 0
            with open(args.report, "w") as fh:
                json.dump(report, fh, indent=1)
            outputs.append(args.report)
    if outputs:
        write_manifest(outputs[0], "simulate",
                       {"config": args.config}, outputs, started,
                       extra_bytes=raw.encode())
    return code


def cmd_verify_all(args, parser) -> int:
    results = acceptance.run_all()
    for res in results:
        print(res.line())
    if args.out:
        payload = [{"number": r.number, "name": r.name, "passed": r.passed,
                    "detail": r.detail, "seconds": r.seconds}
                   for r in results]
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1)
    failed = [r.number for r in results if not r.passed]
    if failed:
        print(f"failed criteria: {failed}", file=sys.stderr)
        return 1
    print("all acceptance criteria pass")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="legkam",
        description="Exact quartic Legendre tables, small-divisor "
                    "certificates, normal-form data and symplectic runs "
                    "for the two-mode string model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="build the exact P(m,n) table")
    p.add_argument("--max-m", type=int, required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=("recursion", "oracle"),
                   default="recursion")
    p.add_argument("--format", choices=("auto", "csv", "json"),
                   default="auto")

    p = sub.add_parser("certify", help="sweep small-divisor certificates")
    p.add_argument("--max-index", type=int, required=True)
    p.add_argument("--masses", type=_mass_list, required=True,
                   help="comma-separated rationals, e.g. 1/10,1,5")
    p.add_argument("--convention", choices=CONVENTIONS, default="renumbered")
    p.add_argument("--include-all", action="store_true",
                   help="widen beyond min-index <= 2")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("normalform", help="normal-form summary and checks")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--mass", type=parse_rational, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="run the symplectic integrator")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None,
                   help="optional frequency report JSON path")

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--out", default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "table": cmd_table,
        "certify": cmd_certify,
        "normalform": cmd_normalform,
        "simulate": cmd_simulate,
        "verify-all": cmd_verify_all,
    }
    return handlers[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
