"""Command-line surface: every verification pipeline with reproducible,
machine-readable output.

Subcommands: constants, density, concentrate, sieve, recover, mehler.
Exit codes: 0 success / inequality holds, 2 usage or validation error,
3 numerical non-convergence, 4 invariant violation (a bug signal).
JSON floats are printed with 17 significant digits, so identical
configurations yield byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import jsonfmt
from .concentration import b_constant, lp_bound, nyquist_density, sample_lp_ratio, verify_bound
from .domains import CapUnionDomain, SphericalCap
from .errors import BoundViolationError, ConvergenceError
from .quadrature import pl_squared_tail
from .recovery import inpaint, mask
from .sieve import generate_separated, sieve_check
from .specfun import bessel_constants, largest_zero, mehler_heine_gap
from .sphharm import HarmonicExpansion, SphereGrid, UnitVector, synthesize_grid

USAGE_EXIT = 2
CONVERGENCE_EXIT = 3
VIOLATION_EXIT = 4


def _parse_caps(spec: str) -> CapUnionDomain:
    """Domain spec: a JSON file path ([{"apex": [x,y,z], "height": d}, ...])
    or inline "height@x,y,z" tokens separated by whitespace or semicolons."""
    spec = spec.strip()
    if not spec:
        return CapUnionDomain([])
    if spec.endswith(".json"):
        with open(spec) as fh:
            return CapUnionDomain.from_dict(json.load(fh))
    caps = []
    for token in spec.replace(";", " ").split():
        try:
            height_s, apex_s = token.split("@")
            x, y, z = (float(v) for v in apex_s.split(","))
            caps.append(SphericalCap(UnitVector.normalized(x, y, z),
                                     float(height_s)))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed cap token {token!r}: {exc}") from exc
    return CapUnionDomain(caps)


def _parse_range(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def _emit(args, payload, csv_rows=None) -> None:
    if args.format == "csv" and csv_rows is not None:
        header = list(csv_rows[0].keys())
        lines = [",".join(header)]
        for row in csv_rows:
            lines.append(",".join(
                format(v, ".17g") if isinstance(v, float) else str(v)
                for v in row.values()))
        text = "\n".join(lines) + "\n"
    else:
        text = jsonfmt.dumps(payload) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_constants(args) -> int:
    rows = []
    limit = bessel_constants().b_limit
    for L in _parse_range(args.L_range):
        if L < 1:
            raise ValueError("band limits must be at least 1")
        t = largest_zero(L)
        B = b_constant(L)
        rows.append({
            "L": L,
            "t_LL": t,
            "B_L": B,
            "C2": 1.0 / (2.0 * np.pi * pl_squared_tail(L, t)),
            "limit": limit,
            "gap_to_limit": B - limit,
        })
    _emit(args, {"config": {"L_range": args.L_range}, "rows": rows}, rows)
    return 0


def _cmd_density(args) -> int:
    omega = _parse_caps(args.caps)
    rho, meta = nyquist_density(omega, args.L, seed=args.seed,
                                samples=args.samples, full_output=True)
    payload = {
        "config": {"L": args.L, "caps": omega.to_dict(), "seed": args.seed,
                   "samples": args.samples},
        "rho": rho,
        "metadata": meta,
    }
    _emit(args, payload)
    return 0


def _cmd_concentrate(args) -> int:
    omega = _parse_caps(args.caps)
    report = verify_bound(omega, args.L, seed=args.seed, samples=args.samples)
    payload = report.to_dict()
    if args.p is not None:
        payload["p"] = args.p
        payload["lp_bound"] = lp_bound(omega, args.L, args.p, rho=report.rho)
        payload["sampled_lp_ratio"] = sample_lp_ratio(
            omega, args.L, args.p, trials=max(1, args.samples // 10_000),
            seed=args.seed)
    payload["config"] = {"L": args.L, "caps": omega.to_dict(),
                         "seed": args.seed, "samples": args.samples,
                         "p": args.p}
    _emit(args, payload)
    return 0


def _cmd_sieve(args) -> int:
    pts = generate_separated(args.theta, args.seed, strategy=args.strategy)
    L = args.L
    if args.signal == "constant":
        e = HarmonicExpansion.unit(L, 0, 0)
    else:
        rng = np.random.default_rng(args.seed)
        n = (L + 1) ** 2
        e = HarmonicExpansion(L, rng.normal(size=n) + 1j * rng.normal(size=n))
    report = sieve_check(pts, e)
    payload = report.to_dict()
    payload["config"] = {"theta": args.theta, "L": L, "seed": args.seed,
                         "signal": args.signal, "strategy": args.strategy}
    _emit(args, payload)
    return 0


def _cmd_recover(args) -> int:
    omega = _parse_caps(args.caps)
    L = args.L
    rng = np.random.default_rng(args.seed)
    n = (L + 1) ** 2
    truth = HarmonicExpansion(L, rng.normal(size=n) + 1j * rng.normal(size=n))
    grid = SphereGrid.for_degree(L)
    observed, _ = mask(grid, synthesize_grid(truth, grid), omega)
    run = inpaint(grid, observed, omega, L, args.iters, truth)
    payload = run.to_dict()
    payload["config"] = {"L": L, "caps": omega.to_dict(), "seed": args.seed,
                         "iters": args.iters}
    _emit(args, payload)
    return 0


def _cmd_mehler(args) -> int:
    j01 = bessel_constants().j01
    zs = []
    for token in args.z.split(","):
        zs.append(j01 if token.strip() == "j01" else float(token))
    rows = []
    for n in _parse_range(args.n):
        for z in zs:
            rows.append({"n": n, "z": z, "gap": mehler_heine_gap(n, z)})
    _emit(args, {"config": {"n": args.n, "z": args.z}, "rows": rows}, rows)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=200_000,
                        help="Monte Carlo sample count (overlapping caps)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap (computations here are single-threaded)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphsieve",
        description="concentration and large-sieve verification on the sphere")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="t_LL, B_L, C2 table over degrees")
    p.add_argument("--L-range", dest="L_range", default="1:20",
                   help="inclusive range lo:hi or comma list")
    _add_common(p)
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("density", help="maximum Nyquist density of a domain")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--caps", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("concentrate", help="verify the concentration bound")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--caps", required=True)
    p.add_argument("--p", type=float, default=None,
                   help="also report the Lp bound and a sampled Lp ratio")
    _add_common(p)
    p.set_defaults(func=_cmd_concentrate)

    p = sub.add_parser("sieve", help="verify the large sieve inequality")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--signal", choices=("random", "constant"), default="random")
    p.add_argument("--strategy", choices=("greedy_maximin", "rejection"),
                   default="greedy_maximin")
    _add_common(p)
    p.set_defaults(func=_cmd_sieve)

    p = sub.add_parser("recover", help="alternating-projections recovery demo")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--caps", required=True)
    p.add_argument("--iters", type=int, default=50)
    _add_common(p)
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("mehler", help="Legendre-to-Bessel asymptotics table")
    p.add_argument("--n", default="10,100,1000", help="degrees, list or lo:hi")
    p.add_argument("--z", default="1,2,j01", help="arguments; 'j01' allowed")
    _add_common(p)
    p.set_defaults(func=_cmd_mehler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONVERGENCE_EXIT
    except BoundViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return VIOLATION_EXIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
