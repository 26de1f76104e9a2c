"""Command-line front end: analyze, verify, profile, brw, optcheck.

Every output CSV starts with a '#'-prefixed manifest block (tool version,
exact command line, chain-spec digest, master seed, timestamp) followed by
the data section.  Re-running the same command reproduces the data section
and every manifest line except the timestamp byte for byte.  All numbers
are written with 17 significant digits, '.' decimal separator and LF line
endings.

Exit codes: 0 success; 1 a bound or band check failed; 2 invalid spec or
arguments; 3 chain rejected (not reversible / not irreducible);
4 all Monte Carlo replicates censored.

The MIXBOUND_THREADS environment variable caps worker processes for the
Monte Carlo commands.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import math
import os
import shlex
import sys

import numpy as np

from . import __version__
from .analysis import ChainAnalysis
from .bounds import OptProblem, budget_rate_optimum, standard_sweep
from .brw import (BRWConfig, hit_time_sandwich, intersection_sandwich,
                  plain_intersection, simulate_hit, simulate_intersection)
from .chains import (ChainFamilySpec, build_family, canonical_spec_text,
                     complete_spec, cycle_spec, dlp_spec, hypercube_spec,
                     parse_chain_spec, torus_spec)
from .errors import (AllCensored, BadEps, BadRange, CertificateMismatch,
                     InvalidSpec, NotIrreducible, NotReversible)
from .hitting import hit_times
from .spectral import decompose, spectral_moment

EXIT_OK = 0
EXIT_BOUND_FAILURE = 1
EXIT_INVALID_SPEC = 2
EXIT_BAD_CHAIN = 3
EXIT_ALL_CENSORED = 4


def _fmt(v) -> str:
    if isinstance(v, float) or isinstance(v, np.floating):
        return format(float(v), ".17g")
    return str(v)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _write_csv(path, argv, spec_text, seed, header, rows):
    lines = [
        f"# mixbound v{__version__}",
        f"# command: {shlex.join(['mixbound'] + list(argv))}",
        f"# spec-digest: sha256:{_digest(spec_text)}",
        f"# master-seed: {seed if seed is not None else 'none'}",
        f"# timestamp: {datetime.datetime.now(datetime.timezone.utc).isoformat()}",
        ",".join(header),
    ]
    lines += [",".join(_fmt(c) for c in row) for row in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _threads() -> int:
    raw = os.environ.get("MIXBOUND_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _family_specs(args) -> list[ChainFamilySpec]:
    if getattr(args, "spec", None):
        return [parse_chain_spec(args.spec)]
    if not args.family:
        raise InvalidSpec("give either --spec or --family")
    sizes = [int(s) for s in str(args.sizes).split(",")] if args.sizes else None
    if sizes is None:
        raise InvalidSpec("--family needs --sizes")
    fam = args.family
    out = []
    for s in sizes:
        if fam == "cycle":
            out.append(cycle_spec(s))
        elif fam == "complete":
            out.append(complete_spec(s))
        elif fam == "torus":
            out.append(torus_spec(args.d, s))
        elif fam == "hypercube":
            out.append(hypercube_spec(s))
        elif fam in ("dlp", "dlp_birth_death"):
            out.append(dlp_spec(s, args.lam, args.dlp_eps,
                                args.k if args.k is not None else s))
        else:
            raise InvalidSpec(f"unknown family {fam!r}")
    return out


def _add_family_flags(sub, with_sizes=True):
    sub.add_argument("--spec", help="chain-spec file (key=value lines)")
    sub.add_argument("--family",
                     choices=["cycle", "torus", "complete", "hypercube", "dlp"],
                     help="built-in family name")
    if with_sizes:
        sub.add_argument("--sizes",
                         help="comma list; n for cycle/complete/dlp, m for torus, d for hypercube")
    sub.add_argument("--d", type=int, default=2, help="torus dimension")
    sub.add_argument("--lam", type=float, default=0.5, help="dlp rate parameter")
    sub.add_argument("--dlp-eps", type=float, default=0.05, help="dlp drift parameter")
    sub.add_argument("--k", type=int, default=None, help="dlp clustered-eigenvalue count")


# ---------------------------------------------------------------------------
# subcommands

def cmd_analyze(args, argv) -> int:
    spec = parse_chain_spec(args.spec)
    analysis = ChainAnalysis.from_spec(spec)
    s = analysis.summary()
    header = ["kernel"] + list(s.keys())
    row = [analysis.kernel.label] + [s[k] for k in s]
    _write_csv(args.out, argv, canonical_spec_text(spec), None, header, [row])
    print(f"analyze: wrote {args.out} ({analysis.kernel.label})")
    return EXIT_OK


def cmd_verify(args, argv) -> int:
    specs = _family_specs(args)
    ells = [int(v) for v in str(args.ell).split(",")]
    eps_list = [float(v) for v in str(args.eps).split(",")]
    header = ["name", "kernel", "eps", "ell", "x", "M", "lhs", "rhs", "slack", "passed"]
    rows = []
    n_fail = 0
    for spec in specs:
        analysis = ChainAnalysis.from_spec(spec)
        reports = standard_sweep(analysis, eps_list=eps_list, ell_list=ells,
                                 rhs_scale=args.rhs_scale)
        for r in reports:
            ctx = r.context
            rows.append([r.name, ctx.get("kernel", analysis.kernel.label),
                         ctx.get("eps", ""), ctx.get("ell", ""),
                         ctx.get("x", ""), ctx.get("M", ""),
                         r.lhs, r.rhs, r.slack, int(r.passed)])
            n_fail += 0 if r.passed else 1
    spec_text = "".join(canonical_spec_text(s) for s in specs)
    if args.out:
        _write_csv(args.out, argv, spec_text, None, header, rows)
    print(f"verify: {len(rows)} reports, {n_fail} failures")
    return EXIT_OK if n_fail == 0 else EXIT_BOUND_FAILURE


def cmd_profile(args, argv) -> int:
    specs = _family_specs(args)
    if len(specs) != 1:
        raise InvalidSpec("profile works on a single kernel; give one size")
    analysis = ChainAnalysis.from_spec(specs[0])
    prof, decomp = analysis.profile, analysis.decomp
    t_rel = decomp.t_rel
    t_lo = args.t_min if args.t_min is not None else t_rel / 100.0
    t_hi = args.t_max if args.t_max is not None else \
        t_rel * (abs(math.log(0.25 * float(decomp.pi.min()))) + 1.0)
    grid = np.geomspace(t_lo, t_hi, num=args.points)
    rows = []
    for t in grid:
        d2 = max(prof.l2_distance(x, t) for x in
                 ([0] if analysis.kernel.transitive else range(analysis.kernel.n)))
        rows.append([t, prof.linf_distance(t), d2, prof.tv_worst(t),
                     prof.ave_l2_sq(t)])
    _write_csv(args.out, argv, canonical_spec_text(specs[0]), None,
               ["t", "d_inf", "d2_max", "tv_max", "ave_l2_sq"], rows)
    print(f"profile: wrote {args.out} ({analysis.kernel.label}, {args.points} points)")
    return EXIT_OK


def cmd_brw(args, argv) -> int:
    specs = _family_specs(args)
    cfg = BRWConfig(replicates=args.replicates, master_seed=args.seed,
                    max_particles=args.max_particles, max_time=args.max_time,
                    threads=_threads())
    header = ["size", "n", "target", "estimate", "stderr", "exact_reference",
              "ratio", "censor_rate"]
    rows = []
    band_failed = False

    if args.sandwich:
        if args.target == "hit":
            result = hit_time_sandwich(specs, cfg)
        elif args.target == "intersect":
            result = intersection_sandwich(specs, cfg)
        else:
            raise InvalidSpec("--sandwich supports hit and intersect targets")
        for r in result.rows:
            rows.append([r.size, r.n, args.target, r.estimate, r.stderr,
                         r.reference, r.ratio, r.censor_rate])
        band_failed = not result.passed
        print(f"brw sandwich[{args.target}]: family={result.family} "
              f"slope={result.slope:.3f} passed={result.passed}")
    else:
        for spec in specs:
            kernel = build_family(spec)
            decomp = decompose(kernel)
            t_rel = decomp.t_rel
            if args.target == "hit":
                summary = hit_times(kernel)
                x = int(np.argmax(summary.t_pi_to))
                est = simulate_hit(kernel, x, cfg)
                ref = t_rel * math.log1p(summary.t_pi_to[x] / t_rel)
            elif args.target == "intersect":
                est = simulate_intersection(kernel, cfg)
                ref = t_rel * math.log1p(math.sqrt(spectral_moment(decomp, 2)) / t_rel)
            else:
                est = plain_intersection(kernel, cfg)
                ref = math.sqrt(spectral_moment(decomp, 2))
            size = spec.params.get("n") or spec.params.get("m") or spec.params.get("d")
            rows.append([size, kernel.n, args.target, est.mean, est.stderr,
                         ref, est.mean / ref, est.censor_rate])
            print(f"brw[{args.target}] {kernel.label}: {est.mean:.6g} "
                  f"+/- {est.stderr:.3g} (censor {est.censor_rate:.3%})")

    spec_text = "".join(canonical_spec_text(s) for s in specs)
    if args.out:
        _write_csv(args.out, argv, spec_text, args.seed, header, rows)
    return EXIT_BOUND_FAILURE if band_failed else EXIT_OK


def cmd_optcheck(args, argv) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    worst = 0.0
    for i in range(args.instances):
        lam2 = float(rng.uniform(0.05, 1.9))
        lam_n = float(rng.uniform(lam2, 2.0))
        ell = int(rng.integers(1, 7))
        t = ell / (2.0 * lam2) * float(rng.uniform(1.0, 4.0))
        budget = float(rng.uniform(0.1, 1e4))
        cert = budget_rate_optimum(OptProblem(t=t, ell=ell, budget=budget,
                                              lam2=lam2, lam_n=lam_n))
        rel = abs(cert.numeric_max - cert.claimed) / cert.claimed
        worst = max(worst, rel)
        rows.append([i, lam2, lam_n, ell, t, budget, cert.numeric_max,
                     cert.claimed, cert.argmax_beta, rel])
    if args.out:
        _write_csv(args.out, argv, f"optcheck instances={args.instances}\n",
                   args.seed,
                   ["instance", "lam2", "lam_n", "ell", "t", "budget",
                    "numeric_max", "claimed", "argmax_beta", "rel_gap"], rows)
    print(f"optcheck: {args.instances} extremal instances, worst relative gap "
          f"{worst:.3e}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixbound",
        description="Spectral, hitting and mixing diagnostics for reversible "
                    "chains, plus branching random walk experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="chain summary CSV from a spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("verify", help="inequality sweep; exit 1 on any failure")
    _add_family_flags(p)
    p.add_argument("--ell", default="1", help="comma list of moment orders")
    p.add_argument("--eps", default="0.5", help="comma list of thresholds")
    p.add_argument("--out", default=None)
    p.add_argument("--rhs-scale", type=float, default=1.0,
                   help="testing hook: scale every right-hand side")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("profile", help="distance profiles on a log time grid")
    _add_family_flags(p)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("brw", help="branching random walk experiments")
    _add_family_flags(p)
    p.add_argument("--target", choices=["hit", "intersect", "plain"],
                   required=True)
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-particles", type=int, default=100_000)
    p.add_argument("--max-time", type=float, default=None)
    p.add_argument("--sandwich", action="store_true",
                   help="apply frozen two-sided band and trend checks")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_brw)

    p = sub.add_parser("optcheck", help="spectral optimization certificate")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_optcheck)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args, argv)
    except (InvalidSpec, BadEps, BadRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_SPEC
    except (NotReversible, NotIrreducible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CHAIN
    except AllCensored as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALL_CENSORED
    except CertificateMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND_FAILURE


if __name__ == "__main__":
    sys.exit(main())
