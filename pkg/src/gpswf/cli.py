"""Command-line interface.

Exit codes: 0 success, 1 invalid parameters or configuration,
2 internal numerical-consistency failure.
"""

import argparse
import json
import sys

from . import __version__, approx, basis as basis_mod, experiments, spectral
from .errors import ConsistencyError, DomainError


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract reserves 2
    # for numerical-consistency failures, so remap usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(p):
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--quad-order", type=int, default=None)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--threads", type=int, default=0,
                   help="worker threads for experiments (0 = auto)")


def build_parser():
    parser = _Parser(prog="gpswf", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True,
                              parser_class=_Parser)

    p = sub.add_parser("basis",
                       help="eigenvalue table or basis file for (alpha, c)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--out", default=None, help="write a binary basis container")
    _add_common(p)

    p = sub.add_parser("spectrum",
                       help="adds mu/lambda columns to the basis table")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("bounds",
                       help="verdict table for every implemented bound")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--grid-size", type=int, default=400)
    _add_common(p)

    p = sub.add_parser("project",
                       help="project a corpus function onto the basis")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--fn", required=True,
                   help="corpus spec, e.g. brownian:s=1.5,seed=7 | "
                        "wm:s=1,lambda=2 | periodic:k=3")
    p.add_argument("--N", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("experiment",
                       help="run a registered scenario")
    p.add_argument("--name", required=True,
                   choices=("lambda-decay", "brownian", "wm-table"))
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out-dir", default="reports")
    _add_common(p)

    p = sub.add_parser("cache", help="cache maintenance")
    p.add_argument("action", choices=("ls", "clear"))
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    return parser


def _parse_fn_spec(spec):
    kind, _, rest = spec.partition(":")
    cfg = {"kind": kind.strip()}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            cfg[key.strip()] = value.strip()
    for key in ("s", "lambda"):
        if key in cfg:
            cfg[key] = float(cfg[key])
    for key in ("seed", "K", "k"):
        if key in cfg:
            cfg[key] = int(cfg[key])
    return cfg


def _emit(rows, header, fmt):
    if fmt == "json":
        print(json.dumps([dict(zip(header, r)) for r in rows], indent=2))
        return
    if fmt == "csv":
        print(",".join(header))
        for r in rows:
            print(",".join(str(v) for v in r))
        return
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for r in rows:
        print("  ".join(str(v).ljust(w) for v, w in zip(r, widths)))


def _get_basis(args):
    return experiments.get_basis(args.alpha, args.c, args.nmax,
                                 cache_dir=args.cache_dir,
                                 use_cache=not args.no_cache)


def _cmd_basis(args):
    b = _get_basis(args)
    if args.out:
        experiments.save_basis(b, args.out)
        print(f"wrote {args.out} (alpha={b.alpha:g}, c={b.c:g}, M={b.trunc}, "
              f"nmax={b.nmax})")
        return 0
    rows = []
    for n in range(b.nmax):
        lo, hi = basis_mod.chi_bracket(b.alpha, b.c, n)
        ok = lo <= b.chi[n] <= hi
        rows.append([n, f"{b.chi[n]:.12e}", f"{lo:.6e}", f"{hi:.6e}",
                     "ok" if ok else "VIOLATED"])
    _emit(rows, ["n", "chi", "lower", "upper", "bracket"], args.format)
    return 0


def _cmd_spectrum(args):
    b = _get_basis(args)
    entries = spectral.compute_spectrum(b)
    rows = []
    for e in entries:
        rows.append([e.n, f"{e.chi:.12e}", f"{e.mu_abs:.12e}",
                     f"{e.mu_phase.real:+.3f}{e.mu_phase.imag:+.3f}j",
                     f"{e.lam:.12e}"])
    _emit(rows, ["n", "chi", "mu_abs", "mu_phase", "lambda"], args.format)
    return 0


def _cmd_bounds(args):
    b = _get_basis(args)
    entries = spectral.compute_spectrum(b)
    rows = []
    for e in entries:
        chi_verdict = basis_mod.chi_lower_bound_check(b, e.n)
        lo, hi = basis_mod.chi_bracket(b.alpha, b.c, e.n)
        bracket_ok = lo <= e.chi <= hi
        est = basis_mod.local_estimate(b, e.n, args.grid_size)
        if est.bound_applicable:
            local_ok = (est.sup_value <= est.a_squared + 1e-9
                        and est.a_squared <= 2 * b.alpha + 1 + 1e-9
                        and 1 - est.b_moment <= 2 * est.a_squared + 1e-9)
            local = "ok" if local_ok else "VIOLATED"
        else:
            local = "n/a"
        dv = e.bound
        rows.append([
            e.n,
            "ok" if bracket_ok else "VIOLATED",
            ("ok" if chi_verdict.ok else "VIOLATED") if chi_verdict.applicable else "n/a",
            (("ok" if dv.margin_mu >= 0 and dv.margin_lambda >= 0 else "VIOLATED")
             if dv.applicable else "n/a"),
            f"{dv.margin_lambda:.3e}" if dv.applicable else "",
            local,
        ])
    _emit(rows, ["n", "chi_bracket", "chi_lower", "decay", "decay_margin",
                 "local_estimate"], args.format)
    return 0


def _cmd_project(args):
    cfg = _parse_fn_spec(args.fn)
    if cfg.get("kind") == "brownian" and "seed" not in cfg:
        cfg["seed"] = args.seed
    f = approx.target_from_config(cfg)
    b = experiments.get_basis(args.alpha, args.c, max(args.N, 1),
                              cache_dir=args.cache_dir,
                              use_cache=not args.no_cache)
    pr = approx.project(b, f, args.N, quad_order=args.quad_order)
    rows = [[n, f"{abs(pr.coefficients[n]):.12e}"] for n in range(pr.N)]
    _emit(rows, ["n", "abs_coefficient"], args.format)
    print(f"l2w_error={pr.l2w_error:.6e} sup_error={pr.sup_error:.6e}",
          file=sys.stderr if args.format != "table" else sys.stdout)
    return 0


def _cmd_experiment(args):
    cfg = None
    if args.config:
        with open(args.config) as fh:
            payload = json.load(fh)
        payload.setdefault("name", args.name)
        payload["output_dir"] = payload.get("output_dir", args.out_dir)
        cfg = experiments.ExperimentConfig(
            **{k: tuple(v) if isinstance(v, list) else v
               for k, v in payload.items()})
    overrides = dict(output_dir=args.out_dir, seed=args.seed,
                     cache=not args.no_cache, cache_dir=args.cache_dir,
                     threads=args.threads)
    out_dir, detail = experiments.run_experiment(args.name, cfg, **overrides)
    print(f"reports written to {out_dir}")
    if isinstance(detail, dict):
        for key in sorted(detail, key=str):
            print(f"  {key}: {detail[key]:.6e}"
                  if isinstance(detail[key], float) else f"  {key}: {detail[key]}")
    return 0


def _cmd_cache(args):
    if args.action == "ls":
        entries = experiments.cache_ls(args.cache_dir)
        rows = [[e.key[:16], str(e.path), f"{e.created_at:.0f}"] for e in entries]
        _emit(rows, ["key", "path", "mtime"], args.format)
        return 0
    count = experiments.cache_clear(args.cache_dir)
    print(f"removed {count} cache entries")
    return 0


_COMMANDS = {
    "basis": _cmd_basis,
    "spectrum": _cmd_spectrum,
    "bounds": _cmd_bounds,
    "project": _cmd_project,
    "experiment": _cmd_experiment,
    "cache": _cmd_cache,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConsistencyError as exc:
        print(f"numerical-consistency failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
