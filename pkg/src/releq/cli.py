"""
Command-line front end.

    releq classify --masses 1,1,1 --a 1
    releq sweep --a 1 --resolution 200 --out fig1a.csv
    releq radius-curve --a 1.5 --b 0.5 --levels 0.05,0.1 --out radii.csv
    releq verify --samples 1000 --seed 42 [--with-dynamics]
    releq integrate --masses 1,1,1 --a 1 --periods 2 --out traj.csv

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 I/O error.
Any flag may also come from ``--config FILE`` holding ``key=value`` lines;
flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from . import criteria, dynamics, oracle, sampling
from .exceptions import ReleqError
from .potentials import Homogeneous, PotentialSpec, make_spec

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


@dataclass
class SweepConfig:
    grid_resolution: int
    potential: PotentialSpec
    r0: Optional[float] = None
    levels: Optional[list] = None
    output_path: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.grid_resolution < 2:
            raise UsageError("resolution must be at least 2")
        for c in self.levels or []:
            if not 0 < c <= 1 / 3:
                raise UsageError(f"levels must lie in (0, 1/3], got {c}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")


def barycentric_grid(resolution: int):
    """Interior lattice points (i, j, k)/resolution with i + j + k = resolution."""
    for i in range(1, resolution - 1):
        for j in range(1, resolution - i):
            k = resolution - i - j
            if k >= 1:
                yield i / resolution, j / resolution, k / resolution


def sweep_rows(cfg: SweepConfig) -> tuple[list, list]:
    spec = cfg.potential
    quasi = not isinstance(spec, Homogeneous)
    header = ["m1", "m2", "m3", "f", "class"]
    if quasi:
        header += ["g", "r0_crit"]
    if cfg.levels:
        header.append("level_band")
    rows = []
    for m in barycentric_grid(cfg.grid_resolution):
        f = criteria.mass_function_f(m)
        row = [m[0], m[1], m[2], f]
        if not quasi:
            row.append(criteria.classify_homogeneous(m, spec.a).classification.value)
        else:
            crit = criteria.solve_critical_radius(f, spec.a, spec.b)
            if cfg.r0 is None:
                row += [criteria.region_label(f, spec.a, spec.b), None, crit]
            else:
                rep = criteria.classify_quasihomogeneous(m, spec.a, spec.b, cfg.r0)
                row += [rep.classification.value, rep.g_value, crit]
        if cfg.levels:
            row.append(sum(1 for c in cfg.levels if f >= c))
        rows.append(row)
    return header, rows


def _write_table(header, rows, path, fmt, extra=None):
    if fmt == "json":
        payload = dict(extra or {})
        payload["columns"] = header
        payload["rows"] = [dict(zip(header, r)) for r in rows]
        text = json.dumps(payload, indent=1, allow_nan=False) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _spec_from(args) -> PotentialSpec:
    if args.a is None:
        raise UsageError("--a is required")
    return make_spec(args.a, args.b)


def _masses_from(args):
    if not args.masses:
        raise UsageError("--masses is required")
    if len(args.masses) != 3:
        raise UsageError(f"--masses needs three values, got {len(args.masses)}")
    return args.masses


def cmd_classify(args) -> int:
    masses = _masses_from(args)
    spec = _spec_from(args)
    if isinstance(spec, Homogeneous):
        rep = criteria.classify_homogeneous(masses, spec.a)
    else:
        if args.r0 is None:
            raise UsageError("--r0 is required for a quasihomogeneous potential")
        rep = criteria.classify_quasihomogeneous(masses, spec.a, spec.b, args.r0)
    out = {"masses": list(masses), "a": spec.a}
    if not isinstance(spec, Homogeneous):
        out.update(b=spec.b, r0=args.r0)
    out.update(rep.to_dict())
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _spec_from(args)
    cfg = SweepConfig(args.resolution, spec, args.r0, args.levels, args.out, args.format)
    header, rows = sweep_rows(cfg)
    extra = {"a": spec.a, "b": getattr(spec, "b", None), "r0": cfg.r0,
             "resolution": cfg.grid_resolution, "levels": cfg.levels}
    _write_table(header, rows, cfg.output_path, cfg.format, extra)
    return EXIT_OK


def cmd_radius_curve(args) -> int:
    spec = _spec_from(args)
    if isinstance(spec, Homogeneous):
        raise UsageError("radius-curve needs a quasihomogeneous potential (--b); "
                         "homogeneous stability does not depend on the size")
    values = args.levels
    if not values:
        raise UsageError("--levels (the f values) is required")
    reg = criteria.regime(spec.a, spec.b)
    kind = {criteria.Regime.BOTH_BELOW: "r0_star", criteria.Regime.STRADDLE: "z1_star"}.get(reg, "none")
    rows = []
    for f in values:
        if not 0 < f <= 1 / 3:
            raise UsageError(f"f values must lie in (0, 1/3], got {f}")
        r = criteria.solve_critical_radius(f, spec.a, spec.b)
        rows.append([f, r, kind if r is not None else "NoRoot"])
    _write_table(["f", "r0_crit", "kind"], rows, args.out, args.format,
                 {"a": spec.a, "b": spec.b, "regime": reg.value})
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples is None or args.samples <= 0:
        raise UsageError("--samples must be a positive integer")
    start = time.perf_counter()
    samples = sampling.random_samples(args.samples, args.seed)
    table = oracle.agreement_harness(samples)
    worst = min(sampling.margin(s) for s in samples)
    print(f"samples: {len(table)}")
    print(f"mismatches: {table.mismatches}")
    print(f"worst margin: {worst:.3e}")
    failed = table.mismatches > 0
    for row in table.rows:
        if not row.match:
            print(f"  MISMATCH {row.sample}: closed-form {row.closed_form}, oracle {row.oracle}")
    if args.with_dynamics:
        failed |= _verify_dynamics(table, args.samples)
    print(f"runtime: {time.perf_counter() - start:.2f} s")
    return EXIT_MISMATCH if failed else EXIT_OK


def _verify_dynamics(table, count) -> bool:
    """Growth rates of the first ``count`` unstable samples whose rate is at least
    5% of the rotation rate (slower ones would need thousands of periods)."""
    from .equilibria import lagrange_triangle

    failed, checked = False, 0
    for row in table.rows:
        if checked >= count:
            break
        if row.oracle is not oracle.Classification.UNSTABLE:
            continue
        s = row.sample
        re = lagrange_triangle(s.masses, make_spec(s.a, s.b), s.r0)
        lam = oracle.full_spectrum(re).eigenvalues.real.max()
        if lam < 0.05 * float(re.omega_hat):
            continue
        try:
            rate = dynamics.growth_rate(re)
        except ReleqError as exc:
            print(f"  dynamics FAILED {s}: {exc}")
            failed, checked = True, checked + 1
            continue
        rel = abs(rate - lam) / lam
        ok = rel < 0.05
        failed |= not ok
        checked += 1
        print(f"  growth {'ok ' if ok else 'BAD'} spectral {lam:.6g} measured {rate:.6g} rel {rel:.2e}")
    print(f"dynamics checks: {checked}")
    return failed


def cmd_integrate(args) -> int:
    from .equilibria import lagrange_triangle

    masses = _masses_from(args)
    spec = _spec_from(args)
    if not isinstance(spec, Homogeneous) and args.r0 is None:
        raise UsageError("--r0 is required for a quasihomogeneous potential")
    re = lagrange_triangle(masses, spec, args.r0)
    st = dynamics.equilibrium_state(re)
    if args.perturb:
        _, v = dynamics._leading_mode(re)
        d = args.perturb * re.scale * v / math.sqrt(float(v @ v))
        n2 = 2 * re.n
        st = dynamics.PhaseState(st.x + d[:n2], st.y + d[n2:], 0.0)
    dt = dynamics.default_dt(re.omega_hat) if args.dt is None else args.dt
    steps = int(math.ceil(args.periods * 2 * math.pi / float(re.omega_hat) / dt))
    traj = dynamics.integrate(st, re.masses, spec, re.omega_hat, dt, steps, stride=args.stride)
    if args.out in (None, "-"):
        dynamics.write_trajectory_csv(traj, sys.stdout)
    else:
        dynamics.write_trajectory_csv(traj, args.out)
    return EXIT_OK


def _common(p, *, masses=False, r0=True, out=True):
    if masses:
        p.add_argument("--masses", type=_floats, help="m1,m2,m3")
    p.add_argument("--a", type=float, help="exponent of the stronger term")
    p.add_argument("--b", type=float, default=None, help="second exponent (quasihomogeneous)")
    if r0:
        p.add_argument("--r0", type=float, default=None, help="side of the triangle")
    if out:
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="releq", description=__doc__.split("\n\n")[1])
    parser.add_argument("--config", default=None, help="key=value file mirroring the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify one Lagrange triangle")
    _common(p, masses=True, out=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="stability regions over the triangle of normalized masses")
    _common(p)
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--levels", type=_floats, default=None, help="level values c of f = c")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("radius-curve", help="critical side as a function of f")
    _common(p, r0=False)
    p.add_argument("--levels", "--f-values", dest="levels", type=_floats, default=None)
    p.set_defaults(func=cmd_radius_curve)

    p = sub.add_parser("verify", help="closed form vs full-spectrum oracle on random samples")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-dynamics", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("integrate", help="integrate the rotating-frame equations")
    _common(p, masses=True, out=False)
    p.add_argument("--periods", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--perturb", type=float, default=0.0, help="relative size of the initial deviation")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_integrate)
    return parser


def read_config(path: str) -> list:
    """Translate ``key=value`` lines into command-line tokens."""
    tokens = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "yes", "on"):
                tokens.append(flag)
            elif value.lower() in ("false", "no", "off"):
                continue
            else:
                tokens += [flag, value]
    return tokens


def _expand_config(argv: list) -> list:
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    commands = {"classify", "sweep", "radius-curve", "verify", "integrate"}
    pos = next((k for k, tok in enumerate(rest) if tok in commands), None)
    if pos is None:
        raise UsageError("no subcommand given")
    # file flags go first so explicit flags override them
    return rest[:pos + 1] + read_config(path) + rest[pos + 1:]


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _expand_config(argv)
    except UsageError as exc:
        print(f"releq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"releq: error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"releq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"releq: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
