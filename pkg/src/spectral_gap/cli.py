"""Command-line front end.

Exit status: 0 when every requested verdict passes, 2 when a verdict fails
(or cannot be decided), 1 on errors such as malformed flags or configs.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

from . import eigen, lab
from . import model as md
from . import radial as rd
from . import specialfn as sf

EXIT_OK, EXIT_ERROR, EXIT_VERDICT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def fmt12(x: float) -> str:
    return f"{x:.12g}"


def parse_length(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError("L must be > 0 or inf")
    return val


def float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSettings:
    Ls: tuple[float, ...] = ()
    grid_n: int = 255
    richardson: bool = True
    k: int = 3
    tol: float = eigen.DEFAULT_TOL
    seed: int = eigen.DEFAULT_SEED
    workers: int = 1
    alpha: float = lab.ALPHA_TEST
    beta: float = lab.BETA_TEST
    lower_factor: float = 0.5
    slack: float = 0.01


@dataclass(frozen=True)
class OutputSettings:
    json: str = ""


@dataclass(frozen=True)
class RunConfig:
    potential: md.PotentialSpec
    sweep: SweepSettings = field(default_factory=SweepSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def to_toml_dict(self) -> dict:
        sweep = {f.name: getattr(self.sweep, f.name) for f in fields(SweepSettings)}
        sweep["Ls"] = list(sweep["Ls"])
        pot = {k: v for k, v in self.potential.to_dict().items() if v is not None}
        return {"potential": pot, "sweep": sweep, "output": {"json": self.output.json}}


def _section(cls, data: dict, name: str):
    known = {f.name: f for f in fields(cls)}
    extra = set(data) - set(known)
    if extra:
        raise ValueError(f"unknown keys in [{name}]: {sorted(extra)}")
    out = {}
    for key, val in data.items():
        default = getattr(cls(), key)
        if isinstance(default, bool):
            if not isinstance(val, bool):
                raise ValueError(f"[{name}].{key} must be a boolean")
        elif isinstance(default, int):
            if isinstance(val, bool) or not isinstance(val, int):
                raise ValueError(f"[{name}].{key} must be an integer")
        elif isinstance(default, float):
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ValueError(f"[{name}].{key} must be a number")
            val = float(val)
        elif isinstance(default, tuple):
            if not isinstance(val, list) or not all(isinstance(v, (int, float)) for v in val):
                raise ValueError(f"[{name}].{key} must be a list of numbers")
            val = tuple(float(v) for v in val)
        elif isinstance(default, str) and not isinstance(val, str):
            raise ValueError(f"[{name}].{key} must be a string")
        out[key] = val
    return cls(**out)


def config_from_dict(data: dict, default_dim: int = 2) -> RunConfig:
    extra = set(data) - {"potential", "sweep", "output"}
    if extra:
        raise ValueError(f"unknown sections: {sorted(extra)}")
    if "potential" not in data:
        raise ValueError("missing [potential] section")
    pot = dict(data["potential"])
    pot.setdefault("dim", default_dim)
    for key, val in pot.items():
        if key != "kind" and (isinstance(val, bool) or not isinstance(val, (int, float))):
            raise ValueError(f"[potential].{key} must be a number")
    pot = {k: (v if k in ("kind", "dim") else float(v)) for k, v in pot.items()}
    potential = md.PotentialSpec.from_dict(pot)
    sweep = _section(SweepSettings, data.get("sweep", {}), "sweep")
    output = _section(OutputSettings, data.get("output", {}), "output")
    if sweep.grid_n < 8:
        raise ValueError("[sweep].grid_n must be >= 8")
    if sweep.workers < 1:
        raise ValueError("[sweep].workers must be >= 1")
    if any(L <= 0 for L in sweep.Ls):
        raise ValueError("[sweep].Ls must be positive")
    return RunConfig(potential, sweep, output)


def load_config(path, default_dim: int = 2) -> RunConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return config_from_dict(data, default_dim)


def dump_config(cfg: RunConfig) -> str:
    return tomli_w.dumps(cfg.to_toml_dict())


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    sweep = {f.name: getattr(cfg.sweep, f.name) for f in fields(SweepSettings)}
    if args.L is not None:
        sweep["Ls"] = tuple(args.L)
    for name in ("grid_n", "k", "tol", "seed", "workers"):
        if getattr(args, name, None) is not None:
            sweep[name] = getattr(args, name)
    if getattr(args, "richardson", None) is not None:
        sweep["richardson"] = args.richardson
    output = cfg.output
    if args.out is not None:
        output = OutputSettings(json=str(args.out))
    return RunConfig(cfg.potential, SweepSettings(**sweep), output)


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _print_verdicts(verdicts, out) -> int:
    code = EXIT_OK
    for v in verdicts:
        state = {True: "PASS", False: "FAIL", None: "INDETERMINATE"}[v.passed]
        print(f"{state:13s} {v.name:30s} margin={v.margin:.6g}  {v.detail}", file=out)
        if v.passed is not True:
            code = EXIT_VERDICT
    return code


def cmd_bessel(args, out) -> int:
    if args.action == "zero":
        kind = sf.BesselKind.SECOND if args.second_kind else sf.BesselKind.FIRST
        print(f"{sf.bessel_zero(args.order, args.k, kind):.12f}", file=out)
    elif args.action == "eval":
        fn = {("j", False): sf.bessel_j, ("y", False): sf.bessel_y,
              ("j", True): sf.bessel_j_prime, ("y", True): sf.bessel_y_prime}[(args.kind, args.derivative)]
        print(fmt12(fn(args.order, args.x)), file=out)
    else:
        print(fmt12(sf.gamma(args.x)), file=out)
    return EXIT_OK


def cmd_radial(args, out) -> int:
    n = 0 if args.n is None else args.n
    p = rd.RadialProblem(n, args.c, args.rho, args.L)
    if args.secular is not None:
        print(fmt12(rd.secular_value(p, args.secular)), file=out)
        return EXIT_OK
    levels = rd.sector_levels(p, args.count) if args.n is not None else rd.radial_eigenvalues(p, args.count)
    print(f"{'#':>3} {'lambda':>20} {'n':>4} {'k':>4} {'mult':>5}", file=out)
    for i, lev in enumerate(levels):
        print(f"{i:>3} {fmt12(lev.lam):>20} {lev.n:>4} {lev.k_radial:>4} {lev.multiplicity:>5}", file=out)
    return EXIT_OK


def cmd_convergence(args, out) -> int:
    rows = lab.radial_convergence_study(args.c, args.rho, args.L)
    print(f"{'L':>10} {'nu0':>14} {'err0':>11} {'nu1':>14} {'err1':>11}", file=out)
    for r in rows:
        print(f"{r['L']:>10.4g} {r['nu0']:>14.8f} {r['err0']:>11.3e} {r['nu1']:>14.8f} {r['err1']:>11.3e}", file=out)
    print(f"{'limit':>10} {rows[0]['limit0']:>14.8f} {'':>11} {rows[0]['limit1']:>14.8f}", file=out)
    if args.chain:
        ch = lab.quadratic_chain(args.c)
        print(f"chain nu1(inf,1/sqrt2) - nu0(inf,1/2) = {fmt12(ch['difference'])}  "
              f"closed form = {fmt12(ch['closed_form'])}", file=out)
    return EXIT_OK


def cmd_annulus(args, out) -> int:
    print(fmt12(rd.annulus_eigenvalue(args.delta, args.rho, args.n, args.k)), file=out)
    return EXIT_OK


def cmd_condition(args, out) -> int:
    holds = rd.gap_condition_holds(args.c, args.ratio)
    lhs = sf.bessel_zero(math.sqrt(args.c), 1)
    rhs = args.ratio * min(sf.bessel_zero(math.sqrt(1 + args.c), 1), sf.bessel_zero(math.sqrt(args.c), 2))
    print(f"{'true' if holds else 'false'}  j_sqrt(c),1={fmt12(lhs)}  ratio*min={fmt12(rhs)}", file=out)
    return EXIT_OK


SHAPE_LABELS = {"square": "cos(pi/4)", "hexagon": "cos(pi/6)", "octagon": "cos(pi/8)", "ball": "1"}


def _truncate4(c: float) -> str:
    return "unbounded" if math.isinf(c) else f"{math.floor(c * 1e4) / 1e4:.4f}"


def cmd_maxc(args, out) -> int:
    if args.shape is not None:
        ratio = rd.shape_ratio(args.shape)
        label = SHAPE_LABELS[args.shape]
    else:
        ratio = args.ratio
        label = fmt12(ratio)
    c = rd.max_c_for_ratio(ratio)
    exact = "inf" if math.isinf(c) else fmt12(c)
    print(f"{_truncate4(c)}  ratio={label}={fmt12(ratio)}  c*={exact}", file=out)
    return EXIT_OK


def cmd_table1(args, out) -> int:
    print(f"{'shape':10s} {'ratio':>22s} {'c':>10s}", file=out)
    for shape in ("square", "hexagon", "octagon", "ball"):
        ratio = rd.shape_ratio(shape)
        c = rd.max_c_for_ratio(ratio)
        print(f"{shape:10s} {SHAPE_LABELS[shape] + ' = ' + f'{ratio:.6f}':>22s} {_truncate4(c):>10s}", file=out)
    return EXIT_OK


def _print_records(records, out):
    print(f"{'L':>10} {'lambda0':>14} {'lambda1':>14} {'gap':>14} {'physical_gap':>14}", file=out)
    for r in records:
        print(f"{r.L:>10.6g} {r.lambda0:>14.6f} {r.lambda1:>14.6f} {r.gap:>14.6f} {r.physical_gap:>14.6g}", file=out)


def cmd_gap(args, out) -> int:
    if args.action == "oracle1d":
        if args.gamma == 0:
            pot = md.Zero()
        else:
            pot = md.OneSidedStrip(args.gamma, args.delta)
        l0, l1 = lab.separable_gap_oracle(pot, args.L, args.n1d)
        print(f"lambda0={fmt12(l0)} lambda1={fmt12(l1)} gap={fmt12(l1 - l0)}", file=out)
        return EXIT_OK
    if args.action == "show":
        report = lab.load_report(args.file)
        _print_records(report.records, out)
        return _print_verdicts(report.verdicts, out)
    cfg = _apply_overrides(load_config(args.config), args)
    if args.print_config:
        out.write(dump_config(cfg))
        return EXIT_OK
    s = cfg.sweep
    report = lab.sweep_gap(cfg.potential, s.Ls, s.grid_n, s.richardson, k=s.k, tol=s.tol, seed=s.seed,
                           workers=s.workers, alpha=s.alpha, beta=s.beta, lower_factor=s.lower_factor)
    _print_records(report.records, out)
    if cfg.output.json:
        jp, cp = lab.persist_report(report, cfg.output.json)
        print(f"wrote {jp} {cp}", file=out)
    return _print_verdicts(report.verdicts, out)


def cmd_dim3(args, out) -> int:
    cfg = _apply_overrides(load_config(args.config, default_dim=3), args)
    if args.print_config:
        out.write(dump_config(cfg))
        return EXIT_OK
    s = cfg.sweep
    rep = lab.higher_dim_check(cfg.potential, s.Ls, s.grid_n, slack=s.slack, tol=s.tol, seed=s.seed)
    print(f"{'L':>8} {'lambda0':>14} {'bound0':>14} {'lambda1':>14} {'lower1':>14} {'L^2 gap':>12}", file=out)
    for r in rep.rows:
        print(f"{r['L']:>8.4g} {r['lambda0']:>14.8g} {r['bound0']:>14.8g} {r['lambda1']:>14.8g} "
              f"{r['lower1']:>14.8g} {r['scaled_gap']:>12.6f}", file=out)
    return _print_verdicts(rep.verdicts, out)


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        out[key] = float(val)
    return out


def cmd_box(args, out) -> int:
    pot = md.PotentialSpec.from_dict({"kind": args.kind, "dim": args.dim, **_parse_params(args.param)})
    frame = md.Frame(args.frame)
    prob = md.BoxProblem(args.L, pot, args.grid_n, frame)
    if args.cell is not None:
        bounds = list(zip(args.cell[0::2], args.cell[1::2]))
        print(fmt12(md.potential_cell_average(pot, args.L, bounds)), file=out)
        return EXIT_OK
    op = md.assemble(prob)
    res = eigen.smallest_eigenpairs(op, args.k, args.tol, args.seed)
    for i, (lam, r) in enumerate(zip(res.eigenvalues, res.residual_norms)):
        print(f"lambda{i} {fmt12(lam)}  residual={r:.2e}", file=out)
    print(f"iterations={res.iterations} converged={res.converged} method={res.method}", file=out)
    if res.ties:
        print(f"ties={list(res.ties)}", file=out)
    if args.other_frame:
        other = eigen.smallest_eigenpairs(md.assemble(md.scale_transform(prob)), args.k, args.tol, args.seed)
        factor = args.L**2 if frame is md.Frame.SCALED else args.L**-2
        for i, lam in enumerate(other.eigenvalues):
            print(f"other_frame_lambda{i} {fmt12(lam)}  rescaled={fmt12(lam * factor)}", file=out)
    if args.reference is not None:
        if frame is not md.Frame.SCALED:
            raise UsageError("--reference needs the scaled frame")
        index = md.GROUND if args.reference == 0 else md.first_excited(args.reference)
        mode = md.reference_mode(pot.dim, index)
        rq = eigen.rayleigh_quotient(op, mode(md.grid_coordinates(prob)))
        print(f"rayleigh_quotient {fmt12(rq)}", file=out)
    return 0 if res.converged else EXIT_VERDICT


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_sweep_overrides(p):
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--L", type=float_list, help="comma-separated box sizes (overrides the file)")
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--richardson", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--out", type=Path, help="JSON report path; CSV is written alongside")
    p.add_argument("--print-config", action="store_true", help="echo the resolved config as TOML and exit")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="spectral-gap", description="Spectral gaps of Schroedinger operators on boxes.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bessel", help="Bessel functions, zeros and the gamma function")
    bsub = b.add_subparsers(dest="action", required=True, parser_class=_Parser)
    z = bsub.add_parser("zero")
    z.add_argument("--order", type=float, required=True)
    z.add_argument("--k", type=int, required=True)
    z.add_argument("--second-kind", action="store_true")
    e = bsub.add_parser("eval")
    e.add_argument("--order", type=float, required=True)
    e.add_argument("--x", type=float, required=True)
    e.add_argument("--kind", choices=("j", "y"), default="j")
    e.add_argument("--derivative", action="store_true")
    g = bsub.add_parser("gamma")
    g.add_argument("--x", type=float, required=True)
    b.set_defaults(func=cmd_bessel)

    r = sub.add_parser("radial", help="eigenvalues of the regularised inverse-square disc operator")
    r.add_argument("--n", type=int, help="single angular sector (default: all sectors merged)")
    r.add_argument("--c", type=float, required=True)
    r.add_argument("--rho", type=float, default=1.0)
    r.add_argument("--L", type=parse_length, default=math.inf)
    r.add_argument("--count", type=int, default=4)
    r.add_argument("--secular", type=float, metavar="LAMBDA", help="print the secular function at LAMBDA")
    r.set_defaults(func=cmd_radial)

    cv = sub.add_parser("convergence", help="radial eigenvalues against their L = inf limits")
    cv.add_argument("--c", type=float, required=True)
    cv.add_argument("--rho", type=float, default=1.0)
    cv.add_argument("--L", type=float_list, default=[10.0, 100.0, 1000.0, 10000.0])
    cv.add_argument("--chain", action="store_true", help="also print the quadratic lower-bound chain")
    cv.set_defaults(func=cmd_convergence)

    a = sub.add_parser("annulus", help="Dirichlet eigenvalue of an annulus")
    a.add_argument("--delta", type=float, required=True)
    a.add_argument("--rho", type=float, required=True)
    a.add_argument("--n", type=int, default=0)
    a.add_argument("--k", type=int, default=1)
    a.set_defaults(func=cmd_annulus)

    c = sub.add_parser("condition", help="gap condition for c at a radius ratio")
    c.add_argument("--c", type=float, required=True)
    c.add_argument("--ratio", type=float, required=True)
    c.set_defaults(func=cmd_condition)

    m = sub.add_parser("maxc", help="largest admissible c for a ratio or shape")
    grp = m.add_mutually_exclusive_group(required=True)
    grp.add_argument("--ratio", type=float)
    grp.add_argument("--shape", choices=tuple(SHAPE_LABELS))
    m.set_defaults(func=cmd_maxc)

    t = sub.add_parser("table1", help="admissible c for square, hexagon, octagon and ball")
    t.set_defaults(func=cmd_table1)

    gp = sub.add_parser("gap", help="gap sweeps and the separable strip oracle")
    gsub = gp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    sw = gsub.add_parser("sweep")
    _add_sweep_overrides(sw)
    o1 = gsub.add_parser("oracle1d")
    o1.add_argument("--gamma", type=float, required=True)
    o1.add_argument("--delta", type=float, default=1.0)
    o1.add_argument("--L", type=float, required=True)
    o1.add_argument("--n1d", type=int, default=10_000)
    sh = gsub.add_parser("show")
    sh.add_argument("file", type=Path)
    gp.set_defaults(func=cmd_gap)

    d3 = sub.add_parser("dim3", help="three-dimensional ground-state bound check")
    _add_sweep_overrides(d3)
    d3.set_defaults(func=cmd_dim3)

    bx = sub.add_parser("box", help="lowest eigenvalues of one box problem")
    bx.add_argument("--kind", default="Zero", choices=tuple(md.POTENTIALS))
    bx.add_argument("--param", action="append", metavar="KEY=VALUE")
    bx.add_argument("--dim", type=int, default=2)
    bx.add_argument("--L", type=float, default=1.0)
    bx.add_argument("--grid-n", dest="grid_n", type=int, default=63)
    bx.add_argument("--frame", choices=[f.value for f in md.Frame], default="scaled")
    bx.add_argument("--k", type=int, default=3)
    bx.add_argument("--tol", type=float, default=eigen.DEFAULT_TOL)
    bx.add_argument("--seed", type=int, default=eigen.DEFAULT_SEED)
    bx.add_argument("--other-frame", action="store_true", help="also solve the other frame and rescale")
    bx.add_argument("--reference", type=int, metavar="J",
                    help="Rayleigh quotient of the free mode: 0 = ground, J = first excited along axis J")
    bx.add_argument("--cell", type=float, nargs="+", metavar="BOUND",
                    help="print the cell average over lo1 hi1 lo2 hi2 ... instead of solving")
    bx.set_defaults(func=cmd_box)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (ValueError, TypeError, OSError, tomllib.TOMLDecodeError, NotImplementedError, MemoryError) as exc:
        print(f"spectral-gap: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
