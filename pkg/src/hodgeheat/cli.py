"""Command-line interface: ``hodgeheat <command> [options]``.

Every command reads one complex (``--complex PATH``, ``--generate SPEC`` or
JSON on stdin) and writes deterministic JSON to ``--output`` or stdout.
Exit codes: 0 success, 1 a verified bound failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .complex import ComplexError, WeightedComplex, simplex_key
from .generators import FAMILIES, from_spec
from .geometry import (degree_growth_consistency, metric_from_table, nested_balls,
                       summability_check)
from .heat import (DEFAULT_T_GRID, NonIntrinsicMetric, contraction_check, dgg_check,
                   domination_check, energy_sweep, exhaustion_convergence, l1_extension_check,
                   verify_heat_equation)
from .io import dumps_complex, load_complex, loads_complex, matrix_to_csv
from .operators import (VARIANTS, ModelError, assemble_laplacian, combinatorial_forman,
                        forman_curvature, forman_discrepancy, p_form_check)
from .pipeline import METRICS, DegreeContext, degrees, prepare, validate_complex
from .reports import BoundReport, dumps, rows_to_csv
from .resolvent import (OnSpectrum, rectangle_grid, resolvent_decay_check,
                        squared_resolvent_check, weighted_resolvent_check)
from .spectral import betti, norm_bound_suite, spectrum

CHECK_COMMANDS = ("heat", "dgg-check", "energy-check", "contraction-check", "domination-check",
                  "l1-check", "resolvent-check", "exhaust")
COMMANDS = ("validate", "laplacian", "curvature", "spectrum", "betti", *CHECK_COMMANDS,
            "growth", "generate", "report")


class InputError(Exception):
    """Malformed user input; maps to exit code 2."""


# -- grids --------------------------------------------------------------------------

def _float(token: str) -> float:
    t = token.strip().lower()
    if t in ("inf", "infinity"):
        return math.inf
    return float(t)


def parse_grid(text: str) -> list[float]:
    """"log:a:b:n", "lin:a:b:n", "a:b:n" (linear) or a comma list."""
    try:
        parts = text.split(":")
        if parts[0] in ("log", "lin"):
            kind, parts = parts[0], parts[1:]
        else:
            kind = "lin"
        if len(parts) == 3:
            a, b, n = _float(parts[0]), _float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError("count must be positive")
            vals = np.geomspace(a, b, n) if kind == "log" else np.linspace(a, b, n)
            return [float(v) for v in vals]
        if len(parts) == 1:
            vals = [_float(v) for v in parts[0].split(",") if v.strip()]
            if vals:
                return vals
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}: {exc}") from None
    raise InputError(f"bad grid {text!r}: use log:a:b:n, lin:a:b:n or a comma list")


def parse_z_grid(text: str) -> list[complex]:
    """"rect:re0:re1:im0:im1:nre:nim" or a comma list of complex numbers."""
    try:
        if text.startswith("rect:"):
            a, b, c, d, nr, ni = text.split(":")[1:]
            grid = rectangle_grid((float(a), float(b)), (float(c), float(d)), (int(nr), int(ni)))
            return [complex(z) for z in grid]
        vals = [complex(v.strip().replace(" ", "")) for v in text.split(",") if v.strip()]
        if vals:
            return vals
    except ValueError as exc:
        raise InputError(f"bad z grid {text!r}: {exc}") from None
    raise InputError(f"bad z grid {text!r}")


# -- configuration ------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    complex_path: str | None = None
    generate: list[str] = field(default_factory=list)
    degree: int | None = None
    metric: str = "simplex-rho"
    metric_file: str | None = None
    variant: str = "hodge"
    t_grid: list[float] | None = None
    p_grid: list[float] | None = None
    beta_grid: list[float] | None = None
    z_grid: list[complex] | None = None
    tolerance: float | None = None
    seed: int = 0
    output: str | None = None
    series: str | None = None
    augmented: str | None = None
    timings: bool = False
    samples: int | None = None
    eps: float | None = None
    centre: int = 0

    def __post_init__(self):
        for name in ("t_grid", "p_grid", "beta_grid", "z_grid"):
            grid = getattr(self, name)
            if grid is not None and len(grid) == 0:
                raise InputError(f"{name.replace('_', '-')} must be nonempty")

    @property
    def source(self) -> str:
        if self.generate:
            return "generate:" + " ".join(self.generate)
        return self.complex_path or "<stdin>"

    def header(self) -> dict:
        keep = ("command", "degree", "metric", "variant", "seed", "augmented", "tolerance",
                "t_grid", "p_grid", "beta_grid", "z_grid", "eps", "samples")
        return {"tool": "hodgeheat", "version": __version__, "source": self.source,
                **{k: getattr(self, k) for k in keep}}


# -- loading ------------------------------------------------------------------------

def load_input(cfg: RunConfig, stdin=None) -> WeightedComplex:
    if cfg.complex_path and cfg.generate:
        raise InputError("give either --complex or --generate, not both")
    if cfg.generate:
        try:
            return from_spec(cfg.generate, cfg.augmented or "off")
        except ValueError as exc:
            raise InputError(f"--generate: {exc}") from None
    if cfg.complex_path:
        return load_complex(cfg.complex_path, cfg.augmented)
    stdin = stdin if stdin is not None else sys.stdin
    if stdin.isatty():
        raise InputError("no complex given: use --complex PATH, --generate SPEC or pipe JSON on stdin")
    return loads_complex(stdin.read(), "<stdin>", cfg.augmented)


def _metric_for(cfg: RunConfig, cx: WeightedComplex, k: int):
    if cfg.metric != "file":
        return cfg.metric
    if not cfg.metric_file:
        raise InputError("--metric file needs --metric-file PATH")
    try:
        data = json.loads(Path(cfg.metric_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{cfg.metric_file}: {exc}") from None
    keys = cx.block(k)
    names = {simplex_key(s): s for s in keys}
    table = {}
    for i, row in enumerate(data.get("pairs", []) if isinstance(data, dict) else []):
        if not (isinstance(row, list) and len(row) == 3 and row[0] in names and row[1] in names):
            raise InputError(f"{cfg.metric_file}: $.pairs[{i}]: expected [key, key, distance] "
                             f"with keys of degree-{k} simplices")
        table[(names[row[0]], names[row[1]])] = float(row[2])
    return metric_from_table(keys, table, "file", k)


def _degrees(cfg: RunConfig, cx: WeightedComplex) -> list[int]:
    avail = degrees(cx)
    if cfg.degree is None:
        return avail
    if cfg.degree not in avail:
        raise InputError(f"--degree {cfg.degree} out of range; complex has degrees {avail}")
    return [cfg.degree]


def _contexts(cfg: RunConfig, cx: WeightedComplex) -> list[DegreeContext]:
    out = []
    for k in _degrees(cfg, cx):
        try:
            out.append(prepare(cx, k, _metric_for(cfg, cx, k), cfg.variant))
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return out


def _tol(cfg: RunConfig) -> dict:
    return {} if cfg.tolerance is None else {"tol": cfg.tolerance}


def _t(cfg: RunConfig, default=DEFAULT_T_GRID):
    return default if cfg.t_grid is None else np.asarray(cfg.t_grid)


def _label(rep: BoundReport, ctx: DegreeContext | None) -> BoundReport:
    if ctx is not None:
        rep.params = {"degree": ctx.degree, **rep.params}
    return rep


# -- check runners ------------------------------------------------------------------

def _run_heat(cfg, ctx, rng):
    f = rng.standard_normal(ctx.lap.n) + 1j * rng.standard_normal(ctx.lap.n)
    ts = _t(cfg, [0.5, 1.0, 2.0, 5.0])
    return [verify_heat_equation(ctx.lap, f, ts, **_tol(cfg))]


def _run_dgg(cfg, ctx, rng):
    betas = cfg.beta_grid if cfg.beta_grid is not None else (0.5, 1.0, 2.0)
    return [dgg_check(ctx.lap, ctx.metric, _t(cfg), betas, nu=ctx.fit.nu, rng=rng, **_tol(cfg))]


def _run_energy(cfg, ctx, rng):
    return [energy_sweep(ctx.sd, ctx.metric, rng, cfg.samples or 20, cfg.t_grid, **_tol(cfg))]


def _run_contraction(cfg, ctx, rng):
    M, C = ctx.form_bound()
    return [contraction_check(ctx.lap, M, C, cfg.p_grid, _t(cfg), rng, **_tol(cfg))]


def _run_domination(cfg, ctx, rng):
    return [domination_check(ctx.sd, None, _t(cfg), **_tol(cfg))]


def _run_l1(cfg, ctx, rng):
    ps = cfg.p_grid if cfg.p_grid is not None else (1.5, 3.0, 4.0)
    return [l1_extension_check(ctx.sd, ctx.metric, ctx.fit, _t(cfg), interp_ps=ps, rng=rng, **_tol(cfg))]


def _run_resolvent(cfg, ctx, rng):
    zs = cfg.z_grid
    eps = cfg.eps
    out = [resolvent_decay_check(ctx.lap, ctx.metric, eps if eps is not None else 0.5, **_tol(cfg))]
    out.append(weighted_resolvent_check(ctx.lap, ctx.metric, zs, eps if eps is not None else 0.1, rng=rng))
    out.append(squared_resolvent_check(ctx.lap, ctx.metric, zs, eps if eps is not None else 0.1, **_tol(cfg)))
    return out


def _run_exhaust(cfg, ctx, rng):
    if not 0 <= cfg.centre < ctx.lap.n:
        raise InputError(f"--centre {cfg.centre} out of range for {ctx.lap.n} sites")
    sets = nested_balls(ctx.metric, cfg.centre)
    f = np.zeros(ctx.lap.n)
    f[cfg.centre] = 1.0
    ts = cfg.t_grid if cfg.t_grid is not None else [1.0]
    return [exhaustion_convergence(ctx.sd, sets, f, float(t), **_tol(cfg)) for t in ts]


RUNNERS = {
    "heat": _run_heat,
    "dgg-check": _run_dgg,
    "energy-check": _run_energy,
    "contraction-check": _run_contraction,
    "domination-check": _run_domination,
    "l1-check": _run_l1,
    "resolvent-check": _run_resolvent,
    "exhaust": _run_exhaust,
}


def _positivity_preserving(ctx: DegreeContext) -> bool:
    return bool(np.all(np.real(ctx.sd.o)[ctx.sd.b > 0] > 0))


# -- commands -----------------------------------------------------------------------

def cmd_validate(cfg, cx, rng):
    return {"reports": validate_complex(cx, rng)}


def cmd_laplacian(cfg, cx, rng):
    blocks, csv_parts = [], []
    for k in _degrees(cfg, cx):
        lap = assemble_laplacian(cx, cfg.variant, k)
        blocks.append({"degree": k, "variant": cfg.variant,
                       "keys": [simplex_key(s) for s in lap.keys],
                       "measure": lap.measure, "matrix": lap.matrix,
                       "asymmetry": lap.asymmetry()})
        csv_parts.append((k, matrix_to_csv(lap.matrix, lap.keys)))
    return {"blocks": blocks, "csv": csv_parts}


def cmd_curvature(cfg, cx, rng):
    rows, mismatches = [], []
    for ctx in _contexts(cfg, cx):
        for i, tau in enumerate(ctx.lap.keys):
            row = {"degree": ctx.degree, "simplex": simplex_key(tau),
                   "curvature": float(ctx.sd.c[i] / ctx.sd.m[i])}
            if tau:
                row["forman_formula"] = forman_curvature(cx, tau)
                row["combinatorial_forman"] = combinatorial_forman(cx, tau)
            rows.append(row)
        if ctx.degree >= 0:
            mismatches += [{"degree": ctx.degree, **r} for r in forman_discrepancy(cx, ctx.degree)]
    return {"curvature": rows, "formula_mismatches": mismatches,
            "csv": [(None, rows_to_csv(("degree", "simplex", "curvature"),
                                       [(r["degree"], r["simplex"], r["curvature"]) for r in rows]))]}


def cmd_spectrum(cfg, cx, rng):
    out = []
    for k in _degrees(cfg, cx):
        rep = spectrum(assemble_laplacian(cx, cfg.variant, k))
        if cfg.variant == "hodge" and k >= 0:
            rep.betti = rep.kernel_dim
            rep.reduced = cx.augmented
        out.append(rep.to_dict())
    return {"spectra": out}


def cmd_betti(cfg, cx, rng):
    ks = [k for k in _degrees(cfg, cx) if k >= 0]
    values = {str(k): betti(cx, k) for k in ks}
    return {"betti": values, "reduced": cx.augmented}


def cmd_growth(cfg, cx, rng):
    rows, reports = [], []
    for ctx in _contexts(cfg, cx):
        fit = ctx.fit
        betas = cfg.beta_grid if cfg.beta_grid is not None else [1.5 * fit.nu + 0.1, 0.5, 1.0, 2.0]
        rows.append({"degree": ctx.degree, "metric": ctx.metric.name,
                     "jump_size": ctx.jump_size, "intrinsic": ctx.intrinsic.to_dict(),
                     "fit": fit.to_dict(),
                     "summability": [[float(b), summability_check(ctx.sd.m, ctx.metric, float(b))]
                                     for b in betas]})
        reports.append(_label(degree_growth_consistency(ctx.sd.m, ctx.metric, fit), ctx))
    return {"growth": rows, "reports": reports}


def cmd_check(cfg, cx, rng):
    runner = RUNNERS[cfg.command]
    reports = []
    for ctx in _contexts(cfg, cx):
        reports += [_label(r, ctx) for r in runner(cfg, ctx, rng)]
    return {"reports": reports}


def cmd_report(cfg, cx, rng):
    """Every check on every degree block; the verdict is the conjunction."""
    reports = list(validate_complex(cx, rng))
    reports += norm_bound_suite(cx)
    skipped = []
    for ctx in _contexts(cfg, cx):
        for name in ("heat", "dgg-check", "energy-check", "contraction-check",
                     "domination-check", "l1-check", "resolvent-check"):
            reports += [_label(r, ctx) for r in RUNNERS[name](cfg, ctx, rng)]
        reports.append(_label(p_form_check(ctx.sd, (1.2, 1.5, 2.0, 3.0, 6.0), rng,
                                           cfg.samples or 200), ctx))
        reports.append(_label(degree_growth_consistency(ctx.sd.m, ctx.metric, ctx.fit), ctx))
        if _positivity_preserving(ctx):
            reports += [_label(r, ctx) for r in _run_exhaust(cfg, ctx, rng)]
        else:
            skipped.append({"degree": ctx.degree, "check": "exhaustion",
                            "reason": "block does not preserve positivity"})
    betti_values = {}
    if cfg.variant == "hodge":
        for k in range(0, cx.dim + 1):
            betti_values[str(k)] = betti(cx, k)
    return {"reports": reports, "betti": betti_values, "skipped": skipped}


def cmd_generate(cfg, cx, rng):
    return {"complex_text": dumps_complex(cx)}


HANDLERS = {"validate": cmd_validate, "laplacian": cmd_laplacian, "curvature": cmd_curvature,
            "spectrum": cmd_spectrum, "betti": cmd_betti, "growth": cmd_growth,
            "report": cmd_report, "generate": cmd_generate,
            **{c: cmd_check for c in CHECK_COMMANDS}}


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("input")
    src.add_argument("--complex", dest="complex_path", metavar="PATH", help="complex JSON file")
    src.add_argument("--generate", metavar="SPEC",
                     help=f"built-in family, e.g. \"cycle 3 hollow\"; families: {', '.join(FAMILIES)}")
    src.add_argument("--augmented", choices=("auto", "on", "off"))
    opt = common.add_argument_group("options")
    opt.add_argument("--degree", type=int)
    opt.add_argument("--metric", choices=(*METRICS, "file"), default="simplex-rho")
    opt.add_argument("--metric-file", metavar="PATH",
                     help="JSON {\"pairs\": [[key, key, distance], ...]} for --metric file")
    opt.add_argument("--variant", choices=VARIANTS, default="hodge")
    opt.add_argument("--t-grid", type=parse_grid, metavar="GRID")
    opt.add_argument("--p-grid", type=parse_grid, metavar="GRID")
    opt.add_argument("--beta-grid", type=parse_grid, metavar="GRID")
    opt.add_argument("--z-grid", type=parse_z_grid, metavar="GRID")
    opt.add_argument("--eps", type=float, help="decay rate for resolvent checks")
    opt.add_argument("--samples", type=int, help="random samples (energy triples, p-form vectors)")
    opt.add_argument("--centre", type=int, default=0, help="centre site index for exhaust")
    opt.add_argument("--tolerance", type=float, help="override the check tolerance")
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--output", metavar="PATH", help="JSON output (default stdout)")
    opt.add_argument("--series", metavar="PATH", help="CSV series output")
    opt.add_argument("--timings", action="store_true", help="include runtimes (not deterministic)")

    parser = argparse.ArgumentParser(prog="hodgeheat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hodgeheat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "validate": "check δδ = 0, closure and Stokes adjointness",
        "laplacian": "emit Laplacian blocks",
        "curvature": "potential c/m per simplex and the Forman formula",
        "spectrum": "eigenvalues of each block",
        "betti": "Betti numbers, cross-checked by exact rank",
        "heat": "finite-difference check of the heat equation",
        "dgg-check": "Gaussian-type heat-kernel bounds",
        "energy-check": "weighted energy monotonicity on truncations",
        "contraction-check": "l^p contraction under a form-bounded potential",
        "domination-check": "domination by the free heat kernel",
        "l1-check": "l^1 bound under exponential volume growth",
        "resolvent-check": "weighted resolvent decay",
        "exhaust": "convergence along nested truncations",
        "growth": "volume growth fit and summability",
        "generate": "print a built-in complex as JSON",
        "report": "run every check and give one verdict",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "generate":
            p.add_argument("spec", nargs="+", help="family and arguments")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    gen = args.spec if args.command == "generate" else (args.generate.split() if args.generate else [])
    return RunConfig(command=args.command, complex_path=args.complex_path, generate=gen,
                     degree=args.degree, metric=args.metric, metric_file=args.metric_file,
                     variant=args.variant, t_grid=args.t_grid, p_grid=args.p_grid,
                     beta_grid=args.beta_grid, z_grid=args.z_grid, tolerance=args.tolerance,
                     seed=args.seed, output=args.output, series=args.series,
                     augmented=args.augmented, timings=args.timings, samples=args.samples,
                     eps=args.eps, centre=args.centre)


def _series_csv(reports: list[BoundReport]) -> str:
    rows = []
    for r in reports:
        deg = r.params.get("degree", "")
        rows += [(r.check, deg, *row) for row in r.series]
    return rows_to_csv(("check", "degree", "t", "lhs", "rhs", "slack"), rows)


def execute(cfg: RunConfig, stdin=None) -> tuple[int, str, str | None]:
    """Run one command; returns (exit code, JSON text, CSV text or None)."""
    cx = load_input(cfg, stdin)
    rng = np.random.default_rng(cfg.seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = HANDLERS[cfg.command](cfg, cx, rng)
    messages = sorted({str(w.message) for w in caught})
    for msg in messages:
        print(f"hodgeheat: warning: {msg}", file=sys.stderr)
    if cfg.command == "generate":
        return 0, result["complex_text"], None
    reports = result.pop("reports", [])
    csv_parts = result.pop("csv", None)
    doc = {"header": cfg.header(), **result}
    if messages:
        doc["warnings"] = messages
    code = 0
    if reports or cfg.command in CHECK_COMMANDS or cfg.command in ("validate", "report"):
        doc["reports"] = [r.to_dict(cfg.timings) for r in reports]
        doc["pass"] = all(r.passed for r in reports)
        code = 0 if doc["pass"] else 1
    csv_text = None
    if reports:
        csv_text = _series_csv(reports)
    elif csv_parts:
        csv_text = "".join(text for _, text in csv_parts)
    return code, dumps(doc), csv_text


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
        code, text, csv_text = execute(cfg)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    except ComplexError as exc:
        print(f"hodgeheat: malformed complex: {exc}", file=sys.stderr)
        return 2
    except (InputError, NonIntrinsicMetric, OnSpectrum) as exc:
        print(f"hodgeheat: {exc}", file=sys.stderr)
        return 2
    except (ModelError, ArithmeticError) as exc:
        print(f"hodgeheat: check failed: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg.series and csv_text is not None:
        Path(cfg.series).write_text(csv_text)
    if code == 1:
        doc = json.loads(text)
        for r in doc["reports"]:
            if not r["pass"]:
                print(f"hodgeheat: {r['check']} failed (max violation {r['max_violation']}, "
                      f"tolerance {r['tolerance']}); worst sample: {json.dumps(r['worst_sample'])}",
                      file=sys.stderr)
    return code
