"""Command-line interface: curvature, deflect, sweep and gbcheck subcommands.

Exit codes: 0 success, 1 tolerance or identity failure, 2 invalid input or
domain error, 3 ray captured.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import OrbitSense, sereno_series
from .curvature import closed_form_K, gauss_curvature, gauss_curvature_liouville
from .errors import CaptureError, DomainError, NonConvergence, StepFailure, ToleranceNotMet
from .gauss_bonnet import QuadratureConfig, SectorRegion, deflection_gb, gb_terms
from .geodesics import DeflectionMethod, DeflectionResult, ShootConfig, shoot_deflection
from .metrics import MetricId, Point, SpacetimeParams, check_point, parse_metric

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_DOMAIN = 2
EXIT_CAPTURED = 3

ARCSEC_PER_RAD = 180.0 * 3600.0 / math.pi

DEFLECTION_HEADER = ["metric", "M", "a", "sense", "b", "method", "delta", "error_estimate"]

# Denominator floor for the pairwise relative error between curvature routes,
# in units of 1/r^2 so that the flat metric (K = 0) reports rounding noise
# rather than 0/0.
_K_FLOOR = 1e-9


class UsageError(ValueError):
    """Flag values that are invalid before any computation starts."""


@dataclass(frozen=True)
class RunConfig:
    metric: MetricId
    params: SpacetimeParams
    sense: OrbitSense = OrbitSense.RETROGRADE
    methods: tuple[DeflectionMethod, ...] = (DeflectionMethod.GAUSS_BONNET,)
    b_values: tuple[float, ...] = ()
    rel_tol: float | None = None
    out: str | None = None
    fmt: str = "csv"
    arcsec: bool = False
    jobs: int = 1
    extra: dict = field(default_factory=dict)


def fmt_num(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.17g" % x


# ---------------------------------------------------------------- parsing


def _parse_methods(text: str) -> tuple[DeflectionMethod, ...]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            m = DeflectionMethod(tok)
        except ValueError:
            choices = ",".join(m.value for m in DeflectionMethod)
            raise UsageError(f"--method: unknown method {tok!r} (choose from {choices})") from None
        if m not in out:
            out.append(m)
    if not out:
        raise UsageError("--method: empty method list")
    return tuple(out)


def _b_range(args) -> tuple[float, ...]:
    if args.b is not None:
        if any(x is not None for x in (args.b_min, args.b_max, args.b_points)):
            raise UsageError("--b cannot be combined with --b-min/--b-max/--b-points")
        return (float(args.b),)
    if args.b_min is None or args.b_max is None or args.b_points is None:
        raise UsageError("give --b, or all of --b-min, --b-max and --b-points")
    lo, hi, n = args.b_min, args.b_max, args.b_points
    if n < 2:
        raise UsageError(f"--b-points: need at least 2 points, got {n}")
    if not (0 < lo < hi):
        raise UsageError(f"--b-min/--b-max: need 0 < b-min < b-max, got [{lo!r}, {hi!r}]")
    if args.b_scale == "log":
        ratio = hi / lo
        vals = [lo * ratio ** (i / (n - 1)) for i in range(n)]
    else:
        vals = list(np.linspace(lo, hi, n))
    vals[0], vals[-1] = lo, hi
    # 17-digit round trip noise such as 400.00000000000011 -> 400
    return tuple(float("%.15g" % v) for v in vals)


def _params(args, metric) -> SpacetimeParams:
    if args.mass < 0:
        raise UsageError(f"--mass: must be >= 0, got {args.mass!r}")
    if args.spin < 0:
        raise UsageError(f"--spin: must be >= 0 (use --sense for the direction), got {args.spin!r}")
    if args.spin != 0 and metric is not MetricId.KERR:
        raise UsageError(f"--spin: only meaningful for --metric kerr, got metric {metric.value}")
    return SpacetimeParams(M=args.mass, a=args.spin)


def build_config(args) -> RunConfig:
    try:
        metric = parse_metric(args.metric)
    except ValueError as exc:
        raise UsageError(f"--metric: {exc}") from None
    params = _params(args, metric)
    if args.rel_tol is not None and not args.rel_tol > 0:
        raise UsageError(f"--rel-tol: must be positive, got {args.rel_tol!r}")
    kw = dict(
        metric=metric,
        params=params,
        sense=OrbitSense.parse(getattr(args, "sense", "retro")),
        rel_tol=args.rel_tol,
        out=args.out,
        fmt=args.format,
        arcsec=getattr(args, "arcsec", False),
        jobs=max(1, getattr(args, "jobs", 1) or 1),
    )
    if args.command in ("deflect", "sweep"):
        kw["methods"] = _parse_methods(args.method)
        kw["b_values"] = _b_range(args)
        if args.command == "sweep" and len(kw["b_values"]) < 2:
            raise UsageError("sweep needs a b-range with at least 2 points")
    elif args.command == "curvature":
        if not args.r:
            raise UsageError("--r: need at least one radius")
        kw["extra"] = {"r": tuple(args.r), "phi": args.phi}
    elif args.command == "gbcheck":
        if not args.tol > 0:
            raise UsageError(f"--tol: must be positive, got {args.tol!r}")
        kw["extra"] = {
            "region": SectorRegion(args.r_min, args.r_max, args.phi_min, args.phi_max),
            "tol": args.tol,
        }
    return RunConfig(**kw)


# ---------------------------------------------------------------- output


def _write(cfg: RunConfig, header: list[str], rows: list[list], stream) -> None:
    if cfg.fmt == "json":
        recs = [dict(zip(header, row)) for row in rows]
        json.dump(recs, stream, indent=1)
        stream.write("\n")
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt_num(v) for v in row])


def _emit(cfg: RunConfig, header, rows, stdout) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            _write(cfg, header, rows, fh)
    else:
        _write(cfg, header, rows, stdout)


# ---------------------------------------------------------------- commands


def compute_deflection(metric, params, b, method, sense, rel_tol=None) -> DeflectionResult:
    """One deflection angle, in radians, by the requested method."""
    metric = parse_metric(metric)
    method = DeflectionMethod(method)
    if method is DeflectionMethod.GAUSS_BONNET:
        qc = QuadratureConfig() if rel_tol is None else QuadratureConfig(rel_tol=rel_tol)
        return deflection_gb(metric, params, b, qc)
    if method is DeflectionMethod.SHOOTING:
        sc = ShootConfig() if rel_tol is None else ShootConfig(rel_tol=rel_tol)
        return shoot_deflection(metric, params, b, sc)
    if not b > 0:
        raise DomainError(f"impact parameter must be positive, got {b!r}")
    if metric is MetricId.FLAT:
        return DeflectionResult(0.0, method, 0.0, 0)
    a = params.a if metric is MetricId.KERR else 0.0
    return DeflectionResult(sereno_series(params.M, a, b, sense), method, 0.0, 1)


def _row(cfg: RunConfig, b, method, res: DeflectionResult | None):
    scale = ARCSEC_PER_RAD if cfg.arcsec else 1.0
    head = [cfg.metric.value, cfg.params.M, cfg.params.a, cfg.sense.label, b, method.value]
    if res is None:
        return head + [math.nan, math.nan]
    return head + [res.angle * scale, res.error_estimate * scale]


def _classify(exc: BaseException) -> tuple[str, int]:
    if isinstance(exc, CaptureError):
        return "captured", EXIT_CAPTURED
    if isinstance(exc, (DomainError, ValueError)):
        return "domain-error", EXIT_DOMAIN
    if isinstance(exc, (ToleranceNotMet, NonConvergence, StepFailure)):
        return "tolerance-not-met", EXIT_TOLERANCE
    raise exc


def cmd_curvature(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    header = ["r", "phi", "K_riemann", "K_liouville", "K_closed_form", "max_pairwise_rel_err"]
    rows = []
    phi = cfg.extra["phi"]
    for r in cfg.extra["r"]:
        p = Point(r, phi)
        try:
            check_point(cfg.metric, cfg.params, r)
            ks = [f(cfg.metric, cfg.params, p)
                  for f in (gauss_curvature, gauss_curvature_liouville, closed_form_K)]
        except DomainError as exc:
            print(f"error: {exc}", file=stderr)
            return EXIT_DOMAIN
        except RuntimeError as exc:
            print(f"error: {exc}", file=stderr)
            return EXIT_TOLERANCE
        floor = _K_FLOOR / (r * r)
        rel = max(
            abs(ks[i] - ks[j]) / max(abs(ks[i]), abs(ks[j]), floor)
            for i in range(3) for j in range(i + 1, 3)
        )
        rows.append([r, phi, *ks, rel])
    _emit(cfg, header, rows, stdout)
    return EXIT_OK


def cmd_deflect(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """One row per (b, method); stops at the first failure after writing what succeeded."""
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    header = DEFLECTION_HEADER + ["evaluations"]
    rows, code = [], EXIT_OK
    for b in cfg.b_values:
        for m in cfg.methods:
            try:
                res = compute_deflection(cfg.metric, cfg.params, b, m, cfg.sense, cfg.rel_tol)
            except Exception as exc:  # noqa: BLE001 - classified below
                status, code = _classify(exc)
                print(f"error: {m.value} at b={fmt_num(b)}: {status}: {exc}", file=stderr)
                break
            rows.append(_row(cfg, b, m, res) + [res.evaluations])
        if code:
            break
    _emit(cfg, header, rows, stdout)
    return code


def _sweep_point(task):
    metric, M, a, b, method, sense, rel_tol = task
    try:
        res = compute_deflection(metric, SpacetimeParams(M, a), b, method, sense, rel_tol)
    except Exception as exc:  # noqa: BLE001
        status, code = _classify(exc)
        return None, status, code, str(exc)
    return res, "ok", EXIT_OK, ""


def cmd_sweep(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Deflection over a b-range.  Failures are recorded per row in ``status``;
    the exit code is the most severe failure seen.
    """
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    header = DEFLECTION_HEADER + ["status"]
    order = sorted(
        ((b, m) for b in cfg.b_values for m in cfg.methods), key=lambda t: (t[0], t[1].value)
    )
    tasks = [
        (cfg.metric.value, cfg.params.M, cfg.params.a, b, m.value, int(cfg.sense), cfg.rel_tol)
        for b, m in order
    ]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]

    rows, code = [], EXIT_OK
    severity = {EXIT_OK: 0, EXIT_TOLERANCE: 1, EXIT_DOMAIN: 2, EXIT_CAPTURED: 3}
    for (b, m), (res, status, c, msg) in zip(order, results):
        rows.append(_row(cfg, b, m, res) + [status])
        if c:
            print(f"error: {m.value} at b={fmt_num(b)}: {status}: {msg}", file=stderr)
            if severity[c] > severity[code]:
                code = c
    _emit(cfg, header, rows, stdout)
    return code


def cmd_gbcheck(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    reg: SectorRegion = cfg.extra["region"]
    tol = cfg.extra["tol"]
    qc = QuadratureConfig(rel_tol=cfg.rel_tol or 1e-12, curvature="analytic")
    try:
        t = gb_terms(cfg.metric, cfg.params, reg, qc)
    except DomainError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DOMAIN
    except ToleranceNotMet as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_TOLERANCE
    header = ["metric", "M", "a", "r_min", "r_max", "phi_min", "phi_max",
              "boundary_integral", "area_integral", "corner_sum", "residual", "error_estimate"]
    row = [cfg.metric.value, cfg.params.M, cfg.params.a, reg.r_min, reg.r_max,
           reg.phi_min, reg.phi_max, t.boundary_integral, t.area_integral,
           t.corner_sum, t.residual, t.error_estimate]
    _emit(cfg, header, [row], stdout)
    # the residual is only known to within the quadrature error
    if not abs(t.residual) + t.error_estimate < tol:
        print(f"error: |residual| + error = {abs(t.residual) + t.error_estimate:.3g} "
              f"is not below tolerance {tol:.3g}", file=stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


COMMANDS = {
    "curvature": cmd_curvature,
    "deflect": cmd_deflect,
    "sweep": cmd_sweep,
    "gbcheck": cmd_gbcheck,
}


# ---------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--metric", default="schwarzschild",
                        help="flat, schwarzschild or kerr (default: schwarzschild)")
    common.add_argument("--mass", type=float, default=1.0, help="lens mass M (default 1)")
    common.add_argument("--spin", type=float, default=0.0, help="Kerr spin a >= 0 (default 0)")
    common.add_argument("--rel-tol", type=float, default=None,
                        help="relative tolerance for quadrature/integration")
    common.add_argument("--out", default=None, help="output path (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    defl = argparse.ArgumentParser(add_help=False)
    defl.add_argument("--b", type=float, default=None, help="impact parameter")
    defl.add_argument("--b-min", type=float, default=None)
    defl.add_argument("--b-max", type=float, default=None)
    defl.add_argument("--b-points", type=int, default=None)
    defl.add_argument("--b-scale", choices=("log", "lin"), default="log")
    defl.add_argument("--method", default="gauss-bonnet",
                      help="comma-separated: gauss-bonnet, shooting, series")
    defl.add_argument("--sense", choices=("pro", "retro"), default="retro",
                      help="orbit sense for the series (default retro)")
    defl.add_argument("--arcsec", action="store_true", help="report angles in arcseconds")

    p = _Parser(prog="optilens", description="Light deflection in optical geometries.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("curvature", parents=[common], help="Gauss curvature by three routes")
    c.add_argument("--r", type=float, nargs="+", required=True, help="radii")
    c.add_argument("--phi", type=float, default=0.0)

    sub.add_parser("deflect", parents=[common, defl], help="deflection angle by method")

    s = sub.add_parser("sweep", parents=[common, defl], help="deflection over a b-range")
    s.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")

    g = sub.add_parser("gbcheck", parents=[common], help="check Gauss-Bonnet on a sector")
    g.add_argument("--r-min", type=float, required=True)
    g.add_argument("--r-max", type=float, required=True)
    g.add_argument("--phi-min", type=float, default=0.0)
    g.add_argument("--phi-max", type=float, default=math.pi / 2)
    g.add_argument("--tol", type=float, default=1e-6, help="residual tolerance (default 1e-6)")
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DOMAIN
    return COMMANDS[args.command](cfg, stdout, stderr)


def run_to_string(argv) -> tuple[int, str, str]:
    """Run the CLI in-process and capture (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    try:
        code = main(argv, out, err)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_DOMAIN
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
