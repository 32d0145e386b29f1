"""Command-line front end: parameter parsing, pipeline orchestration, and
machine-readable reports.

Report contract: JSON documents carry schema_version "1", an echo of the
merged run configuration, a command-specific results payload, and a
diagnostics block.  CSV output is one header row plus data rows with floats
printed to 17 significant digits so values round-trip exactly.  Reports are
byte-identical across repeated runs with the same configuration and thread
count (deterministic reductions; no timestamps inside the payload).

Exit codes: 0 success, 2 when a verification predicate evaluated false
(e.g. a failed certificate), 1 on usage or parameter errors.
"""

from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import __version__
from .annulus import (PolygonConfig, a_threshold, find_lambda0, mu0,
                      polygon_points, sigma1_polygon, theorem1_report,
                      two_bubble_certificate)
from .ansatz import build_ansatz, expansion_fit, norm_star_star
from .bubbles import BubbleParams, compute_constants
from .domain import annulus, lambda1, unit_ball
from .errors import ConcentraError
from .greens import green, robin
from .interaction import build_matrix, circulant_eigenvalues, eigen, psi

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PREDICATE = 2


def _fmt17(x) -> str:
    """17 significant digits: exact double round-trip."""
    return "%.17g" % x


def _domain_for(a: float):
    return unit_ball() if a <= 0.0 else annulus(a)


def _parse_point(text: str):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected x,y,z — got {text!r}")
    if len(parts) != 3:
        raise click.BadParameter(f"expected 3 components, got {len(parts)}")
    return np.array(parts)


def _parse_grid(text: str):
    """Either a comma list '1,2,3' or a range 'start:stop:n'."""
    if ":" in text:
        bits = text.split(":")
        if len(bits) != 3:
            raise click.BadParameter("range grids are start:stop:n")
        lo, hi, n = float(bits[0]), float(bits[1]), int(bits[2])
        if n < 1 or not hi > lo:
            raise click.BadParameter("need stop > start and n >= 1")
        return [float(v) for v in np.linspace(lo, hi, n)]
    try:
        vals = [float(p) for p in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"cannot parse grid {text!r}")
    if not vals:
        raise click.BadParameter("empty grid")
    return vals


def _resolve_threads(requested):
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("CONCENTRA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise click.UsageError(
                f"CONCENTRA_THREADS={env!r} is not an integer")
    return os.cpu_count() or 1


def _merge_config(ctx: click.Context) -> dict:
    """Merged parameter view: explicit flags > --config file > defaults.

    Returns ctx.params updated in place (so every command reads one dict).
    """
    path = ctx.params.get("config")
    if path:
        try:
            lines = open(path).read().splitlines()
        except OSError as e:
            raise click.UsageError(f"cannot read config file: {e}")
        file_vals = {}
        for ln, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.UsageError(f"{path}:{ln}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            file_vals[key.replace("-", "_")] = val
        explicit = click.core.ParameterSource.COMMANDLINE
        for param in ctx.command.params:
            name = param.name
            if name == "config" or name not in file_vals:
                continue
            if ctx.get_parameter_source(name) == explicit:
                continue  # explicit flag wins
            ctx.params[name] = param.type.convert(
                file_vals[name], param, ctx)
    ctx.params["threads"] = _resolve_threads(ctx.params.get("threads"))
    return ctx.params


def _require(p: dict, *names):
    missing = [n for n in names if p.get(n) is None]
    if missing:
        raise click.UsageError(
            "missing required parameter(s): "
            + ", ".join("--" + n.replace("_", "-") for n in missing))


def _emit(ctx: click.Context, results: dict, diagnostics: dict,
          rows, header, exit_code=EXIT_OK):
    p = ctx.params
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": ctx.command.name,
        "inputs": {k: v for k, v in sorted(p.items())
                   if k not in ("output", "fmt", "config")},
        "results": results,
        "diagnostics": diagnostics,
    }
    if p.get("fmt") == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(
                _fmt17(v) if isinstance(v, float) else str(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if p.get("output"):
        with open(p["output"], "w") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)
    ctx.exit(exit_code)


def _common(f):
    f = click.option("--output", type=click.Path(dir_okay=False),
                     default=None, help="Write the report here instead of "
                     "standard output.")(f)
    f = click.option("--fmt", type=click.Choice(["json", "csv"]),
                     default="json", show_default=True,
                     help="Report format.")(f)
    f = click.option("--threads", type=int, default=None,
                     help="Worker threads; default CONCENTRA_THREADS or "
                     "the machine's CPU count.")(f)
    f = click.option("--config", type=click.Path(exists=False),
                     default=None, help="key=value file; explicit flags "
                     "override its entries.")(f)
    f = click.pass_context(f)
    return f


class _Group(click.Group):
    """Maps package errors onto exit code 1 with a one-line message."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ConcentraError as e:
            raise click.ClickException(f"{type(e).__name__}: {e}")


@click.group(cls=_Group)
@click.version_option(__version__)
def main():
    """Green/Robin functions of -Laplace - lambda on balls and annuli,
    interaction matrices, annulus criticality analysis, and energy
    verification."""


@main.command(name="green")
@click.option("--a", type=float, default=0.0, show_default=True,
              help="Inner radius; 0 selects the unit ball.")
@click.option("--lam", type=float, default=None, help="Spectral parameter.")
@click.option("--x", default=None, help="First point, 'x,y,z'.")
@click.option("--y", "ypt", default=None, help="Second point, 'x,y,z'.")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_common
def green_cmd(ctx, **_):
    """Green function G_lambda(x, y)."""
    p = _merge_config(ctx)
    _require(p, "lam", "x", "ypt")
    d = _domain_for(p["a"])
    res = green(d, p["lam"], _parse_point(p["x"]), _parse_point(p["ypt"]),
                p["tol"])
    _emit(ctx,
          {"value": res.value, "tail_bound": res.tail_bound},
          {"truncation_order": res.truncation_order, "tol": p["tol"]},
          [(res.value, res.tail_bound, res.truncation_order)],
          ["value", "tail_bound", "truncation_order"])


@main.command(name="robin")
@click.option("--a", type=float, default=0.0, show_default=True,
              help="Inner radius; 0 selects the unit ball.")
@click.option("--lam", type=float, default=None)
@click.option("--point", default=None, help="Point, 'x,y,z'.")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_common
def robin_cmd(ctx, **_):
    """Robin function g_lambda at a point."""
    p = _merge_config(ctx)
    _require(p, "lam", "point")
    val = robin(_domain_for(p["a"]), p["lam"], _parse_point(p["point"]),
                p["tol"])
    _emit(ctx, {"value": val}, {"tol": p["tol"]}, [(val,)], ["value"])


@main.command(name="matrix")
@click.option("--a", type=float, default=None, help="Inner radius.")
@click.option("--k", type=int, default=None, help="Polygon size.")
@click.option("--lam", type=float, default=None)
@click.option("--r", type=float, default=None, help="Polygon radius.")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_common
def matrix_cmd(ctx, **_):
    """Interaction matrix on a regular k-polygon: entries, psi,
    eigenstructure, circulant cross-check."""
    p = _merge_config(ctx)
    _require(p, "a", "k", "lam", "r")
    cfg = PolygonConfig(p["k"], p["r"], p["a"])
    M = build_matrix(_domain_for(p["a"]), p["lam"], polygon_points(cfg),
                     p["tol"])
    det = psi(M)
    dec = eigen(M)
    circ = np.sort(circulant_eigenvalues(M.entries[0]))
    _emit(ctx,
          {"entries": M.entries.tolist(),
           "psi": det,
           "eigenvalues": dec.values.tolist(),
           "circulant_eigenvalues_sorted": circ.tolist(),
           "smallest_eigenvector": dec.vectors[:, 0].tolist()},
          {"circulant_max_gap": float(np.max(np.abs(circ - dec.values))),
           "tol": p["tol"]},
          [(i, float(dec.values[i]), float(circ[i]))
           for i in range(p["k"])],
          ["index", "eigenvalue", "circulant"])


@main.command(name="polygon-scan")
@click.option("--a", type=float, default=None)
@click.option("--k", type=int, default=None)
@click.option("--lam-grid", default=None,
              help="Comma list or start:stop:n range of lambda values.")
@click.option("--r-grid", default=None,
              help="Comma list or start:stop:n range of polygon radii.")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_common
def polygon_scan(ctx, **_):
    """sigma1 = g - sum G over a (lambda, r) grid."""
    p = _merge_config(ctx)
    _require(p, "a", "k", "lam_grid", "r_grid")
    a, k, tol = p["a"], p["k"], p["tol"]
    lams = _parse_grid(p["lam_grid"])
    rs = _parse_grid(p["r_grid"])
    cells = [(lam, r) for lam in lams for r in rs]

    def cell(args):
        lam, r = args
        return sigma1_polygon(a, k, lam, r, tol)

    if p["threads"] > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=p["threads"]) as pool:
            vals = list(pool.map(cell, cells))  # order-preserving merge
    else:
        vals = [cell(c) for c in cells]
    rows = [(lam, r, v) for (lam, r), v in zip(cells, vals)]
    _emit(ctx,
          {"cells": [{"lam": lam, "r": r, "sigma1": v}
                     for lam, r, v in rows]},
          {"n_cells": len(cells), "tol": tol},
          rows, ["lam", "r", "sigma1"])


@main.command(name="find-critical")
@click.option("--a", type=float, default=None)
@click.option("--k", type=int, default=None)
@click.option("--tol", type=float, default=1e-7, show_default=True)
@click.option("--full", is_flag=True, default=False,
              help="Also run the derivative/monotonicity/mu0 checks "
              "(slower).")
@_common
def find_critical(ctx, **_):
    """Critical pair (lambda0, r0) where min_r sigma1 first reaches zero."""
    p = _merge_config(ctx)
    _require(p, "a", "k")
    a, k, tol = p["a"], p["k"], p["tol"]
    if p["full"]:
        rep = theorem1_report(a, k, tol)
        results = rep.as_dict()
        ok = all(rep.checks.values())
        lam0, r0, s = rep.lambda0, rep.r0, rep.sigma1_at_crit
    else:
        lam0, r0 = find_lambda0(a, k, tol)
        s = sigma1_polygon(a, k, lam0, r0)
        lam1 = lambda1(annulus(a))
        results = {"lambda0": lam0, "r0": r0, "sigma1_at_crit": s,
                   "lambda1": lam1}
        ok = abs(s) <= 1e-6 and 0.0 < lam0 < lam1
    _emit(ctx, results, {"tol": tol, "all_checks_pass": ok},
          [(lam0, r0, s)], ["lambda0", "r0", "sigma1_at_crit"],
          EXIT_OK if ok else EXIT_PREDICATE)


@main.command(name="threshold-a")
@click.option("--k", type=int, default=None)
@click.option("--tol", type=float, default=1e-3, show_default=True)
@click.option("--n-grid", type=int, default=65, show_default=True)
@_common
def threshold_a(ctx, **_):
    """Empirical inner-radius threshold below which the lambda=0
    configuration stops being admissible."""
    p = _merge_config(ctx)
    _require(p, "k")
    res = a_threshold(p["k"], p["tol"], p["n_grid"])
    _emit(ctx, res, {"tol": p["tol"]},
          [(res["threshold"], res["bracket"][0], res["bracket"][1])],
          ["threshold", "bracket_lo", "bracket_hi"])


@main.command(name="certificate")
@click.option("--a", type=float, default=None, help="Inner radius.")
@_common
def certificate(ctx, **_):
    """Two-bubble admissibility certificate: q(t) = 4t^2 - (7a+1)t + 4a > 0
    on (a, 1), which holds exactly for a > 1/49."""
    p = _merge_config(ctx)
    _require(p, "a")
    holds, margin, touch_t = two_bubble_certificate(p["a"])
    results = {"holds": holds, "margin": margin}
    if not holds:
        results["touch_t"] = touch_t
    _emit(ctx, results, {},
          [(int(holds), margin, touch_t if touch_t is not None
            else math.nan)],
          ["holds", "margin", "touch_t"],
          EXIT_OK if holds else EXIT_PREDICATE)


@main.command(name="verify-constants")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@_common
def verify_constants(ctx, **_):
    """Energy constants a0..a3: closed form vs quadrature."""
    p = _merge_config(ctx)
    consts = compute_constants(p["tol"])
    rows = []
    ok = True
    for name in ("a0", "a1", "a2", "a3"):
        pair = getattr(consts, name)
        rel = abs(pair.quadrature - pair.closed) / abs(pair.closed)
        ok = ok and rel <= 1e-8
        rows.append((name, pair.closed, pair.quadrature, rel))
    _emit(ctx,
          {name: {"closed": c, "quadrature": q, "rel_error": rel}
           for name, c, q, rel in rows},
          {"all_within_1e8": ok},
          rows, ["constant", "closed", "quadrature", "rel_error"],
          EXIT_OK if ok else EXIT_PREDICATE)


@main.command(name="energy-check")
@click.option("--a", type=float, default=None)
@click.option("--k", type=int, default=None)
@click.option("--r", type=float, default=None)
@click.option("--lam", type=float, default=None)
@click.option("--mu-min", type=float, default=10 ** -2.5, show_default=True)
@click.option("--mu-max", type=float, default=1e-2, show_default=True)
@click.option("--n-mu", type=int, default=10, show_default=True)
@click.option("--c1-rtol", type=float, default=0.02, show_default=True)
@click.option("--c2-rtol", type=float, default=0.10, show_default=True)
@click.option("--min-order", type=float, default=2.3, show_default=True)
@_common
def energy_check(ctx, **_):
    """Fit energy(mu) - k a0 = c1 mu + c2 mu^2 on an equal-mu polygon and
    compare against the interaction-matrix prediction."""
    p = _merge_config(ctx)
    _require(p, "a", "k", "r", "lam")
    a, k, r, lam = p["a"], p["k"], p["r"], p["lam"]
    mu_grid = np.geomspace(p["mu_max"], p["mu_min"], p["n_mu"])
    consts = compute_constants()
    cfg = PolygonConfig(k, r, a)
    c1, c2, order, fit = expansion_fit(_domain_for(a), cfg, lam, mu_grid,
                                       consts)
    s = sigma1_polygon(a, k, lam, r)
    c1_target = consts.a1.closed * k * s
    c2_target = consts.a2.closed * lam * k - consts.a3.closed * k * s * s
    c1_ok = abs(c1 - c1_target) <= p["c1_rtol"] * abs(c1_target)
    c2_ok = abs(c2 - c2_target) <= p["c2_rtol"] * abs(c2_target)
    order_ok = order >= p["min_order"]
    _emit(ctx,
          {"c1": c1, "c1_target": c1_target, "c1_ok": c1_ok,
           "c2": c2, "c2_target": c2_target, "c2_ok": c2_ok,
           "order": order, "order_ok": order_ok, "sigma1": s},
          {"mu": fit["mu"], "energy": fit["energy"],
           "quad_error": fit["quad_error"],
           "c3": fit["c3"], "c3_log": fit["c3_log"], "c4": fit["c4"]},
          list(zip(fit["mu"], fit["energy"], fit["quad_error"])),
          ["mu", "energy", "quad_error"],
          EXIT_OK if (c1_ok and c2_ok and order_ok) else EXIT_PREDICATE)


@main.command(name="error-norm")
@click.option("--a", type=float, default=None)
@click.option("--k", type=int, default=None)
@click.option("--r", type=float, default=None)
@click.option("--mode", type=click.Choice(["critical", "generic"]),
              default=None, help="critical: lambda = lambda0 + eps with "
              "mu = mu0(lambda, r); generic: fixed lambda with mu = eps.")
@click.option("--lam", type=float, default=None,
              help="Required for generic mode; ignored in critical mode.")
@click.option("--eps-grid", default="0.1,0.05,0.02,0.01", show_default=True)
@click.option("--nu", type=float, default=0.5, show_default=True)
@click.option("--sample-budget", type=int, default=600, show_default=True)
@click.option("--tol", type=float, default=1e-7, show_default=True,
              help="Tolerance for the lambda0 search in critical mode.")
@_common
def error_norm(ctx, **_):
    """**-norm of the rescaled error E over an eps sweep, with the fitted
    scaling exponent."""
    p = _merge_config(ctx)
    _require(p, "a", "k", "r", "mode")
    a, k, r, mode = p["a"], p["k"], p["r"], p["mode"]
    eps_vals = sorted(_parse_grid(p["eps_grid"]), reverse=True)
    if len(eps_vals) < 2:
        raise click.UsageError("need at least 2 eps values for a fit")
    consts = compute_constants()
    d = _domain_for(a)
    centers = polygon_points(PolygonConfig(k, r, a))
    if mode == "critical":
        lam0, _r0 = find_lambda0(a, k, p["tol"])
    elif p["lam"] is None:
        raise click.UsageError("generic mode needs --lam")
    rows = []
    for eps in eps_vals:
        if mode == "critical":
            lam_eps = lam0 + eps
            mu = mu0(a, k, lam_eps, r, consts)
        else:
            lam_eps = p["lam"]
            mu = eps
        A = build_ansatz(d, lam_eps,
                         [BubbleParams(mu, tuple(c)) for c in centers])
        res = norm_star_star(A, eps, p["nu"], p["sample_budget"])
        rows.append((eps, mu, res.value, res.point))
    exponent = float(np.polyfit(np.log([row[0] for row in rows]),
                                np.log([row[2] for row in rows]), 1)[0])
    _emit(ctx,
          {"exponent": exponent,
           "sweep": [{"eps": e, "mu": m, "norm": v, "argmax": list(pt)}
                     for e, m, v, pt in rows]},
          {"nu": p["nu"], "sample_budget": p["sample_budget"],
           "mode": mode},
          [(e, m, v) for e, m, v, _pt in rows],
          ["eps", "mu", "norm"])


def run(argv=None) -> int:
    """Programmatic entry point returning the exit code.

    Bypasses click's standalone mode so usage errors map to exit code 1
    (click's own convention would use 2, which this tool reserves for
    failed verification predicates).
    """
    try:
        rv = main.main(args=argv, standalone_mode=False)
        return int(rv) if isinstance(rv, int) else EXIT_OK
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except ConcentraError as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        return EXIT_USAGE


def entry():
    """console_scripts hook."""
    sys.exit(run())


if __name__ == "__main__":
    sys.exit(run())
