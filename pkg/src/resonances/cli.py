"""Command line front end.

    resonances TASK [--config PATH] [--out PATH] [--format csv|json] [--tol X] [--verbose]

TASK is one of solve, scan, table, envelope, bounds, perturb, phi-scan.
The config file has ``key = value`` lines grouped in sections::

    [potential]
    builtin = gaussian          ; or: expression = -exp(-x^2)
    depth = 1.0                 ; builtin parameters / expression parameters

    [problem]
    domain = halfline           ; or wholeline
    bc = dirichlet              ; neumann, or "a, b"

    [task]
    lambda_guesses = -0.53, -1.24-3.48j

Exit status: 0 success, 2 a solver did not converge (rows carry a status
column), 3 invalid configuration.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field

from . import bounds, locator, method_one, method_two, perturbation, phi
from .errors import ConfigError, ExpressionSyntaxError, NonConvergenceError, ResonanceError
from .potentials import BUILTINS, HALF_LINE, WHOLE_LINE, builtin, parse_expression
from .problem import Problem, boundary_condition

log = logging.getLogger("resonances")

TASKS = ("solve", "scan", "table", "envelope", "bounds", "perturb", "phi-scan")
RESONANCE_COLUMNS = ("n", "method", "re_lambda", "im_lambda", "re_z", "im_z", "residual_abs", "iterations", "status")
ENVELOPE_COLUMNS = ("theta", "a_theta", "x", "y")
BOUNDS_COLUMNS = ("name", "value", "verdict")
PERTURB_COLUMNS = ("eps", "re_dlambda", "im_dlambda", "re_predicted", "im_predicted")

EXIT_OK, EXIT_NONCONVERGENCE, EXIT_CONFIG = 0, 2, 3

# ladder seeds for the Gaussian well
DEFAULT_TABLE_SEEDS = "-0.53, -1.24-3.48j"

_DOMAINS = {"halfline": HALF_LINE, "half-line": HALF_LINE, "wholeline": WHOLE_LINE, "whole-line": WHOLE_LINE}


# --------------------------------------------------------------------------
# config


def _complex(text):
    t = text.strip().replace(" ", "").replace("i", "j")
    if not t:
        raise ConfigError("empty number")
    try:
        return complex(t)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def _complex_list(text):
    return [_complex(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    out = []
    for t in text.split(","):
        if t.strip():
            try:
                out.append(float(t))
            except ValueError:
                raise ConfigError(f"not a number: {t!r}") from None
    return out


def _param_value(text):
    if "," in text:
        vals = _complex_list(text)
        return [v.real if v.imag == 0 else v for v in vals]
    v = _complex(text)
    return v.real if v.imag == 0 else v


@dataclass
class RunConfig:
    task: str
    problem: Problem
    params: dict = field(default_factory=dict)
    v1: object = None
    source: str = "<defaults>"

    def get(self, key, default=None):
        return self.params.get(key, default)


def _potential(section, domain):
    sec = dict(section)
    v_inf = _complex(sec.pop("v_infinity", "0"))
    v_inf = v_inf.real if v_inf.imag == 0 else v_inf
    alpha = sec.pop("analytic_sector_alpha", None)
    if "expression" in sec:
        src = sec.pop("expression")
        if not src.strip():
            raise ConfigError("potential expression is empty")
        params = {k: float(_complex(v).real) for k, v in sec.items() if k != "builtin"}
        kw = {"v_infinity": v_inf, "domain": domain}
        if alpha is not None:
            kw["analytic_sector_alpha"] = float(alpha)
        try:
            return parse_expression(src, params, **kw)
        except ExpressionSyntaxError as exc:
            raise ConfigError(f"potential expression: {exc}") from exc
    name = sec.pop("builtin", "gaussian").strip()
    if name not in BUILTINS:
        raise ConfigError(f"unknown builtin potential {name!r}; known: {', '.join(sorted(BUILTINS))}")
    params = {k: _param_value(v) for k, v in sec.items()}
    try:
        return builtin(name, domain=domain, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from exc


def load_config(task, path=None, text=None, tol=None) -> RunConfig:
    """Parse and validate a config file (or *text*) for *task*."""
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str
    try:
        if text is not None:
            cp.read_string(text)
        elif path is not None:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    prob_sec = dict(cp["problem"]) if cp.has_section("problem") else {}
    domain_key = prob_sec.get("domain", "wholeline" if task == "phi-scan" else "halfline").strip().lower()
    if domain_key not in _DOMAINS:
        raise ConfigError(f"unknown domain {domain_key!r}")
    domain = _DOMAINS[domain_key]
    pot = _potential(cp["potential"] if cp.has_section("potential") else {}, domain)
    bc_text = prob_sec.get("bc", "dirichlet")
    try:
        bc = boundary_condition(bc_text if not any(ch.isdigit() for ch in bc_text) else _float_list(bc_text))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad boundary condition {bc_text!r}: {exc}") from exc
    kw = {}
    for key in ("tol", "tol_decay", "xmax_cap", "path_angle"):
        if key in prob_sec:
            kw[key] = float(prob_sec[key])
    if tol is not None:
        kw["tol"] = float(tol)
    problem = Problem(pot, domain=domain, bc=bc, **kw)
    params = dict(cp["task"]) if cp.has_section("task") else {}
    v1 = None
    if cp.has_section("perturbation"):
        v1 = _potential(cp["perturbation"], domain)
    cfg = RunConfig(task, problem, params, v1, str(path or "<text>"))
    _validate(cfg)
    return cfg


def _rectangle(cfg):
    rect = _float_list(cfg.get("rectangle", ""))
    if len(rect) != 4:
        raise ConfigError("rectangle needs four numbers: re_min, re_max, im_min, im_max")
    if rect[0] <= 0 or rect[0] >= rect[1] or rect[2] >= rect[3]:
        raise ConfigError("rectangle must satisfy 0 < re_min < re_max and im_min < im_max")
    return tuple(rect)


def _validate(cfg):
    if cfg.task in ("scan", "phi-scan"):
        _rectangle(cfg)
    if cfg.task == "phi-scan" and cfg.problem.domain != WHOLE_LINE:
        raise ConfigError("phi-scan needs domain = wholeline")
    if cfg.task == "solve" and not (cfg.get("lambda_guesses") or cfg.get("z_guesses")):
        raise ConfigError("solve needs lambda_guesses or z_guesses")
    if cfg.task == "perturb" and cfg.v1 is None:
        raise ConfigError("perturb needs a [perturbation] section describing V1")
    if cfg.get("method", "one") not in ("one", "two"):
        raise ConfigError("method must be 'one' or 'two'")


# --------------------------------------------------------------------------
# tasks


def _residual(method):
    return method_one.residual if method == "one" else method_two.residual


def _method_tag(method, bc):
    return f"{method}/{bc.label}" if bc.label != "R" else f"{method}/{bc.a:g}:{bc.b:g}"


def _row(n, tag, res):
    return {
        "n": n,
        "method": tag,
        "re_lambda": res.lam.real,
        "im_lambda": res.lam.imag,
        "re_z": res.z.real,
        "im_z": res.z.imag,
        "residual_abs": res.residual_abs,
        "iterations": res.iterations,
        "status": res.status,
    }


def _failed_row(n, tag, z, lam, status="nonconverged"):
    return {"n": n, "method": tag, "re_lambda": lam.real, "im_lambda": lam.imag, "re_z": z.real, "im_z": z.imag,
            "residual_abs": math.inf, "iterations": 0, "status": status}


def _guesses(cfg):
    prob = cfg.problem
    if cfg.get("z_guesses"):
        return _complex_list(cfg.get("z_guesses"))
    return [prob.z_of(lam) for lam in _complex_list(cfg.get("lambda_guesses"))]


def _tol_res(cfg):
    return float(cfg.get("tol_res", locator.DEFAULT_TOL_RES))


def task_solve(cfg):
    prob = cfg.problem
    method = cfg.get("method", "one")
    fn = _residual(method)
    tag = _method_tag(method, prob.bc)
    rows, ok = [], True
    for n, z in enumerate(_guesses(cfg), 1):
        try:
            res = locator.refine(lambda w: fn(prob, w), z, lam_of=prob.lam, method=tag, tol_res=_tol_res(cfg))
            rows.append(_row(n, tag, res))
        except (NonConvergenceError, ResonanceError) as exc:
            log.warning("guess %s: %s", z, exc)
            rows.append(_failed_row(n, tag, z, prob.lam(z)))
            ok = False
    return RESONANCE_COLUMNS, rows, ok


def task_table(cfg):
    prob = cfg.problem
    method = cfg.get("method", "one")
    fn = _residual(method)
    count = int(cfg.get("count", 17))
    seq = cfg.get("bc_sequence", "alternate").strip().lower()
    seeds = _complex_list(cfg.get("lambda_seeds", DEFAULT_TABLE_SEEDS))

    def bc_for(n):
        if seq == "alternate":
            return boundary_condition("D" if n % 2 == 0 else "N")
        return boundary_condition(seq)

    def residual_for(n):
        p = prob.with_(bc=bc_for(n))
        return lambda w: fn(p, w)

    found = locator.ladder(residual_for, seeds, count, lam_of=prob.lam, z_of=prob.z_of, method=method,
                           tol_res=_tol_res(cfg))
    rows = []
    for n, res in enumerate(found):
        rows.append(_row(n + 1, _method_tag(method, bc_for(n)), res))
    return RESONANCE_COLUMNS, rows, all(r.status == "ok" for r in found)


def _scan_rows(cfg, fn, prob, tag, depth):
    rect = _rectangle(cfg)
    report = locator.scan(fn, rect, depth=depth)
    log.info("winding %d over %s; %d candidates, %d clusters", report.winding, report.rectangle,
             len(report.candidates), len(report.clusters))
    rows, ok = [], True
    found = []
    for c in report.candidates:
        try:
            found.append(locator.refine(fn, c, lam_of=prob.lam, method=tag, tol_res=_tol_res(cfg)))
        except ResonanceError as exc:
            log.warning("candidate %s: %s", c, exc)
            found.append(None)
            rows.append(_failed_row(0, tag, c, prob.lam(c)))
            ok = False
    for r, w in report.clusters:
        c = complex(0.5 * (r[0] + r[1]), 0.5 * (r[2] + r[3]))
        if w == 2:
            try:
                found.extend(locator.deflate_pair(fn, c, 0.5 * abs(complex(r[1] - r[0], r[3] - r[2])),
                                                  lam_of=prob.lam, method=tag))
                continue
            except ResonanceError as exc:
                log.warning("cluster at %s: %s", c, exc)
        rows.append(_failed_row(0, tag, c, prob.lam(c), status=f"cluster{w}"))
        ok = False
    good = sorted((f for f in found if f is not None), key=lambda r: (round(r.z.imag, 9), round(r.z.real, 9)))
    out = [_row(0, tag, r) for r in good] + rows
    for i, row in enumerate(out, 1):
        row["n"] = i
    return out, ok and all(r.status == "ok" for r in good)


def task_scan(cfg):
    prob = cfg.problem
    method = cfg.get("method", "one")
    fn = _residual(method)
    rows, ok = _scan_rows(cfg, lambda w: fn(prob, w), prob, _method_tag(method, prob.bc), int(cfg.get("depth", 6)))
    return RESONANCE_COLUMNS, rows, ok


def task_phi_scan(cfg):
    prob = cfg.problem
    rows, ok = _scan_rows(cfg, phi.phi_value(prob), prob, "phi", int(cfg.get("depth", 8)))
    return RESONANCE_COLUMNS, rows, ok


def task_envelope(cfg):
    p = cfg.problem.potential
    env = bounds.envelope_S(p, int(cfg.get("n", 64)), float(cfg.get("bound_tol", 1e-10)))
    rows = [dict(zip(ENVELOPE_COLUMNS, s)) for s in env.samples]
    log.info("a1 = %.12g, M = %.12g, a1/M = %.6g, a2 = %.6g", env.a1, env.M, env.a1 / env.M if env.M else math.nan,
             env.a2)
    return ENVELOPE_COLUMNS, rows, True


def task_bounds(cfg):
    prob = cfg.problem
    p = prob.potential
    rows = []
    th = bounds.threshold(p)
    for name, value in th.routes.items():
        rows.append({"name": f"threshold[{name}]", "value": math.inf if value is None else value,
                     "verdict": "finite" if value is not None else "none"})
    rows.append({"name": "threshold", "value": float(th), "verdict": th.provenance or "none"})
    lams = _complex_list(cfg.get("lambdas", ""))
    if prob.domain == WHOLE_LINE:
        from .potentials import l1_norm

        n1 = l1_norm(p, domain=WHOLE_LINE)
        rows.append({"name": "l1_norm", "value": n1, "verdict": ""})
        rows.append({"name": "norm_bound_4", "value": n1 * n1 / 4, "verdict": ""})
        rows.append({"name": "norm_bound_5", "value": 9 * n1 * n1 / 4, "verdict": ""})
        for lam in lams:
            chk = bounds.check_norm_bounds(p, lam, norm=n1, domain=WHOLE_LINE)
            rows.append({"name": f"thm4({_fmt(lam)})", "value": abs(lam), "verdict": _verdict(chk.thm4)})
            rows.append({"name": f"thm5({_fmt(lam)})", "value": abs(lam), "verdict": _verdict(chk.thm5)})
    if lams and p.analytic:
        ctab = bounds.c_table(p, int(cfg.get("n_theta", 32)))
        atab = bounds.a_table(p, int(cfg.get("n_theta", 32)))
        for lam in lams:
            if not bounds._in_excluded_sector(lam, p.analytic_sector_alpha):
                rows.append({"name": f"thm1({_fmt(lam)})", "value": abs(lam), "verdict": _verdict(ctab.contains(lam))})
            if lam.imag > 0:
                rows.append({"name": f"thm2({_fmt(lam)})", "value": bounds.half_plane_margin(atab, lam),
                             "verdict": _verdict(atab.contains(lam))})
            elif lam.imag < 0:
                rows.append({"name": f"S({_fmt(lam)})", "value": bounds.half_plane_margin(atab, lam),
                             "verdict": _verdict(atab.contains(lam))})
    return BOUNDS_COLUMNS, rows, True


def task_perturb(cfg):
    prob = cfg.problem
    z0 = _guesses(cfg)[0] if (cfg.get("z_guesses") or cfg.get("lambda_guesses")) else None
    if z0 is None:
        raise ConfigError("perturb needs lambda_guesses (the unperturbed resonance)")
    base = locator.refine(lambda w: method_one.residual(prob, w), z0, lam_of=prob.lam)
    nu = perturbation.nu_correction(prob, cfg.v1, base.z, n=int(cfg.get("nodes", perturbation.DEFAULT_NODES)))
    log.info("lambda0 = %s, nu = %s", base.lam, nu)
    eps_list = _float_list(cfg.get("eps", "1e-4, 5e-4, 1e-3"))
    shifts = perturbation.shift_fd(prob, cfg.v1, eps_list, base.z)
    rows = []
    for eps, d in shifts:
        pred = perturbation.predicted_shift(base.z, nu, eps)
        rows.append({"eps": eps, "re_dlambda": d.real, "im_dlambda": d.imag, "re_predicted": pred.real,
                     "im_predicted": pred.imag})
    return PERTURB_COLUMNS, rows, True


TASK_FUNCS = {
    "solve": task_solve,
    "scan": task_scan,
    "table": task_table,
    "envelope": task_envelope,
    "bounds": task_bounds,
    "perturb": task_perturb,
    "phi-scan": task_phi_scan,
}


# --------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, complex):
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def _verdict(flag):
    return {True: "pass", False: "fail", None: "n/a"}[flag]


def _json_value(v):
    if isinstance(v, float):
        if not math.isfinite(v):
            return str(v)
        return float("%.12g" % v)
    return v


def render(columns, rows, fmt="csv") -> str:
    """Byte-stable CSV or JSON text (12 significant digits, newline-terminated)."""
    if fmt == "json":
        data = [{c: _json_value(r[c]) for c in columns} for r in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def read_results(path_or_text, fmt=None):
    """Parse CSV or JSON output back into a list of dicts with numeric fields converted."""
    text = path_or_text
    if "\n" not in path_or_text:
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("[") else "csv"
    if fmt == "json":
        rows = json.loads(text)
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        conv = {}
        for k, v in r.items():
            if k in ("method", "status", "name", "verdict"):
                conv[k] = v
            elif k in ("n", "iterations"):
                conv[k] = int(v)
            else:
                conv[k] = float(v)
        out.append(conv)
    return out


def revalidate(rows, problem, tol_res=locator.DEFAULT_TOL_RES, scale=10.0):
    """Re-evaluate residuals at every converged row; returns ``[(n, |r|, ok)]``.

    The 12-digit rounding of the emitted ``z`` perturbs the residual by about
    ``|r'(z)| * 1e-12 |z|``; rows pass when the fresh residual is below
    ``scale * tol_res`` plus that rounding allowance.
    """
    out = []
    for r in rows:
        if r.get("status") != "ok":
            continue
        method, _, bc = r["method"].partition("/")
        z = complex(r["re_z"], r["im_z"])
        if method == "phi":
            fn = phi.phi_value(problem)
        else:
            p = problem.with_(bc=boundary_condition(bc if ":" not in bc else [float(t) for t in bc.split(":")]))
            res = _residual(method)
            fn = lambda w, p=p, res=res: res(p, w)  # noqa: E731
        val = abs(fn(z))
        h = 1e-6 * (1 + abs(z))
        deriv = abs(fn(z + h) - fn(z - h)) / (2 * h)
        allowance = deriv * 1e-12 * (1 + abs(z)) * 5
        out.append((r["n"], val, val <= scale * tol_res + allowance))
    return out


# --------------------------------------------------------------------------
# entry point


def build_parser():
    ap = argparse.ArgumentParser(prog="resonances", description="Resonances of 1-D Schroedinger operators")
    ap.add_argument("task", choices=TASKS)
    ap.add_argument("--config", help="config file (sections with key = value lines)")
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--tol", type=float, help="ODE tolerance (overrides the config)")
    ap.add_argument("--verbose", action="store_true")
    return ap


def run(cfg: RunConfig, fmt="csv", out=None):
    """Execute *cfg*; returns ``(exit_status, text)`` and writes *out* if given."""
    columns, rows, ok = TASK_FUNCS[cfg.task](cfg)
    text = render(columns, rows, fmt)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return (EXIT_OK if ok else EXIT_NONCONVERGENCE), text


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.task, args.config, tol=args.tol)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        status, text = run(cfg, args.format, args.out)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResonanceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    if not args.out:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
