"""Command-line interface.

Every table goes to stdout (or ``--out``) as CSV preceded by ``#`` metadata
lines. Exit status is 0 on success, 2 for invalid input and 3 when a
numerical procedure fails to converge.
"""
import argparse
import math
import os
import re
import sys
import time

import numpy as np

from . import __version__, analytics, entpower, kernels
from .errors import (CatentError, ConvergenceError, TruncationError, UnderflowError,
                     ValidationError)
from .sweep import ConfigError, SweepResult, cartesian, format_value, parse_config, run_ordered
from .thermal import DEFAULT_NODES, DEFAULT_TOL, ThermalEnsemble, fock_truncation

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
_PI_RE = re.compile(r"^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def real(text):
    """Float parser that also accepts multiples of pi such as ``pi/2`` or ``2*pi``."""
    text = str(text).strip()
    m = _PI_RE.match(text.lower())
    if m:
        coef = m.group(1)
        c = float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)
        return c * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return val


def real_list(text):
    return [real(t) for t in str(text).split(",")]


def str_list(text):
    return [t.strip() for t in str(text).split(",")]


def tau_grid(tau_min, tau_max, tau_step):
    if not tau_step > 0:
        raise ValidationError("tau step must be positive")
    if tau_max < tau_min or tau_min < 0:
        raise ValidationError("need 0 <= tau-min <= tau-max")
    n = int(round((tau_max - tau_min) / tau_step))
    return np.round(tau_min + tau_step * np.arange(n + 1), 10)


def phi_grid(phi_min, phi_max, points):
    if points < 1:
        raise ValidationError("phi grid needs at least one point")
    if phi_max < phi_min:
        raise ValidationError("phi-max must not be below phi-min")
    return np.linspace(phi_min, phi_max, points)


def _meta_value(v):
    # full round-trip precision so that the metadata reproduces the run
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _meta(command, **params):
    meta = {"command": command, "version": __version__}
    for k, v in params.items():
        if isinstance(v, (list, tuple, np.ndarray)):
            v = ",".join(_meta_value(x) for x in v)
        meta[k] = _meta_value(v)
    return meta


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_pure_ent(alpha_abs, phis):
    phis = list(phis)
    if not phis:
        raise ValidationError("phi range is empty")
    rows = [[phi, analytics.pure_cat_entanglement(alpha_abs, phi)] for phi in phis]
    meta = _meta("pure-ent", alpha=alpha_abs, phi=phis)
    return SweepResult(["phi", "entanglement"], rows, meta)


def cmd_mixed_ent(V, d, phi, nodes=DEFAULT_NODES, tol=DEFAULT_TOL, workers=1):
    ens = ThermalEnsemble(V, d, nodes, tol)
    e = analytics.mixed_cat_entanglement(ens, phi, workers=workers)
    meta = _meta("mixed-ent", V=V, d=d, phi=phi, nodes=nodes, tol=tol)
    return SweepResult(["phi", "entanglement"], [[phi, e]], meta)


def cmd_fig2(V_list, d, phis, nodes=DEFAULT_NODES, tol=DEFAULT_TOL, workers=1):
    for V in V_list:
        if V < 1:
            raise ValidationError(f"V must be >= 1, got {V!r}")
    phis = list(phis)
    if not phis:
        raise ValidationError("phi range is empty")
    cols = []
    for V in V_list:
        ens = ThermalEnsemble(V, d, nodes, tol)
        cols.append([analytics.mixed_cat_entanglement(ens, phi, workers=workers) for phi in phis])
    header = ["phi"] + [f"E_V{format_value(V)}" for V in V_list]
    rows = [[phi] + [c[i] for c in cols] for i, phi in enumerate(phis)]
    meta = _meta("fig2", V=V_list, d=d, phi=phis, nodes=nodes, tol=tol)
    return SweepResult(header, rows, meta)


def cmd_entpower(scheme, V, d, phi, taus, method="fock", nodes=DEFAULT_NODES, tol=DEFAULT_TOL,
                 workers=1):
    ens = ThermalEnsemble(V, d, nodes, tol)
    spec = entpower.SchemeSpec(scheme, phi, ens)
    curve = entpower.entangling_power_curve(spec, taus, method=method, workers=workers)
    rows = [[t, n, s, entpower.teleportation_usable(s)] for t, n, s in curve]
    meta = _meta("entpower", scheme=scheme, V=V, d=d, phi=phi, tau_min=taus[0], tau_max=taus[-1],
                 tau_points=len(taus), method=method)
    if method == "fock":
        meta["fock_cutoff"] = str(fock_truncation(V, d))
    else:
        meta.update(nodes=str(nodes), tol=_meta_value(tol), kernel_backend=kernels.BACKEND)
    return SweepResult(["tau", "negativity", "S_l", "usable"], rows, meta)


def read_covariance_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        m = np.loadtxt(text.replace(",", " ").splitlines(), ndmin=2)
    except (OSError, ValueError) as exc:
        raise ValidationError(f"cannot read covariance matrix from {path}: {exc}") from None
    if m.shape != (4, 4):
        raise ValidationError(f"covariance file must hold a 4x4 matrix, got {m.shape}")
    if np.max(np.abs(m - m.T)) > 1e-12:
        raise ValidationError("covariance matrix is not symmetric")
    return analytics.CovarianceMatrix.from_full(m, centered=True)


def cmd_simon(target, alpha=1.0, phi=math.pi, V=5.0, d=0.0, sign="+", path=None,
              nodes=DEFAULT_NODES, tol=DEFAULT_TOL, workers=1):
    """Verdict, covariance and margin, as a text block."""
    if target == "cat":
        cov = analytics.cat_covariance(alpha, phi, centered=True)
        meta = _meta("simon", target=target, alpha=alpha, phi=phi)
    elif target == "ecs":
        ens = ThermalEnsemble(V, d, nodes, tol)
        cov = analytics.ecs_thermal_covariance(ens, sign, phi, workers=workers)
        meta = _meta("simon", target=target, V=V, d=d, phi=phi, sign=sign, nodes=nodes, tol=tol)
    elif target == "file":
        if path is None:
            raise ValidationError("target 'file' needs --input")
        cov = read_covariance_file(path)
        meta = _meta("simon", target=target, input=os.path.basename(path))
    else:
        raise ValidationError(f"unknown target {target!r}")
    verdict = analytics.simon_check(cov)
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    lines.append(f"verdict = {verdict.value}")
    lines.append(f"margin = {format_value(analytics.simon_margin(cov))}")
    for row in cov.full:
        lines.append(",".join(format_value(x) for x in row))
    return verdict, cov, "\n".join(lines) + "\n"


def cmd_ecs_cov(V_list, nodes=DEFAULT_NODES, tol=DEFAULT_TOL, workers=1):
    """Closed-form and numerically averaged covariance entries of the '+' ECS at d = 0."""
    rows = []
    for V in V_list:
        exact = analytics.ecs_covariance(V)
        num = analytics.ecs_thermal_covariance(ThermalEnsemble(V, 0.0, nodes, tol), "+",
                                               workers=workers)
        diff = float(np.max(np.abs(exact.full - num.full)))
        rows.append([V, exact.A[0, 0], exact.C[0, 0], num.A[0, 0], num.C[0, 0], diff,
                     analytics.simon_check(exact).value])
    header = ["V", "diag", "offdiag", "diag_numeric", "offdiag_numeric", "max_abs_diff", "simon"]
    return SweepResult(header, rows, _meta("ecs-cov", V=V_list, nodes=nodes, tol=tol))


SWEEP_COMMANDS = {
    "pure-ent": ("alpha", "phi"),
    "mixed-ent": ("V", "d", "phi"),
    "entpower": ("scheme", "V", "d", "phi"),
}


def cmd_sweep(params, command, taus=None, method="fock", nodes=DEFAULT_NODES, tol=DEFAULT_TOL,
              workers=1):
    """Cartesian sweep; each point contributes the rows of the direct command.

    Rows carry the point's parameter values first; points follow declared order.
    """
    if command not in SWEEP_COMMANDS:
        raise ValidationError(f"sweep command must be one of {sorted(SWEEP_COMMANDS)}")
    allowed = SWEEP_COMMANDS[command]
    for k in params:
        if k not in allowed:
            raise ConfigError(f"not a parameter of {command}", key=k)
    missing = [k for k in allowed if k not in params]
    if missing:
        raise ConfigError(f"missing parameter(s) {', '.join(missing)} for {command}")
    conv = {k: (str if k == "scheme" else real) for k in allowed}
    values = {}
    for k in allowed:
        try:
            values[k] = [conv[k](v) for v in params[k]]
        except argparse.ArgumentTypeError as exc:
            raise ConfigError(str(exc), key=k) from None
    points = cartesian(values)

    def one(p):
        if command == "pure-ent":
            return cmd_pure_ent(p["alpha"], [p["phi"]])
        if command == "mixed-ent":
            return cmd_mixed_ent(p["V"], p["d"], p["phi"], nodes, tol)
        return cmd_entpower(p["scheme"], p["V"], p["d"], p["phi"], taus, method, nodes, tol)

    results = run_ordered(one, points, workers)
    header = list(allowed) + results[0].header
    rows = []
    for p, res in zip(points, results):
        for r in res.rows:
            rows.append([p[k] for k in allowed] + list(r))
    meta = _meta("sweep", sweep_command=command, points=len(points),
                 **{f"sweep_{k}": values[k] for k in allowed})
    if command == "entpower":
        meta.update(tau_min=_meta_value(taus[0]), tau_max=_meta_value(taus[-1]),
                    tau_points=str(len(taus)), method=method)
    if command != "pure-ent":
        meta.update(nodes=str(nodes), tol=_meta_value(tol))
    return SweepResult(header, rows, meta)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common(p, quadrature=True):
    p.add_argument("--config", help="key = value file supplying defaults for these flags")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads (results do not depend on this)")
    p.add_argument("--timing", action="store_true", help="add wall time to the metadata")
    if quadrature:
        p.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="initial nodes per axis")
        p.add_argument("--tol", type=real, default=DEFAULT_TOL, help="quadrature tolerance")


def _phi_args(p):
    p.add_argument("--phi", type=real_list, help="explicit comma-separated phi values (overrides the grid)")
    p.add_argument("--phi-min", type=real, default=0.0)
    p.add_argument("--phi-max", type=real, default=math.pi)
    p.add_argument("--phi-points", type=int, default=101)


def _tau_args(p):
    p.add_argument("--tau-min", type=real, default=0.0)
    p.add_argument("--tau-max", type=real, default=10.0)
    p.add_argument("--tau-step", type=real, default=0.05)
    p.add_argument("--method", choices=("fock", "quadrature"), default="fock",
                   help="exact Fock-basis average or Gauss-Hermite quadrature")


def build_parser():
    parser = argparse.ArgumentParser(prog="catent", description=__doc__.splitlines()[0],
                                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"catent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pure-ent", allow_abbrev=False, help="entanglement of the pure cat state against phi")
    p.add_argument("--alpha", type=real, default=1.0, help="|alpha|")
    _phi_args(p)
    _common(p, quadrature=False)

    p = sub.add_parser("fig2", allow_abbrev=False, help="thermally averaged cat entanglement against phi")
    p.add_argument("--V", type=real_list, default=[2.0, 5.0, 10.0], help="comma-separated list")
    p.add_argument("--d", type=real, default=1.0)
    _phi_args(p)
    _common(p)

    p = sub.add_parser("entpower", allow_abbrev=False, help="negativity and mixedness of the transferred state")
    p.add_argument("--scheme", choices=entpower.SCHEMES, default="symmetric")
    p.add_argument("--V", type=real, default=10.0)
    p.add_argument("--d", type=real, default=7.0)
    p.add_argument("--phi", type=real, default=math.pi)
    _tau_args(p)
    _common(p)

    p = sub.add_parser("simon", allow_abbrev=False, help="Simon separability test on a covariance matrix")
    p.add_argument("--target", choices=("cat", "ecs", "file"), default="cat")
    p.add_argument("--alpha", type=real, default=1.0)
    p.add_argument("--phi", type=real, default=math.pi)
    p.add_argument("--V", type=real, default=5.0)
    p.add_argument("--d", type=real, default=0.0)
    p.add_argument("--sign", choices=("+", "-"), default="+")
    p.add_argument("--input", help="4x4 covariance matrix file for target 'file'")
    _common(p)

    p = sub.add_parser("ecs-cov", allow_abbrev=False, help="entangled-coherent-state covariance, closed form vs numeric")
    p.add_argument("--V", type=real_list, default=[2.0, 5.0, 10.0])
    _common(p)

    p = sub.add_parser("sweep", allow_abbrev=False, help="Cartesian parameter sweep from a config file")
    p.add_argument("--sweep-command", choices=sorted(SWEEP_COMMANDS))
    for name in ("scheme", "V", "d", "phi", "alpha"):
        p.add_argument(f"--{name}", type=str_list, help="comma-separated values")
    _tau_args(p)
    _common(p)
    return parser, sub.choices


def _apply_config(parser, subparsers, argv):
    """Re-parse with config values installed as defaults so that flags win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args, {}
    cfg = parse_config(args.config)
    sp = subparsers[args.command]
    known = {a.dest: a for a in sp._actions}
    defaults, extra = {}, {}
    for key, items in cfg.items():
        if key in ("config", "help"):
            raise ConfigError("key not allowed in a config file", args.config,
                              cfg.lines.get(key), key)
        if key == "command" and args.command == "sweep":
            defaults["sweep_command"] = items[0]
        elif key in known:
            act = known[key]
            if act.nargs == 0:
                defaults[key] = items[0].lower() in ("1", "true", "yes", "on")
            else:
                defaults[key] = ",".join(items)
        elif args.command == "sweep" and key in ("scheme", "V", "d", "phi", "alpha"):
            extra[key] = items
        else:
            raise ConfigError(f"unknown key for '{args.command}'", args.config,
                              cfg.lines.get(key), key)
    saved = {k: sp.get_default(k) for k in defaults}
    sp.set_defaults(**defaults)
    try:
        args = parser.parse_args(argv)
    finally:
        sp.set_defaults(**saved)
    return args, extra


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dispatch(args, cfg_lists):
    workers = max(1, int(args.threads))
    c = args.command
    if c in ("pure-ent", "fig2"):
        phis = args.phi if args.phi else phi_grid(args.phi_min, args.phi_max, args.phi_points)
        if c == "pure-ent":
            return cmd_pure_ent(args.alpha, phis)
        return cmd_fig2(args.V, args.d, phis, args.nodes, args.tol, workers)
    if c == "entpower":
        taus = tau_grid(args.tau_min, args.tau_max, args.tau_step)
        return cmd_entpower(args.scheme, args.V, args.d, args.phi, taus, args.method,
                            args.nodes, args.tol, workers)
    if c == "simon":
        _, _, text = cmd_simon(args.target, args.alpha, args.phi, args.V, args.d, args.sign,
                               args.input, args.nodes, args.tol, workers)
        return text
    if c == "ecs-cov":
        return cmd_ecs_cov(args.V, args.nodes, args.tol, workers)
    if c == "sweep":
        if not args.sweep_command:
            raise ValidationError("sweep needs a command (config key 'command' or --sweep-command)")
        params = dict(cfg_lists)
        for k in ("scheme", "V", "d", "phi", "alpha"):
            if getattr(args, k) is not None:
                params[k] = getattr(args, k)
        taus = tau_grid(args.tau_min, args.tau_max, args.tau_step)
        return cmd_sweep(params, args.sweep_command, taus, args.method, args.nodes, args.tol,
                         workers)
    raise ValidationError(f"unknown command {c!r}")


def main(argv=None):
    parser, subparsers = build_parser()
    try:
        args, cfg_lists = _apply_config(parser, subparsers, argv)
        start = time.perf_counter()
        result = _dispatch(args, cfg_lists)
        if isinstance(result, SweepResult):
            result.metadata["wall_time_s"] = f"{time.perf_counter() - start:.3f}"
            text = result.to_csv(timing=args.timing)
        else:
            text = result
        _emit(text, args.out)
    except (ConvergenceError, TruncationError, UnderflowError) as exc:
        print(f"catent: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, CatentError) as exc:
        print(f"catent: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
