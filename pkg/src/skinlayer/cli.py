"""Command-line front end: ``skinlayer {rates,profiles-check,symbol-check,curl-check,decay-check}``.

Configuration precedence is CLI flags > config file > defaults.  The config
file is INI-style::

    [problem]
    R = 1
    R_out = 2
    omega = 1
    eps_r = 1

    [sweep]
    deltas = 0.08, 0.04, 0.02, 0.01
    orders = 0, 1, 2, 3
    modes = 1, 2, 3

    [run]
    out = skinlayer-out
    seed = 0

``SKINLAYER_OUT`` overrides the output directory.  Every command exits with
status 1 on a tolerance breach and 2 on invalid configuration.
"""
import argparse
import configparser
import json
import math
import os
import pathlib
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import modal
from .modal import SCHEMA_VERSION, TE, TM, ProblemConfig

DEFAULTS = {
    "R": 1.0,
    "R_out": 2.0,
    "omega": 1.0,
    "eps_r": 1.0,
    "deltas": (0.08, 0.04, 0.02, 0.01),
    "orders": (0, 1, 2, 3),
    "modes": (1, 2, 3),
    "out": "skinlayer-out",
    "seed": 0,
}

# declared slope windows for the GIBC and truncated-expansion rate fits
GIBC_WINDOWS = {0: (0.8, 1.2), 1: (2.7, math.inf), 2: (2.7, 3.3), 3: (3.6, 4.4)}


def expansion_window(k):
    return (k + 0.85, math.inf)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    R: float = DEFAULTS["R"]
    R_out: float = DEFAULTS["R_out"]
    omega: float = DEFAULTS["omega"]
    eps_r: float = DEFAULTS["eps_r"]
    deltas: tuple = DEFAULTS["deltas"]
    orders: tuple = DEFAULTS["orders"]
    modes: tuple = DEFAULTS["modes"]
    out: str = DEFAULTS["out"]
    seed: int = DEFAULTS["seed"]
    extra: dict = field(default_factory=dict)

    def validate(self):
        if not self.deltas:
            raise ConfigError("delta list is empty")
        if any(d <= 0 for d in self.deltas):
            raise ConfigError("delta values must be positive")
        if not self.modes or any(n < 1 for n in self.modes):
            raise ConfigError("modes must be a non-empty list of integers >= 1")
        if any(k not in (0, 1, 2, 3) for k in self.orders) or not self.orders:
            raise ConfigError("orders must be a non-empty subset of 0..3")
        try:
            self.problem()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def problem(self, delta=None) -> ProblemConfig:
        return ProblemConfig(R=self.R, R_out=self.R_out, omega=self.omega, eps_r=self.eps_r,
                             delta=delta if delta is not None else max(self.deltas))


def _floats(text):
    return tuple(float(v) for v in str(text).replace(",", " ").split())


def _ints(text):
    return tuple(int(v) for v in str(text).replace(",", " ").split())


_PARSERS = {"R": float, "R_out": float, "omega": float, "eps_r": float, "deltas": _floats,
            "orders": _ints, "modes": _ints, "out": str, "seed": int}
_SECTIONS = {"problem": ("R", "R_out", "omega", "eps_r"), "sweep": ("deltas", "orders", "modes"),
             "run": ("out", "seed")}


def load_config(args) -> RunConfig:
    """Merge defaults, the optional config file and CLI flags."""
    values = dict(DEFAULTS)
    if args.config:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        if not cp.read(args.config):
            raise ConfigError(f"cannot read config file {args.config}")
        for section, keys in _SECTIONS.items():
            if not cp.has_section(section):
                continue
            for key in cp[section]:
                if key not in keys:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                try:
                    values[key] = _PARSERS[key](cp[section][key])
                except ValueError as exc:
                    raise ConfigError(f"bad value for {key}: {exc}") from exc
    flags = {"deltas": args.delta, "orders": args.orders, "modes": args.modes,
             "out": args.out, "seed": args.seed}
    for key, raw in flags.items():
        if raw is not None:
            try:
                values[key] = _PARSERS[key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for --{key}: {exc}") from exc
    if os.environ.get("SKINLAYER_OUT"):
        values["out"] = os.environ["SKINLAYER_OUT"]
    return RunConfig(**values).validate()


# ---------------------------------------------------------------------------
# commands

def _gnuplot_script(orders, kind):
    lines = ["# gnuplot script: log-log error against delta",
             "set logscale xy", "set xlabel 'delta'", "set ylabel 'H(curl) error'",
             "set key left top", "set datafile separator ','"]
    plots = [f"'rates_k{k}.csv' every ::1 using 2:3 with linespoints title '{kind} k={k}'"
             for k in orders]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def cmd_rates(cfg: RunConfig, kind="gibc"):
    if len(cfg.deltas) < 4:
        raise ConfigError("rates needs at least 4 delta values")
    deltas = sorted(cfg.deltas, reverse=True)
    reports, ok = {}, True
    lines = []
    for k in cfg.orders:
        try:
            rep = modal.rate_study(cfg.problem(), k, deltas, modes=cfg.modes, kind=kind)
        except modal.ModalSolveError as exc:
            raise RuntimeError(f"rate study failed: {exc}") from exc
        lo, hi = GIBC_WINDOWS[k] if kind == "gibc" else expansion_window(k)
        passed = lo <= rep.slope <= hi
        ok &= passed
        reports[k] = (rep, (lo, hi), passed)
        lines.append(f"k={k}: slope {rep.slope:.3f} window [{lo:g}, {hi:g}] "
                     f"{'PASS' if passed else 'FAIL'}")
    out = pathlib.Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, (rep, _, _) in reports.items():
        (out / f"rates_k{k}.csv").write_text(rep.to_csv())
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "rates",
        "kind": kind,
        "config": _public(cfg),
        "slopes": {str(k): rep.slope for k, (rep, _, _) in reports.items()},
        "windows": {str(k): [w[0], None if math.isinf(w[1]) else w[1]]
                    for k, (_, w, _) in reports.items()},
        "passed": ok,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    (out / "rates.gp").write_text(_gnuplot_script(cfg.orders, kind))
    return ok, lines, summary


def cmd_profiles_check(cfg: RunConfig, tol=1e-10):
    from . import _golden
    from .blprofiles import (SurfaceSymbolAlgebra, run_recursion, system_residual,
                             trace_Ek_cross_n, trace_identity_residual)

    lines, ok = [], True
    devs = _golden.golden_deviations()
    for name, dev in devs.items():
        passed = dev <= tol
        ok &= passed
        lines.append(f"{name}: max deviation {dev:.2e} {'PASS' if passed else 'FAIL'}")
    # randomized traces: degree law and system residual
    rng = np.random.default_rng(cfg.seed)
    worst_res, degree_ok = 0.0, True
    for _ in range(5):
        c1, c2, x1, x2 = rng.normal(size=4)
        alg = SurfaceSymbolAlgebra.plane_wave(c1, c2, x1, x2, omega=cfg.omega, eps_r=cfg.eps_r)
        tr = rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2))
        st = run_recursion(alg, tr, 4)
        for k in range(5):
            degree_ok &= st.E_hat[k].degree <= k and st.H[k].degree <= k
            scale = max(1.0, float(np.max(np.abs(st.E_hat[k].coefficients))))
            worst_res = max(worst_res, system_residual(st, k) / scale)
    passed = degree_ok and worst_res <= tol
    ok &= passed
    lines.append(f"random traces (seed {cfg.seed}): degree law {'ok' if degree_ok else 'violated'}, "
                 f"residual {worst_res:.2e} {'PASS' if passed else 'FAIL'}")
    # sphere n = 1..5: trace identity of the recursion traces
    worst = 0.0
    for n in range(1, 6):
        alg = SurfaceSymbolAlgebra.sphere_mode(n, R=cfg.R, omega=cfg.omega, eps_r=cfg.eps_r)
        tr = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        st = run_recursion(alg, tr, 2)
        for d in cfg.deltas:
            for k in range(4):
                Exn = sum(d**l * trace_Ek_cross_n(st, l) for l in range(k + 1))
                HT = sum(d**l * np.append(tr[l], 0) for l in range(k + 1))
                worst = max(worst, trace_identity_residual(Exn, HT, tr[: k + 1], d, k, alg))
    passed = worst <= tol
    ok &= passed
    lines.append(f"sphere n=1..5 trace identity: max residual {worst:.2e} "
                 f"{'PASS' if passed else 'FAIL'}")
    summary = {"schema_version": SCHEMA_VERSION, "command": "profiles-check",
               "deviations": devs, "random_residual": worst_res, "sphere_residual": worst,
               "passed": ok}
    return ok, lines, summary


def cmd_symbol_check(cfg: RunConfig):
    from .symbols import GRADIENT, CURL, ModeIndex, coercivity_scan, remainder_symbol, scan_to_csv

    dmax = max(cfg.deltas)
    lines, ok = [], True
    C1, C2, _ = coercivity_scan(1, dmax, 1e6, eps_r=cfg.eps_r, omega=cfg.omega, R=cfg.R)
    passed = C1 == 1.0 and abs(C2 - math.sqrt(2) / 2) <= 1e-15
    ok &= passed
    lines.append(f"k=1: C1={C1:.6f} C2={C2:.6f} {'PASS' if passed else 'FAIL'}")
    res3 = coercivity_scan(3, dmax, 1e6, eps_r=cfg.eps_r, omega=cfg.omega, R=cfg.R)
    passed = res3.C2 > 0
    ok &= passed
    lines.append(f"k=3: C1={res3.C1:.4f} C2={res3.C2:.4f} delta_k={res3.delta_k:g} "
                 f"{'PASS' if passed else 'FAIL'}")
    weighted = 0.0
    for d in np.linspace(min(cfg.deltas), dmax, 25):
        for n in np.unique(np.geomspace(1, 3000, 200).astype(int)):
            for fam in (GRADIENT, CURL):
                m = ModeIndex(int(n), fam, cfg.R)
                weighted = max(weighted, abs(remainder_symbol(d, m)) / (1 + m.lam) ** 2)
    passed = weighted <= 1.0
    ok &= passed
    lines.append(f"remainder weighted bound {weighted:.3f} {'PASS' if passed else 'FAIL'}")
    out = pathlib.Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "symbol_scan_k3.csv").write_text(scan_to_csv(res3.rows))
    summary = {"schema_version": SCHEMA_VERSION, "command": "symbol-check",
               "k1": [C1, C2], "k3": [res3.C1, res3.C2], "weighted_remainder": weighted,
               "passed": ok}
    return ok, lines, summary


def cmd_curl_check(cfg: RunConfig, tol=1e-6):
    from .geometry import Ellipsoid, LocalField, curl_local, fd_curl

    E = Ellipsoid(1.0, 1.3, 0.8)

    def V(x):
        return np.array([np.sin(x[1]) * x[2], np.exp(0.3 * x[0]) * x[2] ** 2,
                         np.cos(x[0] * x[1]) + x[0]])

    field_ = LocalField.from_cartesian(E, V)
    rng = np.random.default_rng(cfg.seed)
    lines, ok, worst, orders = [], True, 0.0, []
    steps = np.array([1e-2, 5e-3, 2.5e-3])
    for _ in range(4):
        u, v = rng.uniform(0.3, math.pi - 0.3), rng.uniform(0, 2 * math.pi)
        nu = rng.uniform(0, 0.1)
        x = E.point(u, v) + nu * E.normal(u, v)
        cl = curl_local(field_, (u, v, nu))
        errs = np.array([np.max(np.abs(fd_curl(V, x, h) - cl)) for h in steps]) / np.max(np.abs(cl))
        worst = max(worst, float(errs[-1]))
        orders.append(float(np.polyfit(np.log(steps), np.log(errs), 1)[0]))
    ok = worst <= tol and all(abs(o - 2) < 0.1 for o in orders)
    lines.append(f"ellipsoid curl: FD rel error {worst:.2e}, orders "
                 + ", ".join(f"{o:.2f}" for o in orders) + f" {'PASS' if ok else 'FAIL'}")
    summary = {"schema_version": SCHEMA_VERSION, "command": "curl-check",
               "max_rel_error": worst, "orders": orders, "passed": ok}
    return ok, lines, summary


def cmd_decay_check(cfg: RunConfig, rtol=0.05):
    d = min(cfg.deltas)
    lines, ok, rows = [], True, []
    for pol in (TE, TM):
        rate, expected = modal.interior_decay(cfg.problem(d), cfg.modes[0], pol)
        passed = abs(rate / expected - 1) <= rtol
        ok &= passed
        rows.append({"polarization": pol, "rate": rate, "expected": expected})
        lines.append(f"{pol} n={cfg.modes[0]} delta={d:g}: rate {rate:.2f} expected {expected:.2f} "
                     f"{'PASS' if passed else 'FAIL'}")
    summary = {"schema_version": SCHEMA_VERSION, "command": "decay-check", "rows": rows,
               "passed": ok}
    return ok, lines, summary


def _public(cfg):
    d = asdict(cfg)
    d.pop("extra")
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def build_parser():
    p = argparse.ArgumentParser(prog="skinlayer", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI config file")
    common.add_argument("--out", metavar="DIR", help="output directory (SKINLAYER_OUT overrides)")
    common.add_argument("--delta", metavar="LIST", help="comma-separated delta values")
    common.add_argument("--orders", metavar="LIST", help="comma-separated GIBC orders k")
    common.add_argument("--modes", metavar="LIST", help="comma-separated mode indices n")
    common.add_argument("--seed", metavar="N", help="seed for randomized checks")
    common.add_argument("--json", action="store_true", help="print the JSON summary to stdout")
    sub = p.add_subparsers(dest="command", required=True)
    rates = sub.add_parser("rates", parents=[common], help="GIBC or expansion convergence rates")
    rates.add_argument("--kind", choices=("gibc", "expansion"), default="gibc")
    for name, text in (("profiles-check", "golden displays and recursion checks"),
                       ("symbol-check", "impedance symbol coercivity and remainder"),
                       ("curl-check", "local curl against Cartesian finite differences"),
                       ("decay-check", "interior exponential decay rate")):
        sub.add_parser(name, parents=[common], help=text)
    return p


COMMANDS = {"profiles-check": cmd_profiles_check, "symbol-check": cmd_symbol_check,
            "curl-check": cmd_curl_check, "decay-check": cmd_decay_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "rates":
            ok, lines, summary = cmd_rates(cfg, args.kind)
        else:
            ok, lines, summary = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"skinlayer: configuration error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"skinlayer: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
