"""Batch front end: ``beable <command> [options]``.

Every command builds a :class:`ResultTable` and writes it as CSV or JSON.
Options may also come from a ``key = value`` file given with ``--config``;
flags on the command line win.  Exit codes: 0 success, 1 invalid input,
2 numerical failure or I/O error.
"""
from __future__ import annotations

import argparse
import configparser
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import discrete_kernel as dk
from . import fock_algebra as fa
from . import measurement_demo as md
from . import path_oracle as po
from . import spectral as sp
from . import superoperators as so
from .errors import DomainError, NumericError

SEED_ENV = "BEABLE_SEED"


class UsageError(Exception):
    """Bad command line or configuration (exit code 1)."""


@dataclass
class CommandConfig:
    command: str
    parameters: dict
    output_path: str = "-"
    format: str = "csv"
    seed: int = 0


@dataclass
class ResultTable:
    columns: list                  # (name, unit) pairs
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        w = len(self.columns)
        for r in self.rows:
            if len(r) != w:
                raise DomainError(f"row of length {len(r)} in a table of {w} columns")

    def add(self, *values):
        if len(values) != len(self.columns):
            raise DomainError(f"row of length {len(values)} in a table of {len(self.columns)} columns")
        self.rows.append(tuple(float(v) for v in values))


# ------------------------------------------------------------- output

def format_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    buf.write(",".join(f"{n}({u})" for n, u in table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join("%.16e" % v for v in r) + "\n")
    return buf.getvalue()


def format_json(table: ResultTable) -> str:
    def num(v):
        return None if math.isnan(v) else v

    doc = {
        "columns": [{"name": n, "unit": u} for n, u in table.columns],
        "rows": [[num(v) for v in r] for r in table.rows],
        "metadata": table.metadata,
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def parse_csv(text: str) -> ResultTable:
    """Inverse of :func:`format_csv` (metadata is not stored in CSV)."""
    lines = text.split("\n")
    cols = []
    for h in lines[0].split(","):
        name, unit = h[:-1].split("(", 1)
        cols.append((name, unit))
    rows = [tuple(float(x) for x in ln.split(",")) for ln in lines[1:] if ln]
    return ResultTable(cols, rows)


def emit(table: ResultTable, config: CommandConfig, stream=None) -> None:
    """Write ``table`` to ``config.output_path`` (``-`` for ``stream``/stdout).

    CSV holds the header and rows only; metadata travels in the JSON form.
    """
    text = format_json(table) if config.format == "json" else format_csv(table)
    if config.output_path == "-":
        (stream or sys.stdout).write(text)
        return
    with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ----------------------------------------------------------- commands

def _floats(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _ints(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def cmd_drift(a, seed) -> ResultTable:
    Q, P = fa.build_canonical(a.nmax, a.omega)
    H = fa.build_hamiltonian(Q, P, a.omega)
    rho0 = fa.coherent_state(a.amplitude, a.nmax)
    tab = ResultTable([("t", "time"), ("energy", "energy"),
                       ("energy_slope", "energy/time"), ("min_eig", "1")])
    if a.formalism == "original":
        L = so.lindblad_original(Q, a.alpha)
        res = so.propagate(L, rho0, a.t, a.steps, H=H)
        E, mins = res.energy_series, res.min_eigenvalue_series
        times = res.times
        tags = ["energy drift under position dephasing", "d<H>/dt = alpha/4"]
    else:
        L = so.lindblad_modified(Q, P, a.omega, a.gamma)
        ev = so.evolve_moments(L, Q, P, rho0, a.t, a.steps, a.omega, H=H)
        E, times = ev.energy_series, ev.times
        mins = np.full(len(times), np.nan)     # moments carry no spectrum
        tags = ["energy conservation under the signed dissipator",
                "Heisenberg moment evolution"]
    dE = np.gradient(E, times)
    for row in zip(times, E, dE, mins):
        tab.add(*row)
    tab.metadata.update(relations=tags, fitted_slope=so.fit_slope(times, E))
    return tab


def cmd_kernel(a, seed) -> ResultTable:
    grid = dk.GridSpec.from_T(a.N, a.T, a.omega)
    tab = ResultTable([("n", "1"), ("D", "1"), ("Dbar", "1"), ("Dbarbar", "1")])
    for n in range(1, a.N + 1):
        tab.add(n, *dk.recurrence_determinants(n))
    rep = dk.positivity_threshold(grid)
    Kbar = dk.reduced_kernel(grid)
    tab.metadata.update(
        relations=["continuant recurrences of the kinetic kernel",
                   "grid positivity threshold"],
        lam=grid.lam, threshold_bound=rep.bound, threshold_holds=rep.holds,
        eig_min_Kbar0=rep.eig_min, reduced_positive=rep.positive,
        det_Kbar=Kbar.det(),
    )
    return tab


def cmd_oracle(a, seed) -> ResultTable:
    if a.mode == "feynman":
        mass = 1j if a.imaginary_mass else 1.0
        ex = po.feynman_exact(a.q0, a.qf, a.T, a.omega, mass).value
        tab = ResultTable([("N", "1"), ("rel_error", "1"), ("re", "1/length"), ("im", "1/length")])
        for N in a.Ns:
            v = po.feynman_discrete(a.q0, a.qf, dk.GridSpec.from_T(N, a.T, a.omega), mass).value
            tab.add(N, abs(v - ex) / abs(ex), v.real, v.imag)
        tab.metadata.update(relations=["time-sliced oscillator propagator versus closed form"],
                            exact_re=ex.real, exact_im=ex.imag, mass=str(mass))
        return tab
    if a.mode == "bruteforce":
        rng = np.random.default_rng(seed)
        grid = dk.GridSpec.from_T(3, a.T, a.omega)
        state = po.GaussianEndpointState(0.4, 0.3, 0.7)
        xi = rng.uniform(-1, 1, 3)
        QF, QFp = 0.2, -0.4
        cf = po.cfo_discrete(state, xi, grid, a.gamma, QF, QFp, mass=1j)
        bf = po.cfo_bruteforce(state, xi, grid, a.gamma, QF, QFp, mass=1j, points=a.points)
        tab = ResultTable([("closed_re", "1"), ("closed_im", "1"), ("grid_re", "1"),
                           ("grid_im", "1"), ("rel_diff", "1")])
        tab.add(cf.real, cf.imag, bf.value.real, bf.value.imag, abs(cf - bf.value) / abs(cf))
        tab.metadata.update(relations=["sliced characteristic functional, grid quadrature "
                                       "versus Gaussian closed form"],
                            xi=[float(x) for x in xi], points=a.points)
        return tab
    fam = po.brownian_bridge_family if a.family == "bridge" else po.white_noise_family
    scan = po.lowfreq_scan(fam(a.T, a.omega), a.omega, a.Ns, seeds=a.seeds, seed=seed)
    tab = ResultTable([("N", "1"), ("residual", "length*time^(1/2)")])
    for N, r in zip(scan.N, scan.residual):
        tab.add(N, r)
    tab.metadata.update(relations=["low-frequency content of interpolated world lines"],
                        family=a.family, slope=scan.slope)
    return tab


def cmd_weights(a, seed) -> ResultTable:
    kbar = a.kbar if a.kind == "modulated_gauss" else 0.0
    h = sp.WeightFunction(a.kind, a.tau, kbar)
    tab = ResultTable([("omega", "1/time"), ("g_hh", "time"), ("error", "time"),
                       ("closed_form", "time"), ("admissible", "1")])
    for w in a.omegas:
        kv = sp.g_hh_time(h, w)
        tab.add(w, kv.value, kv.error_estimate, sp.g_hh_time_closed(h, w), kv.value > 0)
    tab.metadata.update(relations=["principal-value weight kernel", "admissibility sign"],
                        kind=a.kind, tau=a.tau, kbar=kbar)
    return tab


def cmd_bounds(a, seed) -> ResultTable:
    bc = sp.bound_chain(a.T, a.tau, a.a)
    tab = ResultTable([("u_erg", "erg/cm^3"), ("u_natural_computed", "cm^-4"),
                       ("u_natural_stated", "cm^-4"), ("gamma_bound_computed", "1"),
                       ("gamma_bound_stated", "1"), ("discrepancy", "1")])
    tab.add(*bc)
    tab.metadata.update(relations=["black-body energy density", "lower bound on gamma"],
                        T=a.T, tau=a.tau, a=a.a)
    return tab


def cmd_demo_measurement(a, seed) -> ResultTable:
    rep = md.born_rule_report(a.dim_object, a.dim_apparatus, a.trials, seed)
    tab = ResultTable([("trials", "1"), ("max_deviation", "1"), ("min_probability", "1"),
                       ("max_sum_error", "1"), ("max_bilinear_deviation", "1"),
                       ("apparatus_independent", "1")])
    tab.add(*rep)
    tab.metadata.update(relations=["Born rule from trace-preserving readout"],
                        dim_object=a.dim_object, dim_apparatus=a.dim_apparatus)
    return tab


COMMANDS = {
    "drift": cmd_drift,
    "kernel": cmd_kernel,
    "oracle": cmd_oracle,
    "weights": cmd_weights,
    "bounds": cmd_bounds,
    "demo-measurement": cmd_demo_measurement,
}


# ------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> _Parser:
    p = _Parser(prog="beable", description="Monitored-oscillator numerics.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="command")

    def common(s):
        s.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
        s.add_argument("--config", default=None, help="key = value file")

    s = sub.add_parser("drift", help="energy audit of a master equation")
    s.add_argument("--formalism", choices=("original", "modified"), default="original")
    s.add_argument("--alpha", type=float, default=0.8)
    s.add_argument("--gamma", type=float, default=0.5)
    s.add_argument("--omega", type=float, default=1.0)
    s.add_argument("--nmax", type=_positive_int, default=40)
    s.add_argument("--t", type=float, default=5.0)
    s.add_argument("--steps", type=_positive_int, default=100)
    s.add_argument("--amplitude", type=float, default=1.0, help="coherent-state alpha")
    common(s)

    s = sub.add_parser("kernel", help="kinetic-kernel determinants and threshold")
    s.add_argument("--N", type=_positive_int, default=3)
    s.add_argument("--omega", type=float, default=1.0)
    s.add_argument("--T", type=float, default=1.0)
    common(s)

    s = sub.add_parser("oracle", help="path-integral checks")
    s.add_argument("--mode", choices=("feynman", "bruteforce", "lowfreq"), default="feynman")
    s.add_argument("--omega", type=float, default=1.0)
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--q0", type=float, default=0.0)
    s.add_argument("--qf", type=float, default=1.0)
    s.add_argument("--Ns", type=_ints, default=[32, 64, 128])
    s.add_argument("--imaginary-mass", action="store_true")
    s.add_argument("--gamma", type=float, default=0.5)
    s.add_argument("--points", type=_positive_int, default=17)
    s.add_argument("--family", choices=("bridge", "white"), default="bridge")
    s.add_argument("--seeds", type=_positive_int, default=50)
    common(s)

    s = sub.add_parser("weights", help="admissibility sweep over omega")
    s.add_argument("--kind", choices=sp.TIME_KINDS, default="modulated_gauss")
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--kbar", type=float, default=2.0)
    s.add_argument("--omegas", type=_floats, default=[0.05, 0.1, 0.2, 0.5, 1.0])
    common(s)

    s = sub.add_parser("bounds", help="cavity bound chain")
    s.add_argument("--T", type=float, default=300.0)
    s.add_argument("--tau", type=float, default=3e7)
    s.add_argument("--a", type=float, default=1e-4)
    common(s)

    s = sub.add_parser("demo-measurement", help="Born-rule readout report")
    s.add_argument("--dim-object", type=_positive_int, default=3)
    s.add_argument("--dim-apparatus", type=_positive_int, default=3)
    s.add_argument("--trials", type=_positive_int, default=20)
    common(s)
    return p


_RESERVED = {"command", "config"}


def _load_config(path: str, sp_parser: argparse.ArgumentParser) -> dict:
    """Convert a ``key = value`` file into defaults for ``sp_parser``."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        cp.read_string("[beable]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"cannot parse config {path}: {exc}")
    actions = {a.dest: a for a in sp_parser._actions if a.dest not in {"help"} | _RESERVED}
    out = {}
    for key, raw in cp["beable"].items():
        dest = key.replace("-", "_")
        if dest not in actions:
            raise UsageError(f"unknown config key {key!r}")
        act = actions[dest]
        if isinstance(act, argparse._StoreTrueAction):
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} expects a boolean")
            out[dest] = low in ("true", "1", "yes")
            continue
        try:
            val = act.type(raw.strip()) if act.type else raw.strip()
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key!r}: {exc}")
        if act.choices is not None and val not in act.choices:
            raise UsageError(f"config key {key!r} must be one of {sorted(act.choices)}")
        out[dest] = val
    return out


def _resolve_seed(seed) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}")


def parse_config(argv: Sequence[str]) -> tuple[CommandConfig, argparse.Namespace]:
    parser = build_parser()
    argv = list(argv)
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.print_help(sys.stderr)
        raise UsageError("no command given")
    if ns.config:
        sub = parser._subparsers._group_actions[0].choices[ns.command]
        sub.set_defaults(**_load_config(ns.config, sub))
        ns = parser.parse_args(argv)
    seed = _resolve_seed(ns.seed)
    params = {k: v for k, v in vars(ns).items()
              if k not in _RESERVED | {"output", "format", "seed"}}
    return CommandConfig(ns.command, params, ns.output, ns.format, seed), ns


def run(argv: Sequence[str], stream=None) -> int:
    """Execute one command; returns the exit code."""
    try:
        cfg, ns = parse_config(argv)
        table = COMMANDS[cfg.command](ns, cfg.seed)
        table.metadata.update(command=" ".join(["beable", *argv]), seed=cfg.seed)
        emit(table, cfg, stream)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:          # --help
        return int(exc.code or 0)
    except NumericError as exc:
        print(f"beable: numeric error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"beable: invalid input: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"beable: I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
