"""Command-line front end.

Subcommands: ``evolve``, ``compare``, ``figure1``, ``scan``, ``kernel-check``.
Times are dimensionless (``tau = gamma t``). Output is CSV or JSON with floats
in shortest round-trip form, so repeated runs are byte-identical. Run
metadata goes to a ``.meta.json`` sidecar next to ``--out``.

Exit codes: 0 success, 2 invalid configuration, 3 unsupported combination,
4 numerical failure, 5 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .damping_basis import BathParams, integrate_lindblad, spectrum
from .exact_jc import LorentzianBath, correlation_kernel_closed, correlation_kernel_quadrature
from .kernel_solutions import CoherenceArgMode
from .maps import Method, UnsupportedCombination, map_factors
from .positivity import first_violation
from .qubit_state import BlochVector, from_bloch, named_state
from .volterra import VolterraForm, VolterraProblem, solve

EXIT_OK, EXIT_CONFIG, EXIT_UNSUPPORTED, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4, 5

FIGURE1_RATIOS = (("R5", 5.0), ("R1", 1.0), ("R0p05", 0.05))
FIGURE1_METHODS = (Method.POST_MARKOVIAN, Method.EXACT, Method.MEMORY_KERNEL)

EXACT_COHERENCE_NOTE = (
    "exact_wx/exact_wy use the single-excitation amplitude as coherence factor; "
    "the model itself only specifies populations"
)
CP_NOTE = "complete positivity (Choi) columns go beyond the positivity analysis of the model"


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    return repr(float(x))


# --------------------------------------------------------------------------- scenario


@dataclass
class Scenario:
    methods: list
    R: Optional[float] = None
    gamma0: Optional[float] = None
    gamma: Optional[float] = None
    N: float = 0.0
    init: str = "excited"
    coherence_arg: str = "consistent"
    tau_start: float = 0.0
    tau_stop: float = 10.0
    tau_step: float = 0.01
    oracle: bool = False
    oracle_step: float = 1e-3
    params: BathParams = field(init=False, repr=False)
    w0: BlochVector = field(init=False, repr=False)

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("at least one --method is required")
        try:
            self.methods = [Method(m).value for m in self.methods]
            CoherenceArgMode(self.coherence_arg)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.params = _params(self.R, self.gamma0, self.gamma, self.N)
        self.w0 = parse_init(self.init)
        if not self.tau_step > 0:
            raise ConfigError("tau-step must be > 0")
        if not 0 <= self.tau_start < self.tau_stop:
            raise ConfigError("need 0 <= tau-start < tau-stop")
        if not self.oracle_step > 0:
            raise ConfigError("oracle-step must be > 0")
        if Method.EXACT.value in self.methods and self.params.N != 0:
            raise UnsupportedCombination("method 'exact' requires N = 0")

    @property
    def mode(self) -> CoherenceArgMode:
        return CoherenceArgMode(self.coherence_arg)

    def grid(self) -> np.ndarray:
        n = math.floor((self.tau_stop - self.tau_start) / self.tau_step + 1e-9)
        return self.tau_start + self.tau_step * np.arange(n + 1)

    def to_config(self) -> dict:
        cfg = {
            "method": list(self.methods),
            "N": self.N,
            "init": self.init,
            "coherence-arg": self.coherence_arg,
            "tau-start": self.tau_start,
            "tau-stop": self.tau_stop,
            "tau-step": self.tau_step,
            "oracle": self.oracle,
            "oracle-step": self.oracle_step,
        }
        if self.R is not None:
            cfg["R"] = self.R
        else:
            cfg["gamma0"] = self.gamma0
            cfg["gamma"] = self.gamma
        return cfg


def _params(R, gamma0, gamma, N) -> BathParams:
    try:
        if R is not None:
            if gamma0 is not None:
                raise ConfigError("give either --R or --gamma0/--gamma, not both")
            return BathParams.from_ratio(float(R), float(N))
        if gamma0 is None or gamma is None:
            raise ConfigError("bath parameters missing: give --R or both --gamma0 and --gamma")
        return BathParams(float(gamma0), float(gamma), float(N))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_init(spec: str) -> BlochVector:
    if "," in spec:
        try:
            wx, wy, wz = (float(v) for v in spec.split(","))
        except ValueError:
            raise ConfigError(f"--init expects wx,wy,wz, got {spec!r}") from None
        return BlochVector(wx, wy, wz)
    try:
        return named_state(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# --------------------------------------------------------------------------- tables


@dataclass
class EvolutionTable:
    columns: list
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def records(self) -> list:
        return [dict(zip(self.columns, row)) for row in self.rows]


def _oracle_population(method: Method, sc: Scenario, tau: np.ndarray) -> np.ndarray:
    params, w0 = sc.params, sc.w0
    p_fixed = 0.5 * (1.0 + params.wz_fixed)
    p0 = 0.5 * (1.0 + w0.wz)
    if method is Method.MARKOVIAN:
        rho = integrate_lindblad(params, from_bloch(w0), tau / params.gamma)
        return rho[:, 0, 0].real
    h = sc.oracle_step
    tau_max = h * math.ceil(tau[-1] / h - 1e-9)
    lam2 = spectrum(params).lambda2
    form = {
        Method.POST_MARKOVIAN: VolterraForm.POST_MARKOVIAN,
        Method.MEMORY_KERNEL: VolterraForm.MEMORY_KERNEL,
        Method.EXACT: VolterraForm.EXACT_AMPLITUDE,
    }[method]
    sol = solve(VolterraProblem(lam2, params.gamma, form, h, tau_max))
    factor = sol.at(tau)
    if method is Method.EXACT:
        return p0 * factor**2
    return factor * p0 + (1.0 - factor) * p_fixed


def run_evolve(sc: Scenario) -> EvolutionTable:
    tau = sc.grid()
    columns = ["tau"]
    data = [tau]
    w0 = sc.w0
    for name in dict.fromkeys(sc.methods):
        method = Method(name)
        p, z, f = map_factors(method, sc.params, tau, sc.mode)
        wx, wy = p * w0.wx, p * w0.wy
        wz = z * w0.wz + (1.0 - z) * f
        pe = 0.5 * (1.0 + wz)
        mineig = 0.5 * (1.0 - np.sqrt(wx**2 + wy**2 + wz**2))
        columns += [f"{name}_{c}" for c in ("pe", "wx", "wy", "wz", "mineig")]
        data += [pe, wx, wy, wz, mineig]
        if sc.oracle:
            ref = _oracle_population(method, sc, tau)
            columns += [f"{name}_oracle", f"{name}_delta"]
            data += [ref, pe - ref]
    rows = [list(r) for r in zip(*(d.tolist() for d in data))]
    return EvolutionTable(columns, rows)


def run_compare(sc: Scenario) -> dict:
    if len(sc.methods) < 2:
        raise ConfigError("compare needs at least two --method entries")
    table = run_evolve(sc)
    cols = {c: np.array([row[i] for row in table.rows]) for i, c in enumerate(table.columns)}
    pairs = []
    for a, b in itertools.combinations(sc.methods, 2):
        d = cols[f"{a}_pe"] - cols[f"{b}_pe"]
        pairs.append(
            {
                "a": a,
                "b": b,
                "max_abs": float(np.abs(d).max()),
                "l2": float(math.sqrt(sc.tau_step * float(np.sum(d * d)))),
            }
        )
    summary = {"scenario": sc.to_config(), "pairs": pairs}
    if sc.oracle:
        summary["oracle_max_abs"] = {
            m: float(np.abs(cols[f"{m}_delta"]).max()) for m in dict.fromkeys(sc.methods)
        }
    return summary


def figure1_scenarios():
    for tag, R in FIGURE1_RATIOS:
        yield tag, Scenario(methods=[m.value for m in FIGURE1_METHODS], R=R, N=0.0, init="excited",
                            tau_start=0.0, tau_stop=10.0, tau_step=0.01)


def run_figure1() -> dict:
    return {f"figure1_{tag}.csv": (sc, run_evolve(sc)) for tag, sc in figure1_scenarios()}


SCAN_COLUMNS = [
    "method", "R", "N", "coherence_arg", "tau_max",
    "positive_map", "first_violation_tau", "min_margin", "min_state_eigenvalue",
    "positive_componentwise", "first_violation_tau_componentwise",
    "positive_excited", "first_violation_tau_excited",
    "min_choi_eigenvalue", "completely_positive",
]


def run_scan(method, R_min, R_max, steps, tau_max, N=0.0, mode="consistent") -> EvolutionTable:
    method = Method(method)
    if method is Method.EXACT and N != 0:
        raise UnsupportedCombination("method 'exact' requires N = 0")
    if steps < 1 or not 0 <= R_min <= R_max or not tau_max > 0:
        raise ConfigError("scan needs steps >= 1, 0 <= R-min <= R-max and tau-max > 0")
    grid = np.linspace(R_min, R_max, steps) if steps > 1 else np.array([R_min])
    excited = named_state("excited")
    rows = []
    for R in grid.tolist():
        params = BathParams.from_ratio(R, N)
        rep = first_violation(method, params, mode, tau_max)
        pop = first_violation(method, params, mode, tau_max, initial_state=excited)
        rows.append([
            method.value, R, N, CoherenceArgMode(mode).value, tau_max,
            rep.is_positive_map, rep.first_violation_tau, rep.min_margin, rep.min_state_eigenvalue,
            rep.componentwise_positive, rep.componentwise_first_violation_tau,
            pop.is_positive_map, pop.first_violation_tau,
            rep.min_choi_eigenvalue, rep.is_cp,
        ])
    return EvolutionTable(SCAN_COLUMNS, rows)


KERNEL_COLUMNS = ["lambda_t", "closed", "quadrature_re", "quadrature_im", "error"]


def run_kernel_check(bath: LorentzianBath, points: int = 101) -> dict:
    """Closed-form versus quadrature correlation kernel over ``lambda_bar t`` in [0, 10].

    ``error`` is relative to the closed-form value, or absolute where that is 0.
    """
    rows = []
    for u in np.linspace(0.0, 10.0, points).tolist():
        t = u / bath.lambda_bar
        closed = correlation_kernel_closed(bath, t)
        quad_val = correlation_kernel_quadrature(bath, t)
        diff = abs(quad_val - closed)
        err = diff / abs(closed) if closed != 0 else diff
        rows.append([u, closed.real, quad_val.real, quad_val.imag, err])
    worst = max(rows, key=lambda r: r[4])
    return {
        "table": EvolutionTable(KERNEL_COLUMNS, rows),
        "max_error": worst[4],
        "worst_lambda_t": worst[0],
        "passed": worst[4] < 1e-6,
    }


# --------------------------------------------------------------------------- I/O


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: Optional[str], meta: Optional[dict] = None):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    if meta is not None:
        root, _ = os.path.splitext(out)
        with open(root + ".meta.json", "w", encoding="utf-8") as fh:
            fh.write(_dumps(meta))


def _meta(command: str, scenario: dict, notes=()) -> dict:
    return {"command": command, "version": __version__, "scenario": scenario, "notes": list(notes)}


def _table_text(table: EvolutionTable, fmt_name: str, scenario: dict) -> str:
    if fmt_name == "json":
        return _dumps({"scenario": scenario, "rows": table.records()})
    return table.to_csv()


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError:
        raise
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: {exc}") from None
    if isinstance(cfg, dict) and isinstance(cfg.get("scenario"), dict):
        cfg = cfg["scenario"]  # accept a metadata sidecar directly
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path}: expected a flat JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


SCENARIO_KEYS = ("method", "R", "gamma0", "gamma", "N", "init", "coherence_arg", "tau_start", "tau_stop",
                 "tau_step", "oracle", "oracle_step")


def scenario_from_args(args) -> Scenario:
    merged = {}
    if args.config:
        merged.update(load_config(args.config))
    unknown = set(merged) - set(SCENARIO_KEYS) - {"out", "format"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in SCENARIO_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    methods = merged.pop("method", None)
    if isinstance(methods, str):
        methods = [methods]
    for k in ("out", "format"):
        merged.pop(k, None)
    try:
        return Scenario(methods=list(methods or []), **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# --------------------------------------------------------------------------- parser


def _add_scenario_flags(p):
    p.add_argument("--method", action="append", choices=[m.value for m in Method])
    p.add_argument("--R", type=float)
    p.add_argument("--gamma0", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--N", type=float)
    p.add_argument("--init", help="excited, ground, plus-x or wx,wy,wz")
    p.add_argument("--coherence-arg", dest="coherence_arg", choices=[m.value for m in CoherenceArgMode])
    p.add_argument("--tau-start", dest="tau_start", type=float)
    p.add_argument("--tau-stop", dest="tau_stop", type=float)
    p.add_argument("--tau-step", dest="tau_step", type=float)
    p.add_argument("--oracle", action="store_const", const=True)
    p.add_argument("--oracle-step", dest="oracle_step", type=float)
    p.add_argument("--config", help="JSON file whose keys mirror the flag names")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmqubit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_scenario_flags(sub.add_parser("evolve", help="tabulate trajectories"))
    _add_scenario_flags(sub.add_parser("compare", help="pairwise population differences"))

    p = sub.add_parser("figure1", help="write the three figure datasets")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("scan", help="positivity scan over R")
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    p.add_argument("--R-min", dest="R_min", type=float, default=0.1)
    p.add_argument("--R-max", dest="R_max", type=float, default=20.0)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--tau-max", dest="tau_max", type=float, default=50.0)
    p.add_argument("--N", type=float, default=0.0)
    p.add_argument("--coherence-arg", dest="coherence_arg", default="consistent",
                   choices=[m.value for m in CoherenceArgMode])
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("kernel-check", help="closed-form vs quadrature correlation kernel")
    p.add_argument("--gamma0", type=float, default=1.0, help="coupling rate (gamma0 bar)")
    p.add_argument("--gamma", type=float, default=1.0, help="Lorentzian half-width (lambda bar)")
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _dispatch(args) -> int:
    cmd = args.command
    if cmd in ("evolve", "compare"):
        sc = scenario_from_args(args)
        cfg = sc.to_config()
        fmt_name = args.format or "csv"
        notes = [EXACT_COHERENCE_NOTE] if Method.EXACT.value in sc.methods else []
        if cmd == "evolve":
            text = _table_text(run_evolve(sc), fmt_name, cfg)
        else:
            summary = run_compare(sc)
            if fmt_name == "json":
                text = _dumps(summary)
            else:
                t = EvolutionTable(["a", "b", "max_abs", "l2"], [[p["a"], p["b"], p["max_abs"], p["l2"]]
                                                                 for p in summary["pairs"]])
                text = t.to_csv()
        _emit(text, args.out, _meta(cmd, cfg, notes))
        return EXIT_OK

    if cmd == "figure1":
        os.makedirs(args.out, exist_ok=True)
        for name, (sc, table) in run_figure1().items():
            _emit(table.to_csv(), os.path.join(args.out, name), _meta(cmd, sc.to_config(), [EXACT_COHERENCE_NOTE]))
        return EXIT_OK

    if cmd == "scan":
        table = run_scan(args.method, args.R_min, args.R_max, args.steps, args.tau_max, args.N,
                         args.coherence_arg)
        cfg = {k: getattr(args, k) for k in ("method", "R_min", "R_max", "steps", "tau_max", "N",
                                             "coherence_arg")}
        _emit(_table_text(table, args.format, cfg), args.out, _meta(cmd, cfg, [CP_NOTE]))
        return EXIT_OK

    if cmd == "kernel-check":
        try:
            bath = LorentzianBath(args.omega0, args.gamma0, args.gamma)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if args.points < 2:
            raise ConfigError("--points must be >= 2")
        rep = run_kernel_check(bath, args.points)
        cfg = {"gamma0": args.gamma0, "gamma": args.gamma, "omega0": args.omega0, "points": args.points}
        summary = {"passed": rep["passed"], "max_error": rep["max_error"], "worst_lambda_t": rep["worst_lambda_t"]}
        if args.format == "json":
            text = _dumps({"scenario": cfg, **summary, "rows": rep["table"].records()})
        else:
            text = rep["table"].to_csv()
        _emit(text, args.out, _meta(cmd, cfg) | summary)
        if not rep["passed"]:
            print(f"nmqubit: kernel check failed, max error {rep['max_error']:.3e} "
                  f"at lambda_t={rep['worst_lambda_t']:g}", file=sys.stderr)
            return EXIT_NUMERIC
        return EXIT_OK
    raise AssertionError(cmd)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        code, msg = EXIT_CONFIG, f"invalid configuration: {exc}"
    except UnsupportedCombination as exc:
        code, msg = EXIT_UNSUPPORTED, f"unsupported: {exc}"
    except ArithmeticError as exc:
        code, msg = EXIT_NUMERIC, f"numerical failure: {exc}"
    except OSError as exc:
        code, msg = EXIT_IO, f"I/O error: {exc}"
    print(f"nmqubit: {msg}", file=sys.stderr)
    return code
