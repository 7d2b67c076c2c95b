"""Command-line interface: solvers, simulators, and spectral experiments.

Every command writes machine-readable CSV or JSON; identical configurations
and seeds produce byte-identical output (pass --no-timestamp to drop the
wall-clock fields that would otherwise differ between runs).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import List, Optional, Sequence, Tuple

from . import __version__
from . import laws, limits, simulate, spectral
from .rng import PURPOSE_SAMPLE, child_seed

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

__all__ = ["UsageError", "RunConfig", "parse_config", "run", "main"]

LN2 = math.log(2.0)


class UsageError(ValueError):
    """Bad command line or config file; maps to exit code 1."""


@dataclass
class RunConfig:
    """Fully resolved invocation: one command plus validated parameters."""

    command: str
    law: str = "bernoulli"
    variance: float = 1.0
    value: float = 1.0
    tabulated_csv: Optional[str] = None
    window: str = "poisson"
    support: Tuple[float, float] = (0.5, 2.0)
    C: Optional[float] = None  # nats
    c_grid: List[float] = field(default_factory=list)
    n: int = 1000
    N: int = 500
    p: Optional[float] = None
    k: Optional[int] = None
    n_grid: List[int] = field(default_factory=list)
    weights: str = "bernoulli"
    v: float = 1.0
    gamma: Optional[float] = None
    seed: int = 1
    trials: int = 16
    tol: float = 1e-8
    convention: str = "k_terms"
    fmt: str = "csv"
    output: Optional[str] = None
    no_timestamp: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would sys.exit(2)
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="windowmax", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def common(p: _Parser) -> None:
        p.add_argument("--config", help="TOML file with defaults; flags override it")
        p.add_argument("--seed", type=int, default=None, help="base seed (default 1)")
        p.add_argument("--trials", type=int, default=None, help="trial count (default 16)")
        p.add_argument("--tol", type=float, default=None, help="solver tolerance (default 1e-8)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--no-timestamp", action="store_true", default=None,
                       help="omit timestamps and wall-clock fields for reproducible bytes")

    def law_opts(p: _Parser) -> None:
        p.add_argument("--law", choices=("bernoulli", "gaussian", "constant",
                                         "squared-gaussian", "tabulated"), default=None)
        p.add_argument("--variance", type=float, default=None,
                       help="variance for gaussian / weight variance for squared-gaussian")
        p.add_argument("--value", type=float, default=None, help="value for the constant law")
        p.add_argument("--tabulated-csv", default=None,
                       help="two-column CSV 'tau,logphi' for the tabulated law")

    def c_opts(p: _Parser) -> None:
        p.add_argument("--c", type=float, default=None, help="limit parameter in bits")
        p.add_argument("--C", dest="C_nats", type=float, default=None,
                       help="limit parameter in nats (mutually exclusive with --c)")

    def window_opts(p: _Parser) -> None:
        p.add_argument("--window", choices=("poisson", "deterministic", "bounded", "fixed"),
                       default=None)
        p.add_argument("--support", default=None, help="bounded-support interval LO,HI")

    sp = sub.add_parser("solve-classical", help="fixed-window limit constant")
    law_opts(sp); c_opts(sp); common(sp)

    sp = sub.add_parser("solve-stochastic", help="random-window limit constant")
    law_opts(sp); c_opts(sp); window_opts(sp); common(sp)

    sp = sub.add_parser("compare", help="classical vs stochastic constants on a c grid")
    law_opts(sp); window_opts(sp); common(sp)
    sp.add_argument("--c-grid", default="1,2,4,8", help="comma-separated c values")

    sp = sub.add_parser("simulate", help="Monte Carlo trials of the window maximum")
    law_opts(sp); c_opts(sp); window_opts(sp); common(sp)
    sp.add_argument("--n", type=int, default=None, help="sequence length")
    sp.add_argument("--k", type=int, default=None, help="fixed window length")
    sp.add_argument("--p", type=float, default=None, help="mean window length")
    sp.add_argument("--convention", choices=("k_terms", "k_plus_1_terms"), default=None)

    sp = sub.add_parser("sweep", help="convergence sweep over sequence lengths")
    law_opts(sp); c_opts(sp); window_opts(sp); common(sp)
    sp.add_argument("--n-grid", default="1000,10000,100000,1000000",
                    help="comma-separated increasing n values")
    sp.add_argument("--convention", choices=("k_terms", "k_plus_1_terms"), default=None)

    sp = sub.add_parser("spectral", help="sparse random matrix norms and row statistics")
    common(sp); c_opts(sp)
    sp.add_argument("--N", type=int, default=None, help="matrix dimension")
    sp.add_argument("--p", type=float, default=None,
                    help="expected row density (default log N, or C log N with --c/--C)")
    sp.add_argument("--weights", choices=("bernoulli", "gaussian"), default=None)
    sp.add_argument("--v", type=float, default=None, help="weight standard deviation")
    sp.add_argument("--gamma", type=float, default=None,
                    help="run the density regime sweep at this gamma instead")
    return parser


def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad TOML in {path}: {exc}")


def _floats(text: str, flag: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}")


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Total parse of argv (plus optional TOML file) into a RunConfig."""
    ns = _build_parser().parse_args(list(argv))
    if ns.command is None:
        raise UsageError("a command is required; see --help")
    file_cfg = _load_config_file(getattr(ns, "config", None))

    def pick(flag_name: str, file_key: str, default):
        v = getattr(ns, flag_name, None)
        if v is not None:
            return v
        if file_key in file_cfg:
            return file_cfg[file_key]
        return default

    cfg = RunConfig(command=ns.command)
    cfg.seed = int(pick("seed", "seed", 1))
    cfg.trials = int(pick("trials", "trials", 16))
    cfg.tol = float(pick("tol", "tol", 1e-8))
    cfg.fmt = pick("fmt", "format", "csv")
    cfg.output = pick("output", "output", None)
    cfg.no_timestamp = bool(pick("no_timestamp", "no_timestamp", False))

    if hasattr(ns, "law"):
        cfg.law = pick("law", "law", "bernoulli")
        cfg.variance = float(pick("variance", "variance", 1.0))
        cfg.value = float(pick("value", "value", 1.0))
        cfg.tabulated_csv = pick("tabulated_csv", "tabulated_csv", None)
        if cfg.law == "tabulated" and cfg.tabulated_csv is None:
            raise UsageError("--law tabulated requires --tabulated-csv")
    if hasattr(ns, "window"):
        cfg.window = pick("window", "window", "poisson")
        support = pick("support", "support", "0.5,2")
        if isinstance(support, str):
            vals = _floats(support, "--support")
            if len(vals) != 2:
                raise UsageError(f"--support expects LO,HI, got {support!r}")
            cfg.support = (vals[0], vals[1])
        else:
            cfg.support = (float(support[0]), float(support[1]))
    if hasattr(ns, "c"):
        c = pick("c", "c", None)
        C = pick("C_nats", "C", None)
        if c is not None and C is not None:
            raise UsageError("--c and --C are mutually exclusive")
        if c is not None:
            if c <= 0:
                raise UsageError(f"--c must be positive, got {c}")
            cfg.C = float(c) / LN2  # canonical unit is nats
        elif C is not None:
            if C <= 0:
                raise UsageError(f"--C must be positive, got {C}")
            cfg.C = float(C)
    if hasattr(ns, "c_grid"):
        grid = pick("c_grid", "c_grid", "1,2,4,8")
        cfg.c_grid = _floats(grid, "--c-grid") if isinstance(grid, str) else [float(v) for v in grid]
        if any(v <= 0 for v in cfg.c_grid):
            raise UsageError("--c-grid values must be positive")
    if hasattr(ns, "n"):
        cfg.n = int(pick("n", "n", 1000))
        cfg.k = pick("k", "k", None)
        cfg.p = pick("p", "p", None)
        cfg.convention = pick("convention", "convention", "k_terms")
    if hasattr(ns, "n_grid"):
        grid = pick("n_grid", "n_grid", "1000,10000,100000,1000000")
        vals = _floats(grid, "--n-grid") if isinstance(grid, str) else list(grid)
        cfg.n_grid = [int(v) for v in vals]
        cfg.convention = pick("convention", "convention", "k_terms")
    if ns.command == "spectral":
        cfg.N = int(pick("N", "N", 500))
        cfg.p = pick("p", "p", None)
        cfg.weights = pick("weights", "weights", "bernoulli")
        cfg.v = float(pick("v", "v", 1.0))
        cfg.gamma = pick("gamma", "gamma", None)
    return cfg


def _increment_law(cfg: RunConfig) -> laws.IncrementLaw:
    if cfg.law == "bernoulli":
        return laws.bernoulli_pm1()
    if cfg.law == "gaussian":
        return laws.gaussian(cfg.variance)
    if cfg.law == "constant":
        return laws.constant(cfg.value)
    if cfg.law == "squared-gaussian":
        return laws.squared_gaussian_weight(cfg.variance)
    if cfg.law == "tabulated":
        return laws.tabulated_from_csv(cfg.tabulated_csv)
    raise UsageError(f"unknown law {cfg.law!r}")


def _window_law(cfg: RunConfig, p: float) -> laws.WindowLaw:
    if cfg.window == "poisson":
        return laws.poisson_window(p)
    if cfg.window in ("deterministic", "fixed"):
        return laws.deterministic_window(p)
    if cfg.window == "bounded":
        return laws.bounded_support_window(p, cfg.support)
    raise UsageError(f"unknown window {cfg.window!r}")


def _meta(cfg: RunConfig) -> dict:
    meta = {
        "tool": "windowmax",
        "version": __version__,
        "config": {k: v for k, v in dataclasses.asdict(cfg).items() if v is not None},
    }
    if not cfg.no_timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


def _emit(cfg: RunConfig, header: str, csv_rows: List[str], dict_rows: List[dict]) -> None:
    if cfg.fmt == "json":
        text = json.dumps({"meta": _meta(cfg), "rows": dict_rows}, indent=2) + "\n"
    else:
        text = header + "\n" + "".join(r + "\n" for r in csv_rows)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require_C(cfg: RunConfig) -> float:
    if cfg.C is None:
        raise UsageError(f"{cfg.command} requires --c or --C")
    return cfg.C


def _solve_rows(cfg: RunConfig, results: List[Tuple[float, limits.SolveResult]]):
    header = "c,C,alpha,residual,inner_minimizer,iterations,saturated"
    csv_rows, dict_rows = [], []
    for C, res in results:
        c = C * LN2
        ym = "" if res.inner_minimizer is None else repr(res.inner_minimizer)
        sat = "true" if res.saturated else "false"
        csv_rows.append(
            f"{c!r},{C!r},{res.alpha!r},{res.residual!r},{ym},{res.iterations},{sat}"
        )
        dict_rows.append(
            {
                "c": c,
                "C": C,
                "alpha": res.alpha,
                "residual": res.residual,
                "inner_minimizer": res.inner_minimizer,
                "iterations": res.iterations,
                "saturated": res.saturated,
            }
        )
    return header, csv_rows, dict_rows


def run(cfg: RunConfig) -> int:
    """Dispatch one parsed command; returns the process exit code."""
    if cfg.command == "solve-classical":
        C = _require_C(cfg)
        res = limits.classical_alpha(_increment_law(cfg), C, cfg.tol)
        _emit(cfg, *_solve_rows(cfg, [(C, res)]))
        return 0

    if cfg.command == "solve-stochastic":
        C = _require_C(cfg)
        wlaw = _window_law(cfg, p=1.0)
        res = limits.stochastic_alpha(_increment_law(cfg), wlaw, C, cfg.tol)
        _emit(cfg, *_solve_rows(cfg, [(C, res)]))
        if math.isinf(res.alpha):
            print(f"windowmax: {res.diagnostic}", file=sys.stderr)
            return 2
        return 0

    if cfg.command == "compare":
        law = _increment_law(cfg)
        wlaw = _window_law(cfg, p=1.0)
        header = "c,C,alpha_classical,alpha_stochastic"
        csv_rows, dict_rows = [], []
        for c in cfg.c_grid:
            C = c / LN2
            a = limits.classical_alpha(law, C, cfg.tol).alpha
            at = limits.stochastic_alpha(law, wlaw, C, cfg.tol).alpha
            csv_rows.append(f"{c!r},{C!r},{a!r},{at!r}")
            dict_rows.append({"c": c, "C": C, "alpha_classical": a, "alpha_stochastic": at})
        _emit(cfg, header, csv_rows, dict_rows)
        return 0

    if cfg.command in ("simulate", "sweep"):
        law = _increment_law(cfg)
        conv = simulate.WindowCountConvention(cfg.convention)
        classical = cfg.window == "fixed" or (cfg.window == "deterministic" and cfg.p is None)
        n0 = cfg.n if cfg.command == "simulate" else cfg.n_grid[0]
        if classical:
            if cfg.k is not None:
                k = int(cfg.k)
            elif cfg.C is not None:
                k = int(math.floor(cfg.C * math.log(n0)))
            else:
                raise UsageError("fixed-window simulation needs --k or --c/--C")
            window: object = k
        else:
            if cfg.p is not None:
                p = float(cfg.p)
            elif cfg.C is not None:
                p = cfg.C * math.log(n0)
            else:
                raise UsageError("random-window simulation needs --p or --c/--C")
            window = _window_law(cfg, p)
        try:
            base = simulate.SimConfig(
                n=n0, law=law, window=window, seed=cfg.seed, trials=cfg.trials,
                convention=conv, growth_C=cfg.C,
            )
            if cfg.command == "simulate":
                records = simulate.run_trials(base)
                if cfg.no_timestamp:
                    records = [dataclasses.replace(r, wall_ms=0.0) for r in records]
                _emit(
                    cfg,
                    simulate.TRIAL_CSV_HEADER,
                    [simulate.trial_csv_row(r) for r in records],
                    [dataclasses.asdict(r) for r in records],
                )
            else:
                rows = simulate.convergence_sweep(base, cfg.n_grid)
                _emit(
                    cfg,
                    simulate.SWEEP_CSV_HEADER,
                    [simulate.sweep_csv_row(r) for r in rows],
                    [dataclasses.asdict(r) for r in rows],
                )
        except simulate.ConfigError as exc:
            raise UsageError(str(exc))
        except simulate.WindowCapExceeded as exc:
            print(f"windowmax: {exc}", file=sys.stderr)
            return 2
        return 0

    if cfg.command == "spectral":
        wl = spectral.WeightLaw(spectral.WeightKind(cfg.weights), cfg.v)
        if cfg.gamma is not None:
            rows = spectral.regime_sweep(
                cfg.N, [float(cfg.gamma)], wl, trials=cfg.trials, seed=cfg.seed
            )
            _emit(
                cfg,
                spectral.REGIME_CSV_HEADER,
                [spectral.regime_csv_row(r) for r in rows],
                [dataclasses.asdict(r) for r in rows],
            )
            return 0
        if cfg.p is not None:
            p = float(cfg.p)
        elif cfg.C is not None:
            p = cfg.C * math.log(cfg.N)
        else:
            p = math.log(cfg.N)
        reports = []
        for t in range(cfg.trials):
            s = spectral.sample_weighted_adjacency(
                cfg.N, p, wl, seed=child_seed(cfg.seed, t, PURPOSE_SAMPLE)
            )
            reports.append(spectral.spectral_report(s))
        _emit(
            cfg,
            spectral.SPECTRAL_CSV_HEADER,
            [spectral.spectral_csv_row(r) for r in reports],
            [dataclasses.asdict(r) for r in reports],
        )
        if any(not r.converged for r in reports):
            print("windowmax: power iteration hit its iteration cap", file=sys.stderr)
            return 2
        return 0

    raise UsageError(f"unknown command {cfg.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"windowmax: {exc}", file=sys.stderr)
        return 1
    except (laws.DomainError, limits.InvalidC, ValueError) as exc:
        print(f"windowmax: {exc}", file=sys.stderr)
        return 1
    except (limits.CapReached, limits.InfeasibleError) as exc:
        print(f"windowmax: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
