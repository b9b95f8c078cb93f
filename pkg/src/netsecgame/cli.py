"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 no feasible monitor / infeasible game.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .game import (
    InfeasibleGameError,
    PayoffFormatError,
    build_payoff_matrix,
    read_payoff_csv,
    solve_zero_sum,
    verify_saddle,
    write_equilibrium_json,
    write_payoff_csv,
)
from .graph import (
    GraphError,
    algebraic_monitor_set,
    distance,
    feasible_monitor_set,
    load_graph,
)
from .lti import VertexRole, build_scenario, check_no_closed_positive_real_zeros, invariant_zeros
from .oog import output_to_output_gain
from .sim import (
    AttackSignal,
    UnstableStepError,
    default_horizon,
    energy_ratio_sweep,
    loglog_slope,
    simulate,
    stealthiness,
    sweep_to_csv,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3

log = logging.getLogger("netsecgame")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    graph: Path | None = None
    target: int | None = None
    attack: int | None = None
    monitor: int | None = None
    delta: float = 1.0
    freq: float | None = None
    freq_min: float | None = None
    freq_max: float | None = None
    freq_steps: int = 20
    amplitude: float = 1.0
    horizon: float | None = None
    dt: float | None = None
    out_dir: Path | None = None
    matrix_in: Path | None = None
    trace: bool = False

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> RunConfig:
        fields = {k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__}
        cfg = cls(**fields)
        cfg.validate()
        return cfg

    def validate(self):
        if not self.delta > 0:
            raise ConfigError(f"--delta must be positive, got {self.delta}")
        for name in ("graph", "matrix_in"):
            p = getattr(self, name)
            if p is not None:
                p = Path(p).resolve()
                if not p.is_file():
                    raise ConfigError(f"--{name.replace('_', '-')}: no such file {p}")
                setattr(self, name, p)
        if self.out_dir is not None:
            self.out_dir = Path(self.out_dir).resolve()
        needs = {
            "analyze": ("graph", "target"),
            "oog": ("graph", "target", "attack", "monitor"),
            "simulate": ("graph", "target", "attack", "monitor"),
            "sweep": ("graph", "target", "attack", "monitor"),
            "nash": ("matrix_in",),
        }.get(self.command, ())
        if self.command == "game" and self.matrix_in is None:
            needs = ("graph", "target")
        for name in needs:
            if getattr(self, name) is None:
                raise ConfigError(f"{self.command}: --{name.replace('_', '-')} is required")
        for name in ("horizon", "dt"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigError(f"--{name} must be positive, got {v}")
        if self.command == "sweep":
            if self.freq_min is None or self.freq_max is None:
                raise ConfigError("sweep: --freq-min and --freq-max are required")
            if not (self.freq_min > 0 and self.freq_max >= self.freq_min):
                raise ConfigError(
                    "sweep frequencies must satisfy 0 < --freq-min <= --freq-max "
                    "(f = 0 is handled analytically, not by simulation)"
                )
            if self.freq_steps < 1:
                raise ConfigError("--freq-steps must be at least 1")
        if self.command == "simulate":
            if self.freq is None:
                raise ConfigError("simulate: --freq is required")
            if not self.freq > 0:
                raise ConfigError("simulate: --freq must be positive (f = 0 is rejected)")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=_json_default))


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(f"not serialisable: {type(x).__name__}")


def _json_num(x: float):
    return "inf" if math.isinf(x) else x


def _complex_list(zs):
    return [[z.real, z.imag] for z in zs]


def _out_dir(cfg: RunConfig) -> Path:
    d = cfg.out_dir or Path.cwd()
    d.mkdir(parents=True, exist_ok=True)
    return d


# -- commands ------------------------------------------------------------------
def cmd_analyze(cfg: RunConfig) -> int:
    g = load_graph(cfg.graph)
    tau = cfg.target
    g._check(tau)
    feasible = feasible_monitor_set(g, tau)
    report = {
        "target": tau,
        "n_vertices": g.n_vertices,
        "feasible": feasible,
        "algebraic_condition": algebraic_monitor_set(g, tau),
        "pairs": [],
        "channels": [],
    }
    for a in g.vertices:
        if a == tau:
            continue
        for m in g.vertices:
            if m == tau:
                continue
            sc = build_scenario(g, tau, a, m)
            report["pairs"].append({
                "a": a, "m": m, "r_target": sc.r_target, "r_monitor": sc.r_monitor,
                "distance_target": distance(g, a, tau), "distance_monitor": distance(g, a, m),
                "bounded": sc.r_monitor <= sc.r_target,
            })
    for a in g.vertices:
        if a == tau:
            continue
        for u in g.vertices:
            sc = build_scenario(g, tau, a, u, allow_monitor_at_target=True)
            zs = invariant_zeros(sc, "monitor")
            report["channels"].append({
                "out": u, "in": a, "relative_degree": zs.infinite_zero_degree,
                "finite_zeros": _complex_list(zs.finite_zeros),
                "no_closed_positive_real_zero": check_no_closed_positive_real_zeros(zs),
            })
    report["all_channels_free_of_closed_positive_real_zeros"] = all(
        c["no_closed_positive_real_zero"] for c in report["channels"]
    )
    if cfg.out_dir is not None:
        (_out_dir(cfg) / "analysis.json").write_text(json.dumps(report, indent=2) + "\n")
    _emit(report)
    if not feasible:
        print(f"no feasible monitor for target {tau}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_oog(cfg: RunConfig) -> int:
    g = load_graph(cfg.graph)
    sc = build_scenario(g, cfg.target, cfg.attack, cfg.monitor)
    res = output_to_output_gain(sc, cfg.delta)
    rec = res.to_record(cfg.attack, cfg.monitor)
    rec.update(target=cfg.target, delta=cfg.delta, r_target=sc.r_target, r_monitor=sc.r_monitor)
    _emit(rec)
    return EXIT_OK


def cmd_game(cfg: RunConfig) -> int:
    if cfg.matrix_in is not None:
        matrix = read_payoff_csv(cfg.matrix_in)
    else:
        g = load_graph(cfg.graph)
        # solve what the CSV holds so a --matrix-in re-run reproduces it
        matrix = build_payoff_matrix(g, cfg.target, cfg.delta).rounded()
        out = _out_dir(cfg)
        write_payoff_csv(matrix, out / "payoff.csv")
    try:
        eq = solve_zero_sum(matrix)
    except InfeasibleGameError as exc:
        print(f"infeasible game: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = eq.to_dict(matrix)
    report["saddle_verified"] = verify_saddle(matrix, eq)
    if cfg.out_dir is not None or cfg.matrix_in is None:
        write_equilibrium_json(eq, _out_dir(cfg) / "equilibrium.json", matrix)
    _emit(report)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    g = load_graph(cfg.graph)
    roles = VertexRole(cfg.target, cfg.attack, cfg.monitor)
    roles.validate(g)
    sig = AttackSignal.sine(cfg.freq, cfg.amplitude)
    T = cfg.horizon or default_horizon(g, cfg.freq)
    tr = simulate(g, roles, sig, T, cfg.dt, store_states=cfg.trace)
    et, em = tr.energies()
    report = {
        "target": cfg.target, "attack": cfg.attack, "monitor": cfg.monitor,
        "freq_hz": cfg.freq, "amplitude": cfg.amplitude, "horizon": tr.horizon, "dt": tr.dt,
        "energy_target": et, "energy_monitor": em,
        "ratio": _json_num(et / em) if em > 0 else None,
        "delta": cfg.delta, "stealthy": stealthiness(tr, cfg.delta),
    }
    if cfg.trace:
        path = _out_dir(cfg) / "trace.csv"
        tr.to_csv(path)
        report["trace"] = str(path)
    _emit(report)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    g = load_graph(cfg.graph)
    roles = VertexRole(cfg.target, cfg.attack, cfg.monitor)
    roles.validate(g)
    freqs = np.geomspace(cfg.freq_min, cfg.freq_max, cfg.freq_steps)
    pts = energy_ratio_sweep(g, roles, freqs, cfg.horizon, cfg.dt)
    path = _out_dir(cfg) / "sweep.csv"
    sweep_to_csv(pts, path)
    top = [p for p in pts if p.f_hz >= cfg.freq_max / 10]
    report = {
        "target": cfg.target, "attack": cfg.attack, "monitor": cfg.monitor,
        "sweep": str(path),
        "points": [{"f_hz": p.f_hz, "ratio": p.ratio} for p in pts],
        "top_decade_slope": loglog_slope(top) if len(top) >= 2 else None,
    }
    _emit(report)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "oog": cmd_oog,
    "game": cmd_game,
    "nash": cmd_game,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netsecgame", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, pair=False):
        sp.add_argument("--graph", type=Path, help="graph JSON file")
        sp.add_argument("--target", type=int)
        if pair:
            sp.add_argument("--attack", type=int)
            sp.add_argument("--monitor", type=int)
        sp.add_argument("--delta", type=float, default=1.0, help="alarm threshold")
        sp.add_argument("--out-dir", type=Path)

    common(sub.add_parser("analyze", help="feasible monitors, relative degrees, zeros"))
    common(sub.add_parser("oog", help="gain of one attack/monitor pair"), pair=True)
    for name, text in (("game", "payoff matrix and equilibrium"), ("nash", "solve a payoff CSV")):
        sp = sub.add_parser(name, help=text)
        common(sp)
        sp.add_argument("--matrix-in", type=Path, help="payoff CSV to solve instead of computing one")
    for name in ("simulate", "sweep"):
        sp = sub.add_parser(name, help="time-domain " + ("run" if name == "simulate" else "frequency sweep"))
        common(sp, pair=True)
        sp.add_argument("--horizon", type=float)
        sp.add_argument("--dt", type=float)
        if name == "simulate":
            sp.add_argument("--freq", type=float, help="sine frequency in Hz")
            sp.add_argument("--amplitude", type=float, default=1.0)
            sp.add_argument("--trace", action="store_true", help="write trace.csv")
        else:
            sp.add_argument("--freq-min", type=float)
            sp.add_argument("--freq-max", type=float)
            sp.add_argument("--freq-steps", type=int, default=20)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, GraphError, PayoffFormatError, UnstableStepError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
