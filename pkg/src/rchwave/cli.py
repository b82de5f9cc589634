"""Command-line surface: seeds, traces, analyses, sweeps, evolution runs, plots.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (the
failing wave speed is named in the message).  Output is deterministic:
rerunning a command with the same configuration reproduces the files
byte for byte.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, RCHWaveError
from .reporting import read_csv, svg_line_plot, write_csv
from .waves import get_grid

SWEEP_COLUMNS = [
    "c", "A", "E", "F", "d_c", "dA_dc", "dE_dc", "theta",
    "n_L", "z_L", "n_LPi", "z_LPi", "det_A0", "inner_L_inv_1_1", "decision",
]
TRACE_COLUMNS = ["c", "A", "M", "E", "F", "amplitude", "min_gap", "residual_norm"]
EVOLVE_COLUMNS = ["t", "distance", "M", "E", "F"]


@dataclass
class RunConfig:
    omega: float = 1.0
    c_start: float = 0.0  # 0 means "just above onset"
    c_end: float = 0.0
    c_step: float = 0.05
    n_modes: int = 64
    newton_tol: float = 1e-12
    output_dir: str = "out"
    seed_amplitude: float = 0.05
    perturbation_size: float = 0.0
    T: float = 10.0
    dt: float = 1e-3
    seed_rng: int = -1  # -1: deterministic default perturbation shape

    def validate(self):
        if self.omega == 0.0:
            raise ConfigError(
                "omega = 0 is not supported: the zero-mean family of smooth periodic "
                "waves degenerates there (no continuous curve in c); use omega > 0"
            )
        if self.omega < 0.0:
            raise ConfigError(f"omega must be positive, got {self.omega}")
        for name in ("c_step", "newton_tol", "dt"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n_modes < 8:
            raise ConfigError(f"n_modes must be >= 8, got {self.n_modes}")
        if self.c_start and self.c_start <= self.omega / 2.0:
            raise ConfigError(
                f"c_start={self.c_start} must exceed omega/2 = {self.omega / 2.0}"
            )
        return self

    def resolved_range(self):
        c_start = self.c_start if self.c_start else self.omega / 2.0 + 0.02 * self.omega
        c_end = self.c_end if self.c_end else c_start
        if c_end < c_start:
            raise ConfigError(f"c_end={c_end} below c_start={c_start}")
        return c_start, c_end


def parse_config_file(path) -> dict:
    """Flat key = value lines; # starts a comment."""
    values = {}
    field_types = {f.name: f.type for f in fields(RunConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in field_types:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        caster = field_types[key]
        if isinstance(caster, str):
            caster = {"float": float, "int": int, "str": str}[caster]
        try:
            values[key] = caster(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, value in parse_config_file(args.config).items():
            setattr(cfg, key, value)
    overrides = {
        "omega": "omega",
        "c_start": "c_start",
        "c_end": "c_end",
        "c_step": "c_step",
        "modes": "n_modes",
        "tol": "newton_tol",
        "out": "output_dir",
        "amplitude": "seed_amplitude",
        "perturbation": "perturbation_size",
        "T": "T",
        "dt": "dt",
        "seed_rng": "seed_rng",
    }
    for arg_name, cfg_name in overrides.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            setattr(cfg, cfg_name, value)
    if getattr(args, "c", None) is not None:
        cfg.c_start = args.c
        cfg.c_end = args.c
    return cfg.validate()


def _worker_count() -> int:
    raw = os.environ.get("RCHWAVE_THREADS", "1")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def cmd_seed(cfg: RunConfig) -> int:
    from .waves import stokes_seed

    w = stokes_seed(cfg.seed_amplitude, cfg.omega, get_grid(cfg.n_modes))
    print(f"amplitude = {cfg.seed_amplitude:.17g}")
    print(f"omega = {cfg.omega:.17g}")
    print(f"c = {w.c:.17g}")
    print(f"A = {w.A:.17g}")
    print(f"residual_norm = {w.residual_norm:.17g}")
    print(f"min_gap = {w.min_gap:.17g}")
    return 0


def cmd_trace(cfg: RunConfig) -> int:
    import numpy as np

    from .waves import conserved, continue_family

    c_start, c_end = cfg.resolved_range()
    curve = continue_family(
        cfg.omega, c_start, c_end, cfg.c_step, get_grid(cfg.n_modes), cfg.newton_tol
    )
    rows = []
    for p in curve.points:
        cons = conserved(p.profile, p.omega)
        rows.append(
            [p.c, p.A, cons.M, cons.E, cons.F, float(np.max(p.values())), p.min_gap, p.residual_norm]
        )
    out = Path(cfg.output_dir) / f"family_omega{cfg.omega:g}.csv"
    write_csv(out, TRACE_COLUMNS, rows)
    print(f"wrote {out} ({len(rows)} points)")
    return 0


def cmd_analyze(cfg: RunConfig) -> int:
    from .stability import analyze_point
    from .waves import solve_at

    c_start, _ = cfg.resolved_range()
    w = solve_at(c_start, cfg.omega, get_grid(cfg.n_modes), cfg.newton_tol)
    pa = analyze_point(w)
    v = pa.verdict
    print(f"c = {v.c:.17g}")
    print(f"omega = {v.omega:.17g}")
    print(f"A = {w.A:.17g}")
    print(f"E = {pa.cons.E:.17g}")
    print(f"F = {pa.cons.F:.17g}")
    print(f"n_L = {v.n_L}")
    print(f"z_L = {v.z_L}")
    print(f"n_LPi = {v.n_LPi}")
    print(f"z_LPi = {v.z_LPi}")
    print(f"theta = {v.theta:.17g}")
    print(f"d_c = {v.d_c:.17g}")
    print(f"dA_dc = {v.dA_dc:.17g}")
    print(f"dE_dc = {v.dE_dc:.17g}")
    print(f"det_A0 = {v.det_A0:.17g}")
    print(f"inner_L_inv_1_1 = {v.inner_L_inv_1_1:.17g}")
    print(f"constrained_neg = {v.constrained_neg}")
    print(f"vk_value = {pa.vk_value:.17g}")
    print(f"fold_flag = {v.fold_flag}")
    print(f"decision = {v.decision}")
    print(f"criterion = {v.criterion}")
    return 0


def _sweep_rows(curve):
    from .stability import analyze_point

    points = list(curve.points)
    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            analyses = list(pool.map(analyze_point, points))
    else:
        analyses = [analyze_point(p) for p in points]
    rows = []
    for pa in analyses:
        v = pa.verdict
        rows.append(
            [
                v.c, pa.point.A, pa.cons.E, pa.cons.F, v.d_c, v.dA_dc, v.dE_dc, v.theta,
                v.n_L, v.z_L, v.n_LPi, v.z_LPi, v.det_A0, v.inner_L_inv_1_1, v.decision,
            ]
        )
    return rows


def cmd_sweep(cfg: RunConfig) -> int:
    from .waves import continue_family

    c_start, c_end = cfg.resolved_range()
    curve = continue_family(
        cfg.omega, c_start, c_end, cfg.c_step, get_grid(cfg.n_modes), cfg.newton_tol
    )
    rows = _sweep_rows(curve)
    out_csv = Path(cfg.output_dir) / f"sweep_omega{cfg.omega:g}.csv"
    write_csv(out_csv, SWEEP_COLUMNS, rows)
    out_svg = Path(cfg.output_dir) / f"energy_omega{cfg.omega:g}.svg"
    svg_line_plot(
        out_svg,
        [r[0] for r in rows],
        [r[2] for r in rows],
        title=f"E(phi) vs c (omega = {cfg.omega:g})",
        xlabel="c",
        ylabel="E",
    )
    print(f"wrote {out_csv} ({len(rows)} rows) and {out_svg}")
    return 0


def cmd_evolve(cfg: RunConfig) -> int:
    from .evolution import random_perturbation, run_orbital_experiment
    from .waves import solve_at

    c_start, _ = cfg.resolved_range()
    grid = get_grid(cfg.n_modes)
    w = solve_at(c_start, cfg.omega, grid, cfg.newton_tol)
    shape = None
    if cfg.seed_rng >= 0:
        shape = random_perturbation(grid, cfg.seed_rng)
        print(f"perturbation rng seed = {cfg.seed_rng}")
    samples = run_orbital_experiment(
        w, cfg.perturbation_size, cfg.T, dt=cfg.dt, perturbation=shape
    )
    rows = [[s.t, s.distance, s.M, s.E, s.F] for s in samples]
    out = Path(cfg.output_dir) / f"evolution_omega{cfg.omega:g}_c{w.c:g}.csv"
    write_csv(out, EVOLVE_COLUMNS, rows)
    print(f"wrote {out} ({len(rows)} samples, max distance {max(s.distance for s in samples):.9e})")
    return 0


def cmd_plot(args) -> int:
    header, rows = read_csv(args.csv)
    if not header or not rows:
        raise ConfigError(f"{args.csv}: empty table, nothing to plot")
    for col in (args.x_col, args.y_col):
        if col not in header:
            raise ConfigError(f"{args.csv}: no column {col!r} (have {header})")
    xi, yi = header.index(args.x_col), header.index(args.y_col)
    xs, ys = [], []
    for row in rows:
        if isinstance(row[xi], float) and isinstance(row[yi], float):
            xs.append(row[xi])
            ys.append(row[yi])
    if not xs:
        raise ConfigError(f"{args.csv}: columns {args.x_col}/{args.y_col} hold no numeric data")
    out = args.out or (Path(args.csv).with_suffix("") .name + f"_{args.y_col}_vs_{args.x_col}.svg")
    svg_line_plot(out, xs, ys, title=f"{args.y_col} vs {args.x_col}", xlabel=args.x_col, ylabel=args.y_col)
    print(f"wrote {out}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rchwave",
        description="Periodic traveling waves: continuation, spectra, stability, evolution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, speed_range=False, single_c=False):
        p.add_argument("--omega", type=float, help="drift parameter (> 0)")
        p.add_argument("--modes", type=int, help="number of Fourier modes (default 64)")
        p.add_argument("--tol", type=float, help="Newton tolerance (default 1e-12)")
        p.add_argument("--out", type=str, help="output directory")
        p.add_argument("--config", type=str, help="key = value configuration file")
        if speed_range:
            p.add_argument("--c-start", dest="c_start", type=float)
            p.add_argument("--c-end", dest="c_end", type=float)
            p.add_argument("--c-step", dest="c_step", type=float)
        if single_c:
            p.add_argument("--c", type=float, help="wave speed (> omega/2)")

    p = sub.add_parser("seed", help="print the small-amplitude seed at a given amplitude")
    common(p)
    p.add_argument("--amplitude", type=float, help="seed amplitude a")

    p = sub.add_parser("trace", help="continue the family and write its scalar table")
    common(p, speed_range=True)

    p = sub.add_parser("analyze", help="full stability verdict at one speed")
    common(p, single_c=True)

    p = sub.add_parser("sweep", help="continuation plus per-point analysis; CSV and SVG")
    common(p, speed_range=True)

    p = sub.add_parser("evolve", help="time-evolve a perturbed wave; CSV time series")
    common(p, single_c=True)
    p.add_argument("--perturbation", type=float, help="relative H1 perturbation size")
    p.add_argument("--T", type=float, help="final time")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--seed-rng", dest="seed_rng", type=int, help="random perturbation seed")

    p = sub.add_parser("plot", help="render y vs x from a CSV table to SVG")
    p.add_argument("csv")
    p.add_argument("x_col")
    p.add_argument("y_col")
    p.add_argument("--out", type=str)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "plot":
            return cmd_plot(args)
        cfg = build_config(args)
        handler = {
            "seed": cmd_seed,
            "trace": cmd_trace,
            "analyze": cmd_analyze,
            "sweep": cmd_sweep,
            "evolve": cmd_evolve,
        }[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except RCHWaveError as exc:
        c = getattr(exc, "c", None)
        where = f" at c={c:.12g}" if c is not None else ""
        print(f"numerical failure{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
