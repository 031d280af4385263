"""Batch front end: ``redfield-pairs <mode> --config <path> [--out <path>] [--seed <n>]``.

Configs are INI files with flat ``key = value`` sections.  Output is CSV with
a ``#`` preamble echoing the resolved parameters; numbers are written with 15
significant digits so two runs of the same config are byte-identical.
"""
from __future__ import annotations

import argparse
import configparser
import io
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .algebra import BlochVector, bloch_compose, bloch_decompose, min_eigenvalue
from .diagnostics import (
    POSITIVITY_TOL,
    admissible_scan,
    choi_min_eigenvalue,
    lambda_closed_form,
    lambda_curvature_at_zero,
    lambda_curvature_fd,
    lambda_from_state,
    min_werner_lambda,
    theta_threshold,
    werner_threshold,
)
from .generators import (
    DELTA_VARIANTS,
    GeneratorParams,
    PhysicalParams,
    apply_L,
    markov_params,
    redfield_coefficients,
)
from .propagation import (
    bloch_map_matrix,
    make_singlet,
    make_theta,
    make_werner,
    product_map,
    propagate_numeric,
)

MODES = (
    "single-trace",
    "pair-lambda",
    "theta-scan",
    "werner-scan",
    "choi",
    "admissible",
    "validate-mc",
    "redfield-coeffs",
)

# section -> key -> converter
_SCHEMA = {
    "run": {"mode": str, "seed": int, "output": str},
    "generator": {"alpha": float, "beta": float, "omega": float, "gamma": float, "delta": float},
    "physical": {"g2": float, "mu": float, "omega0": float, "f2": float, "nu": float, "delta_variant": str},
    "grid": {
        "t_max": float,
        "n_points": int,
        "dt": float,
        "theta_min": float,
        "theta_max": float,
        "theta_step": float,
        "p_min": float,
        "p_max": float,
        "p_step": float,
        "fd_step": float,
    },
    "state": {"kind": str, "theta": float, "p": float, "bloch": str, "bloch1": str, "bloch2": str},
    "mc": {"n_traj": int, "n_out": int, "redfield_reference": "bool"},
}

STATE_KINDS = ("ground", "bloch", "singlet", "theta", "werner", "product")
PHYSICAL_ONLY = ("validate-mc", "redfield-coeffs")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    t_max: float = 10.0
    n_points: int = 201
    dt: float = 1e-3
    theta_min: float = 0.0
    theta_max: float = math.pi / 4
    theta_step: float = 1e-3
    p_min: float = 0.0
    p_max: float = 1.0
    p_step: float = 1e-3
    fd_step: float = 1e-4

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)


@dataclass(frozen=True)
class StateSpec:
    kind: str = "ground"
    theta: float = 0.0
    p: float = 1.0
    bloch: tuple = (0.0, 0.0, 0.5)
    bloch1: tuple = (0.0, 0.0, 0.5)
    bloch2: tuple = (0.0, 0.0, 0.5)


@dataclass(frozen=True)
class MCSpec:
    n_traj: int = 1000
    n_out: int = 21
    redfield_reference: bool = False


@dataclass(frozen=True)
class RunConfig:
    mode: str
    generator: GeneratorParams
    physical: PhysicalParams | None = None
    delta_variant: str = "printed"
    grid: GridSpec = field(default_factory=GridSpec)
    state: StateSpec = field(default_factory=StateSpec)
    mc: MCSpec = field(default_factory=MCSpec)
    seed: int = 0
    output: str | None = None


def _vector(text: str, key: str) -> tuple:
    try:
        v = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"non-numeric value for {key}: {text!r}") from None
    if len(v) != 3:
        raise ConfigError(f"{key} needs three comma-separated components")
    return v


def _convert(section: str, key: str, raw: str):
    kind = _SCHEMA[section][key]
    if kind == "bool":
        low = raw.strip().lower()
        if low in ("1", "yes", "true", "on"):
            return True
        if low in ("0", "no", "false", "off"):
            return False
        raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}")
    try:
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"[{section}] {key}: non-numeric value {raw!r}") from None


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Validate config text.  ``mode`` (from the command line) wins over ``[run] mode``
    but the two must agree when both are given."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    values: dict[str, dict] = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        values[section] = {}
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            values[section][key] = _convert(section, key, raw)

    run = values.get("run", {})
    file_mode = run.get("mode")
    if mode and file_mode and mode != file_mode:
        raise ConfigError(f"mode {mode!r} conflicts with [run] mode = {file_mode!r}")
    mode = mode or file_mode
    if mode is None:
        raise ConfigError("missing required key: mode")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")

    gen = values.get("generator")
    phys = values.get("physical")
    if gen and phys:
        raise ConfigError("conflicting parameter blocks: give either [generator] or [physical]")
    if not gen and not phys:
        raise ConfigError("missing parameter block: need [generator] or [physical]")
    physical = None
    delta_variant = "printed"
    if phys:
        for key in ("g2", "mu"):
            if key not in phys:
                raise ConfigError(f"missing required key [physical] {key}")
        delta_variant = phys.pop("delta_variant", "printed")
        if delta_variant not in DELTA_VARIANTS:
            raise ConfigError(f"delta_variant must be one of {DELTA_VARIANTS}")
        try:
            physical = PhysicalParams(**phys)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        generator = markov_params(physical, delta_variant)
    else:
        if mode in PHYSICAL_ONLY:
            raise ConfigError(f"mode {mode!r} needs a [physical] block")
        for key in ("alpha", "beta", "omega"):
            if key not in gen:
                raise ConfigError(f"missing required key [generator] {key}")
        try:
            generator = GeneratorParams(**gen)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    grid_vals = values.get("grid", {})
    grid = GridSpec(**grid_vals)
    if grid.t_max <= 0 or grid.n_points < 2:
        raise ConfigError("grid must have t_max > 0 and n_points >= 2")
    if grid.dt <= 0 or grid.theta_step <= 0 or grid.p_step <= 0 or grid.fd_step <= 0:
        raise ConfigError("grid steps must be positive")
    if grid.theta_max < grid.theta_min or grid.p_max < grid.p_min:
        raise ConfigError("empty scan range")

    st = dict(values.get("state", {}))
    for key in ("bloch", "bloch1", "bloch2"):
        if key in st:
            st[key] = _vector(st[key], key)
    state = StateSpec(**st)
    if state.kind not in STATE_KINDS:
        raise ConfigError(f"state kind must be one of {STATE_KINDS}")

    mc = MCSpec(**values.get("mc", {}))
    if mc.n_traj < 1 or mc.n_out < 2:
        raise ConfigError("need n_traj >= 1 and n_out >= 2")

    return RunConfig(
        mode=mode,
        generator=generator,
        physical=physical,
        delta_variant=delta_variant,
        grid=grid,
        state=state,
        mc=mc,
        seed=run.get("seed", 0),
        output=run.get("output"),
    )


# -- experiments ------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x) + 0.0, ".15g")  # no "-0"


def _preamble(cfg: RunConfig) -> list[str]:
    gp = cfg.generator
    lines = [f"redfield-pairs {__version__} mode={cfg.mode}"]
    if cfg.physical is not None:
        p = cfg.physical
        lines.append(
            f"physical: g2={_fmt(p.g2)} mu={_fmt(p.mu)} omega0={_fmt(p.omega0)} "
            f"f2={_fmt(p.f2)} nu={_fmt(p.nu)} delta_variant={cfg.delta_variant}"
        )
    lines.append(
        f"generator: alpha={_fmt(gp.alpha)} beta={_fmt(gp.beta)} omega={_fmt(gp.omega)} "
        f"gamma={_fmt(gp.gamma)} delta={_fmt(gp.delta)} Omega2={_fmt(gp.Omega2)}"
    )
    return lines


def _single_state(cfg: RunConfig) -> np.ndarray:
    if cfg.state.kind == "ground":
        return np.diag([1.0, 0.0]).astype(complex)
    if cfg.state.kind == "bloch":
        return bloch_compose(BlochVector.from_array(cfg.state.bloch))
    raise ConfigError(f"mode {cfg.mode!r} needs a single-qubit state (kind = ground or bloch)")


def _any_state(cfg: RunConfig) -> np.ndarray:
    s = cfg.state
    if s.kind in ("ground", "bloch"):
        return _single_state(cfg)
    if s.kind == "singlet":
        return make_singlet().rho
    if s.kind == "theta":
        return make_theta(s.theta).rho
    if s.kind == "werner":
        return make_werner(s.p).rho
    a = bloch_compose(BlochVector.from_array(s.bloch1))
    b = bloch_compose(BlochVector.from_array(s.bloch2))
    return np.kron(a, b)


def _single_trace(cfg):
    gp = cfg.generator
    rho0 = _single_state(cfg)
    eta0 = bloch_decompose(rho0).as_array()
    times = cfg.grid.times()
    num = propagate_numeric(rho0, lambda r: apply_L(r, gp), dt=cfg.grid.dt, times=times)
    rows = []
    for t, s in zip(times, num.states):
        exact = bloch_map_matrix(float(t), gp) @ eta0
        rk = bloch_decompose(s).as_array()
        rows.append([t, *exact[1:], *rk[1:], float(np.max(np.abs(exact - rk))), min_eigenvalue(bloch_compose(exact))])
    cols = ["t", "eta1_analytic", "eta2_analytic", "eta3_analytic", "eta1_rk4", "eta2_rk4", "eta3_rk4",
            "max_dev", "min_eig"]
    return [], cols, rows


def _pair_lambda(cfg):
    gp = cfg.generator
    singlet = make_singlet().rho
    rows = []
    for t in cfg.grid.times():
        rho = product_map(singlet, float(t), gp)
        rows.append([t, float(lambda_closed_form(float(t), gp)), lambda_from_state(rho).value, min_eigenvalue(rho)])
    return [], ["t", "lambda_closed", "lambda_eigen", "min_eig"], rows


def _theta_scan(cfg):
    gp = cfg.generator
    g = cfg.grid
    grid = np.arange(g.theta_min, g.theta_max + g.theta_step / 2, g.theta_step)
    rows = []
    measured = None
    for th in grid:
        fd = lambda_curvature_fd(gp, float(th), g.fd_step)
        closed = lambda_curvature_at_zero(gp, float(th))
        if measured is None and fd < 0:
            measured = float(th)
        rows.append([th, fd, closed, int(np.sign(closed))])
    pred = theta_threshold(gp)
    notes = [
        f"theta_threshold_predicted={'none' if pred is None else _fmt(pred)}",
        f"theta_threshold_measured={'none' if measured is None else _fmt(measured)}",
    ]
    return notes, ["theta", "curvature", "curvature_closed", "predicted_sign"], rows


def _werner_scan(cfg):
    gp = cfg.generator
    g = cfg.grid
    grid = np.arange(g.p_min, g.p_max + g.p_step / 2, g.p_step)
    t_max = None if gp.alpha == 0 else g.t_max
    rows = []
    for p in grid:
        m = min_werner_lambda(float(p), gp, n_grid=g.n_points if gp.alpha else 2001, t_max=t_max)
        rows.append([p, m, m < -POSITIVITY_TOL])
    notes = []
    if gp.alpha == 0 and gp.Omega2 > 0:
        notes.append(f"werner_threshold_predicted={_fmt(werner_threshold(gp))}")
    flips = [r[0] for r in rows if r[2]]
    notes.append(f"werner_threshold_measured={_fmt(flips[0]) if flips else 'none'}")
    return notes, ["p", "min_lambda_w", "threshold_flag"], rows


def _choi(cfg):
    gp = cfg.generator
    rows = [[t, choi_min_eigenvalue(float(t), gp)] for t in cfg.grid.times()]
    return [], ["t", "min_choi_eig"], rows


def _admissible(cfg):
    rho0 = _any_state(cfg)
    rep = admissible_scan(rho0, cfg.generator, cfg.grid.t_max, cfg.grid.n_points)
    notes = [
        f"state={cfg.state.kind}",
        f"verdict={'admissible' if rep.admissible else 'not-admissible'}",
        f"first_negative_time={'none' if rep.first_negative_time is None else _fmt(rep.first_negative_time)}",
    ]
    rows = [[t, m] for t, m in zip(rep.time_grid, rep.min_eigenvalue)]
    return notes, ["t", "min_eig"], rows


def _validate_mc(cfg):
    from .stochastic import compare_coords, ensemble_average, markov_gap_report, redfield_coords

    p = cfg.physical
    gp = cfg.generator
    rho0 = _single_state(cfg)
    ens = ensemble_average(rho0, cfg.mc.n_traj, p, cfg.seed, cfg.grid.t_max, n_out=cfg.mc.n_out)
    rep = markov_gap_report(ens, gp, rho0)
    ref = ens.mean_coords - rep.deviation
    comps = ("eta1", "eta2", "eta3")
    cols = (["t"] + [f"mean_{c}" for c in comps] + [f"stderr_{c}" for c in comps]
            + [f"markov_{c}" for c in comps] + [f"ratio_{c}" for c in comps])
    blocks = [ens.mean_coords, ens.stderr, ref, rep.ratio]
    notes = [
        f"n_traj={cfg.mc.n_traj} seed={cfg.seed}",
        f"markov_max_ratio={_fmt(rep.max_ratio)}",
        f"markov_systematic_gap={_fmt(rep.systematic_gap)}",
        f"min_mean_eig={_fmt(min(min_eigenvalue(s) for s in ens.mean_state))}",
    ]
    if cfg.mc.redfield_reference:
        red = redfield_coords(rho0, ens.times, p)
        rrep = compare_coords(ens, red)
        cols += [f"redfield_{c}" for c in comps] + [f"redfield_ratio_{c}" for c in comps]
        blocks += [red, rrep.ratio]
        notes.append(f"redfield_max_ratio={_fmt(rrep.max_ratio)}")
    rows = [[t, *np.concatenate([b[k] for b in blocks])] for k, t in enumerate(ens.times)]
    return notes, cols, rows


def _redfield_coeffs(cfg):
    p = cfg.physical
    gp = cfg.generator
    rows = []
    for t in cfg.grid.times():
        c = redfield_coefficients(p, float(t))
        rows.append([t, c.C[0, 0, 2, 2], c.C[0, 0, 2, 1], c.C[0, 1, 2, 2], c.C[0, 1, 2, 1]])
    notes = [f"markov_limit: C33={_fmt(gp.alpha / 2)} C32={_fmt(-gp.beta)}"]
    return notes, ["t", "C33", "C32", "C33_cross", "C32_cross"], rows


_RUNNERS = {
    "single-trace": _single_trace,
    "pair-lambda": _pair_lambda,
    "theta-scan": _theta_scan,
    "werner-scan": _werner_scan,
    "choi": _choi,
    "admissible": _admissible,
    "validate-mc": _validate_mc,
    "redfield-coeffs": _redfield_coeffs,
}


def render(cfg: RunConfig) -> str:
    """Run the experiment and return the CSV text."""
    notes, cols, rows = _RUNNERS[cfg.mode](cfg)
    buf = io.StringIO()
    for line in _preamble(cfg) + notes:
        buf.write(f"# {line}\n")
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".redfield-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: RunConfig) -> int:
    """Run ``cfg`` and write its output (stdout if no output path).  Returns 0."""
    text = render(cfg)
    if cfg.output:
        _write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="redfield-pairs", description=__doc__.splitlines()[0])
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", required=True, help="INI config file")
    ap.add_argument("--out", help="output CSV path (default: [run] output, else stdout)")
    ap.add_argument("--seed", type=int, help="override [run] seed")
    args = ap.parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read(), args.mode)
        overrides = {}
        if args.out is not None:
            overrides["output"] = args.out
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            from dataclasses import replace

            cfg = replace(cfg, **overrides)
        return run(cfg)
    except Exception as exc:  # report every module error as a failed run
        print(f"redfield-pairs: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
