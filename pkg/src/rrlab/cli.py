"""Command-line driver: ``rrlab <subcommand> --config run.ini [--out DIR] [--force] [--emit-gnuplot]``.

Exit status: 0 success, 2 configuration or validation error, 3 numerical tolerance failure.
"""
from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .constants import PhysicalConstants
from .dynamics import GridSpec, check_no_turning_point, solve_trajectory
from .errors import ConfigError, GridTooCoarse, QuadratureError, ToleranceError
from .io import write_csv, write_rows, write_summary
from .potential import PotentialSpec
from .radiation import emission_probability, larmor_power, radiated_energy, radiated_energy_spectral
from .renorm import RenormInputs, correction_table, forward_shift_from_delta_v, mass_shift_msbar, write_renorm_csv
from .shift import WindowSpec, rel_diff, shift_report
from .spectral import FreqGridSpec, fourier_acceleration, parseval_energy
from .wavepacket import DensityGrid, WavePacketSpec, charge_density, normalization_integral, normalize, position_expectation
from .wkb import WkbProblem, amplitude_ladder, ladder_rows

SUBCOMMANDS = ("trajectory", "spectrum", "radiation", "shift", "wkb-check", "packet", "renorm", "sweep")
SUMMARY_KEYS = ("v_i", "v_f", "T0", "E_r", "emission_prob", "ir_log_slope", "dz_ld_closed", "dz_ld_ode",
                "dz_quantum", "dz_erratum", "log_term", "gap_over_compton", "parseval_rel_err",
                "erratum_agreement_rel_err")
TRAJECTORY_KEYS = ("v_i", "v_f", "T0")
SUBCOMMAND_KEYS = {
    "trajectory": TRAJECTORY_KEYS,
    "spectrum": TRAJECTORY_KEYS + ("parseval_rel_err",),
    "radiation": TRAJECTORY_KEYS + ("E_r", "emission_prob", "ir_log_slope", "parseval_rel_err"),
    "shift": TRAJECTORY_KEYS + ("dz_ld_closed", "dz_ld_ode", "dz_quantum", "dz_erratum", "log_term",
                                "gap_over_compton", "erratum_agreement_rel_err"),
    "wkb-check": TRAJECTORY_KEYS,
    "packet": TRAJECTORY_KEYS,
    "renorm": TRAJECTORY_KEYS,
    "sweep": SUMMARY_KEYS,
}
SWEEP_AXES = ("hbar", "v_minus_inf", "p_bar")
DEFAULT_TOLERANCES = {
    "parseval": 1e-8,
    "larmor": 1e-8,
    "erratum_agreement": 1e-6,
    "packet_norm": 1e-8,
    "packet_routes": 1e-4,
}

# section -> key -> parser; any other section or key is rejected
_FLOAT, _INT, _STR = float, int, str


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


SCHEMA = {
    "constants": {"m": _FLOAT, "c": _FLOAT, "e2": _FLOAT, "hbar": _FLOAT},
    "potential": {"v_minus_inf": _FLOAT, "half_width": _FLOAT, "shape": _STR, "center": _FLOAT, "peak": _FLOAT},
    "packet": {"p_bar": _FLOAT, "delta_p": _FLOAT, "z0": _FLOAT, "chirp": _FLOAT},
    "time_grid": {"n_points": _INT, "pad_factor": _FLOAT, "min_pulse_samples": _INT},
    "frequency_grid": {"d_omega": _FLOAT, "omega_max": _FLOAT, "threshold": _FLOAT, "safety": _FLOAT},
    "sphere": {"direction_samples": _INT},
    "z_grid": {"n_z": _INT, "n_p": _INT, "span": _FLOAT},
    "radiation": {"omega_min": _FLOAT},
    "shift": {"taper_fraction": _FLOAT},
    "wkb": {"hbar_ladder": _floats, "omegas": _floats, "k_z": _FLOAT},
    "renorm": {"mu": _FLOAT, "delta_v_peak": _FLOAT, "delta_v_half_width": _FLOAT, "delta_v_center": _FLOAT,
               "n_z": _INT},
    "sweep": {"axis": _STR, "values": _floats},
    "tolerances": {k: _FLOAT for k in DEFAULT_TOLERANCES},
    "output": {"dir": _STR},
}


@dataclass(frozen=True)
class RunConfig:
    consts: PhysicalConstants = PhysicalConstants()
    potential: PotentialSpec = PotentialSpec(v_minus_inf=5e-4, half_width=1.0)
    packet: WavePacketSpec = WavePacketSpec(p_bar=0.1, delta_p=0.01, z0=5.0)
    time_grid: GridSpec = GridSpec()
    freq_grid: FreqGridSpec = FreqGridSpec()
    direction_samples: int = 64
    z_grid: DensityGrid = DensityGrid()
    omega_min: float = 1e-5
    window: WindowSpec = WindowSpec()
    hbar_ladder: tuple = (4e-3, 2e-3, 1e-3, 5e-4)
    omegas: tuple = (0.02,)
    k_z: float = 0.0
    mu: float = 1.0
    delta_v_peak: float = 1e-8
    delta_v_half_width: float = 1.0
    delta_v_center: float = 0.0
    renorm_n_z: int = 401
    sweep_axis: str = "hbar"
    sweep_values: tuple = (4e-3, 2e-3, 1e-3, 5e-4)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out_dir: str = "rrlab_out"

    def validate(self) -> None:
        """Run every module-level check that does not need a numerical solve."""
        check_no_turning_point(self.consts, self.potential, self.packet.p_bar)
        normalize(self.consts, self.packet)
        WindowSpec(self.window.taper_fraction)
        RenormInputs(self.mu)
        if not self.omega_min > 0:
            raise ConfigError("[radiation] omega_min must be positive")
        if self.direction_samples < 2:
            raise ConfigError("[sphere] direction_samples must be >= 2")
        for w in self.omegas:
            WkbProblem(self.consts, self.potential, self.packet.p_bar, w, self.k_z, self.hbar_ladder)
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"[sweep] axis must be one of {', '.join(SWEEP_AXES)}, got {self.sweep_axis!r}")
        if not self.sweep_values:
            raise ConfigError("[sweep] values must not be empty")
        for v in self.sweep_values:
            _with_axis(self, self.sweep_axis, v).validate_core()

    def validate_core(self) -> None:
        check_no_turning_point(self.consts, self.potential, self.packet.p_bar)


def _with_axis(cfg: RunConfig, axis: str, value: float) -> RunConfig:
    if axis == "hbar":
        return replace(cfg, consts=cfg.consts.with_hbar(value))
    if axis == "v_minus_inf":
        return replace(cfg, potential=replace(cfg.potential, v_minus_inf=value))
    return replace(cfg, packet=replace(cfg.packet, p_bar=value))


def _key_lines(path: Path) -> dict:
    """(section, key) -> line number, for error context."""
    out, section = {}, None
    for i, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
        elif line and line[0] not in "#;" and ("=" in line or ":" in line) and section:
            key = line.replace(":", "=", 1).split("=", 1)[0].strip().lower()
            out[(section, key)] = i
    return out


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    lines = _key_lines(path)
    values: dict = {}
    for section in parser.sections():
        name = section.lower()
        if name not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key, raw in parser[section].items():
            where = f"{path}:{lines.get((name, key), '?')}: [{section}] {key}"
            conv = SCHEMA[name].get(key)
            if conv is None:
                raise ConfigError(f"{where}: unknown key")
            try:
                values[(name, key)] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{where}: cannot parse {raw!r} ({exc})") from exc

    def get(section, key, default):
        return values.get((section, key), default)

    base = RunConfig()
    try:
        consts = PhysicalConstants(**{k: get("constants", k, getattr(base.consts, k)) for k in ("m", "c", "e2", "hbar")})
        potential = PotentialSpec(**{k: get("potential", k, getattr(base.potential, k))
                                     for k in ("v_minus_inf", "half_width", "shape", "center", "peak")})
        packet = WavePacketSpec(**{k: get("packet", k, getattr(base.packet, k)) for k in ("p_bar", "delta_p", "z0", "chirp")})
        cfg = RunConfig(
            consts=consts, potential=potential, packet=packet,
            time_grid=GridSpec(**{k: get("time_grid", k, getattr(base.time_grid, k))
                                  for k in ("n_points", "pad_factor", "min_pulse_samples")}),
            freq_grid=FreqGridSpec(**{k: get("frequency_grid", k, getattr(base.freq_grid, k))
                                      for k in ("d_omega", "omega_max", "threshold", "safety")}),
            direction_samples=get("sphere", "direction_samples", base.direction_samples),
            z_grid=DensityGrid(**{k: get("z_grid", k, getattr(base.z_grid, k)) for k in ("n_z", "n_p", "span")}),
            omega_min=get("radiation", "omega_min", base.omega_min),
            window=WindowSpec(get("shift", "taper_fraction", base.window.taper_fraction)),
            hbar_ladder=get("wkb", "hbar_ladder", base.hbar_ladder),
            omegas=get("wkb", "omegas", base.omegas),
            k_z=get("wkb", "k_z", base.k_z),
            mu=get("renorm", "mu", base.mu),
            delta_v_peak=get("renorm", "delta_v_peak", base.delta_v_peak),
            delta_v_half_width=get("renorm", "delta_v_half_width", base.delta_v_half_width),
            delta_v_center=get("renorm", "delta_v_center", base.delta_v_center),
            renorm_n_z=get("renorm", "n_z", base.renorm_n_z),
            sweep_axis=get("sweep", "axis", base.sweep_axis),
            sweep_values=get("sweep", "values", base.sweep_values),
            tolerances={**DEFAULT_TOLERANCES, **{k: v for (s, k), v in values.items() if s == "tolerances"}},
            out_dir=get("output", "dir", base.out_dir),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: invalid configuration: {exc}") from exc
    return cfg


def _check(cfg: RunConfig, name: str, value: float, invariant: str) -> None:
    tol = cfg.tolerances[name]
    if not value <= tol:
        raise ToleranceError(invariant, value, tol)


class Run:
    """Lazily computed pipeline stages for one configuration."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.summary: dict = {}
        self.files: dict = {}  # name -> (header, columns)
        self._traj = self._spec = None

    @property
    def traj(self):
        if self._traj is None:
            c = self.cfg
            self._traj = solve_trajectory(c.consts, c.potential, c.packet.p_bar, c.packet.z0, c.time_grid)
            t = self._traj
            self.summary.update(v_i=t.v_i, v_f=t.v_f, T0=t.T0)
        return self._traj

    @property
    def spectrum(self):
        if self._spec is None:
            self._spec = fourier_acceleration(self.traj, self.cfg.freq_grid)
            time_side, freq_side = parseval_energy(self._spec, self.traj)
            err = abs(time_side - freq_side) / abs(time_side)
            self.summary["parseval_rel_err"] = err
            _check(self.cfg, "parseval", err, "Parseval identity")
        return self._spec

    def trajectory(self):
        t = self.traj
        self.files["trajectory.csv"] = (["t", "z", "v", "a"], [t.t_grid, t.z_of_t, t.v_of_t, t.a_of_t])

    def spectrum_stage(self):
        self.trajectory()
        s = self.spectrum
        self.files["spectrum.csv"] = (["omega", "re_a_hat", "im_a_hat", "abs_a_hat"],
                                      [s.omega_grid, s.a_hat.real, s.a_hat.imag, np.abs(s.a_hat)])

    def radiation(self):
        self.spectrum_stage()
        c = self.cfg
        E_t = radiated_energy(c.consts, self.traj)
        E_w = radiated_energy_spectral(c.consts, self.spectrum)
        _check(c, "larmor", abs(E_t - E_w) / abs(E_t), "Larmor time vs spectral energy")
        prob = emission_probability(c.consts, self.spectrum, c.omega_min, direction_samples=c.direction_samples)
        prob10 = emission_probability(c.consts, self.spectrum, 10 * c.omega_min, direction_samples=c.direction_samples)
        self.summary.update(E_r=E_t, emission_prob=prob, ir_log_slope=(prob - prob10) / math.log(10.0))
        self.files["radiation.csv"] = (["t", "P"], [self.traj.t_grid, larmor_power(c.consts, self.traj)])

    def shift(self):
        self.spectrum_stage()
        rep = shift_report(self.cfg.consts, self.traj, self.spectrum, self.cfg.window)
        err = rep.erratum_agreement_rel_err
        self.summary.update(dz_ld_closed=rep.dz_ld_closed, dz_ld_ode=rep.dz_ld_ode, dz_quantum=rep.dz_quantum,
                            dz_erratum=rep.dz_erratum, log_term=rep.log_term,
                            gap_over_compton=rep.gap_over_compton, erratum_agreement_rel_err=err)
        fields = ["dz_ld_closed", "dz_ld_ode", "dz_quantum", "dz_erratum", "log_term", "I_term", "compton",
                  "discrepancy_ratio", "gap_over_compton"]
        self.files["shift.csv"] = (fields, [[getattr(rep, f)] for f in fields])
        _check(self.cfg, "erratum_agreement", err, "erratum vs Lorentz-Dirac ODE shift")
        return rep

    def wkb_check(self):
        c = self.cfg
        rows = []
        for w in c.omegas:
            prob = WkbProblem(c.consts, c.potential, c.packet.p_bar, w, c.k_z, c.hbar_ladder)
            res = amplitude_ladder(prob, self.traj, self.spectrum)
            errs = [r.rel_error for r in res]
            if any(b >= a for a, b in zip(errs[:-1], errs[1:])):
                raise ToleranceError(f"hbar ladder at omega = {w}: rel_error not monotone", max(errs), min(errs))
            rows.extend(ladder_rows(res))
        self.files["wkb_ladder.csv"] = (["hbar", "omega", "k_z", "re_G", "im_G", "re_G_asym", "im_G_asym",
                                         "rel_error"], [list(col) for col in zip(*rows)])

    def packet(self):
        c = self.cfg
        self.traj
        spec = normalize(c.consts, c.packet)
        _check(c, "packet_norm", abs(normalization_integral(c.consts, spec) - 1.0), "packet normalization")
        dens = charge_density(c.consts, spec, c.z_grid)
        z_mom = position_expectation(c.consts, spec)
        scale = max(abs(z_mom), c.consts.hbar / spec.delta_p)
        _check(c, "packet_routes", abs(dens.moment(1) - z_mom) / scale, "<z> momentum vs density route")
        self.files["density.csv"] = (["z", "rho"], [dens.z, dens.rho])
        return z_mom, dens

    def renorm(self):
        c = self.cfg
        self.traj
        z, d, dd = correction_table(c.consts, c.potential, c.renorm_n_z)
        self.files["renorm.csv"] = (["z", "delta_v_over_mc2", "d_delta_v_dz"], [z, d, dd])
        ms = mass_shift_msbar(c.consts, c.consts.m, c.mu)
        dV = PotentialSpec(shape="BumpC2", peak=c.delta_v_peak, half_width=c.delta_v_half_width, center=c.delta_v_center)
        fs = forward_shift_from_delta_v(c.consts, c.packet.p_bar, dV, oracle=c.delta_v_peak != 0.0)
        return ms, fs

    def sweep_row(self):
        self.radiation()
        self.shift()
        return [self.summary[k] for k in SUMMARY_KEYS]


def _threads() -> int:
    raw = os.environ.get("RRLAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"RRLAB_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("RRLAB_THREADS must be >= 1")
    return n


def _gnuplot(name: str, header) -> str:
    stem = name[:-4]
    x = header[0]
    plots = ", ".join(f"'{name}' using 1:{i + 1} with lines title '{h}'" for i, h in enumerate(header[1:], 1))
    return (f"set datafile separator ','\nset key autotitle columnhead\nset xlabel '{x}'\n"
            f"set terminal pngcairo\nset output '{stem}.png'\nplot {plots}\n")


def _prepare_out(path: Path, force: bool) -> None:
    if path.exists():
        if not path.is_dir():
            raise ConfigError(f"output path exists and is not a directory: {path}")
        if any(path.iterdir()) and not force:
            raise ConfigError(f"output directory {path} is not empty (use --force to overwrite)")
    path.mkdir(parents=True, exist_ok=True)


def run_subcommand(name: str, cfg: RunConfig, out: Path, force: bool = False, emit_gnuplot: bool = False,
                   stream=sys.stdout) -> int:
    """Execute one pipeline and write its files; raises on failure (see :func:`main`)."""
    if name not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {name!r}")
    cfg.validate()
    _prepare_out(out, force)
    run = Run(cfg)
    extra = []
    if name == "trajectory":
        run.trajectory()
    elif name == "spectrum":
        run.spectrum_stage()
    elif name == "radiation":
        run.radiation()
    elif name == "shift":
        run.shift()
    elif name == "wkb-check":
        run.wkb_check()
    elif name == "packet":
        z_mom, dens = run.packet()
        extra = [f"<z> momentum route = {z_mom:.12g}", f"<z> density route = {dens.moment(1):.12g}",
                 f"density mass = {dens.mass:.12g}"]
    elif name == "renorm":
        ms, fs = run.renorm()
        extra = [f"mass shift ({ms.scheme}): pole coefficient = {ms.pole_coefficient:.10g}, "
                 f"finite part = {ms.finite_part:.10g}",
                 f"forward shift closed form = {fs.closed_form:.10g}"]
        if fs.oracle is not None:
            extra.append(f"forward shift trajectory oracle = {fs.oracle:.10g}")
    else:
        axis = cfg.sweep_axis
        points = [_with_axis(cfg, axis, v) for v in cfg.sweep_values]
        with ThreadPoolExecutor(max_workers=min(_threads(), len(points))) as pool:
            rows = list(pool.map(lambda c: Run(c).sweep_row(), points))
        run.sweep_row()
        run.files["sweep.csv"] = ([axis, *SUMMARY_KEYS],
                                  [list(cfg.sweep_values)] + [list(col) for col in zip(*rows)])
    summary = {k: run.summary[k] for k in SUBCOMMAND_KEYS[name] if k in run.summary}
    for fname, (header, cols) in run.files.items():
        write_csv(out / fname, header, cols)
        if emit_gnuplot:
            (out / (fname[:-4] + ".gp")).write_text(_gnuplot(fname, header))
    write_summary(out / "summary.txt", summary)
    for k, v in summary.items():
        print(f"{k} = {v:.17g}", file=stream)
    for line in extra:
        print(line, file=stream)
    print(f"wrote {', '.join(sorted(run.files))}, summary.txt to {out}", file=stream)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rrlab", description="Radiation-reaction position-shift laboratory.")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", required=True, help="INI file with module-named sections")
    ap.add_argument("--out", help="output directory (overrides [output] dir)")
    ap.add_argument("--force", action="store_true", help="write into a non-empty output directory")
    ap.add_argument("--emit-gnuplot", action="store_true", help="write a gnuplot script next to each CSV")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out = Path(args.out if args.out else cfg.out_dir)
        return run_subcommand(args.subcommand, cfg, out, args.force, args.emit_gnuplot)
    except ToleranceError as exc:
        print(f"rrlab: tolerance failure: {exc}", file=sys.stderr)
        return 3
    except (GridTooCoarse, QuadratureError) as exc:
        print(f"rrlab: numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"rrlab: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
