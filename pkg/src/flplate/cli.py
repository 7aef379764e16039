"""Command-line scenario runner.

Every scenario writes CSV/JSON artifacts into the output directory:

=========  ============  ==========================================================
scenario   mode          artifacts
=========  ============  ==========================================================
figure1    full-line     ``figure1.csv`` (x, t, eta, phi) for the Gaussian bump
zero       full-line     ``zero.csv``, the same grid for the zero profile
wellposed  full-line     ``wellposed.csv`` norm ratios, ``wellposed.json`` summary
imomega    dispersion    ``imomega.csv`` (kr, ki, im_omega_plus, im_omega_minus)
kernel     kernel        ``kernel.csv`` (t, re, im), ``kernel_contour.json``,
                         ``kernel.json``
halfline   half-line     ``halfline.csv`` (x, t, eta), trace/forcing CSVs,
                         ``halfline_contour.json``, ``halfline.json``
nonlocal   nonlocal-check ``nonlocal.json`` residual scaling (or residuals of a
                         supplied state CSV)
=========  ============  ==========================================================

Exit codes: 0 success, 1 configuration error, 2 numerical error, 3 I/O error.
The output directory is ``--out`` if given, else ``$FLPLATE_OUTPUT_DIR``, else
the ``out`` key of the config file, else the current directory.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dispersion import PlateParams, omega_pm
from .errors import ConfigError, FlplateError, HingeViolation, NumericalError
from .io import read_config, write_complex_csv, write_json, write_table

log = logging.getLogger("flplate")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3
OUTPUT_ENV = "FLPLATE_OUTPUT_DIR"

MODES = ("full-line", "half-line", "dispersion", "kernel", "nonlocal-check")

# scenario -> (mode, defaults)
SCENARIOS = {
    "figure1": ("full-line", dict(profile="gaussian", xmin=-10.0, xmax=10.0, nx=401,
                                  tmax=2.0, nt=81, kmax=10.0)),
    "zero": ("full-line", dict(profile="zero", xmin=-10.0, xmax=10.0, nx=401,
                               tmax=2.0, nt=81, kmax=10.0)),
    "wellposed": ("full-line", dict(profile="gaussian", tmax=2.0, nt=81, kmax=10.0)),
    "imomega": ("dispersion", dict(xmin=-3.0, xmax=3.0, nx=121, im_min=-3.0, im_max=3.0,
                                   n_im=121)),
    "kernel": ("kernel", dict(tmax=1.0, nt=100)),
    "halfline": ("half-line", dict(profile="hinge4", closure="given-xxx", xmin=0.0,
                                   xmax=10.0, nx=201, tmax=1.0, nt=400, kmax=60.0,
                                   n_out=11, trace_amplitude=0.1)),
    "nonlocal": ("nonlocal-check", dict(profile="gaussian", xmin=-60.0, xmax=60.0,
                                        nx=6001, tmax=1.0, kmax=10.0, amplitude=1e-2)),
}
DEFAULT_SCENARIO = {mode: name for name, (mode, _) in reversed(list(SCENARIOS.items()))}


@dataclass
class ScenarioConfig:
    """Resolved settings of one run; unset fields fall back to scenario defaults."""

    scenario: str = "figure1"
    mode: str = "full-line"
    U: float = 1.0
    profile: str = "gaussian"
    amplitude: float = 1.0
    nx: int = 401
    nt: int = 81
    xmin: float = -10.0
    xmax: float = 10.0
    tmax: float = 2.0
    kmax: float = 10.0
    closure: str = "given-xxx"
    out: str = "."
    im_min: float = -3.0
    im_max: float = 3.0
    n_im: int = 121
    n_out: int = 11
    trace_amplitude: float = 0.1
    state: str = ""
    k_values: list = field(default_factory=lambda: [0.5, 1.0, 2.0])

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if SCENARIOS[self.scenario][0] != self.mode:
            raise ConfigError(f"scenario {self.scenario!r} runs in mode "
                              f"{SCENARIOS[self.scenario][0]!r}, not {self.mode!r}")
        if self.nx < 2 or self.nt < 2 or self.n_im < 2 or self.n_out < 1:
            raise ConfigError("nx, nt and n_im must be at least 2")
        if not self.xmin < self.xmax or not self.im_min < self.im_max:
            raise ConfigError("coordinate ranges must be nonempty")
        if not (self.tmax > 0 and self.kmax > 0):
            raise ConfigError("tmax and kmax must be positive")
        if not all(float(k) > 0 for k in self.k_values):
            raise ConfigError("k_values must be positive")
        self.params  # validates U
        return self

    @property
    def params(self):
        return PlateParams(U=float(self.U))


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def _coerce(name, value):
    f = _FIELDS.get(name)
    if f is None:
        raise ConfigError(f"unknown configuration key {name!r}")
    kind = type(f.default) if f.default is not dataclasses.MISSING else list
    try:
        if kind is int:
            if float(value) != int(float(value)):
                raise ValueError(value)
            return int(float(value))
        if kind is float:
            return float(value)
        if kind is list:
            return [float(v) for v in (value if isinstance(value, list) else str(value).split(","))]
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc


def build_config(file_values=None, overrides=None, env=None):
    """Merge scenario defaults, config-file values and command-line overrides."""
    file_values = dict(file_values or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    env = os.environ if env is None else env
    merged = {**file_values, **overrides}
    scenario = merged.get("scenario")
    mode = merged.get("mode")
    if scenario is None:
        scenario = DEFAULT_SCENARIO.get(mode, "figure1") if mode else "figure1"
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}")
    values = {"scenario": scenario, "mode": SCENARIOS[scenario][0], **SCENARIOS[scenario][1]}
    values.update(file_values)
    if env.get(OUTPUT_ENV):
        values["out"] = env[OUTPUT_ENV]
    values.update(overrides)
    values["scenario"], values["mode"] = scenario, mode or values["mode"]
    cfg = ScenarioConfig(**{k: _coerce(k, v) for k, v in values.items()})
    return cfg.validate()


# --- scenarios -------------------------------------------------------------------

def _full_line(cfg, amplitude=None):
    from .fullline import solve_full_line
    from .spectral import get_profile, make_grid
    prof = get_profile(cfg.profile, "full", cfg.amplitude if amplitude is None else amplitude)
    return solve_full_line(prof, cfg.params, make_grid(cfg.kmax))


def _run_field(cfg, out):
    from .fullline import evaluate_grid
    sol = _full_line(cfg)
    x = np.linspace(cfg.xmin, cfg.xmax, cfg.nx)
    t = np.linspace(0.0, cfg.tmax, cfg.nt)
    eta, phi = evaluate_grid(sol, x, t)
    T, X = np.meshgrid(t, x, indexing="ij")
    return [write_table(out / f"{cfg.scenario}.csv", ["x", "t", "eta", "phi"], [X, T, eta, phi])]


def _run_wellposed(cfg, out):
    from .fullline import wellposedness_report
    sol = _full_line(cfg)
    rep = wellposedness_report(sol, np.linspace(0.0, cfg.tmax, cfg.nt))
    csv_path = write_table(out / "wellposed.csv",
                           ["t", "l2_eta", "ratio", "identity_residual_real",
                            "identity_residual_continued"],
                           [rep.t, rep.l2_eta, rep.ratio, rep.identity_residual_real,
                            rep.identity_residual_continued])
    summary = {"U": cfg.U, "profile": cfg.profile, "h2_eta0": rep.h2_eta0,
               "sup_ratio": rep.sup_ratio,
               "max_identity_residual_real": float(np.max(rep.identity_residual_real)),
               "max_identity_residual_continued":
                   float(np.max(rep.identity_residual_continued))}
    return [csv_path, write_json(out / "wellposed.json", summary)]


def _run_imomega(cfg, out):
    kr = np.linspace(cfg.xmin, cfg.xmax, cfg.nx)
    ki = np.linspace(cfg.im_min, cfg.im_max, cfg.n_im)
    KI, KR = np.meshgrid(ki, kr, indexing="ij")
    k = KR + 1j * KI
    with np.errstate(all="ignore"):
        wp, wm = omega_pm(np.where(k == 0, np.nan, k), cfg.params, check=False)
    return [write_table(out / "imomega.csv", ["kr", "ki", "im_omega_plus", "im_omega_minus"],
                        [KR, KI, wp.imag, wm.imag])]


def _run_kernel(cfg, out):
    from .halfline.contour import deformed_path
    from .halfline.kernel import compute_kernel
    path = deformed_path(cfg.params)
    t = cfg.tmax * np.arange(1, cfg.nt + 1) / cfg.nt
    table = compute_kernel(cfg.params, path, t)
    files = [write_complex_csv(out / "kernel.csv", t, table.K_values)]
    (out / "kernel_contour.json").write_text(path.to_json() + "\n")
    files.append(out / "kernel_contour.json")
    files.append(write_json(out / "kernel.json", {
        "U": cfg.U, "contour": path.label,
        "sup_sqrt_t_abs_K": table.weak_sing_constant}))
    return files


def _run_halfline(cfg, out):
    from .halfline.contour import gamma_path
    from .halfline.solver import solve_half_line
    from .spectral import get_profile, make_grid
    prof = get_profile(cfg.profile, "half", cfg.amplitude)
    a = cfg.trace_amplitude
    x = np.linspace(cfg.xmin, cfg.xmax, cfg.nx)
    times = np.linspace(0.0, cfg.tmax, cfg.n_out)
    kw = {}
    if cfg.closure in ("given-xxx", "free-edge-zero"):
        kw["eta_xxx0"] = lambda t: a * t * t
    if cfg.closure in ("given-xx", "free-edge-zero"):
        kw["eta_xx0"] = lambda t: a * t * t
    sol = solve_half_line(prof, cfg.params, make_grid(cfg.kmax), cfg.closure, T=cfg.tmax,
                          nt=cfg.nt, x_nodes=x, output_times=times, **kw)
    eta = np.array([f.values for f in sol.fields])
    T, X = np.meshgrid(times, x, indexing="ij")
    tr = sol.traces
    files = [write_table(out / "halfline.csv", ["x", "t", "eta"], [X, T, eta]),
             write_complex_csv(out / "halfline_eta_xx0.csv", tr.t_nodes, tr.eta_xx0),
             write_complex_csv(out / "halfline_eta_xxx0.csv", tr.t_nodes, tr.eta_xxx0),
             write_complex_csv(out / "halfline_g.csv", tr.t_nodes, sol.g)]
    (out / "halfline_contour.json").write_text(gamma_path(cfg.params).to_json() + "\n")
    files.append(out / "halfline_contour.json")
    hr = sol.hinge_residuals
    files.append(write_json(out / "halfline.json", {
        "U": cfg.U, "profile": cfg.profile, "closure": cfg.closure,
        "closure_residual": sol.closure_residual,
        "hinge_eta_max": float(np.max(hr["eta"])),
        "hinge_eta_x_max": float(np.max(hr["eta_x"]))}))
    return files


def _nonlocal_residuals(state, params, k_values):
    from .nonlocal_form import bernoulli_beam_residual, global_relation_residual
    out = {"global_relation": [abs(global_relation_residual(state, k, params))
                               for k in k_values],
           "global_relation_linear": [abs(global_relation_residual(state, k, params, linear=True))
                                      for k in k_values]}
    if state.eta_tt is not None:
        out["beam_max"] = float(np.max(np.abs(bernoulli_beam_residual(state, params))))
    return out


def _run_nonlocal(cfg, out):
    from .nonlocal_form import SurfaceState, state_from_full_line
    if cfg.state:
        state = SurfaceState.from_csv(cfg.state)
        res = _nonlocal_residuals(state, cfg.params, cfg.k_values)
        return [write_json(out / "nonlocal.json", {"U": cfg.U, "k": cfg.k_values, **res})]
    x = np.linspace(cfg.xmin, cfg.xmax, cfg.nx)
    report = {"U": cfg.U, "profile": cfg.profile, "t": cfg.tmax, "k": cfg.k_values}
    levels = []
    for eps in (cfg.amplitude, cfg.amplitude / 2):
        state = state_from_full_line(_full_line(cfg, eps), x, cfg.tmax)
        res = _nonlocal_residuals(state, cfg.params, cfg.k_values)
        levels.append({"amplitude": eps, **res})
    report["levels"] = levels
    report["beam_ratio"] = levels[0]["beam_max"] / levels[1]["beam_max"]
    report["global_ratio"] = max(levels[0]["global_relation"]) / max(levels[1]["global_relation"])
    return [write_json(out / "nonlocal.json", report)]


RUNNERS = {"figure1": _run_field, "zero": _run_field, "wellposed": _run_wellposed,
           "imomega": _run_imomega, "kernel": _run_kernel, "halfline": _run_halfline,
           "nonlocal": _run_nonlocal}


def run_scenario(cfg: ScenarioConfig):
    """Run one scenario; returns the list of written files."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return RUNNERS[cfg.scenario](cfg, out)


# --- entry point -------------------------------------------------------------------

def make_parser():
    p = argparse.ArgumentParser(prog="flplate", description=__doc__.split("\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog="exit codes: 1 config, 2 numerical, 3 I/O")
    p.add_argument("--config", help="JSON or key = value file")
    p.add_argument("--scenario", choices=sorted(SCENARIOS))
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--U", type=float)
    p.add_argument("--profile", help="gaussian, zero, hinge<n> or csv:<path>")
    p.add_argument("--amplitude", type=float)
    p.add_argument("--nx", type=int)
    p.add_argument("--nt", type=int)
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--kmax", type=float)
    p.add_argument("--closure", choices=("given-xxx", "given-xx", "free-edge-zero"))
    p.add_argument("--state", help="surface-state CSV for the nonlocal scenario")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "verbose")}
    try:
        file_values = read_config(args.config) if args.config else {}
        cfg = build_config(file_values, overrides)
        files = run_scenario(cfg)
    except (ConfigError, HingeViolation) as exc:
        print(f"flplate: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"flplate: numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"flplate: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FlplateError as exc:
        print(f"flplate: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for f in files:
        log.info("wrote %s", f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
