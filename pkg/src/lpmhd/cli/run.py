"""Run orchestration and the plain-text output formats.

Files written into the output directory (all start with a ``# lpmhd``
header line carrying the schema version):

``manifest.txt``
    resolved configuration, package and numpy versions, seed.
``timeseries.txt``
    a column-name line, then one row per sample: step, time, iterations,
    Hamiltonian, trace Casimirs, sorted spectra. 17 significant digits.
``snapshots/snap_<step>.txt``
    a line ``N <n> algebra <tag> fields <k> step <s> time <t> names ...``,
    then for each field n rows of 2n numbers (re, im pairs, row-major).
``grids/grid_<step>_<field>.txt``
    quantized models only: n_lat rows of n_lon values of the field on the
    cell-centred latitude/longitude grid.
"""

import logging
import os
import sys

import numpy as np

from .. import __version__
from ..diagnostics import casimirs, spectra
from ..errors import ConfigError, StageConvergenceError
from ..integrators import IntegratorConfig
from ..models import make_model, random_state
from ..quantization import evaluate_on_grid, to_coeffs
from .config import QUANTIZED, kirchhoff_params, parse_config, serialize

SCHEMA_VERSION = 1
log = logging.getLogger("lpmhd")


def fmt(x):
    """Shortest text that reads back to the same double (17 digits)."""
    return f"{x:.17g}"


def build_model(cfg):
    if cfg.model == "kirchhoff":
        return make_model("kirchhoff", params=kirchhoff_params(cfg))
    return make_model(cfg.model, cfg.N, alpha=cfg.alpha)


def initial_state(cfg, model):
    if cfg.model == "kirchhoff":
        return random_state(model, seed=cfg.seed, amplitude=cfg.amplitude)
    return random_state(model, cfg.L_cut, cfg.gamma, cfg.seed, cfg.amplitude)


def integrator_config(cfg):
    return IntegratorConfig(h=cfg.h, fp_tol=cfg.fp_tol, fp_max_iters=cfg.fp_max_iters,
                            baseline=cfg.baseline)


def sample(model, state):
    """Ordered (name, value) pairs of everything tracked per sample."""
    out = [("H", model.hamiltonian(state))]
    out.extend(casimirs(model.name, state).items())
    for field, eigs in spectra(model.name, state).items():
        out.extend((f"eig_{field}_{i}", float(v)) for i, v in enumerate(eigs))
    return out


def write_manifest(path, cfg, extra=()):
    with open(path, "w") as fh:
        fh.write(f"# lpmhd manifest schema {SCHEMA_VERSION}\n")
        fh.write(f"# lpmhd_version = {__version__}\n")
        fh.write(f"# numpy_version = {np.__version__}\n")
        for key, value in extra:
            fh.write(f"# {key} = {value}\n")
        fh.write(serialize(cfg))


def write_snapshot(path, state, algebra, step, time, names):
    n = state[0].shape[0]
    with open(path, "w") as fh:
        fh.write(f"# lpmhd snapshot schema {SCHEMA_VERSION}\n")
        fh.write(f"N {n} algebra {algebra} fields {len(state)} step {step} "
                 f"time {fmt(time)} names {' '.join(names)}\n")
        for field in state:
            A = np.asarray(field, dtype=complex)
            for row in A:
                fh.write(" ".join(f"{fmt(z.real)} {fmt(z.imag)}" for z in row) + "\n")


def read_snapshot(path):
    """Returns (state, header dict). Fields come back as complex arrays."""
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# lpmhd snapshot schema"):
            raise ConfigError(f"{path} is not an lpmhd snapshot")
        tokens = fh.readline().split()
        header = {}
        i = 0
        while i < len(tokens):
            if tokens[i] == "names":
                header["names"] = tokens[i + 1:]
                break
            header[tokens[i]] = tokens[i + 1]
            i += 2
        n = int(header["N"])
        k = int(header["fields"])
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (k * n, 2 * n):
        raise ConfigError(f"{path}: expected {k * n} rows of {2 * n} numbers")
    pairs = data[:, 0::2] + 1j * data[:, 1::2]
    state = tuple(pairs[f * n:(f + 1) * n].copy() for f in range(k))
    header["step"] = int(header["step"])
    header["time"] = float(header["time"])
    return state, header


def write_grids(grid_dir, model, state, step, grid):
    n_lat, n_lon = grid
    for name, field in zip(model.fields, state):
        values = evaluate_on_grid(to_coeffs(field, model.ctx), n_lat, n_lon)
        path = os.path.join(grid_dir, f"grid_{step:08d}_{name}.txt")
        with open(path, "w") as fh:
            fh.write(f"# lpmhd grid schema {SCHEMA_VERSION} field {name} step {step} "
                     f"n_lat {n_lat} n_lon {n_lon}\n")
            for row in values:
                fh.write(" ".join(fmt(v) for v in row) + "\n")


def _emit(cfg, model, state, step, out_dir):
    time = step * cfg.h
    snap = os.path.join(out_dir, "snapshots", f"snap_{step:08d}.txt")
    state_out = tuple(np.real(x) if model.algebra == "so3" else x for x in state)
    write_snapshot(snap, state_out, model.algebra, step, time, model.fields)
    if cfg.model in QUANTIZED:
        write_grids(os.path.join(out_dir, "grids"), model, state, step, cfg.grid)


def integrate(cfg, out_dir, state=None, start_step=0, extra_manifest=()):
    """Run from ``state`` at ``start_step`` to the final time, writing outputs.

    Returns the final state. Raises StageConvergenceError after flushing the
    manifest and the partial time series.
    """
    os.makedirs(os.path.join(out_dir, "snapshots"), exist_ok=True)
    if cfg.model in QUANTIZED:
        os.makedirs(os.path.join(out_dir, "grids"), exist_ok=True)
    model = build_model(cfg)
    if state is None:
        state = initial_state(cfg, model)
    icfg = integrator_config(cfg)
    write_manifest(os.path.join(out_dir, "manifest.txt"), cfg, extra_manifest)

    first = sample(model, state)
    with open(os.path.join(out_dir, "timeseries.txt"), "w") as ts:
        ts.write(f"# lpmhd timeseries schema {SCHEMA_VERSION} model {cfg.model} "
                 f"baseline {int(cfg.baseline)}\n")
        ts.write(" ".join(["step", "time", "iterations"] + [k for k, _ in first]) + "\n")

        def row(step, iters, values):
            cols = [str(step), fmt(step * cfg.h), str(iters)] + [fmt(v) for _, v in values]
            ts.write(" ".join(cols) + "\n")

        row(start_step, 0, first)
        if start_step == 0:
            _emit(cfg, model, state, 0, out_dir)
        iters = 0
        for step in range(start_step + 1, cfg.n_steps + 1):
            try:
                state, report = model.step(state, icfg)
            except StageConvergenceError:
                ts.flush()
                raise
            iters += report.iterations
            if step % cfg.sample_every == 0 or step == cfg.n_steps:
                row(step, iters, sample(model, state))
                iters = 0
            if step % cfg.output_every == 0 or step == cfg.n_steps:
                _emit(cfg, model, state, step, out_dir)
                log.info("step %d / %d", step, cfg.n_steps)
    return state


def run(cfg, out_dir):
    """Run a configuration; returns the process exit status."""
    try:
        integrate(cfg, out_dir)
    except StageConvergenceError as exc:
        log.error("%s", exc)
        return 3
    return 0


def resume(snapshot_path, cfg, out_dir):
    """Continue from a snapshot to ``cfg.T_final``; returns the exit status."""
    state, header = read_snapshot(snapshot_path)
    model = build_model(cfg)
    if len(state) != len(model.fields) or state[0].shape[0] != (cfg.N if cfg.model in QUANTIZED else 3):
        raise ConfigError("snapshot does not match the configuration")
    if model.algebra == "so3":
        state = tuple(np.real(x) for x in state)
    step = header["step"]
    if step >= cfg.n_steps:
        raise ConfigError("snapshot is already at or past T_final", key="T_final")
    extra = [("resumed_from", os.path.abspath(snapshot_path)), ("resumed_step", step)]
    try:
        integrate(cfg, out_dir, state=state, start_step=step, extra_manifest=extra)
    except StageConvergenceError as exc:
        log.error("%s", exc)
        return 3
    return 0


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def configure_logging(quiet):
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
