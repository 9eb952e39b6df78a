"""Experiment pipelines behind the CLI subcommands."""
from __future__ import annotations

import logging
import platform
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import scipy
import sklearn

from .. import __version__
from ..exceptions import ConfigError, RobinEITError
from ..forward import apply_noise, assemble_operator
from ..greens import robin_greens_trace
from ..imaging import ImagingGrid, lsm_indicator, normalize_map, rfm_indicator, score
from ..regularize import FilterSpec, decompose, picard_table
from . import io
from .config import FilterEntry, config_record

log = logging.getLogger(__name__)

RNG_NAME = "numpy.random.PCG64"


class StageError(RobinEITError):
    """Failure inside a named pipeline stage; the original error is ``__cause__``."""

    def __init__(self, stage, error):
        self.stage = stage
        self.error = error
        super().__init__(f"[{stage}] {type(error).__name__}: {error}")


@contextmanager
def stage(name):
    try:
        yield
    except (StageError, ConfigError):
        raise
    except (RobinEITError, ArithmeticError, np.linalg.LinAlgError, OSError) as exc:
        raise StageError(name, exc) from exc


def _outdir(config, out):
    path = Path(config.output_dir if out is None else out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def build_operator(config):
    """Noise-free or noisy gap operator for ``config``."""
    A = assemble_operator(config.medium, config.boundary_grid, config.kernel)
    if config.delta > 0:
        A = apply_noise(A, config.delta, config.seed)
    return A


def run_forward(config, out=None):
    """Write ``operator.csv`` and ``operator.json``; return the operator."""
    outdir = _outdir(config, out)
    with stage("forward"):
        A = build_operator(config)
    if not np.any(A.entries):
        log.warning("gap operator is identically zero (no interface: gamma = 0 and sigma_in = sigma_out)")
    io.write_operator_csv(outdir / "operator.csv", A.entries)
    io.write_json(outdir / "operator.json", A.describe())
    log.info("wrote %s", outdir / "operator.csv")
    return A


def _require_points(config, points):
    points = config.sampling_points() if points is None else list(points)
    if not points:
        raise ConfigError("at least one sampling point is required (config key 'points')")
    return points


def run_greens(config, points=None, out=None):
    outdir = _outdir(config, out)
    points = _require_points(config, points)
    grid = config.boundary_grid
    paths = []
    with stage("greens"):
        traces = [robin_greens_trace(z, config.sigma_out, grid) for z in points]
    for i, trace in enumerate(traces):
        paths.append(io.write_csv(
            outdir / f"greens_{i}.csv", ["phi", "value"],
            np.column_stack([grid.angles, trace.values]),
        ))
    return paths


def compute_maps(config, operator=None):
    """Normalized indicator maps and metrics for every (method, filter) pair."""
    config.validate_for_image()
    with stage("forward"):
        A = build_operator(config) if operator is None else operator
    with stage("decompose"):
        system = decompose(A)
    grid = ImagingGrid(config.grid_resolution, config.r_max)
    results = []
    for method, spec in config.map_specs():
        with stage(f"{method}:{spec.label}"):
            if method == "lsm":
                raw = lsm_indicator(system, grid, config.sigma_out, spec)
            else:
                raw = rfm_indicator(system, grid, config.sigma_out, spec)
            indicator = normalize_map(raw)
            metrics = score(indicator, config.medium, config.tau)
        results.append((indicator, metrics))
    return A, grid, results


def _map_image(indicator):
    grid = indicator.grid
    image = np.zeros((grid.resolution, grid.resolution))
    image[grid.rows, grid.cols] = indicator.values
    return image[::-1]  # first PGM row is y = +1


def run_image(config, out=None):
    """Write one CSV and PGM per map, ``metrics.json`` and ``manifest.json``."""
    started = time.perf_counter()
    outdir = _outdir(config, out)
    A, grid, results = compute_maps(config)
    artifacts, stages, metrics = [], {"operator": io.sha256_array(A.entries)}, {}
    for indicator, m in results:
        name = indicator.name
        rows = np.column_stack([grid.points, indicator.values, indicator.flags.astype(float)])
        artifacts.append(io.write_csv(outdir / f"map_{name}.csv", ["x", "y", "value", "flag"], rows))
        artifacts.append(io.write_pgm(outdir / f"map_{name}.pgm", _map_image(indicator)))
        stages[name] = io.sha256_array(indicator.values)
        metrics[name] = dict(
            m.as_dict(),
            method=indicator.method,
            scheme=indicator.filter.scheme,
            param=indicator.filter.param,
            guard_hits=indicator.guard_hits,
        )
        log.info("%s: contrast %.3g, jaccard %.3f", name, m.contrast, m.jaccard)
    artifacts.append(io.write_json(outdir / "metrics.json", metrics))
    write_manifest(outdir, config, artifacts, stages, time.perf_counter() - started)
    return metrics


def write_manifest(outdir, config, artifacts, stages, wall_clock):
    """Write ``manifest.json`` iff every declared artifact exists."""
    missing = [str(p) for p in artifacts if not Path(p).is_file()]
    if missing:
        raise OSError(f"cannot write manifest, missing artifacts: {missing}")
    record = {
        "config": config_record(config),
        "artifacts": {Path(p).name: io.sha256_file(p) for p in artifacts},
        "stages": stages,
        "versions": {
            "robin_eit": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "scikit-learn": sklearn.__version__,
        },
        "rng": RNG_NAME,
        "wall_clock_seconds": wall_clock,
    }
    return io.write_json(Path(outdir) / "manifest.json", record)


def verify_manifest(path):
    """Names of artifacts whose file is missing or whose checksum differs."""
    path = Path(path)
    record = io.read_json(path)
    bad = []
    for name, digest in record["artifacts"].items():
        target = path.parent / name
        if not target.is_file() or io.sha256_file(target) != digest:
            bad.append(name)
    return bad


def run_picard(config, points=None, out=None):
    """One Picard CSV ``(n, s_n, |<u_n,b>|, partial_sum)`` per sampling point."""
    outdir = _outdir(config, out)
    points = _require_points(config, points)
    with stage("forward"):
        A = build_operator(config)
    with stage("decompose"):
        system = decompose(A)
    tables = []
    with stage("picard"):
        for z in points:
            b = robin_greens_trace(z, config.sigma_out, config.boundary_grid)
            tables.append(picard_table(system, b))
    for i, table in enumerate(tables):
        io.write_csv(outdir / f"picard_{i}.csv", ["n", "s_n", "coef", "partial_sum"], table)
    return tables


def _alpha_override(config, value):
    entries = []
    for entry in config.filters:
        if entry.spec.scheme == "ttls":
            if value != int(value):
                raise ConfigError(f"ttls truncation index must be an integer, got {value}")
            spec = FilterSpec("ttls", int(value))
        else:
            spec = FilterSpec(entry.spec.scheme, value)
        entries.append(FilterEntry(entry.method, spec))
    return config.with_overrides(filters=tuple(entries))


SWEEP_HEADER = [
    "axis", "value", "method", "scheme", "param",
    "contrast", "jaccard", "argmax_dist", "flagged", "error",
]


def run_sweep(config, axis=None, values=None, out=None):
    """Metrics for each value of ``axis``; failures are recorded per row."""
    axis = config.sweep_axis if axis is None else axis
    values = config.sweep_values if values is None else tuple(values)
    if axis not in ("delta", "alpha", "rho"):
        raise ConfigError(f"unknown sweep axis {axis!r}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    config.validate_for_image()
    outdir = _outdir(config, out)
    rows = []
    for value in values:
        value = float(value)
        try:
            if axis == "alpha":
                cfg = _alpha_override(config, value)
            else:
                cfg = config.with_overrides(**{axis: value})
            _, _, results = compute_maps(cfg)
        except (RobinEITError, ArithmeticError) as exc:
            log.warning("sweep %s=%g failed: %s", axis, value, exc)
            rows.append({"axis": axis, "value": value, "error": str(exc).replace(",", ";")})
            continue
        for indicator, m in results:
            rows.append({
                "axis": axis,
                "value": value,
                "method": indicator.method,
                "scheme": indicator.filter.scheme,
                "param": float(indicator.filter.param),
                "contrast": m.contrast,
                "jaccard": m.jaccard,
                "argmax_dist": m.argmax_dist,
                "flagged": m.flagged,
                "error": "",
            })
    io.write_rows(outdir / "sweep.csv", SWEEP_HEADER, rows)
    return rows


__all__ = [
    "StageError", "build_operator", "compute_maps", "run_forward", "run_greens",
    "run_image", "run_picard", "run_sweep", "verify_manifest", "write_manifest",
]
