"""Experiment configuration: a flat ``key = value`` text format.

Example::

    # noisy concentric disk
    rho = 0.4
    delta = 0.01
    methods = lsm, rfm
    filters = lsm:tikhonov:1e-9, lsm:ttls:5, rfm:spectral_cutoff:1e-16
    points = 0 0; 0.8 0

A filter entry is ``[method:]scheme:param``; entries without a method apply
to every method.  ``points`` lists polar sampling points ``rho_z theta_z``
separated by semicolons.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

from ..exceptions import ConfigError, RobinEITError
from ..forward import BoundaryGrid, KernelSpec, MediumConfig
from ..greens import R_MAX, SamplingPoint
from ..imaging import DEFAULT_RESOLUTION, DEFAULT_TAU, METHODS
from ..regularize import FilterSpec

SWEEP_AXES = ("delta", "alpha", "rho")


@dataclass(frozen=True)
class FilterEntry:
    method: str | None
    spec: FilterSpec

    def applies_to(self, method):
        return self.method is None or self.method == method

    def __str__(self):
        param = self.spec.param if self.spec.scheme == "ttls" else repr(self.spec.param)
        prefix = f"{self.method}:" if self.method else ""
        return f"{prefix}{self.spec.scheme}:{param}"

    @classmethod
    def parse(cls, text):
        parts = [p.strip() for p in text.split(":")]
        if len(parts) == 2:
            method, (scheme, param) = None, parts
        elif len(parts) == 3:
            method, scheme, param = parts
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")
        else:
            raise ValueError(f"filter entry {text!r} is not [method:]scheme:param")
        value = int(param) if scheme == "ttls" else float(param)
        return cls(method, FilterSpec(scheme, value))


def _paired_filters(lsm, rfm):
    names = ("tikhonov", "spectral_cutoff", "ttls")
    return tuple(
        [FilterEntry("lsm", FilterSpec(s, p)) for s, p in zip(names, lsm)]
        + [FilterEntry("rfm", FilterSpec(s, p)) for s, p in zip(names, rfm)]
    )


DEFAULT_FILTERS = _paired_filters((1e-9, 1e-9, 5), (1e-16, 1e-16, 5))


@dataclass(frozen=True)
class ExperimentConfig:
    rho: float = 0.4
    sigma_out: float = 1.0
    sigma_in: float = 1.0
    gamma: float = 1.0
    n_points: int = 32
    truncation: int = 10
    delta: float = 0.0
    seed: int = 0
    grid_resolution: int = DEFAULT_RESOLUTION
    r_max: float = R_MAX
    tau: float = DEFAULT_TAU
    methods: tuple = METHODS
    filters: tuple = DEFAULT_FILTERS
    output_dir: str = "out"
    points: tuple = ()
    sweep_axis: str = "delta"
    sweep_values: tuple = ()

    def __post_init__(self):
        try:
            self.medium
            BoundaryGrid(self.n_points)
            KernelSpec(self.truncation)
        except RobinEITError as exc:
            raise ConfigError(str(exc)) from exc
        if self.delta < 0:
            raise ConfigError(f"delta must be nonnegative, got {self.delta}")
        if not 0 < self.r_max < 1:
            raise ConfigError(f"r_max must lie in (0, 1), got {self.r_max}")
        if not 0 < self.tau < 1:
            raise ConfigError(f"tau must lie in (0, 1), got {self.tau}")
        if int(self.grid_resolution) != self.grid_resolution or self.grid_resolution < 2:
            raise ConfigError(f"grid_resolution must be an integer >= 2, got {self.grid_resolution}")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(f"unknown method {method!r}; expected a subset of {METHODS}")
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"sweep_axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        for rho_z, _ in self.points:
            if not 0 <= rho_z <= self.r_max:
                raise ConfigError(f"sampling point radius {rho_z} outside [0, {self.r_max}]")

    @property
    def medium(self):
        return MediumConfig(self.rho, self.sigma_out, self.sigma_in, self.gamma)

    @property
    def boundary_grid(self):
        return BoundaryGrid(self.n_points)

    @property
    def kernel(self):
        return KernelSpec(self.truncation)

    def sampling_points(self):
        return [SamplingPoint(r, t, self.r_max) for r, t in self.points]

    def map_specs(self):
        """``(method, FilterSpec)`` pairs, one per indicator map."""
        return [
            (method, entry.spec)
            for method in self.methods
            for entry in self.filters
            if entry.applies_to(method)
        ]

    def validate_for_image(self):
        if not self.methods:
            raise ConfigError("methods must be nonempty for imaging")
        if not self.filters:
            raise ConfigError("filters must be nonempty for imaging")
        if not self.map_specs():
            raise ConfigError("no filter applies to the selected methods")
        for _, spec in self.map_specs():
            try:
                spec.check_truncation(self.n_points)
            except RobinEITError as exc:
                raise ConfigError(str(exc)) from exc

    def with_overrides(self, **changes):
        try:
            return replace(self, **changes)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


_FLOAT_KEYS = {"rho", "sigma_out", "sigma_in", "gamma", "delta", "r_max", "tau"}
_INT_KEYS = {"n_points", "truncation", "seed", "grid_resolution"}
KEYS = tuple(f.name for f in fields(ExperimentConfig))


def _split(text, sep):
    return [item.strip() for item in text.split(sep) if item.strip()]


def parse_value(key, text):
    """Convert the textual value of ``key`` to its typed form."""
    if key in _FLOAT_KEYS:
        return float(text)
    if key in _INT_KEYS:
        return int(text)
    if key == "methods":
        return tuple(m.lower() for m in _split(text, ","))
    if key == "filters":
        return tuple(FilterEntry.parse(item) for item in _split(text, ","))
    if key == "points":
        pts = []
        for item in _split(text, ";"):
            rho_z, theta_z = (float(v) for v in item.replace(",", " ").split())
            pts.append((rho_z, theta_z))
        return tuple(pts)
    if key == "sweep_values":
        return tuple(float(v) for v in _split(text, ","))
    if key in ("output_dir", "sweep_axis"):
        return text.strip()
    raise KeyError(key)


def format_value(key, value):
    if key in _FLOAT_KEYS:
        return repr(float(value))
    if key in _INT_KEYS:
        return str(int(value))
    if key == "methods":
        return ", ".join(value)
    if key == "filters":
        return ", ".join(str(entry) for entry in value)
    if key == "points":
        return "; ".join(f"{r!r} {t!r}" for r, t in value)
    if key == "sweep_values":
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def parse_assignments(lines, source="<config>"):
    """Parse ``key = value`` lines into a dict of typed values."""
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, text = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = parse_value(key, text)
        except (ValueError, RobinEITError) as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc
    return values


def parse_config(text, base=None, source="<config>"):
    base = ExperimentConfig() if base is None else base
    return base.with_overrides(**parse_assignments(text.splitlines(), source))


def load_config(path, base=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), base=base, source=str(path))


def serialize_config(config):
    lines = (f"{key} = {format_value(key, getattr(config, key))}".rstrip() for key in KEYS)
    return "".join(line + "\n" for line in lines)


def config_record(config):
    """JSON-friendly echo of every key in its textual form."""
    return {key: format_value(key, getattr(config, key)) for key in KEYS}


PRESETS = {
    "baseline": {},
    "noisy": {"delta": 0.01},
    "high_contrast": {
        "delta": 0.01,
        "sigma_in": 10.0,
        "filters": _paired_filters((1e-11, 1e-11, 10), (0.0, 0.0, 12)),
    },
    "high_contrast_n64": {
        "delta": 0.01,
        "sigma_in": 10.0,
        "n_points": 64,
        "filters": _paired_filters((1e-11, 1e-11, 10), (0.0, 0.0, 12)),
    },
    "small_inclusion": {
        "rho": 0.1,
        "delta": 0.01,
        "filters": _paired_filters((1e-13, 1e-15, 4), (0.0, 0.0, 5)),
    },
}


def preset(name):
    try:
        return ExperimentConfig(**PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
