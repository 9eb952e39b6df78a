"""Experiment orchestration and the ``robin-eit`` command line."""
from .config import ExperimentConfig, load_config, parse_config, preset, serialize_config
from .experiments import (
    compute_maps,
    run_forward,
    run_greens,
    run_image,
    run_picard,
    run_sweep,
    verify_manifest,
)
