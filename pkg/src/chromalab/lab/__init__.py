"""Experiment orchestration: CLI, manifests, seeded studies."""

from .experiments import (
    chi_interval_experiment,
    replay,
    xk_distribution_experiment,
)
from .manifest import Manifest, sha256_file, toolchain_fingerprint, verify_outputs

__all__ = [
    "Manifest",
    "chi_interval_experiment",
    "replay",
    "sha256_file",
    "toolchain_fingerprint",
    "verify_outputs",
    "xk_distribution_experiment",
]
