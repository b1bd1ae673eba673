"""Reproducibility manifests.

Every experiment run writes a manifest recording its name, full
parameter set, master seed, worker stream assignment, timestamps, a
toolchain fingerprint, and the SHA-256 of every output file.  Replaying
a manifest re-runs the experiment with the recorded parameters and
verifies the fresh outputs hash identically.
"""

from __future__ import annotations

import hashlib
import json
import platform
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError

MANIFEST_VERSION = 1


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def toolchain_fingerprint() -> dict:
    import mpmath
    import numba
    import scipy

    from .. import __version__
    return {
        "package": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
        "numba": numba.__version__,
        "platform": platform.system(),
    }


@dataclass
class Manifest:
    experiment: str
    parameters: dict
    master_seed: int
    worker_streams: list = field(default_factory=lambda: [0])
    started_at: str = ""
    finished_at: str = ""
    outputs: dict = field(default_factory=dict)   # path -> sha256
    toolchain: dict = field(default_factory=toolchain_fingerprint)
    version: int = MANIFEST_VERSION

    def start(self) -> "Manifest":
        self.started_at = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return self

    def finish(self, output_paths) -> "Manifest":
        self.finished_at = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        self.outputs = {p: sha256_file(p) for p in output_paths}
        return self

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "experiment": self.experiment,
            "parameters": self.parameters,
            "master_seed": self.master_seed,
            "worker_streams": self.worker_streams,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outputs": self.outputs,
            "toolchain": self.toolchain,
        }

    def write(self, path: str) -> str:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path

    @staticmethod
    def load(path: str) -> "Manifest":
        with open(path) as fh:
            d = json.load(fh)
        if d.get("version") != MANIFEST_VERSION:
            raise DomainError(f"unsupported manifest version {d.get('version')}")
        m = Manifest(experiment=d["experiment"], parameters=d["parameters"],
                     master_seed=d["master_seed"],
                     worker_streams=d["worker_streams"],
                     started_at=d["started_at"], finished_at=d["finished_at"],
                     outputs=d["outputs"], toolchain=d["toolchain"])
        return m


def verify_outputs(manifest: Manifest) -> dict:
    """Re-hash the manifest's outputs; returns {path: matches_bool}."""
    return {p: sha256_file(p) == h for p, h in manifest.outputs.items()}
