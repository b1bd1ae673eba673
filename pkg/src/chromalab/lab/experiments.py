"""Seeded, manifest-backed experiments.

Each experiment writes its tabular data as CSV (header row with units),
a JSON report, and a manifest with output hashes.  Sample i always uses
stream lane i of the master seed regardless of thread count, so results
are independent of parallelism and byte-reproducible on replay.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from collections import Counter
from dataclasses import dataclass

from .. import asymptotics, graphcore, poisson
from ..errors import BudgetExhausted, DomainError
from .manifest import Manifest, sha256_file

_FEASIBILITY_BUDGET_S = 1800.0   # projected whole-run wall-clock cap
_BLOCKS = 5                      # disjoint seed blocks for stability


def _write_json(path: str, obj: dict) -> str:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# Distribution of the independent k-set count


@dataclass(frozen=True)
class XkReport:
    n: int
    k: int
    mu: float
    samples: int
    counts: dict                 # value -> frequency
    tv: float
    block_tvs: tuple             # per seed block
    csv_path: str
    json_path: str
    manifest_path: str

    def to_json(self) -> dict:
        return {
            "n": self.n, "k": self.k, "mu": self.mu, "samples": self.samples,
            "counts": {str(v): c for v, c in sorted(self.counts.items())},
            "tv": self.tv, "block_tvs": list(self.block_tvs),
        }


def xk_distribution_experiment(n: int, k: int, samples: int, seed: int,
                               out_dir: str = ".") -> XkReport:
    """Empirical law of the independent k-set count of G(n,½) vs the
    Poisson law with the matching mean.

    A one-sample time probe projects the whole run; infeasible (n, k)
    aborts with guidance before burning the budget.  Samples are split
    over five disjoint seed blocks and a per-block TV is reported next
    to the pooled one.
    """
    if samples < 100:
        raise DomainError("samples >= 100 required")
    log2mu = asymptotics.log2_expected_ksets(n, k)
    # beyond mu ~ 10^6 even a single exact count enumerates too many sets
    # for the probe itself to be safe; k=2 (non-edge count) is exempt
    if k > 2 and log2mu > 20:
        raise DomainError(
            f"mu(n={n}, k={k}) ~ 2^{float(log2mu):.0f} is far too large; "
            "pick k nearer the independence number so the count is O(1)")
    mu = float(2.0 ** log2mu)

    t0 = time.perf_counter()
    G = graphcore.sample_gnp_half(n, seed, stream=0)
    graphcore.count_independent_ksets(G, k)
    probe = time.perf_counter() - t0
    if probe * samples > _FEASIBILITY_BUDGET_S:
        raise DomainError(
            f"projected runtime {probe * samples:.0f}s exceeds "
            f"{_FEASIBILITY_BUDGET_S:.0f}s at (n={n}, k={k}); "
            "reduce n, move k closer to the independence number, or cut samples")

    per_block = samples // _BLOCKS
    extra = samples - per_block * _BLOCKS
    values = []
    block_values = []
    stream = 0
    for b in range(_BLOCKS):
        m = per_block + (1 if b < extra else 0)
        block = []
        for _ in range(m):
            G = graphcore.sample_gnp_half(n, seed, stream=stream)
            block.append(graphcore.count_independent_ksets(G, k).count)
            stream += 1
        block_values.append(block)
        values.extend(block)

    spec = poisson.PoissonSpec(mu)
    pooled = poisson.tv_empirical(Counter(values), spec)
    block_tvs = tuple(poisson.tv_empirical(Counter(b), spec)
                      for b in block_values)

    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"xk_n{n}_k{k}_s{samples}_seed{seed}")
    csv_path = base + ".csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k_set_count [count]", "frequency [samples]"])
        for v, c in sorted(Counter(values).items()):
            w.writerow([v, c])

    report = XkReport(n=n, k=k, mu=mu, samples=samples,
                      counts=dict(Counter(values)),
                      tv=pooled,
                      block_tvs=block_tvs, csv_path=csv_path,
                      json_path=base + ".json", manifest_path=base + ".manifest.json")
    _write_json(report.json_path, report.to_json())
    man = Manifest(experiment="xk-dist",
                   parameters={"n": n, "k": k, "samples": samples,
                               "out_dir": out_dir},
                   master_seed=seed,
                   worker_streams=list(range(samples))).start()
    man.finish([csv_path, report.json_path]).write(report.manifest_path)
    return report


# ---------------------------------------------------------------------------
# Spread of the chromatic number


@dataclass(frozen=True)
class ChiIntervalReport:
    n: int
    samples: int
    budget_ms: int
    values: tuple                # exact chi per completed solve
    incomplete: int
    unreliable: bool             # > 20% of solves budget-exhausted
    minimum: int
    maximum: int
    quantiles: dict              # q -> value
    shortest_90_interval: tuple  # (lo, hi)
    mean: float
    f_n: float
    mean_over_f: float
    csv_path: str
    json_path: str
    manifest_path: str

    def to_json(self) -> dict:
        return {
            "n": self.n, "samples": self.samples, "budget_ms": self.budget_ms,
            "counts": {str(v): c for v, c in sorted(Counter(self.values).items())},
            "incomplete": self.incomplete, "unreliable": self.unreliable,
            "min": self.minimum, "max": self.maximum,
            "quantiles": {str(q): v for q, v in self.quantiles.items()},
            "shortest_90_interval": list(self.shortest_90_interval),
            "mean": self.mean, "f_n": self.f_n, "mean_over_f": self.mean_over_f,
            "note": "mean/f comparison is against an asymptotic formula; "
                    "the tolerance applied by callers is an artifact decision",
        }


def chi_interval_experiment(n: int, samples: int, seed: int,
                            budget_ms: int = 10_000,
                            out_dir: str = ".") -> ChiIntervalReport:
    """Empirical distribution of the chromatic number of G(n,½)."""
    if n > 80:
        raise DomainError("exact chromatic solves are feasible only to n <= 80")
    if samples < 50:
        raise DomainError("samples >= 50 required")

    values = []
    incomplete = 0
    for i in range(samples):
        G = graphcore.sample_gnp_half(n, seed, stream=i)
        res = graphcore.chromatic_number(G, budget_ms=budget_ms)
        if res.complete:
            values.append(res.value)
        else:
            incomplete += 1
    if not values:
        raise BudgetExhausted(f"all {samples} chromatic solves hit the budget",
                              attempts=samples, reason="budget")

    vs = sorted(values)
    m = len(vs)

    def q(p: float) -> int:
        return vs[min(m - 1, int(p * m))]

    quantiles = {p: q(p) for p in (0.05, 0.25, 0.5, 0.75, 0.95)}
    need = math.ceil(0.9 * m)
    best = (vs[0], vs[-1])
    for i in range(m - need + 1):
        lo, hi = vs[i], vs[i + need - 1]
        if hi - lo < best[1] - best[0]:
            best = (lo, hi)
    mean = sum(vs) / m
    fn = float(asymptotics.f(n))

    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"chi_n{n}_s{samples}_seed{seed}")
    csv_path = base + ".csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["chi [colors]", "frequency [samples]"])
        for v, c in sorted(Counter(vs).items()):
            w.writerow([v, c])

    report = ChiIntervalReport(
        n=n, samples=samples, budget_ms=budget_ms, values=tuple(vs),
        incomplete=incomplete, unreliable=incomplete > 0.2 * samples,
        minimum=vs[0], maximum=vs[-1], quantiles=quantiles,
        shortest_90_interval=best, mean=mean, f_n=fn, mean_over_f=mean / fn,
        csv_path=csv_path, json_path=base + ".json",
        manifest_path=base + ".manifest.json")
    _write_json(report.json_path, report.to_json())
    man = Manifest(experiment="chi-interval",
                   parameters={"n": n, "samples": samples,
                               "budget_ms": budget_ms, "out_dir": out_dir},
                   master_seed=seed,
                   worker_streams=list(range(samples))).start()
    man.finish([csv_path, report.json_path]).write(report.manifest_path)
    return report


# ---------------------------------------------------------------------------
# Replay


def replay(manifest_path: str, out_dir: str) -> dict:
    """Re-run the experiment a manifest describes and compare output
    hashes file-by-file (matched on basename).  Returns
    {filename: identical_bool}."""
    man = Manifest.load(manifest_path)
    params = dict(man.parameters)
    params["out_dir"] = out_dir
    if man.experiment == "xk-dist":
        xk_distribution_experiment(params["n"], params["k"], params["samples"],
                                   man.master_seed, out_dir=out_dir)
    elif man.experiment == "chi-interval":
        chi_interval_experiment(params["n"], params["samples"], man.master_seed,
                                budget_ms=params["budget_ms"], out_dir=out_dir)
    else:
        raise DomainError(f"manifest for unknown experiment {man.experiment!r}")
    result = {}
    for path, digest in man.outputs.items():
        fresh = os.path.join(out_dir, os.path.basename(path))
        result[os.path.basename(path)] = (
            os.path.exists(fresh) and sha256_file(fresh) == digest)
    return result
