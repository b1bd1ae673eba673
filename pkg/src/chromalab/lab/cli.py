"""Command-line front end.

Exit codes: 0 success, 2 domain error, 3 budget exhausted, 64 usage.
Global flags can also come from a JSON config file (``--config``) or
environment variables (``CHROMALAB_OUT``, ``CHROMALAB_FORMAT``,
``CHROMALAB_THREADS``, ``CHROMALAB_BUDGET_MS``); precedence is
flag > environment > config file > default.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .. import asymptotics, coupling, graphcore, poisson
from ..errors import BudgetExhausted, DomainError
from . import experiments
from .manifest import Manifest

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64

_ENV_PREFIX = "CHROMALAB_"
_GLOBAL_DEFAULTS = {"out": None, "format": "json", "threads": 1,
                    "budget_ms": 10_000}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    p = _Parser(prog="chromalab",
                description="Random-graph laboratory: asymptotic formulas, "
                            "Poisson machinery, conditioned couplings, and "
                            "chromatic-number experiments at desk scale.")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=None,
                   help="tabular output format (default json)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker count (results are independent of it)")
    p.add_argument("--budget-ms", type=int, default=None, dest="budget_ms",
                   help="wall-clock budget per exact solve")
    p.add_argument("--config", help="JSON config file mirroring the flags")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("profile", help="asymptotic profile at n")
    s.add_argument("n", type=int)

    s = sub.add_parser("find-band", help="smallest n >= N with x in (c1, c2)")
    s.add_argument("c1", type=float)
    s.add_argument("c2", type=float)
    s.add_argument("N", type=int)

    s = sub.add_parser("fgap", help="first-moment gap vs its prediction at n")
    s.add_argument("n", type=int)

    s = sub.add_parser("ybound", help="non-planted a-set expectation bound")
    s.add_argument("n", type=int)
    s.add_argument("A", type=int)

    s = sub.add_parser("ledger", help="non-concentration bookkeeping from n1")
    s.add_argument("c", type=float)
    s.add_argument("n1", type=int)

    s = sub.add_parser("poisson-shift", help="shifted tail-mass certificate")
    s.add_argument("lam", type=float)
    s.add_argument("eps", type=float)
    s.add_argument("set", help="integer set: 'tail:S' for the upper tail "
                               "beyond lam+S*sqrt(lam), or 'lo-hi[,lo-hi...]' "
                               "with 'inf' allowed as hi")

    s = sub.add_parser("sample", help="sample one fair-coin graph")
    s.add_argument("n", type=int)
    s.add_argument("seed", type=int)

    s = sub.add_parser("xk-dist", help="independent k-set count distribution")
    s.add_argument("n", type=int)
    s.add_argument("k", type=int)
    s.add_argument("samples", type=int)
    s.add_argument("seed", type=int)

    s = sub.add_parser("couple", help="build and verify one conditioned pair")
    s.add_argument("n", type=int)
    s.add_argument("a", type=int)
    s.add_argument("A", type=int)
    s.add_argument("r", type=int)
    s.add_argument("seed", type=int)

    s = sub.add_parser("chi-interval", help="chromatic number spread")
    s.add_argument("n", type=int)
    s.add_argument("samples", type=int)
    s.add_argument("seed", type=int)

    s = sub.add_parser("replay", help="re-run a manifest and verify hashes")
    s.add_argument("manifest", help="path to a manifest JSON")
    s.add_argument("out_dir", help="directory for the fresh outputs")

    return p


def _resolve_globals(args) -> dict:
    cfg = dict(_GLOBAL_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        for k in cfg:
            if k in file_cfg:
                cfg[k] = file_cfg[k]
    for k in cfg:
        env = os.environ.get(_ENV_PREFIX + k.upper())
        if env is not None:
            cfg[k] = int(env) if k in ("threads", "budget_ms") else env
    for k in cfg:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _parse_intset(text: str, lam: float) -> poisson.IntSet:
    if text.startswith("tail:"):
        s = float(text[5:])
        return poisson.IntSet.upper_tail(int(lam + s * lam ** 0.5) + 1)
    ivals = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        ivals.append((int(lo), None if hi in ("inf", "") else int(hi)))
    return poisson.IntSet.of(*ivals)


def _emit(obj: dict, cfg: dict) -> None:
    if cfg["format"] == "csv" and all(not isinstance(v, (dict, list))
                                      for v in obj.values()):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(obj.keys())
        w.writerow(obj.values())
        text = buf.getvalue()
    else:
        text = json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args, cfg) -> int:
    cmd = args.command
    if cmd == "profile":
        _emit(asymptotics.profile(args.n).to_json(), cfg)
    elif cmd == "find-band":
        n = asymptotics.find_n_in_band(args.c1, args.c2, args.N)
        _emit({"n": n, "profile": asymptotics.profile(n).to_json()}, cfg)
    elif cmd == "fgap":
        _emit(asymptotics.f_gap(args.n).to_json(), cfg)
    elif cmd == "ybound":
        _emit(asymptotics.y_bound(args.n, args.A).to_json(), cfg)
    elif cmd == "ledger":
        _emit(asymptotics.ledger(args.c, args.n1).to_json(), cfg)
    elif cmd == "poisson-shift":
        B = _parse_intset(args.set, args.lam)
        _emit(poisson.shifted_mass_check(args.lam, B, args.eps).to_json(), cfg)
    elif cmd == "sample":
        G = graphcore.sample_gnp_half(args.n, args.seed)
        if cfg["out"]:
            with open(cfg["out"], "wb") as fh:
                fh.write(G.to_bytes())
            _emit({"n": args.n, "seed": args.seed, "edges": G.edge_count(),
                   "hash": G.adjacency_hash(), "path": cfg["out"]},
                  {**cfg, "out": None})
        else:
            _emit({"n": args.n, "seed": args.seed, "edges": G.edge_count(),
                   "hash": G.adjacency_hash()}, cfg)
    elif cmd == "xk-dist":
        out_dir = os.path.dirname(cfg["out"]) or "." if cfg["out"] else "."
        rep = experiments.xk_distribution_experiment(
            args.n, args.k, args.samples, args.seed, out_dir=out_dir)
        _emit(rep.to_json(), cfg)
    elif cmd == "couple":
        pair = coupling.build_conditioned_pair(args.n, args.a, args.A, args.r,
                                               args.seed)
        gap = coupling.verify_chi_gap(pair, budget_ms=cfg["budget_ms"])
        summary = {"pair": pair.to_sidecar_json(), "chi_gap": gap.to_json()}
        if cfg["out"]:
            coupling.save_pair(pair, cfg["out"])
            summary["files"] = [cfg["out"] + ".graph", cfg["out"] + ".json"]
        _emit(summary, {**cfg, "out": None})
    elif cmd == "chi-interval":
        out_dir = os.path.dirname(cfg["out"]) or "." if cfg["out"] else "."
        rep = experiments.chi_interval_experiment(
            args.n, args.samples, args.seed, budget_ms=cfg["budget_ms"],
            out_dir=out_dir)
        _emit(rep.to_json(), cfg)
    elif cmd == "replay":
        result = experiments.replay(args.manifest, args.out_dir)
        _emit({"identical": all(result.values()), "files": result}, cfg)
        if not all(result.values()):
            return EXIT_DOMAIN
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    try:
        cfg = _resolve_globals(args)
        return _run(args, cfg)
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except BudgetExhausted as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    raise SystemExit(main())
