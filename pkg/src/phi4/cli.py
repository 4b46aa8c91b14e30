"""Command-line entry point.

Verbs: simulate | stationary | ftle | sweep | steer | wick-check | besov.
Global flags ``--config PATH --out DIR --workers K --seed S`` apply to every
verb; command-line values override the config file, and ``PHI4_WORKERS`` is
the fallback for ``--workers``.  Exit codes: 0 success, 1 runtime failure,
2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import ConfigError, dispatch, parse_spec


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="phi4",
        description="Spectral simulator for the renormalized cubic stochastic "
                    "heat equation on the torus: stationary sampling, "
                    "finite-time Lyapunov exponents, and rate steering.")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--workers", type=int, help="worker processes "
                   "(overrides config and PHI4_WORKERS)")
    p.add_argument("--seed", type=int, help="base seed (overrides config)")

    sub = p.add_subparsers(dest="verb")
    for verb in ("simulate", "stationary", "sweep"):
        sp = sub.add_parser(verb)
        sp.add_argument("--alphas", help="comma-separated bifurcation parameters")
        sp.add_argument("--seeds", help="comma-separated seeds or START:STOP")

    sp = sub.add_parser("ftle")
    sp.add_argument("--in", dest="input", help="stored potential-path file")

    sp = sub.add_parser("steer")
    sp.add_argument("--alpha", type=float, help="bifurcation parameter")
    sp.add_argument("--lambdas", help="comma-separated target rates")

    sub.add_parser("wick-check")

    sp = sub.add_parser("besov")
    sp.add_argument("--in", dest="input", help="stored field file")
    sp.add_argument("--betas", help="comma-separated regularity indices")

    return p


def _parse_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


_LIST_FLAGS = ("--lambdas", "--alphas", "--betas", "--seeds")


def _join_list_values(argv: list[str]) -> list[str]:
    """Glue values like ``-5,-1,0`` onto their flag so argparse does not
    mistake the leading dash for an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LIST_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = _build_parser().parse_args(_join_list_values(list(argv)))

    doc = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}")
            return 2
        if not isinstance(doc, dict):
            print("config error: config root must be a JSON object")
            return 2

    if args.verb:
        doc["mode"] = args.verb
    if doc.get("mode") is None:
        print("config error: no verb given and no mode in config")
        return 2

    # verb-specific overrides
    if getattr(args, "alphas", None):
        doc["alphas"] = _parse_list(args.alphas)
    if getattr(args, "alpha", None) is not None:
        doc["alphas"] = [args.alpha]
        doc["alpha"] = args.alpha
    if getattr(args, "lambdas", None):
        doc["lambdas"] = _parse_list(args.lambdas)
    if getattr(args, "betas", None):
        doc["betas"] = _parse_list(args.betas)
    if getattr(args, "input", None):
        doc["input"] = args.input
    seeds = getattr(args, "seeds", None)
    if seeds:
        if ":" in seeds:
            start, stop = seeds.split(":", 1)
            doc["seeds"] = {"start": int(start), "stop": int(stop)}
        else:
            doc["seeds"] = [int(s) for s in seeds.split(",") if s.strip()]

    try:
        spec = parse_spec(doc, out_dir=args.out, workers=args.workers,
                          seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}")
        return 2
    return dispatch(spec)


if __name__ == "__main__":
    sys.exit(main())
