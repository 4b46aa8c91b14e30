"""phi4-plot: render static figures from phi4 experiment outputs.

    phi4-plot --kind hist --in ftle.csv --out fig.png

Exit codes: 0 success, 2 bad arguments or schema mismatch, 1 other failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import KINDS, FigureSpec, plot
from .tables import SchemaError


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phi4-plot",
                                description="Figures from phi4 CSV tables "
                                            "and snapshot path files.")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="inputs", required=True, action="append",
                   help="input file (repeatable)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--seed", type=int, default=0, help="jitter seed")
    p.add_argument("--index", type=int, default=-1,
                   help="snapshot index for --kind snapshot (default: last)")
    p.add_argument("--title", default="")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          out=Path(args.out), seed=args.seed,
                          snapshot_index=args.index, title=args.title)
        out = plot(spec)
    except (SchemaError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
