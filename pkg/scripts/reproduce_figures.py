#!/usr/bin/env python3
"""Reproduce every bundled figure preset through the CLI.

Writes CSV (and SVG) artifacts plus a manifest per preset under --out.
The heavy chain runs (fig2*, fig3) take a few seconds each; pass --only to
run a subset, e.g.:

    python scripts/reproduce_figures.py --out out/figures --only fig5a fig6c
"""

import argparse
import json
import sys
import tempfile
import time

from vibrolang.cli import main as cli_main

PRESETS = [
    "fig2c", "fig2d", "fig3",
    "fig4a", "fig4b", "fig4c", "fig4d",
    "fig5a", "fig5b", "fig5c",
    "fig6a", "fig6b", "fig6c",
]


def run(out_root, names, fmt, seed):
    failures = []
    for name in names:
        with tempfile.NamedTemporaryFile(
                "w", suffix=".json", delete=False) as fh:
            json.dump({"command": "preset", "name": name}, fh)
            cfg_path = fh.name
        argv = ["preset", "--config", cfg_path,
                "--out", f"{out_root}/{name}", "--format", fmt]
        if seed is not None:
            argv += ["--seed", str(seed)]
        t0 = time.time()
        rc = cli_main(argv)
        status = "ok" if rc == 0 else f"exit {rc}"
        print(f"{name}: {status} ({time.time() - t0:.1f}s)")
        if rc != 0:
            failures.append(name)
    return failures


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/figures")
    ap.add_argument("--format", default="csv+svg",
                    choices=["csv", "csv+svg"])
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--only", nargs="*", default=None,
                    help="subset of preset names (default: all)")
    args = ap.parse_args()
    names = args.only if args.only else PRESETS
    unknown = [n for n in names if n not in PRESETS]
    if unknown:
        sys.exit(f"unknown presets: {', '.join(unknown)}")
    bad = run(args.out, names, args.format, args.seed)
    sys.exit(1 if bad else 0)
