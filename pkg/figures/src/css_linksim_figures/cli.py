"""css-figures: batch renderer for sweep CSVs.

Usage: css-figures render --recipe recipe.toml --out figures/
Exit codes: 0 success, 2 bad arguments or recipe, 1 render failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .recipes import load_recipe
from .render import render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="css-figures")
    subs = parser.add_subparsers(dest="verb", required=True)
    p_render = subs.add_parser("render", help="render one recipe to SVG and PNG")
    p_render.add_argument("--recipe", type=Path, required=True)
    p_render.add_argument("--out", type=Path, required=True)
    p_render.add_argument(
        "--base-dir", type=Path, default=None, help="base for relative CSV paths"
    )
    args = parser.parse_args(argv)
    try:
        recipe = load_recipe(args.recipe, base_dir=args.base_dir)
    except (ValueError, KeyError, FileNotFoundError, OSError) as exc:
        print("recipe error: %s" % exc, file=sys.stderr)
        return 2
    try:
        svg, png = render(recipe, args.out)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print("render error: %s" % exc, file=sys.stderr)
        return 1
    print(svg)
    print(png)
    return 0


if __name__ == "__main__":
    sys.exit(main())
