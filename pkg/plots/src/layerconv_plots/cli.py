"""plots <kind> <csv> -o <image>

kinds: rates (sweep.csv), layer-profile (layer_profile.csv), embed (embed.csv).
PNG or SVG output, chosen by the image extension.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import CsvFormatError
from .figures import plot_embed, plot_layer, plot_rates

_KINDS = {
    "rates": plot_rates,
    "layer-profile": plot_layer,
    "embed": plot_embed,
}


def dispatch(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plots",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=sorted(_KINDS))
    parser.add_argument("csv", help="input CSV produced by the simulation harness")
    parser.add_argument("-o", "--out", required=True, help="output image path")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        _KINDS[args.kind](args.csv, args.out)
    except CsvFormatError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # rendering failure
        print(f"render failed: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


def main() -> None:
    sys.exit(dispatch())
