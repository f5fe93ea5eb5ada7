"""plotview command line.

    plotview FIGURE_SPEC [FIGURE_SPEC ...] --out DIR

Renders each figure-spec file to a PNG under DIR.  Exit codes: 0 all
rendered, 1 spec/data error (message names the offending file, key, or
channel).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import MissingChannel, render
from .spec import SpecError, parse_figure_spec


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotview",
                                     description="render trace CSV figures")
    parser.add_argument("specs", nargs="+", help="figure-spec files")
    parser.add_argument("--out", default=".", help="output directory for images")
    args = parser.parse_args(argv)

    outdir = Path(args.out)
    for spec_path in args.specs:
        path = Path(spec_path)
        if not path.exists():
            print(f"error: spec file not found: {path}", file=sys.stderr)
            return 1
        try:
            spec = parse_figure_spec(path.read_text(encoding="utf-8"), source=str(path))
            target = render(spec, outdir)
        except (SpecError, MissingChannel) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
