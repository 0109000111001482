"""Render one panel spec, or every spec in a directory.

    chiralchain-figures render PANEL.toml [...] --data-root RUNS --out-dir IMG
    chiralchain-figures render-all PANELDIR --data-root RUNS --out-dir IMG

Exit codes: 0 success, 2 bad spec or schema mismatch (the offending file and
column are named on stderr).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .panels import PanelSchemaError, load_panel_spec, render_panel


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chiralchain-figures")
    sub = parser.add_subparsers(dest="command", required=True)

    one = sub.add_parser("render", help="render the given panel spec(s)")
    one.add_argument("specs", nargs="+", help="panel spec TOML file(s)")
    one.add_argument("--data-root", required=True, help="directory CSV paths resolve against")
    one.add_argument("--out-dir", required=True, help="directory for rendered images")

    every = sub.add_parser("render-all", help="render every *.toml in a directory")
    every.add_argument("panel_dir", help="directory of panel specs")
    every.add_argument("--data-root", required=True)
    every.add_argument("--out-dir", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "render":
        spec_paths = [Path(p) for p in args.specs]
    else:
        spec_paths = sorted(Path(args.panel_dir).glob("*.toml"))
        if not spec_paths:
            print(f"no panel specs in {args.panel_dir}", file=sys.stderr)
            return 2
    try:
        for path in spec_paths:
            spec = load_panel_spec(path)
            target = render_panel(spec, args.data_root, args.out_dir)
            print(f"rendered {path.name} -> {target}")
    except PanelSchemaError as exc:
        print(f"panel error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
