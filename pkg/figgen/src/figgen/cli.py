"""``figgen --spec fig4.toml`` — render one or more figure specs.

Exit codes: 0 success, 1 I/O error, 2 invalid spec or input data.
"""

from __future__ import annotations

import argparse
import sys

from .render import render
from .spec import SpecError, load_spec


def cli_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figgen",
        description="Render benchmark figures (plus sidecar JSON) from harness CSVs",
    )
    parser.add_argument(
        "--spec", action="append", required=True, metavar="TOML",
        help="figure spec file; repeat for several figures",
    )
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        for path in args.spec:
            spec = load_spec(path)
            render(spec)
            print(f"wrote {spec.output} and {spec.sidecar_path}")
    except SpecError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())
