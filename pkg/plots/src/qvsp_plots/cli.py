"""Command line: render a figure spec to PNG + SVG."""

import argparse
import sys

import matplotlib.pyplot as plt

from . import __version__
from .figures import SchemaError, load_figure_spec, render_fig2, save_figure


def main(argv: list[str] | None = None) -> int:
    """Entry point; exit code 0 on success, 2 on spec/schema errors."""
    parser = argparse.ArgumentParser(
        prog="qvsp-plots",
        description="Render qvsp sweep CSVs into publication panels",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("--spec", required=True,
                        help="figure spec JSON file")
    args = parser.parse_args(argv)
    try:
        spec = load_figure_spec(args.spec)
        fig = render_fig2(spec)
        try:
            written = save_figure(fig, spec.output)
        finally:
            plt.close(fig)
    except SchemaError as exc:
        print(f"figure spec error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
