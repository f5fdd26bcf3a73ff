"""Deterministic delimited reports with reproducibility headers.

Every report is plain text: `#`-prefixed header lines carrying the tool
version, input digest, seed, quadrature order, and the tolerance constants
in effect, followed by one delimited header row and data rows.  Floats are
printed with 17 significant digits so values round-trip exactly; nothing
time- or host-dependent is ever written, which keeps reruns byte-identical.
"""

import hashlib
import io
import sys

__all__ = ["TOOL_VERSION", "format_value", "input_digest", "report_text",
           "write_report", "render_plot"]

TOOL_VERSION = "0.1.0"


def format_value(v) -> str:
    """Serialize one cell: floats at 17 significant digits, rest as str."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def input_digest(data) -> str:
    """sha256 hex digest of a bytes payload or a file's contents."""
    if isinstance(data, bytes):
        return hashlib.sha256(data).hexdigest()
    if isinstance(data, str):
        return hashlib.sha256(data.encode("utf-8")).hexdigest()
    with open(data, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def report_text(headers: dict, columns, rows, delimiter: str = "\t") -> str:
    """Render a full report: `# key value` headers, column row, data rows."""
    out = io.StringIO()
    out.write(f"# tool hodgefill {TOOL_VERSION}\n")
    for key, val in headers.items():
        out.write(f"# {key} {format_value(val)}\n")
    out.write(delimiter.join(columns) + "\n")
    for row in rows:
        out.write(delimiter.join(format_value(v) for v in row) + "\n")
    return out.getvalue()


def write_report(text: str, out_path=None) -> None:
    """Write report text to a file, or to stdout when no path is given."""
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def render_plot(rows, columns, x_col: str, y_cols, path: str,
                logy: bool = False) -> str:
    """Render the named columns of a report to a figure file next to it.

    Returns the path written.  Uses the non-interactive backend so the
    call works headless; the data plotted is exactly the delimited output.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xi = columns.index(x_col)
    xs = [float(r[xi]) for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name in y_cols:
        yi = columns.index(name)
        ys = [float(r[yi]) for r in rows]
        ax.plot(xs, ys, marker="o", markersize=3, label=name)
    ax.set_xlabel(x_col)
    if logy:
        ax.set_yscale("log")
    if len(y_cols) > 1:
        ax.legend()
    else:
        ax.set_ylabel(y_cols[0])
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
