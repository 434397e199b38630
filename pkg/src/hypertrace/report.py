"""Report emission: deterministic CSV / text tables plus optional figures.

CSV values are printed with 17 significant digits and fixed row ordering,
so identical runs produce byte-identical files regardless of thread count.
Figures are rendered to files next to the delimited output; CSV consumers
that prefer their own plots can disable them.
"""

from __future__ import annotations

import csv
import io
import sys
from pathlib import Path

TRACE_HEADER = ["formula", "parameters", "spectral", "geometric",
                "abs_diff", "rel_diff", "tail_bound"]
ZETA_HEADER = ["s", "re_z", "im_z", "tail_bound"]
SPECTRUM_HEADER = ["length", "multiplicity"]
POLE_HEADER = ["nu", "m", "re_rho", "im_rho", "re_residue", "im_residue"]


def format_value(x) -> str:
    if isinstance(x, complex):
        if x.imag == 0.0:
            return f"{x.real:.17g}"
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def format_params(params: dict) -> str:
    return ";".join(f"{k}={format_value(v)}" for k, v in params.items())


def trace_report_row(report) -> list:
    return [report.formula, format_params(report.parameters),
            format_value(report.spectral_side), format_value(report.geometric_side),
            format_value(report.abs_diff), format_value(report.rel_diff),
            format_value(report.tail_bound)]


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_text(header, rows) -> str:
    cols = [header] + [[format_value(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(header))]
    lines = []
    for r in cols:
        lines.append("  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def emit(header, rows, out_path: str | None, fmt: str = "csv") -> str:
    text = render_csv(header, rows) if fmt == "csv" else render_text(header, rows)
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)
    return text


# ---------------------------------------------------------------------------
# figures


def _figure_path(out_path: str) -> Path:
    p = Path(out_path)
    return p.with_suffix(".png")


def render_figure(kind: str, header, rows, out_path: str) -> Path | None:
    """Render a diagnostic figure for the emitted table, saved next to it."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = _figure_path(out_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    try:
        if kind == "spectrum":
            lengths = [float(r[0]) for r in rows]
            mults = [int(r[1]) for r in rows]
            ax.stem(lengths, mults, basefmt=" ")
            ax.set_xlabel("geodesic length")
            ax.set_ylabel("oriented multiplicity")
            ax.set_title("primitive length spectrum")
        elif kind == "weyl":
            data = [r for r in rows if r[0] == "weyl_heat_trace"]
            invb = [1.0 / float(dict(p.split("=") for p in r[1].split(";"))["beta"])
                    for r in data]
            heat = [float(complex(r[2]).real) for r in data]
            lead = [float(complex(r[3]).real) for r in data]
            ax.plot(invb, heat, "o", label="heat trace (geometric side)")
            ax.plot(invb, lead, "-", label="Area/(4 pi beta)")
            ax.set_xlabel("1/beta")
            ax.set_ylabel("heat trace")
            ax.legend()
            ax.set_title("heat trace against 1/beta")
        elif kind == "poles":
            re = [float(r[2]) for r in rows]
            im = [float(r[3]) for r in rows]
            ax.plot(re, im, "x")
            ax.set_xlabel("Re rho")
            ax.set_ylabel("Im rho")
            ax.set_title("scattering poles")
            ax.grid(True, alpha=0.3)
        elif kind == "zeta":
            ss = [float(r[0]) for r in rows]
            vals = [abs(complex(float(r[1]), float(r[2]))) for r in rows]
            ax.plot(ss, vals, "o-")
            ax.set_xlabel("Re s")
            ax.set_ylabel("|Z(s)|")
            ax.set_title("zeta values")
        else:
            labels = [f"{r[0]}\n{r[1]}" for r in rows]
            diffs = [max(float(r[4]), 1e-18) for r in rows]
            ax.bar(range(len(rows)), diffs)
            ax.set_yscale("log")
            ax.set_xticks(range(len(rows)))
            ax.set_xticklabels(labels, fontsize=6, rotation=20)
            ax.set_ylabel("|spectral - geometric|")
            ax.set_title("two-sided agreement")
        fig.tight_layout()
        fig.savefig(path)
    finally:
        plt.close(fig)
    return path
