"""Render figures from the CSV files the ar1chaos CLI writes.

The renderer is a pure CSV consumer: it never imports the simulation
package, so the two sides can only drift apart at the documented file
formats.  Output format follows the output path extension.  Rendering is
deterministic: fixed style, fixed layout, and the metadata fields that
would embed timestamps or tool versions are stripped per format.
"""

import argparse
import csv
import math
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["svg.hashsalt"] = "ar1chaos-figures"

# metadata keys whose default values are nondeterministic, per backend
_STRIP_METADATA = {
    ".png": {"Software": None},
    ".svg": {"Date": None},
    ".pdf": {"CreationDate": None, "Producer": None, "Creator": None},
}

_REQUIRED = {
    "trajectory": ("index", "y", "drift", "centered"),
    "histogram": ("bin_left", "bin_right", "count"),
    "ecdf": ("x", "f_emp", "f_normal"),
    "variance_curve": ("a1", "name", "variant", "value"),
}


def read_columns(path):
    """Read a CSV file into {column name: list of raw strings}."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        rows = list(reader)
    cols = {name: [row[i] for row in rows] for i, name in enumerate(header)}
    if not rows:
        raise ValueError(f"{path} has a header but no data rows")
    return cols


def _require(cols, kind):
    missing = [c for c in _REQUIRED[kind] if c not in cols]
    if missing:
        raise ValueError(
            f"{kind} input is missing columns {missing}; has {sorted(cols)}")


def normal_density(x):
    """Standard normal density; integrates to 1 (tested via trapezoids)."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def histogram_overlay(lefts, rights, counts, points=400):
    """Expected per-bin counts under N(0,1), as a smooth curve.

    Returns (xs, ys) where ys = total * width * density, so the curve is on
    the same vertical scale as the bars.
    """
    lefts = np.asarray(lefts, dtype=float)
    rights = np.asarray(rights, dtype=float)
    total = float(np.sum(np.asarray(counts, dtype=float)))
    width = float(np.mean(rights - lefts))
    xs = np.linspace(lefts.min(), rights.max(), points)
    return xs, total * width * normal_density(xs)


def render_trajectory(cols, ax):
    idx = np.array([int(v) for v in cols["index"]])
    y = np.array([float(v) for v in cols["y"]])
    drift = np.array([float(v) for v in cols["drift"]])
    ax.plot(idx, y, lw=1.2, color="#1f78b4", label="y")
    ax.plot(idx, drift, lw=1.0, ls="--", color="#33a02c", label="drift")
    have = [(i, float(v)) for i, v in zip(idx, cols["centered"]) if v != ""]
    if have:
        ax.plot([p[0] for p in have], [p[1] for p in have],
                lw=0.8, alpha=0.7, color="#e31a1c", label="centered")
    ax.set_xlabel("step")
    ax.set_ylabel("value")
    ax.legend(frameon=False)


def render_histogram(cols, ax):
    lefts = np.array([float(v) for v in cols["bin_left"]])
    rights = np.array([float(v) for v in cols["bin_right"]])
    counts = np.array([int(v) for v in cols["count"]])
    ax.bar(lefts, counts, width=rights - lefts, align="edge",
           color="#a6cee3", edgecolor="#1f78b4", lw=0.6, label="replications")
    xs, ys = histogram_overlay(lefts, rights, counts)
    ax.plot(xs, ys, color="#e31a1c", lw=1.4, label="normal reference")
    ax.set_xlabel("studentized statistic")
    ax.set_ylabel("count")
    ax.legend(frameon=False)


def render_ecdf(cols, ax):
    x = np.array([float(v) for v in cols["x"]])
    f_emp = np.array([float(v) for v in cols["f_emp"]])
    f_norm = np.array([float(v) for v in cols["f_normal"]])
    ax.step(x, f_emp, where="post", lw=1.0, color="#1f78b4", label="empirical")
    ax.plot(x, f_norm, lw=1.2, color="#e31a1c", label="normal")
    ax.set_xlabel("studentized statistic")
    ax.set_ylabel("cumulative probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False, loc="upper left")


def render_variance_curve(cols, ax):
    # expects the grid form of the theory CSV, one limit_var row per
    # (a1, variant); the single-a1 form has no a1 column and is rejected
    series = {}
    for a1, name, variant, value in zip(
            cols["a1"], cols["name"], cols["variant"], cols["value"]):
        if name == "limit_var":
            series.setdefault(variant, []).append((float(a1), float(value)))
    if not series:
        raise ValueError("variance_curve input has no limit_var rows")
    colors = {"published": "#1f78b4", "corrected": "#e31a1c"}
    for variant in sorted(series):
        pts = sorted(series[variant])
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                marker="o", ms=3, lw=1.2,
                color=colors.get(variant), label=variant)
    ax.set_yscale("log")
    ax.set_xlabel("a1")
    ax.set_ylabel("limiting variance of sqrt(n) (Q_n - mean)")
    ax.legend(frameon=False)


_KINDS = {
    "trajectory": render_trajectory,
    "histogram": render_histogram,
    "ecdf": render_ecdf,
    "variance_curve": render_variance_curve,
}


def render(kind, cols, title=None):
    """Build the figure for one CSV; caller owns saving and closing."""
    _require(cols, kind)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    _KINDS[kind](cols, ax)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def save(fig, path, dpi):
    ext = "." + path.rsplit(".", 1)[-1].lower() if "." in path else ""
    kwargs = {"dpi": dpi}
    if ext in _STRIP_METADATA:
        kwargs["metadata"] = _STRIP_METADATA[ext]
    try:
        fig.savefig(path, **kwargs)
    finally:
        plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figure",
        description="Render a figure from an ar1chaos CSV file.")
    parser.add_argument("kind", choices=sorted(_KINDS),
                        help="which figure to draw")
    parser.add_argument("input_csv", help="CSV produced by the ar1chaos CLI")
    parser.add_argument("output_image",
                        help="output path; format from extension (png/svg/pdf)")
    parser.add_argument("--dpi", type=int, default=150,
                        help="raster resolution in dots per inch (default: 150)")
    parser.add_argument("--title", default=None,
                        help="optional figure title (default: none)")
    args = parser.parse_args(argv)
    try:
        cols = read_columns(args.input_csv)
        fig = render(args.kind, cols, title=args.title)
        save(fig, args.output_image, dpi=args.dpi)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
