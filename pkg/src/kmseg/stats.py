"""Region statistics (average, standard deviation, coefficient of variance)
and side-by-side comparison of two runs, with CSV/SVG chart output."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

WHOLE_IMAGE = "whole-image"
STD_MODES = ("population", "sample")
STATISTICS = ("average", "std_dev", "coeff_var")


class StatsError(ValueError):
    pass


def coefficient_of_variance(average, std_dev):
    """Percent ratio 100 * std_dev / average, or ``None`` when average is 0."""
    if average == 0:
        return None
    return 100.0 * std_dev / average


@dataclass(frozen=True)
class RegionStats:
    region_id: object
    n: int
    average: float
    std_dev: float
    coeff_var: float | None
    std_mode: str = "population"

    @classmethod
    def from_summary(cls, average, std_dev, n=1, region_id=WHOLE_IMAGE, std_mode="population"):
        """Stats from already-known average and standard deviation."""
        return cls(region_id, n, float(average), float(std_dev),
                   coefficient_of_variance(average, std_dev), std_mode)

    def to_json(self):
        return {
            "region_id": self.region_id,
            "n": self.n,
            "average": self.average,
            "std_dev": self.std_dev,
            "coeff_var": self.coeff_var,
            "std_mode": self.std_mode,
        }

    @classmethod
    def from_json(cls, obj):
        try:
            cv = obj["coeff_var"]
            return cls(obj.get("region_id", WHOLE_IMAGE), int(obj["n"]),
                       float(obj["average"]), float(obj["std_dev"]),
                       None if cv is None else float(cv),
                       obj.get("std_mode", "population"))
        except (KeyError, TypeError, ValueError) as exc:
            raise StatsError(f"invalid stats record: {exc}") from None


def compute_stats(image, mask=None, region=None, std_mode="population"):
    """Statistics of the pixels of ``image``, optionally restricted to the
    pixels whose label in ``mask`` equals ``region``.

    Sums are accumulated as exact integers so the result does not depend on
    traversal order.
    """
    if std_mode not in STD_MODES:
        raise StatsError(f"unknown std_mode {std_mode!r}")
    pixels = image.pixels if hasattr(image, "pixels") else np.asarray(image)
    pixels = np.asarray(pixels, dtype=np.int64)
    if region is not None:
        if mask is None:
            raise StatsError("region requires a mask")
        labels = mask.labels if hasattr(mask, "labels") else np.asarray(mask)
        if labels.shape != pixels.shape:
            raise StatsError("mask dimensions do not match image")
        k = getattr(mask, "k", None)
        if region < 0 or (k is not None and region >= k):
            raise StatsError(f"region {region} out of range")
        selected = pixels[labels == region]
        region_id = int(region)
    else:
        selected = pixels.reshape(-1)
        region_id = WHOLE_IMAGE
    n = int(selected.size)
    if n == 0:
        raise StatsError("empty region")
    if std_mode == "sample" and n == 1:
        raise StatsError("sample std undefined for n=1")
    s1 = int(selected.sum())
    s2 = int(np.dot(selected, selected))
    mean = Fraction(s1, n)
    ss = Fraction(s2 * n - s1 * s1, n)  # sum of squared deviations
    var = ss / (n if std_mode == "population" else n - 1)
    average = float(mean)
    std_dev = math.sqrt(var)
    return RegionStats(region_id, n, average, std_dev,
                       coefficient_of_variance(average, std_dev), std_mode)


@dataclass(frozen=True)
class ComparisonReport:
    left_label: str
    right_label: str
    left: RegionStats
    right: RegionStats
    verdict: str  # "left", "right", "equal" or "incomparable"

    @property
    def rows(self):
        return [(name, getattr(self.left, name), getattr(self.right, name))
                for name in STATISTICS]

    @property
    def lower_cv_label(self):
        """Label of the side with the lower coefficient of variance, if any."""
        return {"left": self.left_label, "right": self.right_label}.get(self.verdict)

    def to_json(self):
        return {
            "left_label": self.left_label,
            "right_label": self.right_label,
            "rows": [{"statistic": s, "left": a, "right": b} for s, a, b in self.rows],
            "verdict": self.verdict,
            "lower_cv": self.lower_cv_label,
        }


def compare_runs(a, b, labels=("left", "right")):
    left_label, right_label = labels
    if a.coeff_var is None or b.coeff_var is None:
        verdict = "incomparable"
    elif a.coeff_var < b.coeff_var:
        verdict = "left"
    elif b.coeff_var < a.coeff_var:
        verdict = "right"
    else:
        verdict = "equal"
    return ComparisonReport(left_label, right_label, a, b, verdict)


def _fmt(value):
    return "undefined" if value is None else repr(float(value))


def emit_chart(report, format):
    """Render a comparison as a CSV table or an SVG grouped bar chart."""
    if format == "csv":
        return _chart_csv(report)
    if format == "svg":
        return _chart_svg(report)
    raise StatsError(f"unknown chart format {format!r}")


def _chart_csv(report):
    lines = [f"statistic,{report.left_label},{report.right_label}"]
    for name, a, b in report.rows:
        lines.append(f"{name},{_fmt(a)},{_fmt(b)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _esc(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


_COLORS = ("#4c72b0", "#dd8452")


def _chart_svg(report):
    width, height = 480, 300
    left, right, top, bottom = 50, 20, 30, 50
    plot_h = height - top - bottom
    group_w = (width - left - right) / len(STATISTICS)
    bar_w = group_w / 3
    values = [v for _, a, b in report.rows for v in (a, b) if v is not None]
    vmax = max([v for v in values if v > 0], default=1.0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{width - right}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for g, (name, a, b) in enumerate(report.rows):
        gx = left + g * group_w
        for s, value in enumerate((a, b)):
            v = max(value or 0.0, 0.0)
            h = plot_h * v / vmax
            x = gx + bar_w * (0.5 + s)
            out.append(
                f'<rect class="bar" x="{x:.3f}" y="{top + plot_h - h:.3f}" width="{bar_w:.3f}" '
                f'height="{h:.3f}" fill="{_COLORS[s]}"><title>{_esc(name)}: {_fmt(value)}</title></rect>')
        out.append(
            f'<text x="{gx + group_w / 2:.3f}" y="{top + plot_h + 18}" '
            f'text-anchor="middle" font-size="12">{_esc(name)}</text>')
    for s, label in enumerate((report.left_label, report.right_label)):
        lx = left + s * 120
        out.append(f'<rect x="{lx}" y="8" width="12" height="12" fill="{_COLORS[s]}"/>')
        out.append(f'<text x="{lx + 16}" y="18" font-size="12">{_esc(label)}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
