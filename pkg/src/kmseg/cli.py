"""Command-line front end: convert, segment, stats, compare, synth.

Exit codes: 0 success, 1 input/validation error, 2 oracle mismatch.
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import kmeans, pipeline, stats

EXIT_OK, EXIT_INPUT, EXIT_ORACLE = 0, 1, 2

_IMAGE_SUFFIXES = {".pgm", ".pnm", ".png"}


class CliError(Exception):
    pass


def _kind(path):
    suffix = Path(path).suffix.lower()
    if suffix in _IMAGE_SUFFIXES:
        return "image"
    if suffix == ".txt":
        return "text"
    if suffix == ".csv":
        return "csv"
    raise CliError(f"cannot tell format of {path} (use .pgm/.png, .txt or .csv)")


def _dump_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_convert(args):
    src, dst = _kind(args.input), _kind(args.output)
    image = dataset = None
    if src == "image":
        image = pipeline.read_image(args.input)
    else:
        data = Path(args.input).read_bytes()
        parse = pipeline.parse_text if src == "text" else pipeline.parse_csv
        dataset = parse(data)

    if dst == "image":
        if image is None:
            image = dataset.to_image()
        pipeline.write_image(image, args.output, binary=not args.ascii)
        shape = (image.height, image.width)
    else:
        if dataset is None:
            dataset = pipeline.PixelDataset.from_image(image)
        out = dataset.to_text() if dst == "text" else dataset.to_csv()
        Path(args.output).write_bytes(out)
        shape = dataset.shape()
    print(f"rows x columns: {shape[0]} x {shape[1]}")
    return EXIT_OK


def _segment_outputs(args):
    prefix = args.out or str(Path(args.input).with_suffix(""))
    return (Path(prefix + "_seg.pgm"), Path(prefix + "_labels.pgm"),
            Path(prefix + "_report.json"))


def cmd_segment(args):
    image = pipeline.read_image(args.input)
    fi, centroids, assignment, report, labels = kmeans.cluster_image(
        image, args.k, args.max_iters, args.m_plus_one)
    rendered = kmeans.render_segmented(labels, centroids, fi.shift, image.depth)
    seg_path, labels_path, report_path = _segment_outputs(args)
    pipeline.write_image(rendered, seg_path)
    pipeline.write_image(labels.to_image(), labels_path)

    doc = {
        "input": Path(args.input).name,
        "width": image.width,
        "height": image.height,
        "k": args.k,
        "m": fi.m,
        "m_plus_one": args.m_plus_one,
        "shift": fi.shift,
        "centroids": [c + fi.shift for c in centroids.tolist()],
        "centroids_shifted": centroids.tolist(),
        "cluster_sizes": np.bincount(labels.labels.reshape(-1), minlength=args.k).tolist(),
        "iterations": report.iterations,
        "converged": report.converged,
        "dispersion_trace": report.dispersion_trace,
        "warnings": report.warnings,
    }
    status = EXIT_OK
    if args.oracle:
        o_centroids, o_labels, o_iters, o_conv = kmeans.lloyd_oracle(
            fi, args.k, args.max_iters, args.m_plus_one)
        same_labels = np.array_equal(o_labels, labels.labels.reshape(-1))
        max_diff = float(np.max(np.abs(o_centroids.values - centroids.values)))
        agree = bool(same_labels and max_diff <= 1e-9)
        doc["oracle"] = {"agree": agree, "labels_identical": bool(same_labels),
                         "max_centroid_diff": max_diff, "iterations": o_iters,
                         "converged": o_conv}
        if not agree:
            status = EXIT_ORACLE
    _dump_json(doc, report_path)

    print(f"{image.height} x {image.width} image, k={args.k}, "
          f"{report.iterations} iterations, converged={report.converged}")
    print(f"{'cluster':>7}  {'centroid':>12}  {'pixels':>8}")
    for j, (c, size) in enumerate(zip(doc["centroids"], doc["cluster_sizes"])):
        print(f"{j:>7}  {c:>12.4f}  {size:>8}")
    for msg in report.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    if args.oracle:
        print(f"oracle: {'agree' if doc['oracle']['agree'] else 'MISMATCH'}")
    print(f"wrote {seg_path}, {labels_path}, {report_path}")
    return status


def cmd_stats(args):
    image = pipeline.read_image(args.input)
    mask = None
    if args.mask:
        m_img = pipeline.read_image(args.mask)
        if (m_img.width, m_img.height) != (image.width, image.height):
            raise CliError("mask dimensions do not match image")
        mask = kmeans.LabelMap(m_img.pixels.astype(np.int32), int(m_img.pixels.max()) + 1)
    if args.region is not None and mask is None:
        raise CliError("--region requires --mask")
    result = stats.compute_stats(image, mask, args.region, args.std_mode)
    doc = result.to_json()
    if args.out:
        _dump_json(doc, args.out)
        cv = "undefined" if result.coeff_var is None else f"{result.coeff_var:.4f}"
        print(f"region {result.region_id}: n={result.n} average={result.average:.4f} "
              f"std_dev={result.std_dev:.4f} coeff_var={cv}")
    else:
        print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def _load_stats(path):
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON: {exc}") from None
    return stats.RegionStats.from_json(obj)


def cmd_compare(args):
    a, b = _load_stats(args.left), _load_stats(args.right)
    labels = args.labels or (Path(args.left).stem, Path(args.right).stem)
    report = stats.compare_runs(a, b, labels)
    print(f"{'statistic':<10}  {labels[0]:>14}  {labels[1]:>14}")
    for name, x, y in report.rows:
        fx = "undefined" if x is None else f"{x:.4f}"
        fy = "undefined" if y is None else f"{y:.4f}"
        print(f"{name:<10}  {fx:>14}  {fy:>14}")
    if report.lower_cv_label is not None:
        print(f"verdict: {report.lower_cv_label} has the lower coefficient of variance")
    else:
        print(f"verdict: {report.verdict}")
    if args.out:
        _dump_json(report.to_json(), args.out)
    if args.chart:
        chart_path = Path(args.chart_out or f"comparison.{args.chart}")
        chart_path.write_bytes(stats.emit_chart(report, args.chart))
        print(f"wrote {chart_path}")
    return EXIT_OK


def _region(text):
    try:
        x, y, w, h, v = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected x,y,w,h,intensity") from None
    return (x, y, w, h), v


def cmd_synth(args):
    image = pipeline.make_synthetic(args.width, args.height, args.region or [],
                                    args.noise, args.seed, args.depth)
    pipeline.write_image(image, args.output, binary=not args.ascii)
    print(f"rows x columns: {image.height} x {image.width}")
    return EXIT_OK


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser():
    p = argparse.ArgumentParser(prog="kmseg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convert", help="image <-> text dataset <-> CSV")
    c.add_argument("input")
    c.add_argument("output")
    c.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    c.set_defaults(func=cmd_convert)

    s = sub.add_parser("segment", help="k-means segmentation of a grayscale image")
    s.add_argument("input")
    s.add_argument("--out", help="output prefix (default: input path without suffix)")
    s.add_argument("--k", type=_positive, default=kmeans.DEFAULT_K)
    s.add_argument("--max-iters", type=_positive, default=kmeans.DEFAULT_MAX_ITERS)
    s.add_argument("--m-plus-one", action="store_true",
                   help="use max level + 1 in the initial centroid spacing")
    s.add_argument("--oracle", action="store_true",
                   help="cross-check against per-pixel Lloyd iteration")
    s.set_defaults(func=cmd_segment)

    st = sub.add_parser("stats", help="average, std dev and coefficient of variance")
    st.add_argument("input")
    st.add_argument("--mask", help="label map written by segment")
    st.add_argument("--region", type=int)
    st.add_argument("--std-mode", choices=stats.STD_MODES, default="population")
    st.add_argument("--out", help="write JSON here instead of stdout")
    st.set_defaults(func=cmd_stats)

    cm = sub.add_parser("compare", help="compare two stats JSON files")
    cm.add_argument("left")
    cm.add_argument("right")
    cm.add_argument("--labels", nargs=2, metavar=("LEFT", "RIGHT"))
    cm.add_argument("--chart", choices=("csv", "svg"))
    cm.add_argument("--chart-out")
    cm.add_argument("--out", help="write the comparison report as JSON")
    cm.set_defaults(func=cmd_compare)

    sy = sub.add_parser("synth", help="generate a synthetic test image")
    sy.add_argument("output")
    sy.add_argument("--width", type=_positive, required=True)
    sy.add_argument("--height", type=_positive, required=True)
    sy.add_argument("--region", type=_region, action="append",
                    help="x,y,w,h,intensity (repeatable; later wins)")
    sy.add_argument("--noise", type=int, default=0)
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--depth", type=int, choices=(255, 65535), default=255)
    sy.add_argument("--ascii", action="store_true")
    sy.set_defaults(func=cmd_synth)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
