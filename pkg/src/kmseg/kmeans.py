"""Histogram k-means for grayscale intensities.

Intensities are shifted so the smallest maps to level 1, counted into a
histogram, and clustered level by level: every pixel of a level always lands
in the same cluster, so iterating over the (at most m) occupied levels with
their counts is an exact reformulation of per-pixel 1-D Lloyd iteration.
:func:`lloyd_oracle` is the per-pixel version kept for cross-checking.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .pipeline import GrayImage

DEFAULT_K = 5
DEFAULT_MAX_ITERS = 1000


class ShiftMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FlattenedIntensities:
    values: np.ndarray  # int64, row-major, all in [1, m]
    m: int
    shift: int

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class IntensityHistogram:
    counts: np.ndarray  # int64, length m + 1; counts[0] is always 0
    m: int
    total: int

    def __getitem__(self, level):
        if 0 <= level <= self.m:
            return int(self.counts[level])
        return 0

    def levels(self):
        """Occupied levels in increasing order."""
        return np.flatnonzero(self.counts)

    def as_dict(self):
        return {int(a): int(self.counts[a]) for a in self.levels()}

    @classmethod
    def from_counts(cls, counts):
        """Build from a ``{level: count}`` mapping."""
        if not counts:
            raise ValueError("empty input")
        m = max(counts)
        if min(counts) < 1:
            raise ValueError("levels must be >= 1")
        arr = np.zeros(m + 1, dtype=np.int64)
        for a, h in counts.items():
            if h < 0:
                raise ValueError("counts must be non-negative")
            arr[a] = h
        total = int(arr.sum())
        if total < 1:
            raise ValueError("empty input")
        return cls(arr, m, total)


@dataclass(frozen=True, eq=False)
class CentroidSet:
    values: np.ndarray  # float64, length k

    def __post_init__(self):
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("need at least one centroid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("centroids must be finite")

    @property
    def k(self):
        return self.values.shape[0]

    def tolist(self):
        return [float(v) for v in self.values]

    def __eq__(self, other):
        if not isinstance(other, CentroidSet):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class LevelAssignment:
    cluster_of: np.ndarray  # int32, length m + 1; -1 for unoccupied levels
    k: int

    def __getitem__(self, level):
        return int(self.cluster_of[level])

    def as_dict(self):
        return {int(a): int(self.cluster_of[a]) for a in np.flatnonzero(self.cluster_of >= 0)}

    def __eq__(self, other):
        if not isinstance(other, LevelAssignment):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.cluster_of, other.cluster_of)


@dataclass(frozen=True, eq=False)
class LabelMap:
    labels: np.ndarray  # int32, shape (height, width)
    k: int

    @property
    def width(self):
        return self.labels.shape[1]

    @property
    def height(self):
        return self.labels.shape[0]

    def to_image(self):
        """Label map as an image whose pixel values are the cluster indices."""
        return GrayImage(self.labels, depth=255 if self.k <= 256 else 65535)


@dataclass
class ConvergenceReport:
    iterations: int = 0
    converged: bool = False
    dispersion_trace: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def flatten_and_shift(image):
    """Row-major intensities shifted so the minimum becomes level 1."""
    flat = image.flat() if isinstance(image, GrayImage) else np.asarray(image, dtype=np.int64).reshape(-1)
    if flat.size == 0:
        raise ValueError("empty input")
    shift = int(flat.min()) - 1
    values = flat.astype(np.int64) - shift
    return FlattenedIntensities(values, int(values.max()), shift)


def build_histogram(fi):
    counts = kernels.count_levels(fi.values, fi.m)
    return IntensityHistogram(counts, fi.m, len(fi))


def init_centroids(k, m):
    """k equally spaced centroids (j+1)*m/(k+1), j = 0..k-1."""
    if k < 1:
        raise ValueError("k must be positive")
    if m < 1:
        raise ValueError("m must be positive")
    return CentroidSet(np.array([(j + 1) * m / (k + 1) for j in range(k)], dtype=np.float64))


def nearest_centroid(level, centroids):
    c = centroids.values if isinstance(centroids, CentroidSet) else np.asarray(centroids, dtype=np.float64)
    best = 0
    best_d = abs(level - c[0])
    for j in range(1, c.shape[0]):
        d = abs(level - c[j])
        if d < best_d:
            best, best_d = j, d
    return best


def assign_levels(hist, centroids):
    levels = hist.levels()
    cluster_of = np.full(hist.m + 1, -1, dtype=np.int32)
    cluster_of[levels] = kernels.nearest_labels(levels, centroids.values)
    return LevelAssignment(cluster_of, centroids.k)


def _moments(hist, assignment):
    s0, s1, s2 = kernels.cluster_moments(hist.counts, assignment.cluster_of, assignment.k)
    return [int(x) for x in s0], [int(x) for x in s1], [int(x) for x in s2]


def update_centroids(hist, assignment, previous, moments=None):
    """Count-weighted mean level of each cluster; empty clusters keep ``previous``."""
    s0, s1, _ = moments or _moments(hist, assignment)
    values = previous.values.copy()
    for i in range(previous.k):
        if s0[i]:
            # int / int is correctly rounded, so the result is order independent
            values[i] = s1[i] / s0[i]
    return CentroidSet(values)


def _dispersion(moments):
    # each non-empty cluster sits at its exact mean S1/S0, where
    # sum h*(a - mean)^2 = S2 - S1^2/S0; kept rational until the end
    s0, s1, s2 = moments
    total = Fraction(0)
    for n, a, b in zip(s0, s1, s2):
        if n:
            total += Fraction(b * n - a * a, n)
    return float(total)


def kmeans_converge(hist, k=DEFAULT_K, max_iters=DEFAULT_MAX_ITERS, m_plus_one=False):
    """Alternate assignment and update from the equally spaced init.

    Stops when two consecutive passes give the same level assignment or after
    ``max_iters`` passes. Returns ``(centroids, assignment, report)``.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    report = ConvergenceReport()
    distinct = int(np.count_nonzero(hist.counts))
    if k > distinct:
        report.warnings.append(
            f"k={k} exceeds the {distinct} distinct levels; surplus clusters stay empty")
    centroids = init_centroids(k, hist.m + 1 if m_plus_one else hist.m)
    previous = None
    for _ in range(max_iters):
        assignment = assign_levels(hist, centroids)
        report.iterations += 1
        moments = _moments(hist, assignment)
        if previous is not None and assignment == previous:
            report.converged = True
            report.dispersion_trace.append(report.dispersion_trace[-1])
            break
        centroids = update_centroids(hist, assignment, centroids, moments)
        report.dispersion_trace.append(_dispersion(moments))
        previous = assignment
    empty = [i for i in range(k) if moments[0][i] == 0]
    if empty and k <= distinct:
        report.warnings.append(f"empty clusters retained previous centroids: {empty}")
    for msg in report.warnings:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return centroids, assignment, report


def segment(image, centroids, shift):
    """Label every pixel with its nearest centroid in shifted space."""
    shifted = image.flat().astype(np.int64) - shift
    if shifted.size and shifted.min() < 1:
        raise ShiftMismatchError("shift mismatch")
    labels = kernels.nearest_labels(shifted, centroids.values)
    return LabelMap(labels.reshape(image.height, image.width), centroids.k)


def render_segmented(labels, centroids, shift, depth=255):
    """Replace each label by its centroid in original units (round half up)."""
    if labels.labels.size and labels.labels.max() >= centroids.k:
        raise ValueError("label out of range for centroid set")
    levels = np.floor(centroids.values + shift + 0.5)
    levels = np.clip(levels, 0, depth).astype(np.int64)
    return GrayImage(levels[labels.labels], depth)


def lloyd_oracle(fi, k=DEFAULT_K, max_iters=DEFAULT_MAX_ITERS, m_plus_one=False):
    """Brute-force per-pixel Lloyd iteration with the same init and tie rule.

    Deliberately shares no code with the histogram path beyond
    :func:`init_centroids`. Returns ``(centroids, labels, iterations, converged)``.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    values = np.asarray(fi.values, dtype=np.int64)
    c = init_centroids(k, fi.m + 1 if m_plus_one else fi.m).values.copy()
    x = values.astype(np.float64)
    labels = None
    iterations = 0
    converged = False
    for _ in range(max_iters):
        iterations += 1
        new = np.abs(x[:, None] - c[None, :]).argmin(axis=1)
        if labels is not None and np.array_equal(new, labels):
            converged = True
            break
        labels = new
        for j in range(k):
            members = values[labels == j]
            if members.size:
                c[j] = int(members.sum()) / int(members.size)
    return CentroidSet(c), labels, iterations, converged


def cluster_image(image, k=DEFAULT_K, max_iters=DEFAULT_MAX_ITERS, m_plus_one=False):
    """Run the full pipeline on an image.

    Returns ``(fi, centroids, assignment, report, labelmap)``.
    """
    fi = flatten_and_shift(image)
    hist = build_histogram(fi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        centroids, assignment, report = kmeans_converge(hist, k, max_iters, m_plus_one)
    labels = segment(image, centroids, fi.shift)
    return fi, centroids, assignment, report, labels
