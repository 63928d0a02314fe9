"""Pure numpy implementations of the per-pixel kernels.

Semantics match ``_kernels.pyx`` bit for bit; the compiled module is
preferred when it imports.
"""
import numpy as np

# bounds the (chunk, k) distance temporary in nearest_labels
_CHUNK = 1 << 16


def count_levels(values, m):
    """Occurrence count of every level 0..m (index 0 is always empty)."""
    values = np.asarray(values, dtype=np.int64)
    if values.size and (values.min() < 0 or values.max() > m):
        raise ValueError("level out of range [0, m]")
    return np.bincount(values, minlength=m + 1).astype(np.int64)


def nearest_labels(values, centroids):
    """Index of the nearest centroid for each value, ties to the lowest index."""
    values = np.asarray(values, dtype=np.int64)
    c = np.asarray(centroids, dtype=np.float64)
    out = np.empty(values.shape[0], dtype=np.int32)
    for start in range(0, values.shape[0], _CHUNK):
        chunk = values[start:start + _CHUNK].astype(np.float64)
        d = np.abs(chunk[:, None] - c[None, :])
        # argmin returns the first minimum, which is the tie rule we need
        out[start:start + _CHUNK] = d.argmin(axis=1)
    return out


def cluster_moments(counts, cluster_of, k):
    """Per-cluster sums of h(a), a*h(a) and a*a*h(a) as int64 arrays.

    Levels with ``cluster_of == -1`` or zero count are skipped.
    """
    counts = np.asarray(counts, dtype=np.int64)
    cluster_of = np.asarray(cluster_of, dtype=np.int64)
    levels = np.arange(counts.shape[0], dtype=np.int64)
    keep = (cluster_of >= 0) & (counts > 0)
    idx = cluster_of[keep]
    h = counts[keep]
    a = levels[keep]
    s0 = np.zeros(k, dtype=np.int64)
    s1 = np.zeros(k, dtype=np.int64)
    s2 = np.zeros(k, dtype=np.int64)
    np.add.at(s0, idx, h)
    np.add.at(s1, idx, a * h)
    np.add.at(s2, idx, a * a * h)
    return s0, s1, s2
