"""Histogram-accelerated 1-D k-means segmentation of grayscale images."""
from .kernels import BACKEND
from .kmeans import (
    CentroidSet,
    ConvergenceReport,
    FlattenedIntensities,
    IntensityHistogram,
    LabelMap,
    LevelAssignment,
    assign_levels,
    build_histogram,
    cluster_image,
    flatten_and_shift,
    init_centroids,
    kmeans_converge,
    lloyd_oracle,
    nearest_centroid,
    render_segmented,
    segment,
    update_centroids,
)
from .pipeline import (
    GrayImage,
    PixelDataset,
    csv_to_image,
    image_to_text,
    make_synthetic,
    read_image,
    text_to_csv,
    write_image,
)
from .stats import RegionStats, compare_runs, compute_stats, emit_chart

__version__ = "0.1.0"
