"""Recurrence plots, recurrence networks and trend tests for detecting
regime shifts in daily price series."""

__version__ = "0.1.0"

from .embedding import (EmbeddedTrajectory, EmbeddingParams, autocorrelation,
                        embed, estimate_delay, fnn_dimension, fnn_fractions)
from .network import (RecurrenceNetwork, characteristic_path_length,
                      clustering_coefficient, local_clustering, to_network)
from .preprocess import (RawSeries, TimeSeries, detrend, forward_fill,
                         read_price_csv, uniform_deviate)
from .recurrence import (LineHistogram, RecurrenceMatrix, det,
                         diagonal_histogram, lam, recurrence_matrix,
                         vertical_histogram)
from .trend import (TrendResult, kendall_tau, mann_kendall,
                    mann_kendall_modified)
from .window import (MeasureSeries, WindowConfig, autocorr1_series,
                     gfc_preset, heatmap_table, short_preset,
                     sliding_windows, variance_series, windowed_measures)

__all__ = [
    "EmbeddedTrajectory",
    "EmbeddingParams",
    "autocorrelation",
    "embed",
    "estimate_delay",
    "fnn_dimension",
    "fnn_fractions",
    "RecurrenceNetwork",
    "characteristic_path_length",
    "clustering_coefficient",
    "local_clustering",
    "to_network",
    "RawSeries",
    "TimeSeries",
    "detrend",
    "forward_fill",
    "read_price_csv",
    "uniform_deviate",
    "LineHistogram",
    "RecurrenceMatrix",
    "det",
    "diagonal_histogram",
    "lam",
    "recurrence_matrix",
    "vertical_histogram",
    "TrendResult",
    "kendall_tau",
    "mann_kendall",
    "mann_kendall_modified",
    "MeasureSeries",
    "WindowConfig",
    "autocorr1_series",
    "gfc_preset",
    "heatmap_table",
    "short_preset",
    "sliding_windows",
    "variance_series",
    "windowed_measures",
]
