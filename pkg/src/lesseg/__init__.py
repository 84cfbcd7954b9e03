"""Event segmentation of time series via wavelet scattering and spectral clustering."""

from .baselines import (
    SaxParams,
    WarpPath,
    dtw,
    dtw_wavelet,
    fastdtw,
    paa,
    sax_mindist,
    sax_word,
)
from .events import EventSequence, annotate_signal, levenshtein, to_event_sequence
from .graph import AffinityGraph, DegenerateSignalError, build_graph
from .harness import (
    BenchReport,
    DistanceMatrix,
    Separation,
    batch_segment,
    bench_scaling,
    class_separation,
    distance_matrix,
    label_agreement,
)
from .pipeline import METRICS, LessResult, RunConfig, less, represent
from .scattering import (
    ScatterParams,
    ScatterRepresentation,
    build_filter_bank,
    scatter_1d,
    scatter_multivariate,
)
from .signal_io import (
    SignalError,
    TimeSeries,
    add_gaussian_noise,
    load_csv,
    load_signal,
    load_wav,
    synth_composite,
    synth_ecg,
)
from .spectral import (
    FrameLabels,
    LaplacianEmbedding,
    SegmentConfig,
    embed,
    kmeans,
    normalized_laplacian,
    segment,
)

__version__ = "0.1.0"

__all__ = [
    "METRICS",
    "AffinityGraph",
    "BenchReport",
    "DegenerateSignalError",
    "DistanceMatrix",
    "EventSequence",
    "FrameLabels",
    "LaplacianEmbedding",
    "LessResult",
    "RunConfig",
    "SaxParams",
    "ScatterParams",
    "ScatterRepresentation",
    "SegmentConfig",
    "Separation",
    "SignalError",
    "TimeSeries",
    "WarpPath",
    "add_gaussian_noise",
    "annotate_signal",
    "batch_segment",
    "bench_scaling",
    "build_filter_bank",
    "build_graph",
    "class_separation",
    "distance_matrix",
    "dtw",
    "dtw_wavelet",
    "embed",
    "fastdtw",
    "kmeans",
    "label_agreement",
    "less",
    "levenshtein",
    "load_csv",
    "load_signal",
    "load_wav",
    "normalized_laplacian",
    "paa",
    "represent",
    "sax_mindist",
    "sax_word",
    "scatter_1d",
    "scatter_multivariate",
    "segment",
    "synth_composite",
    "synth_ecg",
    "to_event_sequence",
]
