"""Instant single-pixel imaging: pattern streams, bucket-detector simulation
and streaming differential ghost-imaging reconstruction."""

from ispi.forward import (
    BucketSample,
    DetectorModel,
    NoiseSpec,
    TimingSpec,
    bucket_measure,
    noise_sample,
    overlap,
    slow_noise_ratio,
)
from ispi.metrics import QualityReport, normalize_8bit, pearson_corr, quality_report
from ispi.patterns import DiffPattern, Pattern, PatternSpec, gen_pattern, gen_patterns, pattern_diff
from ispi.reconstruct import (
    IgiState,
    Mode,
    ReconImage,
    cgi_reconstruct,
    frame_split,
    igi_finalize,
    igi_init,
    igi_step,
)
from ispi.scene import SceneMask, Trajectory, make_letter_t, mask_at_time

__version__ = "0.1.0"

__all__ = [
    "BucketSample",
    "DetectorModel",
    "DiffPattern",
    "IgiState",
    "Mode",
    "NoiseSpec",
    "Pattern",
    "PatternSpec",
    "QualityReport",
    "ReconImage",
    "SceneMask",
    "TimingSpec",
    "Trajectory",
    "bucket_measure",
    "cgi_reconstruct",
    "frame_split",
    "gen_pattern",
    "gen_patterns",
    "igi_finalize",
    "igi_init",
    "igi_step",
    "make_letter_t",
    "mask_at_time",
    "noise_sample",
    "normalize_8bit",
    "overlap",
    "pattern_diff",
    "pearson_corr",
    "quality_report",
    "slow_noise_ratio",
]
