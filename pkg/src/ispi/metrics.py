"""Image-quality scores against the known object, and 8-bit display scaling.

The reconstructions carry an arbitrary scale and offset, so the headline
score is the Pearson correlation with the ground-truth mask, which ignores
both.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ispi.reconstruct import ReconImage
from ispi.scene import SceneMask


@dataclass(frozen=True)
class QualityReport:
    pearson_corr: float
    psnr_db: float
    mean_signal_region: float | None
    mean_background_region: float | None
    cnr: float | None

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.psnr_db):
            # JSON has no infinity literal
            d["psnr_db"] = "inf"
        return d


def _values(img) -> np.ndarray:
    if isinstance(img, ReconImage):
        return img.values.astype(np.float64)
    if isinstance(img, SceneMask):
        return img.mask.astype(np.float64)
    return np.asarray(img, dtype=np.float64).ravel()


def normalize_8bit(img) -> np.ndarray:
    """Min-max map to 0..255 (half away from zero); constant input gives 128.

    Returns a flat uint8 array; reshape with the image dimensions for display.
    """
    v = _values(img)
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.full(v.shape, 128, dtype=np.uint8)
    scaled = (v - lo) * (255.0 / (hi - lo))
    return np.floor(scaled + 0.5).astype(np.uint8)


def pearson_corr(img, truth) -> float:
    a = _values(img)
    b = _values(truth)
    if a.shape != b.shape:
        raise ValueError(f"size mismatch: {a.size} vs {b.size} pixels")
    a = a - a.mean()
    b = b - b.mean()
    den = math.sqrt(float(a @ a) * float(b @ b))
    if den == 0:
        raise ValueError("correlation is undefined for a constant image")
    return max(-1.0, min(1.0, float(a @ b) / den))


def psnr(ref: np.ndarray, cmp: np.ndarray, peak: float = 255.0) -> float:
    mse = np.mean((ref.astype(np.float64) - cmp.astype(np.float64)) ** 2)
    if mse == 0:
        return math.inf
    return float(10.0 * np.log10(peak**2 / mse))


def quality_report(img, truth: SceneMask) -> QualityReport:
    """Correlation, PSNR of the 8-bit renderings, region means and CNR.

    CNR and the region means are ``None`` when the mask has no transmitting
    or no opaque pixels (or the background is perfectly flat, for CNR).
    """
    v = _values(img)
    m = truth.mask.astype(bool)
    corr = pearson_corr(v, truth)
    p = psnr(normalize_8bit(truth), normalize_8bit(v))
    sig = float(v[m].mean()) if m.any() else None
    bg = float(v[~m].mean()) if (~m).any() else None
    cnr = None
    if sig is not None and bg is not None:
        sd = float(v[~m].std())
        if sd > 0:
            cnr = (sig - bg) / sd
    return QualityReport(corr, p, sig, bg, cnr)
