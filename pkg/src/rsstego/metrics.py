"""Image comparison metrics used to judge stego and attacked images."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ShapeMismatch
from .lsb import PixelImage

SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_SIGMA = 1.5
SSIM_WIN = 11
DATA_RANGE = 255.0
HAUSDORFF_THRESHOLD = 128
LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class FidelityReport:
    cover_loss: float
    csim: float
    mse: float
    psnr: float
    ssim: float
    vi: tuple[float, float]
    hdist: float
    nrmse: float

    def to_dict(self) -> dict:
        """Flat JSON-safe mapping; infinities become None."""

        def clean(v: float):
            return None if math.isinf(v) else float(v)

        return {
            "cover_loss": clean(self.cover_loss),
            "csim": clean(self.csim),
            "mse": clean(self.mse),
            "psnr": clean(self.psnr),
            "ssim": clean(self.ssim),
            "vi": [clean(self.vi[0]), clean(self.vi[1])],
            "hdist": clean(self.hdist),
            "nrmse": clean(self.nrmse),
            "params": {
                "data_range": DATA_RANGE,
                "ssim_k1": SSIM_K1,
                "ssim_k2": SSIM_K2,
                "ssim_window": SSIM_WIN,
                "ssim_sigma": SSIM_SIGMA,
                "vi_log_base": 2,
                "hausdorff_luma_threshold": HAUSDORFF_THRESHOLD,
            },
        }


def _check(a: PixelImage, b: PixelImage) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare images of shape {a.shape} and {b.shape}")


def mse(a: PixelImage, b: PixelImage) -> float:
    _check(a, b)
    d = a.samples.astype(np.float64) - b.samples.astype(np.float64)
    return float(np.mean(d * d))


def psnr(a: PixelImage, b: PixelImage) -> float:
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(DATA_RANGE**2 / err)


def cosine_similarity(a: PixelImage, b: PixelImage) -> float:
    _check(a, b)
    x = a.flat().astype(np.float64)
    y = b.flat().astype(np.float64)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        # two black images are identical; one black image has no direction
        return 1.0 if nx == ny else 0.0
    return float(np.dot(x, y) / (nx * ny))


def nrmse(a: PixelImage, b: PixelImage) -> float:
    """||a - b|| / ||a||, with ``a`` the reference."""
    _check(a, b)
    x = a.flat().astype(np.float64)
    d = x - b.flat().astype(np.float64)
    denom = np.linalg.norm(x)
    if denom == 0:
        return 0.0 if not d.any() else math.inf
    return float(np.linalg.norm(d) / denom)


def cover_loss(a: PixelImage, b: PixelImage) -> float:
    """Percentage of samples whose least significant bit differs."""
    _check(a, b)
    n = a.flat().size
    if n == 0:
        return 0.0
    return 100.0 * np.count_nonzero((a.flat() ^ b.flat()) & 1) / n


def _ssim_channel(x: np.ndarray, y: np.ndarray) -> float:
    c1 = (SSIM_K1 * DATA_RANGE) ** 2
    c2 = (SSIM_K2 * DATA_RANGE) ** 2
    truncate = ((SSIM_WIN - 1) / 2) / SSIM_SIGMA

    def blur(img):
        return ndimage.gaussian_filter(img, sigma=SSIM_SIGMA, truncate=truncate, mode="reflect")

    mx, my = blur(x), blur(y)
    vx = blur(x * x) - mx * mx
    vy = blur(y * y) - my * my
    cxy = blur(x * y) - mx * my
    s = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
    pad = (SSIM_WIN - 1) // 2
    if s.shape[0] > 2 * pad and s.shape[1] > 2 * pad:
        s = s[pad:-pad, pad:-pad]
    return float(s.mean())


def ssim(a: PixelImage, b: PixelImage) -> float:
    """Mean SSIM with a Gaussian window, averaged over channels."""
    _check(a, b)
    x = a.samples.astype(np.float64)
    y = b.samples.astype(np.float64)
    return float(np.mean([_ssim_channel(x[:, :, c], y[:, :, c]) for c in range(a.channels)]))


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def variation_of_information(a: PixelImage, b: PixelImage) -> tuple[float, float]:
    """``(H(a|b), H(b|a))`` in bits, treating sample values as labels."""
    _check(a, b)
    if a.flat().size == 0:
        return 0.0, 0.0
    joint = np.bincount(
        a.flat().astype(np.int64) * 256 + b.flat(), minlength=256 * 256
    ).reshape(256, 256)
    h_ab = _entropy(joint.ravel())
    h_a = _entropy(joint.sum(axis=1))
    h_b = _entropy(joint.sum(axis=0))
    # clamp tiny negative rounding residue
    return max(h_ab - h_b, 0.0), max(h_ab - h_a, 0.0)


def foreground(image: PixelImage) -> np.ndarray:
    """Boolean mask of pixels whose BT.601 luma exceeds the threshold."""
    s = image.samples.astype(np.float64)
    luma = s[:, :, 0] if image.channels == 1 else s @ LUMA
    return luma > HAUSDORFF_THRESHOLD


def _directed_hausdorff(src: np.ndarray, dst: np.ndarray) -> float:
    # distance from every pixel to the nearest dst pixel, maximized over src
    dist = ndimage.distance_transform_edt(~dst)
    return float(dist[src].max())


def hausdorff_distance(a: PixelImage, b: PixelImage) -> float:
    _check(a, b)
    fa, fb = foreground(a), foreground(b)
    if not fa.any() and not fb.any():
        return 0.0
    if not fa.any() or not fb.any():
        return math.inf
    return max(_directed_hausdorff(fa, fb), _directed_hausdorff(fb, fa))


def compare(a: PixelImage, b: PixelImage) -> FidelityReport:
    _check(a, b)
    return FidelityReport(
        cover_loss=cover_loss(a, b),
        csim=cosine_similarity(a, b),
        mse=mse(a, b),
        psnr=psnr(a, b),
        ssim=ssim(a, b),
        vi=variation_of_information(a, b),
        hdist=hausdorff_distance(a, b),
        nrmse=nrmse(a, b),
    )


def histogram(image: PixelImage) -> np.ndarray:
    """(channels, 256) array of exact value counts."""
    return np.stack(
        [np.bincount(image.samples[:, :, c].ravel(), minlength=256) for c in range(image.channels)]
    )
