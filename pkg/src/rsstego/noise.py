"""Noise attacks on stego-images.

All models work on a copy normalized to [0, 1], then clip, rescale to
[0, 255] and round half up.  Randomness comes from a Philox counter-based
generator keyed by the attack seed, so results are reproducible.

Parameters are on the normalized scale: sigma = 0.63 is a heavy Gaussian
attack, and Poisson ``lam`` is a gain on the photon count
(``Poisson(lam * 255 * x) / (lam * 255)``), larger meaning milder.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidParams
from .lsb import PixelImage


class NoiseKind(str, enum.Enum):
    SALT_PEPPER = "salt-pepper"
    GAUSSIAN = "gaussian"
    SPECKLE = "speckle"
    POISSON = "poisson"


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind
    salt: float = 0.0
    pepper: float = 0.0
    mean: float = 0.0
    sigma: float = 0.0
    lam: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        values = (self.salt, self.pepper, self.mean, self.sigma, self.lam)
        if not all(math.isfinite(v) for v in values):
            raise InvalidParams("noise parameters must be finite")
        if not (0 <= self.salt <= 1 and 0 <= self.pepper <= 1 and self.salt + self.pepper <= 1):
            raise InvalidParams("salt and pepper probabilities must lie in [0, 1] and sum to <= 1")
        if self.sigma < 0:
            raise InvalidParams("sigma must be >= 0")
        if self.lam <= 0:
            raise InvalidParams("lam must be > 0")
        if not 0 <= self.seed < 2**64:
            raise InvalidParams("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


# named attack settings
PRESETS = {
    "salt-pepper-0.03": dict(kind=NoiseKind.SALT_PEPPER, salt=0.03, pepper=0.03),
    "gaussian-0.63": dict(kind=NoiseKind.GAUSSIAN, mean=0.0, sigma=0.63),
    "speckle-0.1": dict(kind=NoiseKind.SPECKLE, sigma=0.1),
    "poisson-0.9": dict(kind=NoiseKind.POISSON, lam=0.9),
}


def preset(name: str, seed: int = 0) -> NoiseSpec:
    try:
        return NoiseSpec(**PRESETS[name], seed=seed)
    except KeyError:
        raise InvalidParams(f"unknown noise preset {name!r}; choose from {sorted(PRESETS)}") from None


def apply_noise(image: PixelImage, spec: NoiseSpec) -> PixelImage:
    rng = np.random.Generator(np.random.Philox(spec.seed))
    x = image.samples.astype(np.float64) / 255.0

    if spec.kind is NoiseKind.SALT_PEPPER:
        u = rng.random(x.shape)
        out = x.copy()
        out[u < spec.salt] = 1.0
        out[(u >= spec.salt) & (u < spec.salt + spec.pepper)] = 0.0
    elif spec.kind is NoiseKind.GAUSSIAN:
        out = x + rng.normal(spec.mean, spec.sigma, x.shape)
    elif spec.kind is NoiseKind.SPECKLE:
        out = x + x * rng.normal(0.0, spec.sigma, x.shape)
    else:
        scale = spec.lam * 255.0
        out = rng.poisson(x * scale) / scale

    out = np.floor(np.clip(out, 0.0, 1.0) * 255.0 + 0.5)
    return PixelImage(out.astype(np.uint8))


def lsb_flip_rate(before: PixelImage, after: PixelImage, n_bits: int | None = None) -> float:
    """Fraction of the first ``n_bits`` samples (default all) whose LSB changed."""
    a = before.flat()
    b = after.flat()
    if n_bits is not None:
        a, b = a[:n_bits], b[:n_bits]
    if a.size == 0:
        return 0.0
    return float(np.count_nonzero((a ^ b) & 1)) / a.size
