"""Least-significant-bit embedding and PNG I/O.

On-image layout: bit i of the framed stream lives in the LSB of sample i,
where samples are visited row by row, pixel by pixel, channel by channel
(the natural C order of an (h, w, c) array).  Only 8-bit grayscale and RGB
images are carriers; alpha channels are rejected so nobody has to guess
whether they carry payload.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import FrameError, InsufficientCapacity, InvalidParams, StegoIOError
from .payload import HEADER_BITS, read_header


@dataclass(frozen=True, eq=False)
class PixelImage:
    samples: np.ndarray  # (height, width, channels) uint8

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise InvalidParams(f"carrier must have 1 or 3 channels, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise InvalidParams(f"carrier samples must be uint8, got {arr.dtype}")
        object.__setattr__(self, "samples", arr)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.samples.shape

    def flat(self) -> np.ndarray:
        return self.samples.reshape(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PixelImage):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.samples, other.samples)


def capacity(image: PixelImage) -> int:
    return image.width * image.height * image.channels


def embed(cover: PixelImage, bits: np.ndarray) -> PixelImage:
    bits = np.asarray(bits, dtype=np.uint8)
    available = capacity(cover)
    if bits.size > available:
        raise InsufficientCapacity(int(bits.size), available)
    flat = cover.flat().copy()
    head = flat[: bits.size]
    # flip exactly the samples whose LSB disagrees with the payload bit
    head ^= (head & 1) ^ (bits & 1)
    return PixelImage(flat.reshape(cover.shape))


def extract(stego: PixelImage, n_bits: int | None = None) -> np.ndarray:
    """Read ``n_bits`` LSBs, or the framed stream when ``n_bits`` is None.

    In framed mode the returned array includes the 32-bit header.
    """
    flat = stego.flat()
    available = capacity(stego)
    if n_bits is None:
        if available < HEADER_BITS:
            raise FrameError(f"image holds {available} bits, fewer than the 32-bit header")
        length = read_header(flat[:HEADER_BITS] & 1)
        if length > available - HEADER_BITS:
            raise FrameError(
                f"header announces {length} payload bits but the image holds "
                f"at most {available - HEADER_BITS}"
            )
        n_bits = HEADER_BITS + length
    elif n_bits > available:
        raise InsufficientCapacity(n_bits, available)
    return flat[:n_bits] & 1


def flip_count(cover: PixelImage, stego: PixelImage) -> int:
    return int(np.count_nonzero((cover.flat() ^ stego.flat()) & 1))


# --- files -----------------------------------------------------------------------


def load_image(path: str | os.PathLike) -> PixelImage:
    path = Path(path)
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode not in ("L", "RGB"):
                raise InvalidParams(
                    f"{path}: image mode {mode!r} is not supported; use 8-bit grayscale or RGB"
                )
            arr = np.array(im, dtype=np.uint8)
    except FileNotFoundError:
        raise StegoIOError(f"{path}: no such file") from None
    except UnidentifiedImageError:
        raise StegoIOError(f"{path}: not a readable image") from None
    except OSError as exc:
        raise StegoIOError(f"{path}: {exc}") from None
    return PixelImage(arr)


def save_png(image: PixelImage, path: str | os.PathLike) -> None:
    """Write losslessly as PNG via a temporary file and atomic rename."""
    path = Path(path)
    arr = image.samples[:, :, 0] if image.channels == 1 else image.samples
    tmp = path.with_name(path.name + ".tmp")
    try:
        Image.fromarray(arr, mode="L" if image.channels == 1 else "RGB").save(tmp, format="PNG")
        os.replace(tmp, path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise StegoIOError(f"{path}: {exc}") from None
