"""Corruption-resilient LSB image steganography.

A secret (text, audio or image) is shuffled with a password-seeded
permutation, encrypted as a Fernet token, protected with Reed-Solomon
parity and written into the least significant bits of a cover image.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AuthenticationFailure,
    DecodeFailure,
    FrameError,
    InsufficientCapacity,
    StegoError,
)
from .gf import RsParams  # noqa: E402
from .lsb import PixelImage, load_image, save_png  # noqa: E402
from .payload import Kind, PayloadEnvelope  # noqa: E402
from .pipeline import hide, reveal  # noqa: E402

__all__ = [
    "AuthenticationFailure",
    "DecodeFailure",
    "FrameError",
    "InsufficientCapacity",
    "Kind",
    "PayloadEnvelope",
    "PixelImage",
    "RsParams",
    "StegoError",
    "hide",
    "load_image",
    "reveal",
    "save_png",
]
