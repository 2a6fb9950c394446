"""Hide a payload in a cover image and get it back."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InsufficientCapacity
from .gf import RsParams
from .lsb import PixelImage, capacity, embed, extract, flip_count
from .payload import EncodeTrace, PayloadEnvelope, decode_payload, encode_payload


@dataclass(frozen=True)
class HideResult:
    stego: PixelImage
    payload_bits: int  # framed, including the 32-bit header
    coded_bytes: int
    token_bytes: int
    capacity: int
    flips: int


def hide(
    cover: PixelImage,
    envelope: PayloadEnvelope,
    password: bytes | str,
    rs: RsParams = RsParams(),
    *,
    timestamp: int | None = None,
    iv: bytes | None = None,
) -> HideResult:
    trace = EncodeTrace()
    bits = encode_payload(envelope, password, rs, timestamp=timestamp, iv=iv, trace=trace)
    available = capacity(cover)
    if bits.size > available:
        raise InsufficientCapacity(int(bits.size), available)
    stego = embed(cover, bits)
    return HideResult(
        stego=stego,
        payload_bits=int(bits.size),
        coded_bytes=trace.coded,
        token_bytes=trace.token,
        capacity=available,
        flips=flip_count(cover, stego),
    )


def reveal(
    stego: PixelImage,
    password: bytes | str,
    rs: RsParams = RsParams(),
    *,
    stats: dict | None = None,
) -> PayloadEnvelope:
    return decode_payload(extract(stego), password, rs, stats=stats)
