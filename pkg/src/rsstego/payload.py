"""Secret payloads: conversion to a byte string, the encode chain, and framing.

Encode chain::

    envelope -> header + body text -> shuffle -> Fernet -> RS -> bits -> 32-bit length ++ bits

The envelope header travels inside the encrypted payload so the receiver
learns the payload kind and image geometry without any side channel.  Header
grammar (ASCII)::

    KIND;key=value,key=value;

``TEXT;;``, ``TEXT;z=1;`` (body DEFLATE-compressed), ``AUDIO;;`` and
``IMAGE;w=..,h=..,c=..,k=..;``.
"""

from __future__ import annotations

import base64
import binascii
import enum
import zlib
from dataclasses import dataclass

import numpy as np

from .crypto import derive_keys, fernet_decrypt, fernet_encrypt, shuffle, unshuffle
from .errors import (
    Base64Error,
    EnvelopeParseError,
    FrameError,
    InflateError,
    PayloadTooLarge,
    QuantBitsOutOfRange,
    ShapeMismatch,
    SymbolOutOfRange,
)
from .gf import RsParams, message_length, rs_decode_stream, rs_encode_stream

HEADER_BITS = 32
QUANT_OFFSET = 64


class Kind(str, enum.Enum):
    TEXT = "TEXT"
    AUDIO = "AUDIO"
    IMAGE = "IMAGE"


@dataclass(frozen=True)
class ImageMeta:
    width: int
    height: int
    channels: int
    quant_bits: int


@dataclass(frozen=True)
class PayloadEnvelope:
    """A typed secret.

    ``body`` holds the natural bytes of the secret: text bytes, raw audio
    bytes, or row-major interleaved image samples.  For images the samples
    come back dequantized after a round trip.
    """

    kind: Kind
    body: bytes
    image: ImageMeta | None = None
    compress: bool = False

    def __post_init__(self):
        if self.kind is Kind.IMAGE:
            if self.image is None:
                raise ShapeMismatch("IMAGE envelope needs image metadata")
            m = self.image
            if m.width * m.height * m.channels != len(self.body):
                raise ShapeMismatch(
                    f"{m.width}x{m.height}x{m.channels} image needs "
                    f"{m.width * m.height * m.channels} samples, got {len(self.body)}"
                )

    @classmethod
    def text(cls, body: bytes | str, compress: bool = False) -> "PayloadEnvelope":
        if isinstance(body, str):
            body = body.encode("utf-8")
        return cls(Kind.TEXT, bytes(body), compress=compress)

    @classmethod
    def audio(cls, body: bytes) -> "PayloadEnvelope":
        return cls(Kind.AUDIO, bytes(body))

    @classmethod
    def from_pixels(cls, pixels: np.ndarray, quant_bits: int) -> "PayloadEnvelope":
        """Wrap an (h, w) or (h, w, c) uint8 array."""
        arr = np.asarray(pixels, dtype=np.uint8)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ShapeMismatch(f"expected a 2-D or 3-D pixel array, got shape {arr.shape}")
        _check_quant_bits(quant_bits)
        h, w, c = arr.shape
        return cls(Kind.IMAGE, arr.tobytes(), image=ImageMeta(w, h, c, quant_bits))

    def pixels(self) -> np.ndarray:
        m = self.image
        return np.frombuffer(self.body, dtype=np.uint8).reshape(m.height, m.width, m.channels)


# --- signal-to-text ------------------------------------------------------------


def _check_quant_bits(k: int) -> None:
    if not 1 <= k <= 6:
        raise QuantBitsOutOfRange(f"quantization bits must be in 1..6, got {k}")


def quantize_image(pixels, k: int) -> bytes:
    """Keep the k most significant bits of each sample, offset into ASCII."""
    _check_quant_bits(k)
    if isinstance(pixels, (bytes, bytearray, memoryview)):
        samples = np.frombuffer(pixels, dtype=np.uint8)
    else:
        samples = np.asarray(pixels, dtype=np.uint8).reshape(-1)
    return ((samples >> (8 - k)) + QUANT_OFFSET).astype(np.uint8).tobytes()


def dequantize_image(symbols: bytes, meta: ImageMeta) -> np.ndarray:
    """Inverse of :func:`quantize_image` up to the dropped low bits.

    Returns an (height, width, channels) uint8 array.
    """
    k = meta.quant_bits
    _check_quant_bits(k)
    sym = np.frombuffer(bytes(symbols), dtype=np.uint8)
    if sym.size != meta.width * meta.height * meta.channels:
        raise ShapeMismatch(
            f"{sym.size} symbols do not fill a {meta.width}x{meta.height}x{meta.channels} image"
        )
    if sym.size and (sym.min() < QUANT_OFFSET or sym.max() > QUANT_OFFSET + (1 << k) - 1):
        raise SymbolOutOfRange(
            f"symbols must lie in [{QUANT_OFFSET}, {QUANT_OFFSET + (1 << k) - 1}] for k={k}"
        )
    samples = ((sym - QUANT_OFFSET).astype(np.uint16) << (8 - k)).astype(np.uint8)
    return samples.reshape(meta.height, meta.width, meta.channels)


def audio_to_text(audio: bytes) -> bytes:
    """zlib-wrapped DEFLATE, then standard padded base64."""
    return base64.b64encode(zlib.compress(bytes(audio), 9))


def text_to_audio(text: bytes | str) -> bytes:
    if isinstance(text, str):
        text = text.encode("ascii", errors="replace")
    try:
        compressed = base64.b64decode(bytes(text), validate=True)
    except (binascii.Error, ValueError) as exc:
        raise Base64Error(f"audio text is not valid base64: {exc}") from None
    try:
        return zlib.decompress(compressed)
    except zlib.error as exc:
        raise InflateError(f"audio stream does not inflate: {exc}") from None


# --- envelope serialization ---------------------------------------------------


def serialize_envelope(env: PayloadEnvelope) -> bytes:
    if env.kind is Kind.TEXT:
        if env.compress:
            return b"TEXT;z=1;" + zlib.compress(env.body, 9)
        return b"TEXT;;" + env.body
    if env.kind is Kind.AUDIO:
        return b"AUDIO;;" + audio_to_text(env.body)
    m = env.image
    header = f"IMAGE;w={m.width},h={m.height},c={m.channels},k={m.quant_bits};"
    return header.encode("ascii") + quantize_image(env.body, m.quant_bits)


def parse_envelope(data: bytes) -> PayloadEnvelope:
    first = data.find(b";")
    second = data.find(b";", first + 1) if first >= 0 else -1
    if second < 0:
        raise EnvelopeParseError("payload header is missing its terminators")
    try:
        kind = Kind(data[:first].decode("ascii"))
        meta_text = data[first + 1:second].decode("ascii")
        meta = dict(item.split("=", 1) for item in meta_text.split(",") if item)
        meta = {key: int(value) for key, value in meta.items()}
    except (ValueError, UnicodeDecodeError) as exc:
        raise EnvelopeParseError(f"malformed payload header: {exc}") from None
    body = data[second + 1:]

    if kind is Kind.TEXT:
        if meta.get("z"):
            try:
                return PayloadEnvelope.text(zlib.decompress(body), compress=True)
            except zlib.error as exc:
                raise InflateError(f"text body does not inflate: {exc}") from None
        return PayloadEnvelope.text(body)
    if kind is Kind.AUDIO:
        return PayloadEnvelope.audio(text_to_audio(body))
    try:
        image = ImageMeta(meta["w"], meta["h"], meta["c"], meta["k"])
    except KeyError as exc:
        raise EnvelopeParseError(f"image header lacks {exc}") from None
    pixels = dequantize_image(body, image)
    return PayloadEnvelope(Kind.IMAGE, pixels.tobytes(), image=image)


# --- bits and framing -----------------------------------------------------------


def bytes_to_bits(data: bytes) -> np.ndarray:
    """MSB-first bit array (uint8 of 0/1)."""
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 8:
        raise FrameError(f"{bits.size} bits is not a whole number of bytes")
    return np.packbits(bits).tobytes()


def frame(payload: bytes) -> np.ndarray:
    """Prefix the payload bits with their count as a 32-bit big-endian integer."""
    length = 8 * len(payload)
    if length >= 2**32:
        raise PayloadTooLarge(f"{length} payload bits do not fit a 32-bit length header")
    return np.concatenate([bytes_to_bits(length.to_bytes(4, "big")), bytes_to_bits(payload)])


def read_header(bits: np.ndarray) -> int:
    if len(bits) < HEADER_BITS:
        raise FrameError(f"bit stream has {len(bits)} bits, shorter than the 32-bit header")
    return int.from_bytes(np.packbits(np.asarray(bits[:HEADER_BITS], dtype=np.uint8)).tobytes(), "big")


def deframe(bits: np.ndarray) -> bytes:
    length = read_header(bits)
    available = len(bits) - HEADER_BITS
    if length > available:
        raise FrameError(f"header announces {length} bits but only {available} follow")
    return bits_to_bytes(bits[HEADER_BITS:HEADER_BITS + length])


# --- full chain -------------------------------------------------------------------


@dataclass
class EncodeTrace:
    """Stage lengths of one encode, in bytes (``framed_bits`` in bits)."""

    serialized: int = 0
    token: int = 0
    coded: int = 0
    framed_bits: int = 0


def encode_payload(
    env: PayloadEnvelope,
    password: bytes | str,
    rs: RsParams = RsParams(),
    *,
    timestamp: int | None = None,
    iv: bytes | None = None,
    trace: EncodeTrace | None = None,
) -> np.ndarray:
    keys = derive_keys(password)
    serialized = serialize_envelope(env)
    token = fernet_encrypt(shuffle(serialized, keys.shuffle_seed), keys, timestamp, iv)
    coded = rs_encode_stream(token, rs)
    bits = frame(coded)
    if trace is not None:
        trace.serialized = len(serialized)
        trace.token = len(token)
        trace.coded = len(coded)
        trace.framed_bits = len(bits)
    return bits


def decode_payload(
    bits: np.ndarray,
    password: bytes | str,
    rs: RsParams = RsParams(),
    *,
    stats: dict | None = None,
) -> PayloadEnvelope:
    keys = derive_keys(password)
    coded = deframe(bits)
    token = rs_decode_stream(coded, message_length(len(coded), rs), rs, stats=stats)
    shuffled = fernet_decrypt(token, keys)
    return parse_envelope(unshuffle(shuffled, keys.shuffle_seed))
