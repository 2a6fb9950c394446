"""Password-derived keys, keyed shuffling and Fernet tokens.

Key derivation:

* shuffle seed  = first 8 bytes of SHA-256(password), big-endian
* Fernet key    = base64url of the 32 ASCII characters of the MD5 hex digest

MD5 and the missing salt/stretching are weak by modern standards; they are
kept because the sender and receiver must derive the same keys from nothing
but the shared password.

Tokens follow the public Fernet format (version 0x80, 64-bit timestamp, IV,
AES-128-CBC ciphertext, HMAC-SHA256), so they interoperate with any Fernet
implementation.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import hmac
import os
import struct
import time
from dataclasses import dataclass

import numpy as np
from cryptography.hazmat.primitives import padding
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import AuthenticationFailure, EmptyPassword, InvalidParams
from .prng import fisher_yates

FERNET_VERSION = 0x80
_HEADER_LEN = 1 + 8 + 16
_HMAC_LEN = 32


@dataclass(frozen=True)
class KeyMaterial:
    shuffle_seed: int
    fernet_key: bytes  # 44-character base64url text

    def __repr__(self) -> str:
        return "KeyMaterial(<redacted>)"

    @property
    def _raw(self) -> bytes:
        return base64.urlsafe_b64decode(self.fernet_key)

    @property
    def signing_key(self) -> bytes:
        return self._raw[:16]

    @property
    def encryption_key(self) -> bytes:
        return self._raw[16:]

    @classmethod
    def from_fernet_key(cls, key: bytes | str, shuffle_seed: int = 0) -> "KeyMaterial":
        """Wrap an existing Fernet key (e.g. a test vector's secret)."""
        if isinstance(key, str):
            key = key.encode("ascii")
        try:
            raw = base64.urlsafe_b64decode(key)
        except (binascii.Error, ValueError) as exc:
            raise InvalidParams(f"Fernet key is not base64url: {exc}") from None
        if len(raw) != 32:
            raise InvalidParams("Fernet key must decode to 32 bytes")
        return cls(shuffle_seed, bytes(key))


def derive_keys(password: bytes | str) -> KeyMaterial:
    if isinstance(password, str):
        password = password.encode("utf-8")
    if not password:
        raise EmptyPassword("password must not be empty")
    seed = int.from_bytes(hashlib.sha256(password).digest()[:8], "big")
    hex_digest = hashlib.md5(password).hexdigest().encode("ascii")
    return KeyMaterial(seed, base64.urlsafe_b64encode(hex_digest))


@dataclass(frozen=True)
class Permutation:
    forward: np.ndarray
    inverse: np.ndarray

    @classmethod
    def from_seed(cls, n: int, seed: int) -> "Permutation":
        forward = fisher_yates(n, seed)
        inverse = np.empty_like(forward)
        inverse[forward] = np.arange(n, dtype=forward.dtype)
        return cls(forward, inverse)

    def __len__(self) -> int:
        return len(self.forward)


def shuffle(text: bytes, seed: int) -> bytes:
    data = np.frombuffer(bytes(text), dtype=np.uint8)
    if len(data) < 2:
        return bytes(text)
    return data[fisher_yates(len(data), seed)].tobytes()


def unshuffle(text: bytes, seed: int) -> bytes:
    data = np.frombuffer(bytes(text), dtype=np.uint8)
    if len(data) < 2:
        return bytes(text)
    out = np.empty_like(data)
    out[fisher_yates(len(data), seed)] = data
    return out.tobytes()


# --- Fernet ------------------------------------------------------------------


@dataclass(frozen=True)
class FernetToken:
    version: int
    timestamp: int
    iv: bytes
    ciphertext: bytes
    hmac: bytes

    @classmethod
    def parse(cls, token: bytes | str) -> "FernetToken":
        """Split a base64url token into fields.  Does not verify the HMAC."""
        raw = _b64_token(token)
        if len(raw) < _HEADER_LEN + 16 + _HMAC_LEN or (len(raw) - _HEADER_LEN - _HMAC_LEN) % 16:
            raise AuthenticationFailure("token has an invalid length")
        (timestamp,) = struct.unpack(">Q", raw[1:9])
        return cls(raw[0], timestamp, raw[9:25], raw[25:-_HMAC_LEN], raw[-_HMAC_LEN:])

    def to_bytes(self) -> bytes:
        raw = (
            bytes([self.version])
            + struct.pack(">Q", self.timestamp)
            + self.iv
            + self.ciphertext
            + self.hmac
        )
        return base64.urlsafe_b64encode(raw)


def _b64_token(token: bytes | str) -> bytes:
    if isinstance(token, str):
        token = token.encode("ascii", errors="replace")
    token = bytes(token)
    try:
        raw = base64.b64decode(token, altchars=b"-_", validate=True)
    except (binascii.Error, ValueError):
        raise AuthenticationFailure("token is not valid base64url") from None
    # non-canonical encodings (stray pad bits) would otherwise decode to a valid token
    if base64.urlsafe_b64encode(raw) != token:
        raise AuthenticationFailure("token is not canonical base64url")
    return raw


def fernet_encrypt(
    plaintext: bytes,
    keys: KeyMaterial,
    timestamp: int | None = None,
    iv: bytes | None = None,
) -> bytes:
    """Encrypt to a base64url Fernet token.

    ``timestamp`` and ``iv`` default to the current time and 16 fresh random
    bytes; pin both to get byte-identical tokens.
    """
    if timestamp is None:
        timestamp = int(time.time())
    if iv is None:
        iv = os.urandom(16)
    if len(iv) != 16:
        raise InvalidParams("IV must be 16 bytes")
    if not 0 <= timestamp < 2**64:
        raise InvalidParams("timestamp must fit in 64 unsigned bits")

    padder = padding.PKCS7(128).padder()
    padded = padder.update(bytes(plaintext)) + padder.finalize()
    encryptor = Cipher(algorithms.AES(keys.encryption_key), modes.CBC(iv)).encryptor()
    ciphertext = encryptor.update(padded) + encryptor.finalize()

    body = bytes([FERNET_VERSION]) + struct.pack(">Q", timestamp) + bytes(iv) + ciphertext
    tag = hmac.new(keys.signing_key, body, hashlib.sha256).digest()
    return base64.urlsafe_b64encode(body + tag)


def fernet_decrypt(token: bytes | str, keys: KeyMaterial) -> bytes:
    raw = _b64_token(token)
    if len(raw) < _HEADER_LEN + 16 + _HMAC_LEN or (len(raw) - _HEADER_LEN - _HMAC_LEN) % 16:
        raise AuthenticationFailure("token has an invalid length")
    if raw[0] != FERNET_VERSION:
        raise AuthenticationFailure("unknown token version")
    body, tag = raw[:-_HMAC_LEN], raw[-_HMAC_LEN:]
    expected = hmac.new(keys.signing_key, body, hashlib.sha256).digest()
    if not hmac.compare_digest(tag, expected):
        raise AuthenticationFailure("token signature does not match")

    iv = raw[9:25]
    decryptor = Cipher(algorithms.AES(keys.encryption_key), modes.CBC(iv)).decryptor()
    padded = decryptor.update(raw[25:-_HMAC_LEN]) + decryptor.finalize()
    unpadder = padding.PKCS7(128).unpadder()
    try:
        return unpadder.update(padded) + unpadder.finalize()
    except ValueError:
        raise AuthenticationFailure("token payload is malformed") from None
