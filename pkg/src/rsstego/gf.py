"""Arithmetic over GF(2^8) and a systematic Reed-Solomon codec.

Field polynomial x^8+x^4+x^3+x^2+1 (0x11D), generator alpha = 2, first
consecutive root alpha^0.  Polynomials are lists of coefficients with the
highest degree first, which is also the on-wire order of codeword bytes.

The stream functions process every block at once with numpy lookup tables;
only blocks whose syndromes are nonzero go through the scalar
Berlekamp-Massey / Chien / Forney path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DecodeFailure, InvalidParams, LengthMismatch

PRIM = 0x11D
FIELD_SIZE = 256

# exp table doubled so exp[log a + log b] needs no modulo
EXP = [0] * 512
LOG = [0] * 256


def _build_tables() -> None:
    x = 1
    for i in range(255):
        EXP[i] = x
        LOG[x] = i
        x <<= 1
        if x & 0x100:
            x ^= PRIM
    for i in range(255, 512):
        EXP[i] = EXP[i - 255]


_build_tables()

_EXP_NP = np.array(EXP, dtype=np.int32)
_LOG_NP = np.array(LOG, dtype=np.int32)


def _mul_table() -> np.ndarray:
    a = np.arange(256)
    table = _EXP_NP[(_LOG_NP[a][:, None] + _LOG_NP[a][None, :])].astype(np.uint8)
    table[0, :] = 0
    table[:, 0] = 0
    return table


MUL_TABLE = _mul_table()


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return EXP[255 - LOG[a]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return EXP[(LOG[a] + 255 - LOG[b]) % 255]


def gf_pow(a: int, power: int) -> int:
    if a == 0:
        return 1 if power == 0 else 0
    return EXP[(LOG[a] * power) % 255]


# --- polynomials, highest degree first -------------------------------------


def poly_scale(p: list[int], x: int) -> list[int]:
    return [gf_mul(c, x) for c in p]


def poly_add(p: list[int], q: list[int]) -> list[int]:
    out = [0] * max(len(p), len(q))
    out[len(out) - len(p):] = p
    for i, c in enumerate(q):
        out[i + len(out) - len(q)] ^= c
    return out


def poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for j, qc in enumerate(q):
        if qc == 0:
            continue
        lq = LOG[qc]
        for i, pc in enumerate(p):
            if pc:
                out[i + j] ^= EXP[LOG[pc] + lq]
    return out


def poly_eval(p: list[int], x: int) -> int:
    y = p[0]
    for c in p[1:]:
        y = gf_mul(y, x) ^ c
    return y


def interpolate(xs: list[int], ys: list[int]) -> list[int]:
    """Lagrange interpolation: the unique polynomial of degree < len(xs)
    through the points (xs[i], ys[i]).  xs must be distinct."""
    if len(set(xs)) != len(xs):
        raise InvalidParams("interpolation points must have distinct x values")
    result = [0]
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        basis = [1]
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                basis = poly_mul(basis, [1, xj])
                denom = gf_mul(denom, xi ^ xj)
        result = poly_add(result, poly_scale(basis, gf_div(yi, denom)))
    return result


@lru_cache(maxsize=None)
def generator_poly(nsym: int) -> tuple[int, ...]:
    """prod_{i<nsym} (x - alpha^i)"""
    g = [1]
    for i in range(nsym):
        g = poly_mul(g, [1, EXP[i]])
    return tuple(g)


# --- codec -------------------------------------------------------------------


@dataclass(frozen=True)
class RsParams:
    n: int = 255
    k: int = 223

    def __post_init__(self):
        if not (1 <= self.k < self.n <= 255):
            raise InvalidParams(
                f"Reed-Solomon params need 1 <= k < n <= 255, got n={self.n}, k={self.k}"
            )

    @property
    def parity(self) -> int:
        return self.n - self.k

    @property
    def t(self) -> int:
        """Correctable symbol errors per block."""
        return self.parity // 2


@dataclass(frozen=True)
class RsBlock:
    data: bytes
    parity: bytes

    def codeword(self) -> bytes:
        return self.data + self.parity


def _parity_rows(data: np.ndarray, nsym: int) -> np.ndarray:
    """LFSR division of every row of ``data`` (blocks x k, uint8) by g(x)."""
    g = np.array(generator_poly(nsym)[1:], dtype=np.uint8)
    rem = np.zeros((data.shape[0], nsym), dtype=np.uint8)
    for i in range(data.shape[1]):
        feedback = data[:, i] ^ rem[:, 0]
        rem[:, :-1] = rem[:, 1:]
        rem[:, -1] = 0
        rem ^= MUL_TABLE[feedback[:, None], g[None, :]]
    return rem


def rs_encode_block(data: bytes, params: RsParams) -> RsBlock:
    data = bytes(data)
    if len(data) != params.k:
        raise InvalidParams(f"block needs {params.k} data bytes, got {len(data)}")
    rows = np.frombuffer(data, dtype=np.uint8)[None, :]
    return RsBlock(data, _parity_rows(rows, params.parity)[0].tobytes())


def _syndrome_rows(blocks: np.ndarray, nsym: int) -> np.ndarray:
    roots = np.array(EXP[:nsym], dtype=np.uint8)[None, :]
    synd = np.zeros((blocks.shape[0], nsym), dtype=np.uint8)
    for i in range(blocks.shape[1]):
        synd = MUL_TABLE[synd, roots] ^ blocks[:, i:i + 1]
    return synd


def _syndromes(codeword: list[int], nsym: int) -> list[int]:
    return [poly_eval(codeword, EXP[i]) for i in range(nsym)]


def _berlekamp_massey(synd: list[int]) -> list[int]:
    """Error locator Lambda(x), lowest degree first, Lambda(0) = 1."""
    lam = [1] + [0] * len(synd)
    prev = [1] + [0] * len(synd)
    L, shift, last_delta = 0, 1, 1
    for r in range(len(synd)):
        delta = synd[r]
        for j in range(1, L + 1):
            delta ^= gf_mul(lam[j], synd[r - j])
        if delta == 0:
            shift += 1
            continue
        coef = gf_div(delta, last_delta)
        updated = list(lam)
        for j in range(len(prev) - shift):
            if prev[j]:
                updated[j + shift] ^= gf_mul(coef, prev[j])
        if 2 * L <= r:
            prev = lam
            L = r + 1 - L
            last_delta = delta
            shift = 1
        else:
            shift += 1
        lam = updated
    lam = lam[: L + 1]
    return lam


def _eval_low(p: list[int], x: int) -> int:
    y = 0
    for c in reversed(p):
        y = gf_mul(y, x) ^ c
    return y


def _correct(codeword: list[int], nsym: int, synd: list[int]) -> int:
    """Correct ``codeword`` in place; returns the number of fixed symbols."""
    length = len(codeword)
    lam = _berlekamp_massey(synd)
    n_err = len(lam) - 1
    if n_err > nsym // 2:
        raise DecodeFailure(f"error locator degree {n_err} exceeds capacity {nsym // 2}")

    # Chien search: position p (index from the end) is in error when
    # Lambda(alpha^-p) == 0
    positions = []
    for p in range(length):
        if _eval_low(lam, EXP[(255 - p) % 255]) == 0:
            positions.append(p)
    if len(positions) != n_err:
        raise DecodeFailure(
            f"error locator has degree {n_err} but {len(positions)} roots in range"
        )

    # Forney with first consecutive root alpha^0:
    # e = X * Omega(X^-1) / Lambda'(X^-1)
    omega = [0] * nsym
    for i, s in enumerate(synd):
        if s == 0:
            continue
        for j, c in enumerate(lam):
            if i + j < nsym and c:
                omega[i + j] ^= gf_mul(s, c)
    lam_prime = [lam[j] if j % 2 == 1 else 0 for j in range(1, len(lam))]
    for p in positions:
        x = EXP[p]
        x_inv = EXP[(255 - p) % 255]
        denom = _eval_low(lam_prime, x_inv)
        if denom == 0:
            raise DecodeFailure("zero derivative in Forney algorithm")
        magnitude = gf_mul(x, gf_div(_eval_low(omega, x_inv), denom))
        codeword[length - 1 - p] ^= magnitude

    if any(_syndromes(codeword, nsym)):
        raise DecodeFailure("syndromes nonzero after correction")
    return n_err


def rs_decode_block(received: bytes, params: RsParams) -> tuple[bytes, int]:
    """Return ``(data, errors_corrected)`` for one full-length codeword."""
    if len(received) != params.n:
        raise LengthMismatch(f"block needs {params.n} bytes, got {len(received)}")
    return _decode_one(bytes(received), params.parity)


def _decode_one(received: bytes, nsym: int) -> tuple[bytes, int]:
    codeword = list(received)
    synd = _syndromes(codeword, nsym)
    if not any(synd):
        return received[:-nsym], 0
    fixed = _correct(codeword, nsym, synd)
    return bytes(codeword[:-nsym]), fixed


def coded_length(message_len: int, params: RsParams) -> int:
    blocks = -(-message_len // params.k)
    return message_len + blocks * params.parity


def message_length(coded_len: int, params: RsParams) -> int:
    """Inverse of :func:`coded_length`; raises LengthMismatch when no message
    length maps to ``coded_len``."""
    full, rem = divmod(coded_len, params.n)
    if rem == 0:
        return full * params.k
    if rem <= params.parity:
        raise LengthMismatch(
            f"{coded_len} coded bytes leave a {rem}-byte tail, not a valid block"
        )
    return full * params.k + rem - params.parity


def rs_encode_stream(message: bytes, params: RsParams) -> bytes:
    """Encode in k-byte chunks; a short final chunk keeps the full parity."""
    msg = np.frombuffer(bytes(message), dtype=np.uint8)
    n_full = len(msg) // params.k
    out = bytearray()
    if n_full:
        data = msg[: n_full * params.k].reshape(n_full, params.k)
        parity = _parity_rows(data, params.parity)
        out += np.concatenate([data, parity], axis=1).tobytes()
    tail = msg[n_full * params.k:]
    if len(tail):
        out += tail.tobytes() + _parity_rows(tail[None, :], params.parity)[0].tobytes()
    return bytes(out)


def rs_decode_stream(
    coded: bytes, original_len: int, params: RsParams, *, stats: dict | None = None
) -> bytes:
    """Decode a chunked stream and truncate to ``original_len``.

    When ``stats`` is given it receives ``corrected`` (total symbols fixed)
    and ``blocks``.
    """
    if coded_length(original_len, params) != len(coded):
        raise LengthMismatch(
            f"{len(coded)} coded bytes do not match a {original_len}-byte message "
            f"under RS({params.n},{params.k})"
        )
    arr = np.frombuffer(bytes(coded), dtype=np.uint8)
    nsym = params.parity
    n_full = original_len // params.k
    pieces: list[bytes] = []
    corrected = 0

    if n_full:
        blocks = arr[: n_full * params.n].reshape(n_full, params.n)
        synd = _syndrome_rows(blocks, nsym)
        dirty = np.flatnonzero(synd.any(axis=1))
        data = blocks[:, : params.k].copy()
        for b in dirty:
            try:
                fixed_data, fixed = _decode_one(blocks[b].tobytes(), nsym)
            except DecodeFailure as exc:
                raise DecodeFailure(f"block {b}: {exc}") from None
            data[b] = np.frombuffer(fixed_data, dtype=np.uint8)
            corrected += fixed
        pieces.append(data.tobytes())

    tail = arr[n_full * params.n:]
    if len(tail):
        try:
            fixed_data, fixed = _decode_one(tail.tobytes(), nsym)
        except DecodeFailure as exc:
            raise DecodeFailure(f"block {n_full}: {exc}") from None
        pieces.append(fixed_data)
        corrected += fixed

    if stats is not None:
        stats["corrected"] = corrected
        stats["blocks"] = n_full + (1 if len(tail) else 0)
    return b"".join(pieces)[:original_len]
