import zlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsstego.errors import (
    AuthenticationFailure,
    Base64Error,
    EnvelopeParseError,
    FrameError,
    InflateError,
    QuantBitsOutOfRange,
    ShapeMismatch,
    SymbolOutOfRange,
)
from rsstego.gf import RsParams
from rsstego.payload import (
    EncodeTrace,
    ImageMeta,
    Kind,
    PayloadEnvelope,
    audio_to_text,
    bits_to_bytes,
    bytes_to_bits,
    decode_payload,
    deframe,
    dequantize_image,
    encode_payload,
    frame,
    parse_envelope,
    quantize_image,
    serialize_envelope,
    text_to_audio,
)


class TestQuantize:
    @pytest.mark.parametrize("sample,k,expected", [(0, 5, 64), (255, 5, 95), (200, 5, 89)])
    def test_examples(self, sample, k, expected):
        assert quantize_image(np.array([sample], dtype=np.uint8), k) == bytes([expected])

    @pytest.mark.parametrize("k", [0, 7, 8])
    def test_out_of_range(self, k):
        with pytest.raises(QuantBitsOutOfRange):
            quantize_image(np.zeros(3, dtype=np.uint8), k)

    @pytest.mark.parametrize("symbol,expected", [(64, 0), (95, 248)])
    def test_dequantize_examples(self, symbol, expected):
        out = dequantize_image(bytes([symbol]), ImageMeta(1, 1, 1, 5))
        assert out.shape == (1, 1, 1) and out[0, 0, 0] == expected

    @pytest.mark.parametrize("k", range(1, 7))
    def test_exhaustive_error_bound(self, k):
        samples = np.arange(256, dtype=np.uint8)
        sym = quantize_image(samples, k)
        assert min(sym) == 64 and max(sym) == 64 + 2**k - 1
        back = dequantize_image(sym, ImageMeta(256, 1, 1, k)).reshape(-1)
        dev = samples.astype(int) - back.astype(int)
        assert dev.min() >= 0 and dev.max() < 2 ** (8 - k)

    def test_symbol_out_of_range(self):
        with pytest.raises(SymbolOutOfRange):
            dequantize_image(bytes([96]), ImageMeta(1, 1, 1, 5))
        with pytest.raises(SymbolOutOfRange):
            dequantize_image(bytes([63]), ImageMeta(1, 1, 1, 5))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            dequantize_image(bytes([64] * 5), ImageMeta(2, 2, 1, 5))


class TestAudio:
    def test_roundtrip(self, rng):
        for size in (0, 1, 1000, 50_000):
            audio = rng.bytes(size)
            assert text_to_audio(audio_to_text(audio)) == audio

    def test_output_is_printable_ascii(self, rng):
        text = audio_to_text(rng.bytes(500))
        assert all(32 < c < 127 for c in text)

    def test_runs_compress(self):
        audio = b"\x7f" * 10**6
        assert len(audio_to_text(audio)) < len(audio)

    def test_music_like_ratio(self):
        # a four-note arpeggio looped at a few dynamic levels, 16-bit PCM
        # phrase spans 17.6 KB, inside the 32 KiB DEFLATE window
        t = np.arange(2205) / 44100
        notes = [277.18, 415.30, 554.37, 415.30]
        phrase = np.concatenate([np.sin(2 * np.pi * f * t) * np.exp(-3 * t) for f in notes])
        sections = [np.tile((amp * phrase).astype(np.int16), 20) for amp in (3000, 6000, 9000)]
        pcm = np.concatenate(sections).tobytes()
        compressed = zlib.compress(pcm, 9)
        assert len(compressed) < 0.6 * len(pcm)
        assert text_to_audio(audio_to_text(pcm)) == pcm

    def test_corrupted_base64(self):
        text = bytearray(audio_to_text(b"hello audio"))
        text[3] = ord("!")
        with pytest.raises(Base64Error):
            text_to_audio(bytes(text))

    def test_truncated_deflate(self):
        import base64

        stream = zlib.compress(b"some audio bytes" * 100)[:-6]
        with pytest.raises(InflateError):
            text_to_audio(base64.b64encode(stream))


class TestEnvelope:
    def test_headers(self):
        assert serialize_envelope(PayloadEnvelope.text(b"hi")) == b"TEXT;;hi"
        assert serialize_envelope(PayloadEnvelope.audio(b"")).startswith(b"AUDIO;;")
        env = PayloadEnvelope.from_pixels(np.zeros((2, 3, 1), dtype=np.uint8), 4)
        assert serialize_envelope(env) == b"IMAGE;w=3,h=2,c=1,k=4;" + bytes([64] * 6)

    def test_parse_roundtrip(self, rng):
        for env in [
            PayloadEnvelope.text(b"a;b;c"),
            PayloadEnvelope.text(rng.bytes(300), compress=True),
            PayloadEnvelope.audio(rng.bytes(300)),
        ]:
            assert parse_envelope(serialize_envelope(env)) == env

    @pytest.mark.parametrize(
        "data", [b"", b"TEXT", b"TEXT;", b"VIDEO;;x", b"IMAGE;w=2;..", b"IMAGE;w=x;"]
    )
    def test_parse_errors(self, data):
        with pytest.raises(EnvelopeParseError):
            parse_envelope(data)

    def test_image_meta_must_match_body(self):
        with pytest.raises(ShapeMismatch):
            PayloadEnvelope(Kind.IMAGE, b"abc", image=ImageMeta(2, 2, 1, 5))


class TestBits:
    def test_msb_first(self):
        assert bytes_to_bits(b"\x80\x01").tolist() == [1] + [0] * 14 + [1]

    @settings(max_examples=100, deadline=None)
    @given(st.binary(max_size=300))
    def test_self_inverse(self, data):
        assert bits_to_bytes(bytes_to_bits(data)) == data

    def test_header_300(self):
        bits = frame(b"\x00" * 300)
        # 300 bytes = 2400 bits; spot-check the literal L = 300 header too
        assert bits_to_bytes(bits[:32]) == (2400).to_bytes(4, "big")
        assert bits_to_bytes(frame(b"")[:32]) == b"\x00\x00\x00\x00"
        assert bits_to_bytes(bytes_to_bits((300).to_bytes(4, "big"))) == b"\x00\x00\x01\x2c"

    def test_header_counts_payload_exactly(self, rng):
        for size in (0, 1, 77):
            bits = frame(rng.bytes(size))
            assert int.from_bytes(bits_to_bytes(bits[:32]), "big") == len(bits) - 32

    def test_deframe_errors(self):
        with pytest.raises(FrameError):
            deframe(np.zeros(31, dtype=np.uint8))
        bits = frame(b"abc")
        with pytest.raises(FrameError):
            deframe(bits[:-1])

    def test_non_byte_multiple(self):
        with pytest.raises(FrameError):
            bits_to_bytes(np.ones(9, dtype=np.uint8))


# body length -> (serialized, token, coded, framed_bits) for TEXT with RS(255, 223)
GOLDEN_TEXT_LENGTHS = {
    0: (6, 100, 132, 1088),
    100: (106, 228, 292, 2368),
    1000: (1006, 1420, 1644, 13184),
}


def expected_lengths(body_len, n=255, k=223):
    serialized = 6 + body_len
    raw_token = 1 + 8 + 16 + 16 * ((serialized + 16) // 16) + 32
    token = 4 * -(-raw_token // 3)
    coded = token + -(-token // k) * (n - k)
    return serialized, token, coded, 32 + 8 * coded


class TestChain:
    @pytest.mark.parametrize("body_len", sorted(GOLDEN_TEXT_LENGTHS))
    def test_golden_lengths(self, body_len):
        trace = EncodeTrace()
        bits = encode_payload(PayloadEnvelope.text(bytes(body_len)), "pw", trace=trace)
        got = (trace.serialized, trace.token, trace.coded, trace.framed_bits)
        assert got == GOLDEN_TEXT_LENGTHS[body_len] == expected_lengths(body_len)
        assert len(bits) == 32 + 8 * trace.coded

    def test_large_payload_bit_ratio(self):
        assert 11_972_988 * 8 == 95_783_904

    def test_text_and_audio_roundtrip(self, rng):
        for env in [
            PayloadEnvelope.text(b""),
            PayloadEnvelope.text(rng.bytes(5000)),
            PayloadEnvelope.text("unicode ✓ text", compress=True),
            PayloadEnvelope.audio(rng.bytes(3000)),
        ]:
            assert decode_payload(encode_payload(env, "pw"), "pw") == env

    @pytest.mark.parametrize("k", range(1, 7))
    def test_image_roundtrip_quantized_exact(self, rng, k):
        pixels = rng.integers(0, 256, (9, 7, 3), dtype=np.uint8)
        env = PayloadEnvelope.from_pixels(pixels, k)
        out = decode_payload(encode_payload(env, "pw", RsParams(64, 48)), "pw", RsParams(64, 48))
        expected = (pixels >> (8 - k)) << (8 - k)
        assert out.image == env.image
        assert np.array_equal(out.pixels(), expected)

    def test_short_stream(self):
        with pytest.raises(FrameError):
            decode_payload(np.zeros(10, dtype=np.uint8), "pw")

    def test_wrong_password(self):
        bits = encode_payload(PayloadEnvelope.text(b"x"), "right")
        with pytest.raises(AuthenticationFailure):
            decode_payload(bits, "wrong")

    def test_deterministic_with_pinned_fernet(self):
        env = PayloadEnvelope.text(b"same")
        a = encode_payload(env, "pw", timestamp=1, iv=bytes(16))
        b = encode_payload(env, "pw", timestamp=1, iv=bytes(16))
        assert np.array_equal(a, b)
