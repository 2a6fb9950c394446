import base64
import hashlib
import itertools
import os
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsstego.crypto import (
    FernetToken,
    KeyMaterial,
    Permutation,
    derive_keys,
    fernet_decrypt,
    fernet_encrypt,
    shuffle,
    unshuffle,
)
from rsstego.errors import AuthenticationFailure, EmptyPassword

# published Fernet test vector (generate.json)
VECTOR_SECRET = "cw_0x689RpI-jtRR7oE8h_eQsKImvJapLeSbXpwF4e4="
VECTOR_TOKEN = (
    b"gAAAAAAdwJ6wAAECAwQFBgcICQoLDA0ODy021cpGVWKZ_eEwCGM4BLLF_5CV9dOPmrhuVUPgJob"
    b"wOz7JcbmrR64jVmpU4IwqDA=="
)
VECTOR_NOW = 499162800  # 1985-10-26T01:20:00-07:00
VECTOR_IV = bytes(range(16))


class TestKeys:
    def test_empty_password(self):
        with pytest.raises(EmptyPassword):
            derive_keys(b"")

    def test_seed_is_first_eight_sha256_bytes(self):
        pw = b"correct horse"
        assert derive_keys(pw).shuffle_seed == int.from_bytes(hashlib.sha256(pw).digest()[:8], "big")

    def test_empty_string_digest_vectors(self):
        # published SHA-256("") / MD5("") vectors, applied through the same rules
        assert int.from_bytes(bytes.fromhex("e3b0c44298fc1c14"), "big") == 0xE3B0C44298FC1C14
        assert hashlib.sha256(b"").hexdigest().startswith("e3b0c44298fc1c14")
        hex_md5 = b"d41d8cd98f00b204e9800998ecf8427e"
        assert hashlib.md5(b"").hexdigest().encode() == hex_md5
        km = KeyMaterial(0xE3B0C44298FC1C14, base64.urlsafe_b64encode(hex_md5))
        assert km.signing_key == hex_md5[:16]
        assert km.encryption_key == hex_md5[16:]

    def test_fernet_key_is_md5_hex_ascii(self):
        km = derive_keys("hunter2")
        assert len(km.fernet_key) == 44 and km.fernet_key.endswith(b"=")
        hex_digest = hashlib.md5(b"hunter2").hexdigest().encode()
        assert base64.urlsafe_b64decode(km.fernet_key) == hex_digest

    def test_deterministic(self):
        assert derive_keys("x") == derive_keys(b"x")

    def test_repr_hides_secrets(self):
        km = derive_keys("hunter2")
        assert "hunter2" not in repr(km) and km.fernet_key.decode() not in repr(km)


class TestShuffle:
    @pytest.mark.parametrize("text", [b"", b"a"])
    def test_trivial_lengths_unchanged(self, text):
        assert shuffle(text, 123) == text
        assert unshuffle(text, 123) == text

    def test_deterministic(self):
        assert shuffle(b"the quick brown fox", 5) == shuffle(b"the quick brown fox", 5)

    def test_is_a_reordering(self):
        text = bytes(range(200))
        out = shuffle(text, 77)
        assert sorted(out) == sorted(text) and out != text

    def test_inverse_on_random_seeds(self):
        r = random.Random(1)
        for _ in range(1000):
            s = r.getrandbits(64)
            assert unshuffle(shuffle(b"hello", s), s) == b"hello"

    def test_exhaustive_short_inputs(self):
        r = random.Random(2)
        seeds = [r.getrandbits(64) for _ in range(100)]
        for length in range(7):
            for text in (bytes(p) for p in itertools.permutations(range(length))):
                for s in seeds:
                    assert unshuffle(shuffle(text, s), s) == text

    def test_permutation_inverse(self):
        perm = Permutation.from_seed(1000, 9)
        assert np.array_equal(perm.inverse[perm.forward], np.arange(1000))
        assert len(perm) == 1000

    @settings(max_examples=200, deadline=None)
    @given(st.binary(max_size=512), st.integers(0, 2**64 - 1))
    def test_roundtrip_property(self, text, seed):
        assert unshuffle(shuffle(text, seed), seed) == text


class TestFernet:
    def test_published_vector_byte_match(self):
        keys = KeyMaterial.from_fernet_key(VECTOR_SECRET)
        token = fernet_encrypt(b"hello", keys, timestamp=VECTOR_NOW, iv=VECTOR_IV)
        assert token == VECTOR_TOKEN
        assert fernet_decrypt(VECTOR_TOKEN, keys) == b"hello"

    def test_token_fields(self):
        keys = derive_keys("pw")
        tok = FernetToken.parse(fernet_encrypt(b"abc", keys, timestamp=42, iv=bytes(16)))
        assert tok.version == 0x80 and tok.timestamp == 42 and tok.iv == bytes(16)
        assert len(tok.ciphertext) == 16 and len(tok.hmac) == 32
        assert tok.to_bytes() == fernet_encrypt(b"abc", keys, timestamp=42, iv=bytes(16))

    def test_empty_plaintext_is_one_block(self):
        tok = FernetToken.parse(fernet_encrypt(b"", derive_keys("pw")))
        assert len(tok.ciphertext) == 16

    @pytest.mark.parametrize("length", [0, 1, 15, 16, 17, 100])
    def test_ciphertext_length(self, length):
        tok = FernetToken.parse(fernet_encrypt(bytes(length), derive_keys("pw")))
        assert len(tok.ciphertext) == 16 * ((length + 16) // 16)

    def test_version_byte(self):
        raw = base64.urlsafe_b64decode(fernet_encrypt(os.urandom(33), derive_keys("pw")))
        assert raw[0] == 0x80

    def test_interop_with_cryptography(self):
        from cryptography.fernet import Fernet

        keys = derive_keys("interop")
        msg = os.urandom(1000)
        assert Fernet(keys.fernet_key).decrypt(fernet_encrypt(msg, keys)) == msg
        assert fernet_decrypt(Fernet(keys.fernet_key).encrypt(msg), keys) == msg

    def test_roundtrip_up_to_one_mib(self):
        keys = derive_keys("pw")
        for size in (0, 1, 1000, 1 << 20):
            msg = os.urandom(size)
            assert fernet_decrypt(fernet_encrypt(msg, keys), keys) == msg

    def test_wrong_password(self):
        token = fernet_encrypt(b"secret", derive_keys("A"))
        with pytest.raises(AuthenticationFailure):
            fernet_decrypt(token, derive_keys("B"))

    def test_single_bit_flips_in_raw_token(self):
        keys = derive_keys("pw")
        token = fernet_encrypt(b"short message", keys, timestamp=1, iv=bytes(16))
        raw = bytearray(base64.urlsafe_b64decode(token))
        for i in range(len(raw) * 8):
            raw[i // 8] ^= 1 << (i % 8)
            with pytest.raises(AuthenticationFailure):
                fernet_decrypt(base64.urlsafe_b64encode(bytes(raw)), keys)
            raw[i // 8] ^= 1 << (i % 8)

    @pytest.mark.parametrize("token", [b"", b"not base64!", b"gAAA", "é"])
    def test_malformed(self, token):
        with pytest.raises(AuthenticationFailure):
            fernet_decrypt(token, derive_keys("pw"))

    def test_wrong_version(self):
        keys = derive_keys("pw")
        raw = bytearray(base64.urlsafe_b64decode(fernet_encrypt(b"x", keys)))
        raw[0] = 0x81
        with pytest.raises(AuthenticationFailure):
            fernet_decrypt(base64.urlsafe_b64encode(bytes(raw)), keys)
