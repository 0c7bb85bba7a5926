from __future__ import annotations

import hashlib

import pytest
from hypothesis import given, strategies as st

from credchain.encoding import (
    ZERO_ADDRESS,
    ZERO_HASH,
    canonical,
    enc_field,
    enc_uint,
    leading_zero_bits,
    seconds_str,
    seconds_to_us,
    sha256,
)

# FIPS 180-2 SHA-256 vectors.
SHA256_EMPTY = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
SHA256_ABC = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_sha256_known_vectors():
    assert sha256(b"").hex() == SHA256_EMPTY
    assert sha256(b"abc").hex() == SHA256_ABC


def test_enc_uint_minimal_big_endian():
    assert enc_uint(0) == b"\x00"
    assert enc_uint(1) == b"\x01"
    assert enc_uint(255) == b"\xff"
    assert enc_uint(256) == b"\x01\x00"
    assert enc_uint(2**64) == b"\x01" + b"\x00" * 8


def test_enc_field_length_prefix():
    assert enc_field(b"") == b"\x00\x00\x00\x00"
    assert enc_field(b"ab") == b"\x00\x00\x00\x02ab"


def test_canonical_layout_pinned():
    # one int, one str, one bytes field, in declared order
    blob = canonical(7, "hi", b"\x01\x02")
    assert blob == (
        b"\x00\x00\x00\x01\x07" b"\x00\x00\x00\x02hi" b"\x00\x00\x00\x02\x01\x02"
    )


def test_canonical_rejects_bool_and_negative():
    with pytest.raises(TypeError):
        canonical(True)
    with pytest.raises(ValueError):
        canonical(-1)


@given(st.lists(st.binary(max_size=40), min_size=1, max_size=5))
def test_canonical_is_injective_on_field_boundaries(fields):
    # moving a byte across a field boundary must change the encoding
    blob = canonical(*fields)
    total = sum(len(f) for f in fields) + 4 * len(fields)
    assert len(blob) == total
    if len(fields) >= 2 and fields[0]:
        moved = [fields[0][:-1], fields[0][-1:] + fields[1]] + list(fields[2:])
        assert canonical(*moved) != blob


def test_leading_zero_bits_against_int_oracle():
    assert leading_zero_bits(b"\x00" * 32) == 256
    assert leading_zero_bits(b"\xff" + b"\x00" * 31) == 0
    assert leading_zero_bits(b"\x00\x80" + b"\x00" * 30) == 8
    assert leading_zero_bits(b"\x0f" + b"\x00" * 31) == 4


@given(st.binary(min_size=32, max_size=32))
def test_leading_zero_bits_property(digest):
    bits = leading_zero_bits(digest)
    value = int.from_bytes(digest, "big")
    assert bits == 256 - value.bit_length()


def test_zero_constants():
    assert len(ZERO_ADDRESS) == 20 and set(ZERO_ADDRESS) == {0}
    assert len(ZERO_HASH) == 32 and set(ZERO_HASH) == {0}


def test_seconds_str_fixed_six_decimals():
    assert seconds_str(0) == "0.000000"
    assert seconds_str(1) == "0.000001"
    assert seconds_str(4_082_000) == "4.082000"
    assert seconds_str(1_052_000_000) == "1052.000000"


def test_seconds_to_us_parses_strings_and_numbers():
    assert seconds_to_us("4.082000") == 4_082_000
    assert seconds_to_us("0.000001") == 1
    assert seconds_to_us(2) == 2_000_000
    with pytest.raises(ValueError):
        seconds_to_us("0.0000001")  # below one microsecond


@given(us=st.integers(min_value=0, max_value=10**15))
def test_seconds_round_trip(us):
    assert seconds_to_us(seconds_str(us)) == us


def test_sha256_matches_hashlib_on_arbitrary_input():
    data = bytes(range(256)) * 3
    assert sha256(data) == hashlib.sha256(data).digest()
