"""Canonical byte encoding shared by every hashed or signed structure.

Everything that gets hashed or signed (transactions, block headers, the
post-block state image) runs through the same scheme so all components
agree byte-exactly:

* each field is encoded to bytes, then prefixed with its length as a
  4-byte big-endian unsigned integer, and the prefixed fields are
  concatenated in declared field order;
* unsigned integers encode as minimal-length big-endian bytes (zero is
  the single byte 0x00);
* text encodes as UTF-8; addresses are their raw 20 bytes, digests their
  raw 32 bytes.

The byte-level layout is documented in docs/wire-formats.md and pinned
by tests; changing it invalidates every stored chain.
"""

from __future__ import annotations

import hashlib

ADDRESS_LEN = 20
HASH_LEN = 32

ZERO_ADDRESS = b"\x00" * ADDRESS_LEN
ZERO_HASH = b"\x00" * HASH_LEN

# Simulated time is carried as integer microseconds end to end; only
# rendering converts to seconds.
US_PER_SECOND = 10**6


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def enc_uint(value: int) -> bytes:
    if value < 0:
        raise ValueError(f"unsigned field is negative: {value}")
    return value.to_bytes((value.bit_length() + 7) // 8 or 1, "big")


def enc_field(data: bytes) -> bytes:
    if len(data) > 0xFFFFFFFF:
        raise ValueError("field exceeds 4-byte length prefix")
    return len(data).to_bytes(4, "big") + data


def canonical(*fields: bytes | int | str) -> bytes:
    """Length-prefix and concatenate fields in the order given."""
    out = bytearray()
    for field in fields:
        if isinstance(field, bool):
            raise TypeError("bool is not a canonical field type")
        if isinstance(field, int):
            data = enc_uint(field)
        elif isinstance(field, str):
            data = field.encode("utf-8")
        elif isinstance(field, (bytes, bytearray)):
            data = bytes(field)
        else:
            raise TypeError(f"cannot encode field of type {type(field).__name__}")
        out += enc_field(data)
    return bytes(out)


def address_to_hex(address: bytes) -> str:
    if len(address) != ADDRESS_LEN:
        raise ValueError(f"address must be {ADDRESS_LEN} bytes, got {len(address)}")
    return "0x" + address.hex()


def address_from_hex(text: str) -> bytes:
    body = text[2:] if text.startswith("0x") else text
    if len(body) != ADDRESS_LEN * 2:
        raise ValueError(f"address hex must be {ADDRESS_LEN * 2} chars, got {len(body)}")
    return bytes.fromhex(body)


def hash_to_hex(digest: bytes) -> str:
    if len(digest) != HASH_LEN:
        raise ValueError(f"digest must be {HASH_LEN} bytes, got {len(digest)}")
    return digest.hex()


def hash_from_hex(text: str) -> bytes:
    if len(text) != HASH_LEN * 2:
        raise ValueError(f"digest hex must be {HASH_LEN * 2} chars, got {len(text)}")
    return bytes.fromhex(text)


def is_hex_digest(text: str) -> bool:
    if len(text) != HASH_LEN * 2:
        return False
    try:
        bytes.fromhex(text)
    except ValueError:
        return False
    return True


def leading_zero_bits(digest: bytes) -> int:
    value = int.from_bytes(digest, "big")
    return len(digest) * 8 - value.bit_length()


def seconds_str(us: int) -> str:
    """Render integer microseconds as a fixed 6-decimal seconds string."""
    if us < 0:
        raise ValueError(f"negative time: {us}")
    return f"{us // US_PER_SECOND}.{us % US_PER_SECOND:06d}"


def seconds_to_us(seconds: float | int | str) -> int:
    """Parse a seconds value into integer microseconds, rejecting values
    finer than 1 microsecond."""
    from decimal import Decimal

    value = Decimal(str(seconds)) * US_PER_SECOND
    us = int(value)
    if us != value:
        raise ValueError(f"{seconds} s is finer than 1 microsecond")
    return us
