"""Signed transaction structure and its canonical byte form.

A transaction is a contract call: sender, target contract, opaque call
payload, gas limit/price, and the simulated-seconds timestamp at which it
was submitted.  The transaction hash is the SHA-256 of the canonical
encoding of those fields; the detached signature covers the same bytes.
The signer's public key travels alongside the signature because an
address (a digest of the key) cannot be recovered from it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .encoding import (
    ADDRESS_LEN,
    address_from_hex,
    address_to_hex,
    canonical,
    hash_to_hex,
    sha256,
)
from .units import WEI_PER_GWEI

DEFAULT_GAS_LIMIT = 40_000
DEFAULT_GAS_PRICE_WEI = 100 * WEI_PER_GWEI


@dataclass(frozen=True)
class SignedTransaction:
    nonce: int
    sender: bytes
    to: bytes
    payload: bytes
    gas_limit: int
    gas_price: int  # Wei per gas unit
    submitted_at_us: int
    public_key: bytes
    signature: bytes

    def __post_init__(self) -> None:
        if len(self.sender) != ADDRESS_LEN or len(self.to) != ADDRESS_LEN:
            raise ValueError("sender and to must be 20-byte addresses")
        if self.gas_limit <= 0:
            raise ValueError(f"gas_limit must be positive, got {self.gas_limit}")
        if self.gas_price < 0:
            raise ValueError(f"gas_price must be non-negative, got {self.gas_price}")
        if self.nonce < 0 or self.submitted_at_us < 0:
            raise ValueError("nonce and submitted_at must be non-negative")

    def signing_bytes(self) -> bytes:
        """Canonical encoding of all fields prior to the signature block."""
        return canonical(
            self.nonce,
            self.sender,
            self.to,
            self.payload,
            self.gas_limit,
            self.gas_price,
            self.submitted_at_us,
        )

    @property
    def tx_hash(self) -> bytes:
        return sha256(self.signing_bytes())

    @property
    def tx_hash_hex(self) -> str:
        return hash_to_hex(self.tx_hash)

    def to_json_dict(self) -> dict:
        return {
            "nonce": self.nonce,
            "from": address_to_hex(self.sender),
            "to": address_to_hex(self.to),
            "payload": self.payload.hex(),
            "gas_limit": self.gas_limit,
            "gas_price_wei": str(self.gas_price),
            "submitted_at_s": _seconds_str(self.submitted_at_us),
            "public_key": self.public_key.hex(),
            "signature": self.signature.hex(),
            "tx_hash": self.tx_hash_hex,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SignedTransaction":
        from .encoding import seconds_to_us

        return cls(
            nonce=int(data["nonce"]),
            sender=address_from_hex(data["from"]),
            to=address_from_hex(data["to"]),
            payload=bytes.fromhex(data["payload"]),
            gas_limit=int(data["gas_limit"]),
            gas_price=int(data["gas_price_wei"]),
            submitted_at_us=seconds_to_us(data["submitted_at_s"]),
            public_key=bytes.fromhex(data["public_key"]),
            signature=bytes.fromhex(data["signature"]),
        )


def _seconds_str(us: int) -> str:
    from .encoding import seconds_str

    return seconds_str(us)


def mempool_sort_key(tx: SignedTransaction) -> tuple:
    """Total pending order: gas price descending, then submission time,
    then transaction hash."""
    return (-tx.gas_price, tx.submitted_at_us, tx.tx_hash)
