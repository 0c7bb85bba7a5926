"""Key management, address derivation, and transaction signing.

Keys are Ed25519: a 32-byte seed deterministically yields the keypair,
and signatures are themselves deterministic, so every signing operation
is reproducible byte-for-byte.  An account address is the last 20 bytes
of SHA-256 over the raw public key, keeping SHA-256 the only digest in
the system.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidSignature as _LibInvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .encoding import ADDRESS_LEN, sha256
from .tx import DEFAULT_GAS_LIMIT, DEFAULT_GAS_PRICE_WEI, SignedTransaction

SEED_LEN = 32
PUBLIC_KEY_LEN = 32
SIGNATURE_LEN = 64

WALLET_FILE_WARNING = (
    "UNENCRYPTED WALLET: the seed below is stored in plaintext. "
    "This file is for the embedded desk-scale ledger only; never reuse "
    "these keys for real funds."
)


class WalletError(Exception):
    pass


class BadSeedLength(WalletError):
    pass


class AddressMismatch(WalletError):
    pass


@dataclass(frozen=True)
class Keypair:
    secret: bytes
    public: bytes


def generate_keypair(seed: bytes) -> Keypair:
    """Derive the deterministic keypair for a 32-byte seed."""
    if len(seed) != SEED_LEN:
        raise BadSeedLength(f"seed must be {SEED_LEN} bytes, got {len(seed)}")
    private = Ed25519PrivateKey.from_private_bytes(seed)
    public = private.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw
    )
    return Keypair(secret=seed, public=public)


def derive_address(public_key: bytes) -> bytes:
    """Account address: last 20 bytes of SHA-256 over the public key."""
    if len(public_key) != PUBLIC_KEY_LEN:
        raise ValueError(f"public key must be {PUBLIC_KEY_LEN} bytes")
    return sha256(public_key)[-ADDRESS_LEN:]


def sign_message(keypair: Keypair, message: bytes) -> bytes:
    return Ed25519PrivateKey.from_private_bytes(keypair.secret).sign(message)


def verify_message(public_key: bytes, message: bytes, signature: bytes) -> bool:
    """Total verification: malformed keys or signatures return False."""
    if len(public_key) != PUBLIC_KEY_LEN or len(signature) != SIGNATURE_LEN:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
    except (_LibInvalidSignature, ValueError):
        return False
    return True


@dataclass
class WalletEntry:
    label: str
    keypair: Keypair
    address: bytes
    next_nonce: int = 0

    @classmethod
    def from_seed(cls, label: str, seed: bytes, next_nonce: int = 0) -> "WalletEntry":
        keypair = generate_keypair(seed)
        return cls(
            label=label,
            keypair=keypair,
            address=derive_address(keypair.public),
            next_nonce=next_nonce,
        )

    def sign_transaction(
        self,
        to: bytes,
        payload: bytes,
        *,
        gas_limit: int = DEFAULT_GAS_LIMIT,
        gas_price: int = DEFAULT_GAS_PRICE_WEI,
        submitted_at_us: int = 0,
        sender: bytes | None = None,
    ) -> SignedTransaction:
        """Fill the nonce, sign the canonical encoding, and advance the
        nonce counter.  The counter moves with the signature, so the
        nonces this entry emits are 0,1,2,... with no gaps."""
        if sender is not None and sender != self.address:
            raise AddressMismatch(
                f"entry {self.label} holds keys for a different address"
            )
        unsigned = SignedTransaction(
            nonce=self.next_nonce,
            sender=self.address,
            to=to,
            payload=payload,
            gas_limit=gas_limit,
            gas_price=gas_price,
            submitted_at_us=submitted_at_us,
            public_key=self.keypair.public,
            signature=b"",
        )
        signature = sign_message(self.keypair, unsigned.signing_bytes())
        tx = SignedTransaction(
            nonce=unsigned.nonce,
            sender=unsigned.sender,
            to=unsigned.to,
            payload=unsigned.payload,
            gas_limit=unsigned.gas_limit,
            gas_price=unsigned.gas_price,
            submitted_at_us=unsigned.submitted_at_us,
            public_key=self.keypair.public,
            signature=signature,
        )
        self.next_nonce += 1
        return tx


def verify_signature(tx: SignedTransaction, public_key: bytes | None = None) -> bool:
    """True iff the signature matches the canonical encoding under the
    key (the transaction's own carried key by default)."""
    key = tx.public_key if public_key is None else public_key
    return verify_message(key, tx.signing_bytes(), tx.signature)


def transaction_is_authentic(tx: SignedTransaction) -> bool:
    """Full ledger-side check: valid signature and the carried public key
    actually derives the sender address."""
    if len(tx.public_key) != PUBLIC_KEY_LEN:
        return False
    if derive_address(tx.public_key) != tx.sender:
        return False
    return verify_signature(tx)


def save_wallet(entry: WalletEntry, path: str | Path) -> None:
    """Write the wallet file (plaintext seed, warning header), owner-only
    permissions on creation."""
    path = Path(path)
    data = {
        "warning": WALLET_FILE_WARNING,
        "label": entry.label,
        "address": "0x" + entry.address.hex(),
        "seed": entry.keypair.secret.hex(),
        "next_nonce": entry.next_nonce,
    }
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    with os.fdopen(fd, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def load_wallet(path: str | Path) -> WalletEntry:
    with open(path) as fh:
        data = json.load(fh)
    entry = WalletEntry.from_seed(
        data["label"], bytes.fromhex(data["seed"]), next_nonce=int(data["next_nonce"])
    )
    stored = data["address"].removeprefix("0x")
    if entry.address.hex() != stored:
        raise WalletError(f"wallet file {path}: address does not match seed")
    return entry
