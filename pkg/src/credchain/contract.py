"""The achievement-registry contract: a deterministic state machine.

The contract keeps three things: its owner, the set of registered
university addresses, and a write-once map from certificate digest to
the record of who stored it.  It mutates only when the ledger executes
a mined transaction; ``get_hash`` is a free view call.

Call payloads are binary: a 1-byte opcode followed by length-prefixed
arguments in declared order (see docs/wire-formats.md).  Opcode 0x00 is
contract deployment (sent to the zero address), 0x01 registers a
university, 0x02 stores a certificate digest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .encoding import ADDRESS_LEN, HASH_LEN, ZERO_ADDRESS, canonical, enc_field, sha256

OP_DEPLOY = 0x00
OP_ADD_UNI = 0x01
OP_STORE_HASH = 0x02

# Flat gas schedule: every call of a kind costs the same, keeping fees
# predictable under the 40,000-gas default limit.  A bare transaction
# with an empty payload costs the base 21,000.
GAS_BASE = 21_000
GAS_DEPLOY = 32_000
GAS_ADD_UNI = 32_000
GAS_STORE_HASH = 30_000

# Revert reasons as they appear in receipts and the exported CSV.
NOT_OWNER = "NotOwner"
UNIVERSITY_ALREADY_REGISTERED = "UniversityAlreadyRegistered"
NOT_REGISTERED_UNIVERSITY = "NotRegisteredUniversity"
DUPLICATE_HASH = "DuplicateHash"
OUT_OF_GAS = "OutOfGas"
INVALID_PAYLOAD = "InvalidPayload"
UNKNOWN_CONTRACT = "UnknownContract"


class PayloadError(ValueError):
    """Raised by the codec for bytes that do not decode to a call."""


@dataclass(frozen=True)
class UniversityMeta:
    name: str
    country: str
    registered_at: int = 0  # block number, filled at execution

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("university name must be non-empty")


@dataclass(frozen=True)
class CertificateRecord:
    issuer: bytes
    stored_at: int  # block number; timestamps live on the block itself
    doc_type_code: int

    def __post_init__(self) -> None:
        if self.issuer == ZERO_ADDRESS:
            raise ValueError("issuer must not be the zero address")


@dataclass(frozen=True)
class CallResult:
    ok: bool
    error: str | None = None

    @classmethod
    def success(cls) -> "CallResult":
        return cls(ok=True)

    @classmethod
    def revert(cls, reason: str) -> "CallResult":
        return cls(ok=False, error=reason)


@dataclass
class ContractState:
    owner: bytes
    universities: dict[bytes, UniversityMeta] = field(default_factory=dict)
    records: dict[bytes, CertificateRecord] = field(default_factory=dict)

    def copy(self) -> "ContractState":
        return ContractState(
            owner=self.owner,
            universities=dict(self.universities),
            records=dict(self.records),
        )

    def add_uni(self, caller: bytes, uni: bytes, meta: UniversityMeta) -> CallResult:
        if caller != self.owner:
            return CallResult.revert(NOT_OWNER)
        if uni in self.universities:
            return CallResult.revert(UNIVERSITY_ALREADY_REGISTERED)
        self.universities[uni] = meta
        return CallResult.success()

    def store_hash(
        self,
        caller: bytes,
        cert_hash: bytes,
        doc_type_code: int,
        *,
        block_number: int,
    ) -> CallResult:
        if caller not in self.universities:
            return CallResult.revert(NOT_REGISTERED_UNIVERSITY)
        if cert_hash in self.records:
            return CallResult.revert(DUPLICATE_HASH)
        self.records[cert_hash] = CertificateRecord(
            issuer=caller,
            stored_at=block_number,
            doc_type_code=doc_type_code,
        )
        return CallResult.success()

    def get_hash(self, cert_hash: bytes) -> CertificateRecord | None:
        """View call: free, never mutates state."""
        return self.records.get(cert_hash)

    def canonical_bytes(self) -> bytes:
        """Deterministic encoding of the full contract storage, used in
        the chain's state root."""
        out = bytearray()
        out += enc_field(self.owner)
        out += enc_field(len(self.universities).to_bytes(4, "big"))
        for uni in sorted(self.universities):
            meta = self.universities[uni]
            out += canonical(uni, meta.name, meta.country, meta.registered_at)
        out += enc_field(len(self.records).to_bytes(4, "big"))
        for cert_hash in sorted(self.records):
            rec = self.records[cert_hash]
            out += canonical(cert_hash, rec.issuer, rec.stored_at, rec.doc_type_code)
        return bytes(out)


def contract_address(owner: bytes, nonce: int) -> bytes:
    """Deployment address: SHA-256 of owner address and deploy nonce,
    truncated to the first 20 bytes."""
    return sha256(canonical(owner, nonce))[:ADDRESS_LEN]


# --- payload codec -------------------------------------------------------


def encode_deploy() -> bytes:
    return bytes([OP_DEPLOY])


def encode_add_uni(uni: bytes, name: str, country: str) -> bytes:
    if len(uni) != ADDRESS_LEN:
        raise PayloadError("university address must be 20 bytes")
    return bytes([OP_ADD_UNI]) + canonical(uni, name, country)


def encode_store_hash(cert_hash: bytes, doc_type_code: int) -> bytes:
    if len(cert_hash) != HASH_LEN:
        raise PayloadError("certificate hash must be 32 bytes")
    if doc_type_code < 0 or doc_type_code > 0xFFFF:
        raise PayloadError("doc_type_code must fit 16 bits")
    return bytes([OP_STORE_HASH]) + canonical(cert_hash, doc_type_code)


def _read_fields(body: bytes, count: int) -> list[bytes]:
    fields = []
    offset = 0
    for _ in range(count):
        if offset + 4 > len(body):
            raise PayloadError("truncated argument length")
        length = int.from_bytes(body[offset : offset + 4], "big")
        offset += 4
        if offset + length > len(body):
            raise PayloadError("truncated argument body")
        fields.append(body[offset : offset + length])
        offset += length
    if offset != len(body):
        raise PayloadError("trailing bytes after arguments")
    return fields


def decode_payload(payload: bytes) -> tuple[int, tuple]:
    """Decode a call payload into (opcode, args).

    Raises PayloadError for anything that is not a well-formed call.
    An empty payload is the zero-cost no-op call, returned as opcode -1.
    """
    if payload == b"":
        return (-1, ())
    opcode = payload[0]
    body = payload[1:]
    if opcode == OP_DEPLOY:
        if body:
            raise PayloadError("deploy takes no arguments")
        return (OP_DEPLOY, ())
    if opcode == OP_ADD_UNI:
        uni, name, country = _read_fields(body, 3)
        if len(uni) != ADDRESS_LEN:
            raise PayloadError("bad university address length")
        return (OP_ADD_UNI, (uni, name.decode("utf-8"), country.decode("utf-8")))
    if opcode == OP_STORE_HASH:
        cert_hash, code = _read_fields(body, 2)
        if len(cert_hash) != HASH_LEN:
            raise PayloadError("bad certificate hash length")
        return (OP_STORE_HASH, (cert_hash, int.from_bytes(code, "big")))
    raise PayloadError(f"unknown opcode {opcode:#04x}")


def flat_gas_cost(payload: bytes) -> int:
    """The flat gas a payload consumes, charged in full even on revert.
    Undecodable payloads burn the base cost."""
    try:
        opcode, _ = decode_payload(payload)
    except PayloadError:
        return GAS_BASE
    return {
        -1: GAS_BASE,
        OP_DEPLOY: GAS_DEPLOY,
        OP_ADD_UNI: GAS_ADD_UNI,
        OP_STORE_HASH: GAS_STORE_HASH,
    }[opcode]
