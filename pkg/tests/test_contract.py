import hashlib

import pytest
from hypothesis import given, strategies as st

from credchain import contract as sc
from credchain.encoding import canonical, sha256

OWNER = b"\x0a" * 20
UNI = b"\x0b" * 20
OTHER = b"\x0c" * 20
H1 = sha256(b"certificate one")
H2 = sha256(b"certificate two")


def fresh_state() -> sc.ContractState:
    return sc.ContractState(owner=OWNER)


def meta(name: str = "Aalto University", country: str = "FI", at: int = 1):
    return sc.UniversityMeta(name=name, country=country, registered_at=at)


# ---------------------------------------------------------------------------
# payload codec


def test_opcodes_are_distinct():
    assert sc.OP_DEPLOY == 0x00
    assert sc.OP_ADD_UNI == 0x01
    assert sc.OP_STORE_HASH == 0x02


def test_deploy_payload_round_trip():
    op, args = sc.decode_payload(sc.encode_deploy())
    assert op == sc.OP_DEPLOY
    assert args == ()


def test_add_uni_payload_round_trip():
    payload = sc.encode_add_uni(UNI, "Aalto University", "FI")
    op, args = sc.decode_payload(payload)
    assert op == sc.OP_ADD_UNI
    assert args == (UNI, "Aalto University", "FI")


def test_store_hash_payload_round_trip():
    payload = sc.encode_store_hash(H1, 2)
    op, args = sc.decode_payload(payload)
    assert op == sc.OP_STORE_HASH
    assert args == (H1, 2)


def test_empty_payload_is_plain_transfer():
    op, args = sc.decode_payload(b"")
    assert op == -1
    assert args == ()


@pytest.mark.parametrize(
    "payload",
    [
        b"\x99",  # unknown opcode
        bytes([sc.OP_ADD_UNI]),  # missing args
        sc.encode_add_uni(UNI, "X", "FI")[:-1],  # truncated
        sc.encode_add_uni(UNI, "X", "FI") + b"\x00",  # trailing bytes
        bytes([sc.OP_STORE_HASH]) + canonical(b"\x01" * 31, 1),  # short hash
        bytes([sc.OP_ADD_UNI]) + canonical(b"\x01" * 19, "X", "FI"),  # short addr
        bytes([sc.OP_DEPLOY, 0x00]),  # deploy takes no args
    ],
)
def test_malformed_payloads_rejected(payload):
    with pytest.raises(sc.PayloadError):
        sc.decode_payload(payload)


def test_store_hash_codec_bounds():
    with pytest.raises(sc.PayloadError):
        sc.encode_store_hash(H1, -1)
    with pytest.raises(sc.PayloadError):
        sc.encode_store_hash(H1, 0x10000)
    with pytest.raises(sc.PayloadError):
        sc.encode_store_hash(b"\x01" * 16, 1)
    with pytest.raises(sc.PayloadError):
        sc.encode_add_uni(b"\x01" * 19, "X", "FI")


@given(
    name=st.text(min_size=0, max_size=40),
    country=st.text(min_size=0, max_size=8),
    addr=st.binary(min_size=20, max_size=20),
)
def test_add_uni_codec_round_trips_any_text(name, country, addr):
    op, args = sc.decode_payload(sc.encode_add_uni(addr, name, country))
    assert (op, args) == (sc.OP_ADD_UNI, (addr, name, country))


# ---------------------------------------------------------------------------
# gas table


def test_flat_gas_table():
    assert sc.flat_gas_cost(sc.encode_deploy()) == 32_000
    assert sc.flat_gas_cost(sc.encode_add_uni(UNI, "A", "FI")) == 32_000
    assert sc.flat_gas_cost(sc.encode_store_hash(H1, 1)) == 30_000
    assert sc.flat_gas_cost(b"") == 21_000


def test_undecodable_payload_charges_base_gas():
    # charged before decoding, so garbage still burns the base amount
    assert sc.flat_gas_cost(b"\xde\xad\xbe\xef") == sc.GAS_BASE == 21_000


# ---------------------------------------------------------------------------
# registry rules


def test_owner_adds_university():
    state = fresh_state()
    result = state.add_uni(OWNER, UNI, meta(at=3))
    assert result.ok
    stored = state.universities[UNI]
    assert stored.name == "Aalto University"
    assert stored.country == "FI"
    assert stored.registered_at == 3


def test_non_owner_cannot_add_university():
    state = fresh_state()
    result = state.add_uni(OTHER, UNI, meta())
    assert not result.ok
    assert result.error == sc.NOT_OWNER
    assert UNI not in state.universities


def test_duplicate_university_reverts():
    state = fresh_state()
    assert state.add_uni(OWNER, UNI, meta(name="A")).ok
    result = state.add_uni(OWNER, UNI, meta(name="A again"))
    assert result.error == sc.UNIVERSITY_ALREADY_REGISTERED
    assert state.universities[UNI].name == "A"


def test_unregistered_caller_cannot_store():
    state = fresh_state()
    result = state.store_hash(OTHER, H1, 1, block_number=1)
    assert result.error == sc.NOT_REGISTERED_UNIVERSITY
    assert state.get_hash(H1) is None


def test_owner_is_not_automatically_a_university():
    state = fresh_state()
    result = state.store_hash(OWNER, H1, 1, block_number=1)
    assert result.error == sc.NOT_REGISTERED_UNIVERSITY


def test_registered_university_stores_hash():
    state = fresh_state()
    state.add_uni(OWNER, UNI, meta())
    result = state.store_hash(UNI, H1, 2, block_number=5)
    assert result.ok
    record = state.get_hash(H1)
    assert record.issuer == UNI
    assert record.stored_at == 5
    assert record.doc_type_code == 2


def test_records_are_write_once():
    state = fresh_state()
    state.add_uni(OWNER, UNI, meta(name="A"))
    state.add_uni(OWNER, OTHER, meta(name="B", country="SE"))
    assert state.store_hash(UNI, H1, 1, block_number=2).ok
    # neither the same issuer nor a different one may overwrite
    assert state.store_hash(UNI, H1, 2, block_number=3).error == sc.DUPLICATE_HASH
    assert state.store_hash(OTHER, H1, 1, block_number=3).error == sc.DUPLICATE_HASH
    assert state.get_hash(H1).stored_at == 2


def test_get_hash_is_pure():
    state = fresh_state()
    state.add_uni(OWNER, UNI, meta())
    state.store_hash(UNI, H1, 1, block_number=2)
    before = state.canonical_bytes()
    assert state.get_hash(H1) is not None
    assert state.get_hash(H2) is None
    assert state.canonical_bytes() == before


def test_copy_isolates_state():
    state = fresh_state()
    state.add_uni(OWNER, UNI, meta())
    fork = state.copy()
    fork.store_hash(UNI, H1, 1, block_number=2)
    assert state.get_hash(H1) is None
    assert fork.get_hash(H1) is not None
    assert state.canonical_bytes() != fork.canonical_bytes()


def test_canonical_bytes_independent_of_insertion_order():
    a = fresh_state()
    b = fresh_state()
    a.add_uni(OWNER, UNI, meta(name="A"))
    a.add_uni(OWNER, OTHER, meta(name="B", country="SE"))
    b.add_uni(OWNER, OTHER, meta(name="B", country="SE"))
    b.add_uni(OWNER, UNI, meta(name="A"))
    a.store_hash(UNI, H1, 1, block_number=2)
    a.store_hash(UNI, H2, 2, block_number=2)
    b.store_hash(UNI, H2, 2, block_number=2)
    b.store_hash(UNI, H1, 1, block_number=2)
    assert a.canonical_bytes() == b.canonical_bytes()


# ---------------------------------------------------------------------------
# contract address derivation


def test_contract_address_matches_inline_oracle():
    for nonce in (0, 1, 7):
        expected = hashlib.sha256(canonical(OWNER, nonce)).digest()[:20]
        assert sc.contract_address(OWNER, nonce) == expected
        assert len(sc.contract_address(OWNER, nonce)) == 20


def test_contract_address_depends_on_owner_and_nonce():
    a = sc.contract_address(OWNER, 0)
    assert sc.contract_address(OWNER, 1) != a
    assert sc.contract_address(OTHER, 0) != a
