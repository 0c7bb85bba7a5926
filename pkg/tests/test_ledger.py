from __future__ import annotations

import csv
import dataclasses
import io
from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from credchain import contract as sc
from credchain.encoding import ZERO_ADDRESS, ZERO_HASH, leading_zero_bits, sha256
from credchain.ledger import (
    RECEIPTS_CSV_HEADER,
    STATUS_SUCCESS,
    Block,
    BlockRejected,
    Chain,
    ChainConfig,
    MempoolError,
    reverted,
    transactions_root,
)
from credchain.units import ether, gwei, parse_ether
from credchain.wallet import WalletEntry

MINER = b"\xee" * 20


def wallet(label: str, balance_hint: bytes = b"") -> WalletEntry:
    return WalletEntry.from_seed(label, sha256(b"ledger test " + label.encode()))


def fresh_chain(*funded: tuple[WalletEntry, int], config: ChainConfig | None = None) -> Chain:
    return Chain({entry.address: bal for entry, bal in funded}, config)


def chain_with_registry() -> tuple[Chain, WalletEntry, WalletEntry, bytes]:
    """Chain with a deployed registry and one confirmed university."""
    admin = wallet("admin")
    uni = wallet("uni")
    chain = fresh_chain((admin, ether(100)), (uni, ether(10)))
    chain.submit(
        admin.sign_transaction(
            to=ZERO_ADDRESS, payload=sc.encode_deploy(), submitted_at_us=chain.now_us
        )
    )
    registry = sc.contract_address(admin.address, 0)
    chain.submit(
        admin.sign_transaction(
            to=registry,
            payload=sc.encode_add_uni(uni.address, "Test University", "FI"),
            submitted_at_us=chain.now_us,
        )
    )
    chain.mine_until_empty(MINER)
    return chain, admin, uni, registry


def store_tx(uni: WalletEntry, registry: bytes, seedbytes: bytes, **kwargs):
    return uni.sign_transaction(
        to=registry,
        payload=sc.encode_store_hash(sha256(seedbytes), 1),
        **kwargs,
    )


# ---------------------------------------------------------------------------
# genesis and supply


def test_genesis_block_shape():
    admin = wallet("genesis")
    chain = fresh_chain((admin, ether(100)))
    genesis = chain.head
    assert chain.height == 0
    assert genesis.number == 0
    assert genesis.parent_hash == ZERO_HASH
    assert genesis.transactions == ()
    assert chain.now_us == 0
    assert chain.balance(admin.address) == ether(100)
    assert chain.total_supply() == ether(100) == chain.expected_supply()


def test_mining_pays_fees_and_reward():
    chain, admin, uni, registry = chain_with_registry()
    height = chain.height
    # all fees moved to the miner on top of the minted rewards
    fees = sum(r.fee_wei for r in chain.receipts_in_order())
    assert chain.balance(MINER) == fees + height * chain.config.block_reward_wei
    assert chain.total_supply() == chain.expected_supply()
    assert chain.expected_supply() == ether(110) + height * ether(2)


# ---------------------------------------------------------------------------
# the fee law


def test_receipt_fee_is_exact_product():
    chain, admin, uni, registry = chain_with_registry()
    prices = [gwei(100), gwei(137), gwei(250)]
    for i, price in enumerate(prices):
        chain.submit(
            store_tx(
                uni,
                registry,
                b"fee %d" % i,
                gas_price=price,
                submitted_at_us=chain.now_us,
            )
        )
    chain.mine_until_empty(MINER)
    receipts = chain.receipts_in_order()[-3:]
    assert sorted(r.gas_price for r in receipts) == sorted(prices)
    for r in receipts:
        assert r.status == STATUS_SUCCESS
        assert r.gas_used == sc.GAS_STORE_HASH
        # integer product, cross-checked against exact decimal arithmetic
        assert r.fee_wei == r.gas_used * r.gas_price
        assert Decimal(r.fee_wei) == Decimal(r.gas_used) * Decimal(r.gas_price)


def test_default_max_fee_is_0_004_eth():
    chain, admin, uni, registry = chain_with_registry()
    tx = store_tx(uni, registry, b"cap", submitted_at_us=chain.now_us)
    assert tx.gas_limit * tx.gas_price == parse_ether("0.004")
    chain.submit(tx)
    chain.mine_until_empty(MINER)
    receipt = chain.get_receipt(tx.tx_hash)
    assert receipt.fee_wei <= parse_ether("0.004")
    assert receipt.fee_wei == 30_000 * gwei(100) == parse_ether("0.003")


# ---------------------------------------------------------------------------
# simulated clock


def test_block_timestamp_follows_pow_attempts():
    chain, admin, uni, registry = chain_with_registry()
    tick = chain.config.clock_tick_us
    for prev, block in zip(chain.blocks, chain.blocks[1:]):
        assert block.timestamp_us == prev.timestamp_us + (block.nonce + 1) * tick
    assert chain.now_us == chain.head.timestamp_us
    assert chain.now_us > 0


def test_pow_difficulty_met_by_every_block():
    chain, admin, uni, registry = chain_with_registry()
    assert chain.config.difficulty_bits == 12
    for block in chain.blocks[1:]:
        assert leading_zero_bits(block.block_hash) >= 12


def test_confirmation_delay_from_receipts():
    chain, admin, uni, registry = chain_with_registry()
    submitted = chain.now_us
    tx = store_tx(uni, registry, b"delay", submitted_at_us=submitted)
    chain.submit(tx)
    block = chain.mine_block(MINER)
    receipt = chain.get_receipt(tx.tx_hash)
    assert receipt.confirmed_at_us == block.timestamp_us
    assert receipt.delay_us == block.timestamp_us - submitted
    assert receipt.delay_us > 0


# ---------------------------------------------------------------------------
# mempool admission


def test_mempool_rejections():
    admin = wallet("adm2")
    poor = wallet("poor")
    chain = fresh_chain((admin, ether(1)))

    tx = admin.sign_transaction(to=MINER, payload=b"", submitted_at_us=0)
    bad_sig = dataclasses.replace(tx, signature=b"\x00" * 64)
    with pytest.raises(MempoolError) as err:
        chain.submit(bad_sig)
    assert err.value.reason == "BadSignature"

    with pytest.raises(MempoolError) as err:
        chain.submit(
            admin.sign_transaction(
                to=MINER, payload=b"", gas_limit=120_001, submitted_at_us=0
            )
        )
    assert err.value.reason == "GasLimitTooHigh"

    with pytest.raises(MempoolError) as err:
        chain.submit(poor.sign_transaction(to=MINER, payload=b"", submitted_at_us=0))
    assert err.value.reason == "InsufficientFunds"

    chain.submit(tx)
    with pytest.raises(MempoolError) as err:
        chain.submit(tx)
    assert err.value.reason == "AlreadyPending"

    # a second signature over the same (sender, nonce) is also held back
    rival = WalletEntry.from_seed("adm2", sha256(b"ledger test adm2"))
    with pytest.raises(MempoolError) as err:
        chain.submit(rival.sign_transaction(to=MINER, payload=b"x", submitted_at_us=1))
    assert err.value.reason == "NonceAlreadyPending"

    chain.mine_until_empty(MINER)
    with pytest.raises(MempoolError) as err:
        chain.submit(tx)
    assert err.value.reason == "AlreadyMined"

    stale = WalletEntry.from_seed("adm2", sha256(b"ledger test adm2"))
    with pytest.raises(MempoolError) as err:
        chain.submit(stale.sign_transaction(to=MINER, payload=b"y", submitted_at_us=2))
    assert err.value.reason == "NonceTooLow"


def test_pending_orders_by_price_time_hash():
    entries = [wallet(f"order{i}") for i in range(4)]
    chain = fresh_chain(*[(e, ether(1)) for e in entries])
    prices = [gwei(100), gwei(400), gwei(100), gwei(250)]
    txs = [
        e.sign_transaction(to=MINER, payload=b"", gas_price=p, submitted_at_us=i)
        for i, (e, p) in enumerate(zip(entries, prices))
    ]
    for tx in reversed(txs):
        chain.submit(tx)
    assert chain.pending() == [txs[1], txs[3], txs[0], txs[2]]


# ---------------------------------------------------------------------------
# block packing


def test_three_default_transactions_fill_a_block():
    entries = [wallet(f"fill{i}") for i in range(4)]
    chain = fresh_chain(*[(e, ether(1)) for e in entries])
    txs = [
        e.sign_transaction(to=MINER, payload=b"", submitted_at_us=i * 1000)
        for i, e in enumerate(entries)
    ]
    for tx in txs:
        chain.submit(tx)
    # 120,000 gas budget holds exactly three 40,000-limit transactions
    first = chain.mine_block(MINER)
    assert [t.tx_hash for t in first.transactions] == [t.tx_hash for t in txs[:3]]
    second = chain.mine_block(MINER)
    assert [t.tx_hash for t in second.transactions] == [txs[3].tx_hash]


def test_selection_stops_at_first_budget_overflow():
    a, b, c, d = (wallet(f"stop{i}") for i in range(4))
    chain = fresh_chain(*[(e, ether(1)) for e in (a, b, c, d)])
    tx_a = a.sign_transaction(to=MINER, payload=b"", gas_price=gwei(400), submitted_at_us=0)
    tx_b = b.sign_transaction(
        to=MINER, payload=b"", gas_limit=60_000, gas_price=gwei(300), submitted_at_us=0
    )
    tx_c = c.sign_transaction(to=MINER, payload=b"", gas_price=gwei(200), submitted_at_us=0)
    # would fit the leftover 20,000 gas, but selection halts at tx_c
    tx_d = d.sign_transaction(
        to=MINER, payload=b"", gas_limit=20_000, gas_price=gwei(100), submitted_at_us=0
    )
    for tx in (tx_a, tx_b, tx_c, tx_d):
        chain.submit(tx)
    block = chain.mine_block(MINER)
    assert [t.tx_hash for t in block.transactions] == [tx_a.tx_hash, tx_b.tx_hash]
    assert {t.tx_hash for t in chain.pending()} == {tx_c.tx_hash, tx_d.tx_hash}


def test_nonce_gap_waits_for_next_block():
    sender = wallet("gap")
    chain = fresh_chain((sender, ether(1)))
    tx0 = sender.sign_transaction(to=MINER, payload=b"", submitted_at_us=0)
    tx1 = sender.sign_transaction(
        to=MINER, payload=b"", gas_price=gwei(300), submitted_at_us=1
    )
    chain.submit(tx1)
    assert chain.mine_block(MINER) is None  # nothing mineable yet
    chain.submit(tx0)
    # single selection pass: tx1 outbids tx0 and sorts first, gets
    # skipped over the nonce gap, and lands in the following block
    first = chain.mine_block(MINER)
    assert [t.tx_hash for t in first.transactions] == [tx0.tx_hash]
    second = chain.mine_block(MINER)
    assert [t.tx_hash for t in second.transactions] == [tx1.tx_hash]


def test_selection_reserves_full_gas_limit_per_sender():
    sender = wallet("reserve")
    chain = fresh_chain((sender, parse_ether("0.007")))
    tx0 = sender.sign_transaction(to=MINER, payload=b"", submitted_at_us=0)
    tx1 = sender.sign_transaction(to=MINER, payload=b"", submitted_at_us=1)
    chain.submit(tx0)
    chain.submit(tx1)
    # 0.007 covers one reserved max fee (0.004) but not two
    first = chain.mine_block(MINER)
    assert [t.tx_hash for t in first.transactions] == [tx0.tx_hash]
    # the actual charge was 21,000 gas, so the balance frees up for tx1
    assert chain.balance(sender.address) == parse_ether("0.007") - 21_000 * gwei(100)
    second = chain.mine_block(MINER)
    assert [t.tx_hash for t in second.transactions] == [tx1.tx_hash]
    assert chain.balance(sender.address) == parse_ether("0.007") - 2 * 21_000 * gwei(100)


@settings(max_examples=20, deadline=None)
@given(
    data=st.lists(
        st.tuples(
            st.integers(min_value=1, max_value=500),  # gas price in gwei
            st.integers(min_value=0, max_value=10_000_000),  # submitted_at_us
        ),
        min_size=1,
        max_size=7,
    )
)
def test_blocks_drain_mempool_in_priority_order(data):
    entries = [wallet(f"prio{i}") for i in range(len(data))]
    config = ChainConfig(difficulty_bits=6)
    chain = fresh_chain(*[(e, ether(1)) for e in entries], config=config)
    for entry, (price, at_us) in zip(entries, data):
        chain.submit(
            entry.sign_transaction(
                to=MINER, payload=b"", gas_price=gwei(price), submitted_at_us=at_us
            )
        )
    expected = [tx.tx_hash for tx in chain.pending()]
    blocks = chain.mine_until_empty(MINER)
    mined = [tx.tx_hash for b in blocks for tx in b.transactions]
    # identical gas limits: mining must preserve the mempool total order
    # and cut it into 3-transaction blocks
    assert mined == expected
    assert all(len(b.transactions) <= 3 for b in blocks)
    for b in blocks[:-1]:
        assert len(b.transactions) == 3


# ---------------------------------------------------------------------------
# execution outcomes


def test_revert_burns_full_flat_gas():
    chain, admin, uni, registry = chain_with_registry()
    intruder = wallet("intruder")
    chain.accounts.setdefault(intruder.address, type(chain.accounts[uni.address])())
    chain.accounts[intruder.address].balance = ether(1)
    tx = intruder.sign_transaction(
        to=registry,
        payload=sc.encode_add_uni(intruder.address, "Fake", "XX"),
        submitted_at_us=chain.now_us,
    )
    chain.submit(tx)
    before_unis = dict(chain.get_contract(registry).universities)
    chain.mine_until_empty(MINER)
    receipt = chain.get_receipt(tx.tx_hash)
    assert receipt.status == reverted(sc.NOT_OWNER) == "reverted(NotOwner)"
    assert receipt.gas_used == sc.GAS_ADD_UNI
    assert receipt.fee_wei == 32_000 * gwei(100)
    assert chain.get_contract(registry).universities == before_unis
    assert chain.next_nonce(intruder.address) == 1  # nonce still consumed


def test_out_of_gas_burns_the_whole_limit():
    chain, admin, uni, registry = chain_with_registry()
    tx = uni.sign_transaction(
        to=registry,
        payload=sc.encode_store_hash(sha256(b"oog"), 1),
        gas_limit=25_000,
        submitted_at_us=chain.now_us,
    )
    chain.submit(tx)
    chain.mine_until_empty(MINER)
    receipt = chain.get_receipt(tx.tx_hash)
    assert receipt.status == reverted(sc.OUT_OF_GAS)
    assert receipt.gas_used == 25_000  # the full limit, more than the flat 30,000 would
    assert chain.get_contract(registry).get_hash(sha256(b"oog")) is None


def test_duplicate_hash_reverts_second_store():
    chain, admin, uni, registry = chain_with_registry()
    digest = sha256(b"duplicate me")
    first = uni.sign_transaction(
        to=registry, payload=sc.encode_store_hash(digest, 1), submitted_at_us=chain.now_us
    )
    second = uni.sign_transaction(
        to=registry, payload=sc.encode_store_hash(digest, 2), submitted_at_us=chain.now_us
    )
    chain.submit(first)
    chain.submit(second)
    chain.mine_until_empty(MINER)
    assert chain.get_receipt(first.tx_hash).status == STATUS_SUCCESS
    assert chain.get_receipt(second.tx_hash).status == reverted(sc.DUPLICATE_HASH)
    assert chain.get_contract(registry).get_hash(digest).doc_type_code == 1


def test_calls_to_missing_contract_revert():
    chain, admin, uni, registry = chain_with_registry()
    tx = uni.sign_transaction(
        to=b"\x42" * 20,
        payload=sc.encode_store_hash(sha256(b"nowhere"), 1),
        submitted_at_us=chain.now_us,
    )
    chain.submit(tx)
    chain.mine_until_empty(MINER)
    assert chain.get_receipt(tx.tx_hash).status == reverted(sc.UNKNOWN_CONTRACT)


def test_deploy_must_target_zero_address():
    admin = wallet("deploy2")
    chain = fresh_chain((admin, ether(1)))
    tx = admin.sign_transaction(
        to=b"\x11" * 20, payload=sc.encode_deploy(), submitted_at_us=0
    )
    chain.submit(tx)
    chain.mine_until_empty(MINER)
    assert chain.get_receipt(tx.tx_hash).status == reverted(sc.INVALID_PAYLOAD)
    assert chain.get_contract(sc.contract_address(admin.address, 0)) is None


def test_garbage_payload_reverts_with_base_gas():
    admin = wallet("garbage")
    chain = fresh_chain((admin, ether(1)))
    tx = admin.sign_transaction(to=MINER, payload=b"\xff\xff", submitted_at_us=0)
    chain.submit(tx)
    chain.mine_until_empty(MINER)
    receipt = chain.get_receipt(tx.tx_hash)
    assert receipt.status == reverted(sc.INVALID_PAYLOAD)
    assert receipt.gas_used == sc.GAS_BASE


# ---------------------------------------------------------------------------
# validation and consensus


def replica_of(chain: Chain) -> Chain:
    return Chain(chain.genesis_alloc, chain.config)


def remine(chain: Chain, block: Block, **overrides) -> Block:
    """Rebuild a block with tampered fields but honest proof-of-work, the
    way a cheating miner with real hash power would."""
    parent = chain.head
    fields = dict(
        number=block.number,
        parent_hash=parent.block_hash,
        miner=block.miner,
        tx_root=block.tx_root,
        state_root=block.state_root,
        transactions=block.transactions,
    )
    fields.update(overrides)
    tick = chain.config.clock_tick_us
    for attempt in range(1 << 22):
        candidate = Block(
            nonce=attempt, timestamp_us=parent.timestamp_us + (attempt + 1) * tick, **fields
        )
        if leading_zero_bits(candidate.block_hash) >= chain.config.difficulty_bits:
            return candidate
    raise AssertionError("no proof-of-work found")


def test_honest_block_accepted_unanimously():
    chain, admin, uni, registry = chain_with_registry()
    other = replica_of(chain)
    for block in chain.blocks[1:]:
        assert other.validation_vote(block) == [True] * 5
        other.accept_block(block)
    assert other.state_root() == chain.state_root()
    assert other.head.block_hash == chain.head.block_hash


def test_forged_timestamp_rejected():
    chain, admin, uni, registry = chain_with_registry()
    other = replica_of(chain)
    block = chain.blocks[1]
    forged = dataclasses.replace(block, timestamp_us=block.timestamp_us + 1)
    reasons = other.validate_block(forged)
    assert "InvalidTimestamp" in reasons
    assert other.validation_vote(forged) == [False] * 5
    with pytest.raises(BlockRejected):
        other.accept_block(forged)


def test_tampered_transaction_set_rejected():
    chain, admin, uni, registry = chain_with_registry()
    other = replica_of(chain)
    block = chain.blocks[1]
    stripped = dataclasses.replace(block, transactions=())
    assert "BadTxRoot" in other.validate_block(stripped)
    # even with a recomputed root and fresh proof-of-work, execution
    # exposes the mismatched state commitment
    consistent = remine(other, block, transactions=(), tx_root=transactions_root(()))
    assert other.validate_block(consistent) == ["BadStateRoot"]
    assert other.validation_vote(consistent) == [False] * 5
    with pytest.raises(BlockRejected):
        other.accept_block(consistent)


def test_lazy_miner_state_root_rejected():
    chain, admin, uni, registry = chain_with_registry()
    other = replica_of(chain)
    block = chain.blocks[1]
    lazy = remine(other, block, state_root=sha256(b"made up"))
    assert other.validate_block(lazy) == ["BadStateRoot"]
    with pytest.raises(BlockRejected):
        other.accept_block(lazy)


def test_unsigned_transaction_in_block_rejected():
    chain, admin, uni, registry = chain_with_registry()
    other = replica_of(chain)
    block = chain.blocks[1]
    forged_tx = dataclasses.replace(block.transactions[0], signature=b"\x00" * 64)
    forged = remine(
        other,
        block,
        transactions=(forged_tx, *block.transactions[1:]),
    )
    assert "BadSignature" in other.validate_block(forged)
    with pytest.raises(BlockRejected):
        other.accept_block(forged)


def test_replayed_block_rejected():
    chain, admin, uni, registry = chain_with_registry()
    other = replica_of(chain)
    block = chain.blocks[1]
    other.accept_block(block)
    reasons = other.validate_block(block)
    assert "ReplayedTransaction" in reasons or "BadNumber" in reasons
    with pytest.raises(BlockRejected):
        other.accept_block(block)


def test_pow_shortcut_rejected():
    chain, admin, uni, registry = chain_with_registry()
    other = replica_of(chain)
    block = chain.blocks[1]
    # nonce 0 with the matching timestamp: timestamp law holds but the
    # difficulty target is (almost surely) missed
    tick = chain.config.clock_tick_us
    hasty = dataclasses.replace(
        block, nonce=0, timestamp_us=other.head.timestamp_us + tick
    )
    if leading_zero_bits(hasty.block_hash) >= chain.config.difficulty_bits:
        pytest.skip("nonce 0 happened to satisfy the target")
    assert "BadPoW" in other.validate_block(hasty)


def test_block_gas_limit_enforced_on_validation():
    entries = [wallet(f"glimit{i}") for i in range(4)]
    chain = fresh_chain(*[(e, ether(1)) for e in entries])
    other = replica_of(chain)
    txs = tuple(
        e.sign_transaction(to=MINER, payload=b"", submitted_at_us=0) for e in entries
    )
    # four 40,000-limit transactions exceed the 120,000 budget
    overfull = remine(other, chain.head, number=1, miner=MINER,
                      transactions=txs, tx_root=transactions_root(txs))
    assert "GasLimitExceeded" in other.validate_block(overfull)
    with pytest.raises(BlockRejected):
        other.accept_block(overfull)


# ---------------------------------------------------------------------------
# persistence


def test_export_import_round_trip(tmp_path):
    chain, admin, uni, registry = chain_with_registry()
    for i in range(4):
        chain.submit(store_tx(uni, registry, b"rt %d" % i, submitted_at_us=chain.now_us))
    chain.mine_until_empty(MINER)
    path = tmp_path / "chain.ndjson"
    chain.export_ndjson(path)
    text = path.read_text()
    assert text == chain.export_ndjson_text()
    assert text.splitlines()[0].startswith('{"block_gas_limit"') or "config" in text.splitlines()[0]

    replayed = Chain.import_ndjson(path)
    assert replayed.head.block_hash == chain.head.block_hash
    assert replayed.state_root() == chain.state_root()
    assert replayed.export_ndjson_text() == text
    ours = [r.to_csv_row() for r in chain.receipts_in_order()]
    theirs = [r.to_csv_row() for r in replayed.receipts_in_order()]
    assert ours == theirs
    assert replayed.total_supply() == chain.total_supply()


def test_import_rejects_tampered_chain_file(tmp_path):
    chain, admin, uni, registry = chain_with_registry()
    path = tmp_path / "chain.ndjson"
    chain.export_ndjson(path)
    lines = path.read_text().splitlines()
    doctored = lines[:]
    doctored[-1] = doctored[-1].replace('"number": ', '"number": 9', 1)
    bad = tmp_path / "tampered.ndjson"
    bad.write_text("\n".join(doctored) + "\n")
    with pytest.raises((ValueError, BlockRejected)):
        Chain.import_ndjson(bad)


def test_import_requires_config_record(tmp_path):
    chain, *_ = chain_with_registry()
    path = tmp_path / "chain.ndjson"
    chain.export_ndjson(path)
    headless = tmp_path / "headless.ndjson"
    headless.write_text("\n".join(path.read_text().splitlines()[1:]) + "\n")
    with pytest.raises(Exception):
        Chain.import_ndjson(headless)


def test_block_json_round_trip_checks_hash():
    chain, *_ = chain_with_registry()
    block = chain.blocks[1]
    data = block.to_json_dict()
    assert Block.from_json_dict(data) == block
    data["timestamp_s"] = "9999.000000"
    with pytest.raises(ValueError):
        Block.from_json_dict(data)


def test_receipts_csv_shape(tmp_path):
    chain, admin, uni, registry = chain_with_registry()
    path = tmp_path / "receipts.csv"
    chain.write_receipts_csv(path)
    text = path.read_text()
    lines = text.splitlines()
    assert lines[0] == RECEIPTS_CSV_HEADER
    assert (
        lines[0]
        == "tx_hash,block_number,from,gas_used,gas_price_wei,fee_wei,"
        "submitted_at_s,confirmed_at_s,delay_s,status"
    )
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == len(chain.receipts_in_order())
    for row, receipt in zip(rows, chain.receipts_in_order()):
        assert int(row["gas_used"]) == receipt.gas_used
        assert int(row["fee_wei"]) == receipt.fee_wei
        assert int(row["gas_used"]) * int(row["gas_price_wei"]) == int(row["fee_wei"])
        assert row["status"] in (STATUS_SUCCESS, "reverted(NotOwner)") or row[
            "status"
        ].startswith("reverted(")


# ---------------------------------------------------------------------------
# config guard rails


def test_chain_config_validation():
    with pytest.raises(ValueError):
        ChainConfig(node_count=4)
    with pytest.raises(ValueError):
        ChainConfig(node_count=0)
    with pytest.raises(ValueError):
        ChainConfig(difficulty_bits=-1)
    with pytest.raises(ValueError):
        ChainConfig(block_gas_limit=0)
    round_tripped = ChainConfig.from_json_dict(ChainConfig().to_json_dict())
    assert round_tripped == ChainConfig(max_pow_attempts=round_tripped.max_pow_attempts)
