"""In-process ledger: accounts, mempool, proof-of-work blocks, receipts.

Everything here is deterministic.  There is no wall clock; simulated
time is an integer microsecond counter that advances only while mining.
Each proof-of-work attempt with nonce ``n`` hashes a header whose
timestamp is ``parent_timestamp + (n + 1) * clock_tick_us``, so the
winning nonce fixes the block timestamp and any validator can re-check
both the work and the clock from the header alone.

Blocks are accepted by a majority vote of ``node_count`` simulated
validator nodes, each of which independently re-executes the block.
Receipts record the exact fee, ``gas_used * gas_price``, and the
confirmation delay between submission and the mined block's timestamp.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from . import contract as sc
from .encoding import (
    ADDRESS_LEN,
    ZERO_ADDRESS,
    ZERO_HASH,
    address_from_hex,
    address_to_hex,
    canonical,
    enc_field,
    hash_from_hex,
    hash_to_hex,
    leading_zero_bits,
    seconds_str,
    seconds_to_us,
    sha256,
)
from .tx import SignedTransaction, mempool_sort_key
from .units import ether
from .wallet import transaction_is_authentic

DEFAULT_DIFFICULTY_BITS = 12
DEFAULT_BLOCK_GAS_LIMIT = 120_000
DEFAULT_NODE_COUNT = 5
DEFAULT_CLOCK_TICK_US = 1000  # 0.001 s of simulated time per hash attempt

RECEIPTS_CSV_HEADER = (
    "tx_hash,block_number,from,gas_used,gas_price_wei,fee_wei,"
    "submitted_at_s,confirmed_at_s,delay_s,status"
)

STATUS_SUCCESS = "success"


def reverted(reason: str) -> str:
    return f"reverted({reason})"


class LedgerError(Exception):
    pass


class MempoolError(LedgerError):
    """Transaction rejected at submission; .reason carries the code."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


class MiningError(LedgerError):
    pass


class BlockRejected(LedgerError):
    def __init__(self, reasons: list[str]):
        super().__init__("block rejected: " + ", ".join(reasons))
        self.reasons = reasons


class _ExecutionInvalid(Exception):
    """Internal: block re-execution hit a consensus-breaking condition."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class ChainConfig:
    difficulty_bits: int = DEFAULT_DIFFICULTY_BITS
    block_gas_limit: int = DEFAULT_BLOCK_GAS_LIMIT
    node_count: int = DEFAULT_NODE_COUNT
    block_reward_wei: int = ether(2)
    clock_tick_us: int = DEFAULT_CLOCK_TICK_US
    max_pow_attempts: int = 1 << 24

    def __post_init__(self) -> None:
        if self.node_count < 1 or self.node_count % 2 == 0:
            raise ValueError("node_count must be odd and at least 1")
        if not 0 <= self.difficulty_bits <= 64:
            raise ValueError("difficulty_bits out of range")
        if self.block_gas_limit <= 0 or self.clock_tick_us <= 0:
            raise ValueError("block_gas_limit and clock_tick_us must be positive")
        if self.block_reward_wei < 0:
            raise ValueError("block_reward_wei must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "difficulty_bits": self.difficulty_bits,
            "block_gas_limit": self.block_gas_limit,
            "node_count": self.node_count,
            "block_reward_wei": str(self.block_reward_wei),
            "clock_tick_us": self.clock_tick_us,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ChainConfig":
        return cls(
            difficulty_bits=int(data["difficulty_bits"]),
            block_gas_limit=int(data["block_gas_limit"]),
            node_count=int(data["node_count"]),
            block_reward_wei=int(data["block_reward_wei"]),
            clock_tick_us=int(data["clock_tick_us"]),
        )


@dataclass
class AccountState:
    balance: int = 0
    nonce: int = 0


def transactions_root(txs: Iterable[SignedTransaction]) -> bytes:
    return sha256(canonical(*[tx.tx_hash for tx in txs]))


@dataclass(frozen=True)
class Block:
    number: int
    parent_hash: bytes
    timestamp_us: int
    miner: bytes
    nonce: int
    tx_root: bytes
    state_root: bytes
    transactions: tuple[SignedTransaction, ...] = ()

    def header_bytes(self) -> bytes:
        return canonical(
            self.number,
            self.parent_hash,
            self.timestamp_us,
            self.miner,
            self.tx_root,
            self.state_root,
            self.nonce,
        )

    @property
    def block_hash(self) -> bytes:
        return sha256(self.header_bytes())

    def to_json_dict(self) -> dict:
        return {
            "number": self.number,
            "hash": hash_to_hex(self.block_hash),
            "parent_hash": hash_to_hex(self.parent_hash),
            "timestamp_s": seconds_str(self.timestamp_us),
            "miner": address_to_hex(self.miner),
            "nonce": self.nonce,
            "tx_root": hash_to_hex(self.tx_root),
            "state_root": hash_to_hex(self.state_root),
            "transactions": [tx.to_json_dict() for tx in self.transactions],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Block":
        block = cls(
            number=int(data["number"]),
            parent_hash=hash_from_hex(data["parent_hash"]),
            timestamp_us=seconds_to_us(data["timestamp_s"]),
            miner=address_from_hex(data["miner"]),
            nonce=int(data["nonce"]),
            tx_root=hash_from_hex(data["tx_root"]),
            state_root=hash_from_hex(data["state_root"]),
            transactions=tuple(
                SignedTransaction.from_json_dict(t) for t in data["transactions"]
            ),
        )
        if hash_to_hex(block.block_hash) != data["hash"]:
            raise ValueError("block hash does not match header fields")
        return block


@dataclass(frozen=True)
class Receipt:
    tx_hash: bytes
    block_number: int
    sender: bytes
    gas_used: int
    gas_price: int
    submitted_at_us: int
    confirmed_at_us: int
    status: str

    @property
    def fee_wei(self) -> int:
        return self.gas_used * self.gas_price

    @property
    def delay_us(self) -> int:
        return self.confirmed_at_us - self.submitted_at_us

    @property
    def ok(self) -> bool:
        return self.status == STATUS_SUCCESS

    def to_csv_row(self) -> str:
        return ",".join(
            [
                hash_to_hex(self.tx_hash),
                str(self.block_number),
                address_to_hex(self.sender),
                str(self.gas_used),
                str(self.gas_price),
                str(self.fee_wei),
                seconds_str(self.submitted_at_us),
                seconds_str(self.confirmed_at_us),
                seconds_str(self.delay_us),
                self.status,
            ]
        )

    def to_json_dict(self) -> dict:
        return {
            "tx_hash": hash_to_hex(self.tx_hash),
            "block_number": self.block_number,
            "from": address_to_hex(self.sender),
            "gas_used": self.gas_used,
            "gas_price_wei": str(self.gas_price),
            "fee_wei": str(self.fee_wei),
            "submitted_at_s": seconds_str(self.submitted_at_us),
            "confirmed_at_s": seconds_str(self.confirmed_at_us),
            "delay_s": seconds_str(self.delay_us),
            "status": self.status,
        }


@dataclass
class _ExecOutcome:
    """Per-transaction result of block execution."""

    gas_used: int
    status: str


class Chain:
    """The single shared ledger plus its local mempool."""

    def __init__(
        self,
        genesis_alloc: Mapping[bytes, int],
        config: ChainConfig | None = None,
        *,
        genesis_timestamp_us: int = 0,
    ):
        self.config = config or ChainConfig()
        self.genesis_alloc = dict(genesis_alloc)
        for addr, balance in self.genesis_alloc.items():
            if len(addr) != ADDRESS_LEN:
                raise ValueError("genesis allocation keys must be 20-byte addresses")
            if balance < 0:
                raise ValueError("genesis balances must be non-negative")
        self.accounts: dict[bytes, AccountState] = {
            addr: AccountState(balance=balance)
            for addr, balance in self.genesis_alloc.items()
        }
        self.contracts: dict[bytes, sc.ContractState] = {}
        self.mempool: list[SignedTransaction] = []
        self.receipts: dict[bytes, Receipt] = {}
        self._receipt_order: list[bytes] = []
        genesis = Block(
            number=0,
            parent_hash=ZERO_HASH,
            timestamp_us=genesis_timestamp_us,
            miner=ZERO_ADDRESS,
            nonce=0,
            tx_root=transactions_root(()),
            state_root=self._state_root(self.accounts, self.contracts),
        )
        self.blocks: list[Block] = [genesis]

    # --- read side -------------------------------------------------------

    @property
    def head(self) -> Block:
        return self.blocks[-1]

    @property
    def height(self) -> int:
        return self.head.number

    @property
    def now_us(self) -> int:
        """Simulated clock; advances only when a block is mined."""
        return self.head.timestamp_us

    def balance(self, addr: bytes) -> int:
        acct = self.accounts.get(addr)
        return acct.balance if acct else 0

    def next_nonce(self, addr: bytes) -> int:
        acct = self.accounts.get(addr)
        return acct.nonce if acct else 0

    def get_block(self, number: int) -> Block | None:
        if 0 <= number < len(self.blocks):
            return self.blocks[number]
        return None

    def get_receipt(self, tx_hash: bytes) -> Receipt | None:
        return self.receipts.get(tx_hash)

    def receipts_in_order(self) -> list[Receipt]:
        return [self.receipts[h] for h in self._receipt_order]

    def get_contract(self, addr: bytes) -> sc.ContractState | None:
        return self.contracts.get(addr)

    def total_supply(self) -> int:
        return sum(acct.balance for acct in self.accounts.values())

    def expected_supply(self) -> int:
        """Genesis allocation plus one block reward per mined block.
        Fees only move value, so this must equal total_supply always."""
        minted = self.config.block_reward_wei * self.height
        return sum(self.genesis_alloc.values()) + minted

    def state_root(self) -> bytes:
        return self._state_root(self.accounts, self.contracts)

    @staticmethod
    def _state_root(
        accounts: Mapping[bytes, AccountState],
        contracts: Mapping[bytes, sc.ContractState],
    ) -> bytes:
        out = bytearray()
        out += enc_field(len(accounts).to_bytes(4, "big"))
        for addr in sorted(accounts):
            acct = accounts[addr]
            out += canonical(addr, acct.balance, acct.nonce)
        out += enc_field(len(contracts).to_bytes(4, "big"))
        for addr in sorted(contracts):
            out += enc_field(addr) + enc_field(contracts[addr].canonical_bytes())
        return sha256(bytes(out))

    # --- mempool ---------------------------------------------------------

    def submit(self, tx: SignedTransaction) -> bytes:
        """Admit a transaction to the mempool; returns its hash.

        Raises MempoolError with a reason code when the transaction can
        never be mined from the current state.
        """
        if not transaction_is_authentic(tx):
            raise MempoolError("BadSignature")
        if tx.tx_hash in self.receipts:
            raise MempoolError("AlreadyMined", tx.tx_hash_hex)
        if any(p.tx_hash == tx.tx_hash for p in self.mempool):
            raise MempoolError("AlreadyPending", tx.tx_hash_hex)
        if tx.gas_limit > self.config.block_gas_limit:
            raise MempoolError("GasLimitTooHigh", str(tx.gas_limit))
        if tx.nonce < self.next_nonce(tx.sender):
            raise MempoolError("NonceTooLow", str(tx.nonce))
        if any(
            p.sender == tx.sender and p.nonce == tx.nonce for p in self.mempool
        ):
            raise MempoolError("NonceAlreadyPending", str(tx.nonce))
        if self.balance(tx.sender) < tx.gas_limit * tx.gas_price:
            raise MempoolError("InsufficientFunds")
        self.mempool.append(tx)
        return tx.tx_hash

    def pending(self) -> list[SignedTransaction]:
        """Mempool in its total order: gas price descending, then
        submission time, then transaction hash."""
        return sorted(self.mempool, key=mempool_sort_key)

    def select_transactions(self) -> list[SignedTransaction]:
        """One pass over the ordered mempool.

        A transaction is skipped when its nonce is not next for the
        sender or the sender cannot cover its maximum fee given what is
        already selected; selection stops outright at the first
        transaction that does not fit the remaining gas budget.  The
        budget reserves each transaction's full gas limit.
        """
        budget = self.config.block_gas_limit
        view_nonce: dict[bytes, int] = {}
        view_balance: dict[bytes, int] = {}
        selected: list[SignedTransaction] = []
        for tx in self.pending():
            nonce = view_nonce.get(tx.sender, self.next_nonce(tx.sender))
            balance = view_balance.get(tx.sender, self.balance(tx.sender))
            max_fee = tx.gas_limit * tx.gas_price
            if tx.nonce != nonce or balance < max_fee:
                continue
            if tx.gas_limit > budget:
                break
            selected.append(tx)
            budget -= tx.gas_limit
            view_nonce[tx.sender] = nonce + 1
            view_balance[tx.sender] = balance - max_fee
        return selected

    # --- execution -------------------------------------------------------

    def _execute_block(
        self,
        txs: Iterable[SignedTransaction],
        miner: bytes,
        block_number: int,
    ) -> tuple[dict[bytes, AccountState], dict[bytes, sc.ContractState], list[_ExecOutcome]]:
        """Run a block's transactions against the current head state.

        Returns the post state and per-transaction outcomes without
        touching the chain.  Raises _ExecutionInvalid for conditions an
        honest miner can never produce (bad nonce, insolvent fee).
        """
        accounts = {
            addr: AccountState(a.balance, a.nonce) for addr, a in self.accounts.items()
        }
        contracts = {addr: state.copy() for addr, state in self.contracts.items()}
        outcomes: list[_ExecOutcome] = []
        miner_acct = accounts.setdefault(miner, AccountState())
        for tx in txs:
            acct = accounts.setdefault(tx.sender, AccountState())
            if tx.nonce != acct.nonce:
                raise _ExecutionInvalid("BadNonce")
            gas_used, status = self._execute_call(
                tx, accounts, contracts, block_number
            )
            fee = gas_used * tx.gas_price
            if acct.balance < fee:
                raise _ExecutionInvalid("InsufficientBalance")
            acct.balance -= fee
            acct.nonce += 1
            miner_acct.balance += fee
            outcomes.append(_ExecOutcome(gas_used=gas_used, status=status))
        miner_acct.balance += self.config.block_reward_wei
        return accounts, contracts, outcomes

    @staticmethod
    def _execute_call(
        tx: SignedTransaction,
        accounts: dict[bytes, AccountState],
        contracts: dict[bytes, sc.ContractState],
        block_number: int,
    ) -> tuple[int, str]:
        """Charge flat gas and apply the call.  Reverts still consume
        the full flat cost; running out of gas burns the whole limit."""
        try:
            opcode, args = sc.decode_payload(tx.payload)
        except sc.PayloadError:
            opcode, args = None, ()
        flat = sc.flat_gas_cost(tx.payload)
        if tx.gas_limit < flat:
            return tx.gas_limit, reverted(sc.OUT_OF_GAS)
        if opcode is None:
            return flat, reverted(sc.INVALID_PAYLOAD)
        if opcode == -1:  # empty payload: plain no-op transaction
            return flat, STATUS_SUCCESS
        if opcode == sc.OP_DEPLOY:
            if tx.to != ZERO_ADDRESS:
                return flat, reverted(sc.INVALID_PAYLOAD)
            addr = sc.contract_address(tx.sender, tx.nonce)
            if addr in contracts or addr in accounts:
                return flat, reverted(sc.INVALID_PAYLOAD)
            contracts[addr] = sc.ContractState(owner=tx.sender)
            return flat, STATUS_SUCCESS
        state = contracts.get(tx.to)
        if state is None:
            return flat, reverted(sc.UNKNOWN_CONTRACT)
        if opcode == sc.OP_ADD_UNI:
            uni, name, country = args
            meta = sc.UniversityMeta(name=name, country=country, registered_at=block_number)
            result = state.add_uni(tx.sender, uni, meta)
        else:
            cert_hash, code = args
            result = state.store_hash(
                tx.sender, cert_hash, code, block_number=block_number
            )
        if result.ok:
            return flat, STATUS_SUCCESS
        return flat, reverted(result.error or sc.INVALID_PAYLOAD)

    # --- mining ----------------------------------------------------------

    def mine_block(
        self, miner: bytes, *, allow_empty: bool = False
    ) -> Block | None:
        """Select, execute, and proof-of-work one block, then put it to
        the validator vote and apply it.  Returns None when the mempool
        yields nothing and empty blocks are not allowed."""
        if len(miner) != ADDRESS_LEN:
            raise ValueError("miner must be a 20-byte address")
        txs = self.select_transactions()
        if not txs and not allow_empty:
            return None
        parent = self.head
        number = parent.number + 1
        accounts, contracts, outcomes = self._execute_block(txs, miner, number)
        state_root = self._state_root(accounts, contracts)
        tx_root = transactions_root(txs)
        tick = self.config.clock_tick_us
        target = self.config.difficulty_bits
        nonce = None
        for attempt in range(self.config.max_pow_attempts):
            timestamp_us = parent.timestamp_us + (attempt + 1) * tick
            header = canonical(
                number,
                parent.block_hash,
                timestamp_us,
                miner,
                tx_root,
                state_root,
                attempt,
            )
            if leading_zero_bits(sha256(header)) >= target:
                nonce = attempt
                break
        if nonce is None:
            raise MiningError("proof-of-work attempt budget exhausted")
        block = Block(
            number=number,
            parent_hash=parent.block_hash,
            timestamp_us=parent.timestamp_us + (nonce + 1) * tick,
            miner=miner,
            nonce=nonce,
            tx_root=tx_root,
            state_root=state_root,
            transactions=tuple(txs),
        )
        votes = self.validation_vote(block)
        if sum(votes) * 2 <= len(votes):
            raise MiningError("self-mined block failed the validator vote")
        self._apply(block, accounts, contracts, outcomes)
        return block

    def mine_until_empty(self, miner: bytes, *, max_blocks: int = 10_000) -> list[Block]:
        mined: list[Block] = []
        while self.mempool:
            block = self.mine_block(miner)
            if block is None:
                # Remaining transactions are unmineable (nonce gaps).
                break
            mined.append(block)
            if len(mined) >= max_blocks:
                raise MiningError("mempool did not drain within max_blocks")
        return mined

    # --- validation ------------------------------------------------------

    def validate_block(self, block: Block) -> list[str]:
        """Full re-check of a candidate for the current head.  Returns
        the list of failure reasons; an empty list means valid."""
        reasons: list[str] = []
        parent = self.head
        if block.number != parent.number + 1:
            reasons.append("BadNumber")
        if block.parent_hash != parent.block_hash:
            reasons.append("BadParent")
        expected_ts = parent.timestamp_us + (block.nonce + 1) * self.config.clock_tick_us
        if block.timestamp_us != expected_ts:
            reasons.append("InvalidTimestamp")
        if leading_zero_bits(block.block_hash) < self.config.difficulty_bits:
            reasons.append("BadPoW")
        if block.tx_root != transactions_root(block.transactions):
            reasons.append("BadTxRoot")
        if sum(tx.gas_limit for tx in block.transactions) > self.config.block_gas_limit:
            reasons.append("GasLimitExceeded")
        if not all(transaction_is_authentic(tx) for tx in block.transactions):
            reasons.append("BadSignature")
        seen = set()
        for tx in block.transactions:
            if tx.tx_hash in self.receipts or tx.tx_hash in seen:
                reasons.append("ReplayedTransaction")
                break
            seen.add(tx.tx_hash)
        if reasons:
            return reasons
        try:
            accounts, contracts, _ = self._execute_block(
                block.transactions, block.miner, block.number
            )
        except _ExecutionInvalid as exc:
            return [exc.reason]
        if block.state_root != self._state_root(accounts, contracts):
            reasons.append("BadStateRoot")
        return reasons

    def validation_vote(self, block: Block) -> list[bool]:
        """One vote per simulated node; each node independently re-runs
        the full validation."""
        return [
            not self.validate_block(block) for _ in range(self.config.node_count)
        ]

    def accept_block(self, block: Block) -> None:
        """Validate an externally produced block by majority vote and
        apply it.  Raises BlockRejected when the vote fails."""
        votes = self.validation_vote(block)
        if sum(votes) * 2 <= len(votes):
            raise BlockRejected(self.validate_block(block))
        accounts, contracts, outcomes = self._execute_block(
            block.transactions, block.miner, block.number
        )
        self._apply(block, accounts, contracts, outcomes)

    def _apply(
        self,
        block: Block,
        accounts: dict[bytes, AccountState],
        contracts: dict[bytes, sc.ContractState],
        outcomes: list[_ExecOutcome],
    ) -> None:
        self.accounts = accounts
        self.contracts = contracts
        self.blocks.append(block)
        included = {tx.tx_hash for tx in block.transactions}
        self.mempool = [tx for tx in self.mempool if tx.tx_hash not in included]
        for tx, outcome in zip(block.transactions, outcomes):
            receipt = Receipt(
                tx_hash=tx.tx_hash,
                block_number=block.number,
                sender=tx.sender,
                gas_used=outcome.gas_used,
                gas_price=tx.gas_price,
                submitted_at_us=tx.submitted_at_us,
                confirmed_at_us=block.timestamp_us,
                status=outcome.status,
            )
            self.receipts[tx.tx_hash] = receipt
            self._receipt_order.append(tx.tx_hash)

    # --- persistence -----------------------------------------------------

    def export_ndjson(self, path) -> None:
        """Write the whole chain, one JSON object per line: a config
        record first, then every block from genesis."""
        lines = [self._config_record()]
        lines += [
            json.dumps({"type": "block", **b.to_json_dict()}, sort_keys=True)
            for b in self.blocks
        ]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    def export_ndjson_text(self) -> str:
        lines = [self._config_record()]
        lines += [
            json.dumps({"type": "block", **b.to_json_dict()}, sort_keys=True)
            for b in self.blocks
        ]
        return "\n".join(lines) + "\n"

    def _config_record(self) -> str:
        return json.dumps(
            {
                "type": "config",
                **self.config.to_json_dict(),
                "genesis_timestamp_s": seconds_str(self.blocks[0].timestamp_us),
                "genesis_alloc": {
                    address_to_hex(addr): str(balance)
                    for addr, balance in sorted(self.genesis_alloc.items())
                },
            },
            sort_keys=True,
        )

    @classmethod
    def import_ndjson(cls, path) -> "Chain":
        """Rebuild a chain by replaying the export from genesis.  Every
        block passes the same validation as live acceptance, so receipts
        come out identical to the original run."""
        with open(path, encoding="utf-8") as fh:
            lines = [line for line in fh.read().splitlines() if line.strip()]
        if not lines:
            raise LedgerError("empty chain file")
        header = json.loads(lines[0])
        if header.get("type") != "config":
            raise LedgerError("chain file must start with a config record")
        config = ChainConfig.from_json_dict(header)
        alloc = {
            address_from_hex(addr): int(balance)
            for addr, balance in header["genesis_alloc"].items()
        }
        chain = cls(
            alloc,
            config,
            genesis_timestamp_us=seconds_to_us(header["genesis_timestamp_s"]),
        )
        blocks = []
        for line in lines[1:]:
            data = json.loads(line)
            if data.get("type") != "block":
                raise LedgerError("unexpected record type in chain file")
            blocks.append(Block.from_json_dict(data))
        if not blocks or blocks[0].number != 0:
            raise LedgerError("chain file is missing the genesis block")
        if blocks[0].transactions or blocks[0].block_hash != chain.blocks[0].block_hash:
            raise LedgerError("genesis block does not match the config record")
        for block in blocks[1:]:
            chain.accept_block(block)
        return chain

    def write_receipts_csv(self, path) -> None:
        rows = [RECEIPTS_CSV_HEADER]
        rows += [r.to_csv_row() for r in self.receipts_in_order()]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(rows) + "\n")
