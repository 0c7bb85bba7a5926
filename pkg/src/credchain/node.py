"""One running node: the ledger, the off-chain store, and the wallets.

All key material derives from the configured seed in a fixed draw
order (admin wallet, miner wallet, faucet wallets, store RNG, session
RNG), so a node reopened with the same settings is bit-for-bit the
node that wrote the data directory.  Universities never handle Ether
by hand: each new university account is assigned the next pre-funded
faucet wallet from genesis, and creation fails with FaucetExhausted
once they run out.

The chain file is the node's persistence: every mined block is
re-exported, and startup replays it from genesis through the same
validation as live block acceptance.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import replace
from pathlib import Path

from . import contract as sc
from .config import AppConfig
from .encoding import (
    address_from_hex,
    address_to_hex,
    hash_from_hex,
    hash_to_hex,
    is_hex_digest,
    seconds_str,
    sha256,
)
from .ledger import Block, Chain, ChainConfig, MempoolError, Receipt
from .store import ROLE_ADMIN, ROLE_UNIVERSITY, Store, UserAccount
from .tx import SignedTransaction
from .units import ether, format_ether
from .wallet import SEED_LEN, WalletEntry

CHAIN_FILE = "chain.ndjson"
MEMPOOL_FILE = "mempool.ndjson"
NODE_META_FILE = "node.json"


class NodeError(Exception):
    """Operational failure; .code is a stable CamelCase reason."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code


class FaucetExhausted(NodeError):
    def __init__(self, detail: str = ""):
        super().__init__("FaucetExhausted", detail)


class UniversityNotYetConfirmed(NodeError):
    def __init__(self, detail: str = ""):
        super().__init__("UniversityNotYetConfirmed", detail)


class DuplicateCertificate(NodeError):
    def __init__(self, detail: str = ""):
        super().__init__("DuplicateHash", detail)


class Node:
    def __init__(self, config: AppConfig, *, create: bool = False):
        self.data_dir = Path(config.data_dir)
        if not create:
            # A data directory is self-describing: its wallets derive
            # from the seed it was created with, not from today's flags.
            meta_path = self.data_dir / NODE_META_FILE
            if meta_path.exists():
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
                config = replace(
                    config,
                    seed=int(meta["seed"]),
                    faucet_count=int(meta["faucet_count"]),
                )
        self.config = config
        rng = random.Random(config.seed)
        self.admin_wallet = WalletEntry.from_seed("admin", rng.randbytes(SEED_LEN))
        self.miner_wallet = WalletEntry.from_seed("miner", rng.randbytes(SEED_LEN))
        self.faucet_wallets = [
            WalletEntry.from_seed(f"faucet-{i}", rng.randbytes(SEED_LEN))
            for i in range(config.faucet_count)
        ]
        self.store = Store(self.data_dir, random.Random(rng.getrandbits(64)))
        self.token_rng = random.Random(rng.getrandbits(64))
        self._lock = threading.RLock()
        self._miner_stop = threading.Event()
        self._miner_thread: threading.Thread | None = None
        if create:
            self._init_fresh()
        else:
            self._open_existing()

    # --- lifecycle -------------------------------------------------------

    def _chain_config(self) -> ChainConfig:
        return ChainConfig(
            difficulty_bits=self.config.difficulty_bits,
            block_gas_limit=self.config.block_gas_limit,
            node_count=self.config.node_count,
            block_reward_wei=ether(self.config.block_reward_eth),
            clock_tick_us=self.config.clock_tick_us,
        )

    def _init_fresh(self) -> None:
        chain_path = self.data_dir / CHAIN_FILE
        if chain_path.exists():
            raise NodeError("AlreadyInitialized", str(self.data_dir))
        self.data_dir.mkdir(parents=True, exist_ok=True)
        alloc = {self.admin_wallet.address: ether(self.config.admin_ether)}
        for entry in self.faucet_wallets:
            alloc[entry.address] = ether(self.config.faucet_ether)
        self.chain = Chain(alloc, self._chain_config())
        deploy = self.admin_wallet.sign_transaction(
            to=b"\x00" * 20,
            payload=sc.encode_deploy(),
            gas_limit=self.config.gas_limit,
            gas_price=self.config.gas_price_wei,
            submitted_at_us=self.chain.now_us,
        )
        self.chain.submit(deploy)
        self.chain.mine_block(self.miner_wallet.address)
        if self.contract_addr not in self.chain.contracts:
            raise NodeError("InitFailed", "registry contract did not deploy")
        self.store.create_user(
            ROLE_ADMIN,
            self.config.admin_email,
            self.config.admin_password,
            "Administrator",
            address=address_to_hex(self.admin_wallet.address),
            now_us=self.chain.now_us,
        )
        self.store.persist()
        self.persist_chain()
        meta = {"seed": self.config.seed, "faucet_count": self.config.faucet_count}
        (self.data_dir / NODE_META_FILE).write_text(
            json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8"
        )

    def _open_existing(self) -> None:
        chain_path = self.data_dir / CHAIN_FILE
        if not chain_path.exists():
            raise NodeError("NotInitialized", str(self.data_dir))
        self.chain = Chain.import_ndjson(chain_path)
        if self.admin_wallet.address not in self.chain.genesis_alloc:
            raise NodeError(
                "SeedMismatch",
                "the chain was not created from this seed",
            )
        self.store.load()
        self._load_mempool()
        for entry in [self.admin_wallet, self.miner_wallet, *self.faucet_wallets]:
            pending = [
                tx.nonce for tx in self.chain.mempool if tx.sender == entry.address
            ]
            entry.next_nonce = max(
                self.chain.next_nonce(entry.address),
                max(pending) + 1 if pending else 0,
            )

    def close(self) -> None:
        self.stop_miner()
        with self._lock:
            self.store.persist()
            self.persist_chain()

    @property
    def contract_addr(self) -> bytes:
        # The admin's first transaction (nonce 0) deploys the registry.
        return sc.contract_address(self.admin_wallet.address, 0)

    @property
    def registry(self) -> sc.ContractState:
        try:
            return self.chain.contracts[self.contract_addr]
        except KeyError:
            raise NodeError("ContractMissing", "registry not deployed") from None

    def persist_chain(self) -> None:
        text = self.chain.export_ndjson_text()
        path = self.data_dir / CHAIN_FILE
        tmp = path.with_suffix(".ndjson.tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
        self._persist_mempool()

    def _persist_mempool(self) -> None:
        # Pending transactions survive restarts so a later `mine` run
        # can still confirm them.
        path = self.data_dir / MEMPOOL_FILE
        lines = [
            json.dumps(tx.to_json_dict(), sort_keys=True)
            for tx in self.chain.pending()
        ]
        tmp = path.with_suffix(".ndjson.tmp")
        tmp.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        os.replace(tmp, path)

    def _load_mempool(self) -> None:
        path = self.data_dir / MEMPOOL_FILE
        if not path.exists():
            return
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            tx = SignedTransaction.from_json_dict(json.loads(line))
            try:
                self.chain.submit(tx)
            except MempoolError:
                continue  # mined or invalidated since it was saved

    # --- wallet plumbing -------------------------------------------------

    def wallet_for_address(self, address_hex: str) -> WalletEntry:
        target = address_from_hex(address_hex)
        for entry in [self.admin_wallet, self.miner_wallet, *self.faucet_wallets]:
            if entry.address == target:
                return entry
        raise NodeError("UnknownWallet", address_hex)

    def _sign_and_submit(
        self, entry: WalletEntry, to: bytes, payload: bytes
    ) -> SignedTransaction:
        tx = entry.sign_transaction(
            to=to,
            payload=payload,
            gas_limit=self.config.gas_limit,
            gas_price=self.config.gas_price_wei,
            submitted_at_us=self.chain.now_us,
        )
        try:
            self.chain.submit(tx)
        except Exception:
            entry.next_nonce -= 1  # the nonce was never consumed on chain
            raise
        self._persist_mempool()
        return tx

    # --- university and document flows ----------------------------------

    def create_university(
        self, email: str, password: str, display_name: str, country: str = ""
    ) -> tuple[UserAccount, str]:
        """Create the account, assign a faucet wallet, and submit the
        on-chain registration.  Returns the account and the tx hash."""
        with self._lock:
            taken = len(self.store.users_with_role(ROLE_UNIVERSITY))
            if taken >= len(self.faucet_wallets):
                raise FaucetExhausted(f"all {len(self.faucet_wallets)} wallets assigned")
            wallet = self.faucet_wallets[taken]
            user = self.store.create_user(
                ROLE_UNIVERSITY,
                email,
                password,
                display_name,
                country=country,
                address=address_to_hex(wallet.address),
                now_us=self.chain.now_us,
            )
            payload = sc.encode_add_uni(wallet.address, display_name, country)
            tx = self._sign_and_submit(self.admin_wallet, self.contract_addr, payload)
            self.store.persist()
            return user, tx.tx_hash_hex

    def university_confirmed(self, user: UserAccount) -> bool:
        if user.role != ROLE_UNIVERSITY or not user.address:
            return False
        return address_from_hex(user.address) in self.registry.universities

    def upload_document(
        self,
        university: UserAccount,
        student_id: int,
        doc_type_id: int,
        filename: str,
        data: bytes,
    ) -> tuple:
        """Store the file off chain and submit its digest on chain.

        The duplicate pre-check consults both mined contract state and
        the store, so a second upload of the same bytes fails fast
        instead of burning gas on a DuplicateHash revert.
        """
        with self._lock:
            student = self.store.get_student(student_id)
            if student.university_id != university.user_id:
                raise NodeError("NotYourStudent", str(student_id))
            if not self.university_confirmed(university):
                raise UniversityNotYetConfirmed(university.email)
            digest = sha256(data)
            if self.registry.get_hash(digest) is not None:
                raise DuplicateCertificate(digest.hex())
            if self.store.find_document(digest.hex()) is not None:
                raise DuplicateCertificate(digest.hex())
            wallet = self.wallet_for_address(university.address)
            payload = sc.encode_store_hash(digest, doc_type_id)
            tx = self._sign_and_submit(wallet, self.contract_addr, payload)
            doc = self.store.add_document(
                student_id,
                doc_type_id,
                filename,
                data,
                tx_hash=tx.tx_hash_hex,
                now_us=self.chain.now_us,
            )
            self.store.persist()
            return doc, tx.tx_hash_hex

    # --- reads -----------------------------------------------------------

    def verify_digest(self, digest_hex: str) -> dict:
        """Public verification: does this digest sit on the chain, who
        put it there, and when."""
        digest_hex = digest_hex.lower().removeprefix("0x")
        if not is_hex_digest(digest_hex):
            raise ValueError("digest must be 64 hex characters")
        record = self.registry.get_hash(bytes.fromhex(digest_hex))
        if record is None:
            return {"found": False, "digest": digest_hex}
        block = self.chain.get_block(record.stored_at)
        issuer_hex = address_to_hex(record.issuer)
        issuer_name = ""
        for user in self.store.users_with_role(ROLE_UNIVERSITY):
            if user.address == issuer_hex:
                issuer_name = user.display_name
                break
        doc_type = self.store.doc_types.get(record.doc_type_code)
        return {
            "found": True,
            "digest": digest_hex,
            "issuer": issuer_hex,
            "issuer_name": issuer_name,
            "block_number": record.stored_at,
            "confirmed_at_s": seconds_str(block.timestamp_us) if block else None,
            "doc_type_id": record.doc_type_code,
            "doc_type": doc_type.name if doc_type else "",
        }

    def tx_status(self, tx_hash_hex: str) -> dict | None:
        tx_hash = hash_from_hex(tx_hash_hex.lower().removeprefix("0x"))
        receipt = self.chain.get_receipt(tx_hash)
        if receipt is not None:
            return {"state": "confirmed", **receipt.to_json_dict()}
        if any(tx.tx_hash == tx_hash for tx in self.chain.mempool):
            return {"state": "pending", "tx_hash": hash_to_hex(tx_hash)}
        return None

    def university_labels(self) -> dict[bytes, str]:
        labels = {self.admin_wallet.address: "admin"}
        for user in self.store.users_with_role(ROLE_UNIVERSITY):
            if user.address:
                labels[address_from_hex(user.address)] = user.display_name
        return labels

    def receipts(self) -> list[Receipt]:
        return self.chain.receipts_in_order()

    def stats(self) -> dict:
        with self._lock:
            registry = self.chain.contracts.get(self.contract_addr)
            return {
                "height": self.chain.height,
                "now_s": seconds_str(self.chain.now_us),
                "mempool": len(self.chain.mempool),
                "receipts": len(self.chain.receipts),
                "contract": address_to_hex(self.contract_addr),
                "universities": len(registry.universities) if registry else 0,
                "records": len(registry.records) if registry else 0,
                "total_supply_eth": format_ether(self.chain.total_supply()),
                "admin": address_to_hex(self.admin_wallet.address),
            }

    # --- mining ----------------------------------------------------------

    def mine(self, blocks: int = 1) -> list[Block]:
        mined = []
        with self._lock:
            for _ in range(blocks):
                block = self.chain.mine_block(self.miner_wallet.address)
                if block is None:
                    break
                mined.append(block)
            if mined:
                self.persist_chain()
        return mined

    def mine_until_empty(self) -> list[Block]:
        with self._lock:
            mined = self.chain.mine_until_empty(self.miner_wallet.address)
            if mined:
                self.persist_chain()
            return mined

    def start_miner(self) -> None:
        if self._miner_thread is not None:
            return
        self._miner_stop.clear()

        def loop() -> None:
            while not self._miner_stop.wait(self.config.mine_interval_s):
                with self._lock:
                    if self.chain.mempool:
                        self.chain.mine_block(self.miner_wallet.address)
                        self.persist_chain()

        self._miner_thread = threading.Thread(target=loop, name="miner", daemon=True)
        self._miner_thread.start()

    def stop_miner(self) -> None:
        if self._miner_thread is None:
            return
        self._miner_stop.set()
        self._miner_thread.join(timeout=5)
        self._miner_thread = None

    def wait_for_receipt(self, tx_hash_hex: str, *, timeout_s: float = 10.0) -> dict:
        """Block the calling (real) thread until the background miner
        confirms the transaction.  Only used with the miner running."""
        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            status = self.tx_status(tx_hash_hex)
            if status is not None and status["state"] == "confirmed":
                return status
            time.sleep(0.02)
        raise NodeError("ConfirmationTimeout", tx_hash_hex)
