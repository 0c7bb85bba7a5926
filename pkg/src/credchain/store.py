"""Off-chain records: accounts, student rosters, document files, shares.

The chain only ever sees 32-byte digests.  Everything people actually
look at (who a student is, the PDF bytes, who may fetch them) lives in
this store: a single JSON image with a trailing integrity checksum,
plus a content-addressed ``files/`` directory and an append-only
``outbox.jsonl`` of notification events.

Persistence is atomic (write to a temp file, then rename), and loading
recomputes the checksum so silent corruption surfaces as CorruptStore
instead of garbage state.  All timestamps are the ledger's simulated
microsecond clock, passed in by callers; the store never reads a wall
clock and never draws randomness except from the Random it is given.
"""

from __future__ import annotations

import hmac
import json
import os
import random
from dataclasses import asdict, dataclass
from pathlib import Path

from .encoding import is_hex_digest, seconds_str, sha256

ROLE_ADMIN = "admin"
ROLE_UNIVERSITY = "university"
ROLE_STUDENT = "student"
ROLES = (ROLE_ADMIN, ROLE_UNIVERSITY, ROLE_STUDENT)

MIN_PASSWORD_LEN = 8
SALT_LEN = 16
SHARE_TOKEN_BYTES = 32
DEFAULT_SHARE_TTL_US = 30 * 86_400 * 1_000_000  # 30 days of simulated time

STORE_FILE = "store.json"
FILES_DIR = "files"
OUTBOX_FILE = "outbox.jsonl"
_CHECKSUM_PREFIX = "sha256:"

DEFAULT_DOC_TYPES = (
    (1, "Degree Certificate"),
    (2, "Transcript"),
    (3, "Diploma"),
    (4, "Training Certificate"),
)


class StoreError(Exception):
    pass


class CorruptStore(StoreError):
    pass


class WeakPassword(StoreError):
    pass


class DuplicateEmail(StoreError):
    pass


class DuplicateDocument(StoreError):
    pass


class UnknownRecord(StoreError):
    pass


class UnknownDocType(UnknownRecord):
    # split out so callers can tell "add the type first" from a plain 404
    pass


class ExpiredToken(StoreError):
    pass


@dataclass
class UserAccount:
    user_id: int
    role: str
    email: str
    display_name: str
    country: str
    address: str  # 0x-hex chain address, or "" for accounts without a wallet
    password_salt: str
    password_hash: str
    created_at_us: int
    active: bool = True


@dataclass
class StudentRecord:
    student_id: int
    user_id: int
    university_id: int
    enroll_no: str
    created_at_us: int
    active: bool = True


@dataclass
class DocumentRecord:
    doc_id: int
    student_id: int
    university_id: int
    doc_type_id: int
    filename: str
    digest: str  # hex SHA-256 of the file bytes; also the on-chain key
    tx_hash: str
    size_bytes: int
    created_at_us: int


@dataclass
class DocType:
    doc_type_id: int
    name: str


@dataclass
class ShareToken:
    token: str
    doc_id: int
    created_by: int
    created_at_us: int
    expires_at_us: int


def hash_password(salt: bytes, password: str) -> str:
    return sha256(salt + password.encode("utf-8")).hex()


class OutboxNotifier:
    """Append-only event log standing in for outbound email."""

    def __init__(self, path: Path):
        self.path = Path(path)

    def emit(self, event: str, payload: dict, now_us: int) -> None:
        record = {"at_s": seconds_str(now_us), "event": event, **payload}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def events(self) -> list[dict]:
        if not self.path.exists():
            return []
        with open(self.path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]


class Store:
    def __init__(self, root: Path, rng: random.Random):
        self.root = Path(root)
        self.rng = rng
        self.files_dir = self.root / FILES_DIR
        self.notifier = OutboxNotifier(self.root / OUTBOX_FILE)
        self.users: dict[int, UserAccount] = {}
        self.students: dict[int, StudentRecord] = {}
        self.documents: dict[int, DocumentRecord] = {}
        self.doc_types: dict[int, DocType] = {}
        self.share_tokens: dict[str, ShareToken] = {}
        self._next_ids = {"user": 1, "student": 1, "document": 1, "doc_type": 1}
        for type_id, name in DEFAULT_DOC_TYPES:
            self.doc_types[type_id] = DocType(doc_type_id=type_id, name=name)
            self._next_ids["doc_type"] = type_id + 1
        # Fixed-cost comparison target for logins that name no real user.
        self._decoy_salt = bytes(SALT_LEN)
        self._decoy_hash = hash_password(self._decoy_salt, "")

    # --- persistence -----------------------------------------------------

    @property
    def store_path(self) -> Path:
        return self.root / STORE_FILE

    def _image(self) -> dict:
        return {
            "version": 1,
            "next_ids": dict(self._next_ids),
            "users": [asdict(u) for u in self.users.values()],
            "students": [asdict(s) for s in self.students.values()],
            "documents": [asdict(d) for d in self.documents.values()],
            "doc_types": [asdict(t) for t in self.doc_types.values()],
            "share_tokens": [asdict(t) for t in self.share_tokens.values()],
        }

    def persist(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        body = json.dumps(self._image(), sort_keys=True, indent=1) + "\n"
        checksum = sha256(body.encode("utf-8")).hex()
        tmp = self.store_path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(body)
            fh.write(_CHECKSUM_PREFIX + checksum + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.store_path)

    def load(self) -> None:
        try:
            raw = self.store_path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise CorruptStore(f"no store image at {self.store_path}") from None
        split_at = raw.rfind(_CHECKSUM_PREFIX)
        if split_at < 0 or not raw.endswith("\n"):
            raise CorruptStore("missing checksum line")
        body, checksum_line = raw[:split_at], raw[split_at:].strip()
        expected = checksum_line[len(_CHECKSUM_PREFIX):]
        if sha256(body.encode("utf-8")).hex() != expected:
            raise CorruptStore("checksum mismatch")
        image = json.loads(body)
        if image.get("version") != 1:
            raise CorruptStore(f"unsupported store version {image.get('version')!r}")
        self.users = {u["user_id"]: UserAccount(**u) for u in image["users"]}
        self.students = {s["student_id"]: StudentRecord(**s) for s in image["students"]}
        self.documents = {d["doc_id"]: DocumentRecord(**d) for d in image["documents"]}
        self.doc_types = {t["doc_type_id"]: DocType(**t) for t in image["doc_types"]}
        self.share_tokens = {t["token"]: ShareToken(**t) for t in image["share_tokens"]}
        self._next_ids = dict(image["next_ids"])

    def load_if_present(self) -> bool:
        if self.store_path.exists():
            self.load()
            return True
        return False

    # --- users -----------------------------------------------------------

    def create_user(
        self,
        role: str,
        email: str,
        password: str,
        display_name: str,
        *,
        country: str = "",
        address: str = "",
        now_us: int = 0,
    ) -> UserAccount:
        if role not in ROLES:
            raise StoreError(f"unknown role {role!r}")
        if len(password) < MIN_PASSWORD_LEN:
            raise WeakPassword(f"password must be at least {MIN_PASSWORD_LEN} characters")
        email = email.strip().lower()
        if not email or "@" not in email:
            raise StoreError("email must contain '@'")
        if self.find_user(role, email) is not None:
            raise DuplicateEmail(f"{role} account for {email} already exists")
        salt = self.rng.randbytes(SALT_LEN)
        user = UserAccount(
            user_id=self._take_id("user"),
            role=role,
            email=email,
            display_name=display_name,
            country=country,
            address=address,
            password_salt=salt.hex(),
            password_hash=hash_password(salt, password),
            created_at_us=now_us,
        )
        self.users[user.user_id] = user
        self.notifier.emit(
            "user_created",
            {"user_id": user.user_id, "role": role, "email": email},
            now_us,
        )
        return user

    def find_user(self, role: str, email: str) -> UserAccount | None:
        email = email.strip().lower()
        for user in self.users.values():
            if user.role == role and user.email == email:
                return user
        return None

    def get_user(self, user_id: int) -> UserAccount:
        try:
            return self.users[user_id]
        except KeyError:
            raise UnknownRecord(f"no user {user_id}") from None

    def users_with_role(self, role: str) -> list[UserAccount]:
        return [u for u in self.users.values() if u.role == role]

    def authenticate(self, role: str, email: str, password: str) -> UserAccount | None:
        """Password check with the same amount of hashing work whether
        or not the account exists or is active."""
        user = self.find_user(role, email)
        if user is None:
            salt, expected = self._decoy_salt, self._decoy_hash
        else:
            salt, expected = bytes.fromhex(user.password_salt), user.password_hash
        ok = hmac.compare_digest(hash_password(salt, password), expected)
        if user is None or not user.active or not ok:
            return None
        return user

    def set_password(self, user_id: int, password: str) -> None:
        if len(password) < MIN_PASSWORD_LEN:
            raise WeakPassword(f"password must be at least {MIN_PASSWORD_LEN} characters")
        user = self.get_user(user_id)
        salt = self.rng.randbytes(SALT_LEN)
        user.password_salt = salt.hex()
        user.password_hash = hash_password(salt, password)

    def set_active(self, user_id: int, active: bool) -> None:
        self.get_user(user_id).active = active

    # --- students --------------------------------------------------------

    def add_student(
        self,
        university_id: int,
        email: str,
        password: str,
        display_name: str,
        *,
        enroll_no: str = "",
        country: str = "",
        now_us: int = 0,
    ) -> StudentRecord:
        university = self.get_user(university_id)
        if university.role != ROLE_UNIVERSITY:
            raise StoreError("students can only be added under a university account")
        user = self.create_user(
            ROLE_STUDENT,
            email,
            password,
            display_name,
            country=country,
            now_us=now_us,
        )
        student = StudentRecord(
            student_id=self._take_id("student"),
            user_id=user.user_id,
            university_id=university_id,
            enroll_no=enroll_no,
            created_at_us=now_us,
        )
        self.students[student.student_id] = student
        self.notifier.emit(
            "student_added",
            {"student_id": student.student_id, "university_id": university_id},
            now_us,
        )
        return student

    def get_student(self, student_id: int) -> StudentRecord:
        try:
            return self.students[student_id]
        except KeyError:
            raise UnknownRecord(f"no student {student_id}") from None

    def student_for_user(self, user_id: int) -> StudentRecord | None:
        for student in self.students.values():
            if student.user_id == user_id:
                return student
        return None

    def students_of(self, university_id: int) -> list[StudentRecord]:
        return [
            s for s in self.students.values() if s.university_id == university_id
        ]

    def set_student_active(self, student_id: int, active: bool) -> None:
        student = self.get_student(student_id)
        student.active = active
        self.users[student.user_id].active = active

    # --- documents and files --------------------------------------------

    def save_file(self, data: bytes) -> str:
        digest = sha256(data).hex()
        self.files_dir.mkdir(parents=True, exist_ok=True)
        path = self.files_dir / digest
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            os.replace(tmp, path)
        return digest

    def read_file(self, digest: str) -> bytes:
        if not is_hex_digest(digest):
            raise UnknownRecord("malformed file digest")
        path = self.files_dir / digest
        if not path.exists():
            raise UnknownRecord(f"no stored file {digest}")
        return path.read_bytes()

    def add_document(
        self,
        student_id: int,
        doc_type_id: int,
        filename: str,
        data: bytes,
        *,
        tx_hash: str,
        now_us: int = 0,
    ) -> DocumentRecord:
        student = self.get_student(student_id)
        if doc_type_id not in self.doc_types:
            raise UnknownDocType(f"no document type {doc_type_id}")
        digest = sha256(data).hex()
        if self.find_document(digest) is not None:
            raise DuplicateDocument(digest)
        self.save_file(data)
        doc = DocumentRecord(
            doc_id=self._take_id("document"),
            student_id=student_id,
            university_id=student.university_id,
            doc_type_id=doc_type_id,
            filename=filename,
            digest=digest,
            tx_hash=tx_hash,
            size_bytes=len(data),
            created_at_us=now_us,
        )
        self.documents[doc.doc_id] = doc
        self.notifier.emit(
            "document_added",
            {"doc_id": doc.doc_id, "student_id": student_id, "digest": digest},
            now_us,
        )
        return doc

    def get_document(self, doc_id: int) -> DocumentRecord:
        try:
            return self.documents[doc_id]
        except KeyError:
            raise UnknownRecord(f"no document {doc_id}") from None

    def find_document(self, digest: str) -> DocumentRecord | None:
        digest = digest.lower()
        for doc in self.documents.values():
            if doc.digest == digest:
                return doc
        return None

    def documents_for_student(self, student_id: int) -> list[DocumentRecord]:
        return [d for d in self.documents.values() if d.student_id == student_id]

    def documents_for_university(self, university_id: int) -> list[DocumentRecord]:
        return [d for d in self.documents.values() if d.university_id == university_id]

    # --- share tokens ----------------------------------------------------

    def create_share(
        self,
        doc_id: int,
        created_by: int,
        *,
        now_us: int,
        ttl_us: int = DEFAULT_SHARE_TTL_US,
    ) -> ShareToken:
        self.get_document(doc_id)
        if ttl_us <= 0:
            raise StoreError("share ttl must be positive")
        token = ShareToken(
            token=self.rng.randbytes(SHARE_TOKEN_BYTES).hex(),
            doc_id=doc_id,
            created_by=created_by,
            created_at_us=now_us,
            expires_at_us=now_us + ttl_us,
        )
        self.share_tokens[token.token] = token
        self.notifier.emit(
            "share_created", {"doc_id": doc_id, "token": token.token}, now_us
        )
        return token

    def resolve_share(self, token: str, *, now_us: int) -> tuple[ShareToken, DocumentRecord]:
        share = self.share_tokens.get(token)
        if share is None:
            raise UnknownRecord("no such share token")
        if now_us >= share.expires_at_us:
            raise ExpiredToken(token)
        return share, self.get_document(share.doc_id)

    def shares_for_document(self, doc_id: int) -> list[ShareToken]:
        return [s for s in self.share_tokens.values() if s.doc_id == doc_id]

    # --- misc ------------------------------------------------------------

    def _take_id(self, kind: str) -> int:
        value = self._next_ids[kind]
        self._next_ids[kind] = value + 1
        return value
