"""HTTP facade over a node: login sessions, role-guarded CRUD, chain
reads, and the public verification and share endpoints.

Conventions the clients rely on:

* Auth errors use bare bodies, exactly ``{"error": "<code>"}``, with
  401 for a missing or unknown bearer token and 403 for a wrong role.
* Writes that go through the chain answer 202 with a ``tx_hash`` the
  caller can poll at ``GET /tx/{hash}``.
* ``GET /share/{token}`` negotiates: browsers asking for text/html get
  a server-rendered page, everything else gets JSON.
"""

from __future__ import annotations

import html
from contextlib import asynccontextmanager

from fastapi import Depends, FastAPI, Form, Request, UploadFile
from fastapi.responses import HTMLResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import analytics, store as st
from .encoding import seconds_str
from .node import Node, NodeError
from .store import DocumentRecord, StudentRecord, UserAccount

SESSION_TOKEN_BYTES = 32


class ApiError(Exception):
    def __init__(self, status: int, code: str):
        super().__init__(code)
        self.status = status
        self.code = code


class LoginBody(BaseModel):
    role: str
    email: str
    password: str


class UniversityBody(BaseModel):
    email: str
    password: str
    display_name: str
    country: str = ""


class StudentBody(BaseModel):
    email: str
    password: str
    display_name: str
    enroll_no: str = ""
    country: str = ""


class ActiveBody(BaseModel):
    active: bool


class ShareBody(BaseModel):
    doc_id: int
    ttl_days: int | None = None


class MineBody(BaseModel):
    blocks: int = 1


def _user_json(node: Node, user: UserAccount) -> dict:
    data = {
        "user_id": user.user_id,
        "role": user.role,
        "email": user.email,
        "display_name": user.display_name,
        "country": user.country,
        "address": user.address,
        "active": user.active,
        "created_at_s": seconds_str(user.created_at_us),
    }
    if user.role == st.ROLE_UNIVERSITY:
        data["confirmed"] = node.university_confirmed(user)
    return data


def _student_json(node: Node, student: StudentRecord) -> dict:
    user = node.store.get_user(student.user_id)
    return {
        "student_id": student.student_id,
        "user_id": student.user_id,
        "university_id": student.university_id,
        "email": user.email,
        "display_name": user.display_name,
        "enroll_no": student.enroll_no,
        "active": student.active,
        "created_at_s": seconds_str(student.created_at_us),
        "documents": len(node.store.documents_for_student(student.student_id)),
    }


def _doc_json(node: Node, doc: DocumentRecord) -> dict:
    status = node.tx_status(doc.tx_hash)
    doc_type = node.store.doc_types.get(doc.doc_type_id)
    return {
        "doc_id": doc.doc_id,
        "student_id": doc.student_id,
        "university_id": doc.university_id,
        "doc_type_id": doc.doc_type_id,
        "doc_type": doc_type.name if doc_type else "",
        "filename": doc.filename,
        "digest": doc.digest,
        "tx_hash": doc.tx_hash,
        "size_bytes": doc.size_bytes,
        "created_at_s": seconds_str(doc.created_at_us),
        "tx_state": status["state"] if status else "unknown",
    }


def _share_page(node: Node, doc: DocumentRecord, token: str) -> str:
    verification = node.verify_digest(doc.digest)
    issuer = verification.get("issuer_name") or verification.get("issuer", "")
    rows = [
        ("Document", doc.filename),
        ("Type", verification.get("doc_type", "")),
        ("Issued by", issuer),
        ("Digest", doc.digest),
        ("On chain", "yes" if verification["found"] else "no"),
        ("Confirmed at", verification.get("confirmed_at_s") or ""),
    ]
    body = "".join(
        f"<tr><th>{html.escape(k)}</th><td>{html.escape(str(v))}</td></tr>"
        for k, v in rows
    )
    return (
        "<!doctype html><html><head><meta charset='utf-8'>"
        "<title>Shared document</title></head><body>"
        "<h1>Shared document</h1>"
        f"<table>{body}</table>"
        f"<p><a href='/share/{html.escape(token)}/file'>Download file</a></p>"
        "</body></html>"
    )


def create_app(node: Node) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if node.config.auto_mine:
            node.start_miner()
        yield
        node.close()

    app = FastAPI(title="credchain", lifespan=lifespan)
    app.state.node = node
    sessions: dict[str, int] = {}
    app.state.sessions = sessions

    @app.exception_handler(ApiError)
    async def on_api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.code})

    def fail(status: int, code: str) -> ApiError:
        return ApiError(status, code)

    def current_user(request: Request) -> UserAccount:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise fail(401, "AuthRequired")
        token = header[7:].strip()
        user_id = sessions.get(token)
        if user_id is None:
            raise fail(401, "AuthRequired")
        user = node.store.users.get(user_id)
        if user is None or not user.active:
            raise fail(401, "AuthRequired")
        return user

    def require_role(*roles: str):
        def guard(user: UserAccount = Depends(current_user)) -> UserAccount:
            if user.role not in roles:
                raise fail(403, "Forbidden")
            return user

        return guard

    def wrap_store_errors(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except st.WeakPassword:
            raise fail(400, "WeakPassword") from None
        except st.DuplicateEmail:
            raise fail(409, "DuplicateEmail") from None
        except st.UnknownDocType:
            raise fail(422, "AddDocumentTypeFirst") from None
        except st.UnknownRecord:
            raise fail(404, "NotFound") from None
        except NodeError as exc:
            raise fail(_node_error_status(exc.code), exc.code) from None

    # --- public ----------------------------------------------------------

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.get("/stats")
    def stats():
        return node.stats()

    @app.get("/verify/{digest}")
    def verify(digest: str):
        try:
            return node.verify_digest(digest)
        except ValueError:
            raise fail(400, "MalformedDigest") from None

    @app.get("/tx/{tx_hash}")
    def tx_status(tx_hash: str):
        try:
            status = node.tx_status(tx_hash)
        except ValueError:
            raise fail(400, "MalformedHash") from None
        if status is None:
            raise fail(404, "UnknownTransaction")
        return status

    @app.get("/chain/blocks")
    def blocks(limit: int = 20):
        limit = max(1, min(limit, 200))
        chosen = node.chain.blocks[-limit:]
        return [
            {
                "number": b.number,
                "hash": b.block_hash.hex(),
                "timestamp_s": seconds_str(b.timestamp_us),
                "miner": "0x" + b.miner.hex(),
                "tx_count": len(b.transactions),
            }
            for b in reversed(chosen)
        ]

    @app.get("/chain/blocks/{number}")
    def block(number: int):
        b = node.chain.get_block(number)
        if b is None:
            raise fail(404, "UnknownBlock")
        return b.to_json_dict()

    @app.post("/auth/login")
    def login(body: LoginBody):
        user = node.store.authenticate(body.role, body.email, body.password)
        if user is None:
            raise fail(401, "InvalidCredentials")
        token = node.token_rng.randbytes(SESSION_TOKEN_BYTES).hex()
        sessions[token] = user.user_id
        return {
            "token": token,
            "user": _user_json(node, user),
        }

    @app.get("/share/{token}")
    def share(token: str, request: Request):
        try:
            share_rec, doc = node.store.resolve_share(token, now_us=node.chain.now_us)
        except st.ExpiredToken:
            raise fail(410, "ExpiredToken") from None
        except st.UnknownRecord:
            raise fail(404, "UnknownToken") from None
        if "text/html" in request.headers.get("accept", ""):
            return HTMLResponse(_share_page(node, doc, token))
        return {
            "token": share_rec.token,
            "expires_at_s": seconds_str(share_rec.expires_at_us),
            "document": _doc_json(node, doc),
            "verification": node.verify_digest(doc.digest),
        }

    @app.get("/share/{token}/file")
    def share_file(token: str):
        try:
            _share_rec, doc = node.store.resolve_share(token, now_us=node.chain.now_us)
        except st.ExpiredToken:
            raise fail(410, "ExpiredToken") from None
        except st.UnknownRecord:
            raise fail(404, "UnknownToken") from None
        data = node.store.read_file(doc.digest)
        return Response(
            content=data,
            media_type="application/octet-stream",
            headers={"content-disposition": f'attachment; filename="{doc.filename}"'},
        )

    # --- session ---------------------------------------------------------

    @app.get("/me")
    def me(user: UserAccount = Depends(current_user)):
        return _user_json(node, user)

    # --- admin: universities --------------------------------------------

    @app.post("/universities", status_code=202)
    def create_university(
        body: UniversityBody, _admin: UserAccount = Depends(require_role(st.ROLE_ADMIN))
    ):
        user, tx_hash = wrap_store_errors(
            node.create_university,
            body.email,
            body.password,
            body.display_name,
            body.country,
        )
        return {"tx_hash": tx_hash, "university": _user_json(node, user)}

    @app.get("/universities")
    def list_universities(_admin: UserAccount = Depends(require_role(st.ROLE_ADMIN))):
        return [
            _user_json(node, u)
            for u in sorted(
                node.store.users_with_role(st.ROLE_UNIVERSITY),
                key=lambda u: u.user_id,
            )
        ]

    @app.patch("/universities/{user_id}")
    def patch_university(
        user_id: int,
        body: ActiveBody,
        _admin: UserAccount = Depends(require_role(st.ROLE_ADMIN)),
    ):
        user = wrap_store_errors(node.store.get_user, user_id)
        if user.role != st.ROLE_UNIVERSITY:
            raise fail(404, "NotFound")
        node.store.set_active(user_id, body.active)
        node.store.persist()
        return _user_json(node, user)

    # --- students --------------------------------------------------------

    def _visible_students(user: UserAccount) -> list[StudentRecord]:
        if user.role == st.ROLE_ADMIN:
            return sorted(node.store.students.values(), key=lambda s: s.student_id)
        return sorted(
            node.store.students_of(user.user_id), key=lambda s: s.student_id
        )

    @app.get("/students")
    def list_students(
        user: UserAccount = Depends(require_role(st.ROLE_ADMIN, st.ROLE_UNIVERSITY))
    ):
        return [_student_json(node, s) for s in _visible_students(user)]

    @app.post("/students", status_code=201)
    def create_student(
        body: StudentBody,
        university: UserAccount = Depends(require_role(st.ROLE_UNIVERSITY)),
    ):
        student = wrap_store_errors(
            node.store.add_student,
            university.user_id,
            body.email,
            body.password,
            body.display_name,
            enroll_no=body.enroll_no,
            country=body.country,
            now_us=node.chain.now_us,
        )
        node.store.persist()
        return _student_json(node, student)

    @app.patch("/students/{student_id}")
    def patch_student(
        student_id: int,
        body: ActiveBody,
        user: UserAccount = Depends(require_role(st.ROLE_ADMIN, st.ROLE_UNIVERSITY)),
    ):
        student = wrap_store_errors(node.store.get_student, student_id)
        if user.role == st.ROLE_UNIVERSITY and student.university_id != user.user_id:
            raise fail(403, "Forbidden")
        node.store.set_student_active(student_id, body.active)
        node.store.persist()
        return _student_json(node, student)

    # --- documents -------------------------------------------------------

    @app.get("/doc-types")
    def doc_types(_user: UserAccount = Depends(current_user)):
        return [
            {"doc_type_id": t.doc_type_id, "name": t.name}
            for t in sorted(node.store.doc_types.values(), key=lambda t: t.doc_type_id)
        ]

    def _visible_documents(user: UserAccount) -> list[DocumentRecord]:
        if user.role == st.ROLE_ADMIN:
            docs = list(node.store.documents.values())
        elif user.role == st.ROLE_UNIVERSITY:
            docs = node.store.documents_for_university(user.user_id)
        else:
            student = node.store.student_for_user(user.user_id)
            docs = (
                node.store.documents_for_student(student.student_id) if student else []
            )
        return sorted(docs, key=lambda d: d.doc_id)

    @app.get("/documents")
    def list_documents(user: UserAccount = Depends(current_user)):
        return [_doc_json(node, d) for d in _visible_documents(user)]

    @app.post("/documents", status_code=202)
    async def upload_document(
        file: UploadFile,
        student_id: int = Form(),
        doc_type_id: int = Form(),
        university: UserAccount = Depends(require_role(st.ROLE_UNIVERSITY)),
    ):
        data = await file.read()
        if not data:
            raise fail(400, "EmptyFile")
        doc, tx_hash = wrap_store_errors(
            node.upload_document,
            university,
            student_id,
            doc_type_id,
            file.filename or "upload.bin",
            data,
        )
        return {"tx_hash": tx_hash, "document": _doc_json(node, doc)}

    def _can_read_document(user: UserAccount, doc: DocumentRecord) -> bool:
        if user.role == st.ROLE_ADMIN:
            return True
        if user.role == st.ROLE_UNIVERSITY:
            return doc.university_id == user.user_id
        student = node.store.student_for_user(user.user_id)
        return student is not None and doc.student_id == student.student_id

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: int, user: UserAccount = Depends(current_user)):
        doc = wrap_store_errors(node.store.get_document, doc_id)
        if not _can_read_document(user, doc):
            raise fail(403, "Forbidden")
        return _doc_json(node, doc)

    @app.get("/documents/{doc_id}/file")
    def download_document(doc_id: int, user: UserAccount = Depends(current_user)):
        doc = wrap_store_errors(node.store.get_document, doc_id)
        if not _can_read_document(user, doc):
            raise fail(403, "Forbidden")
        data = node.store.read_file(doc.digest)
        return Response(
            content=data,
            media_type="application/octet-stream",
            headers={"content-disposition": f'attachment; filename="{doc.filename}"'},
        )

    @app.post("/shares", status_code=201)
    def create_share(body: ShareBody, user: UserAccount = Depends(current_user)):
        doc = wrap_store_errors(node.store.get_document, body.doc_id)
        if not _can_read_document(user, doc) or user.role == st.ROLE_ADMIN:
            raise fail(403, "Forbidden")
        ttl_days = body.ttl_days or node.config.share_ttl_days
        if ttl_days <= 0:
            raise fail(400, "BadTtl")
        share_rec = node.store.create_share(
            body.doc_id,
            user.user_id,
            now_us=node.chain.now_us,
            ttl_us=ttl_days * 86_400 * 1_000_000,
        )
        node.store.persist()
        return {
            "token": share_rec.token,
            "url": f"/share/{share_rec.token}",
            "expires_at_s": seconds_str(share_rec.expires_at_us),
        }

    # --- admin: chain control and reporting ------------------------------

    @app.post("/admin/mine")
    def admin_mine(
        body: MineBody | None = None,
        _admin: UserAccount = Depends(require_role(st.ROLE_ADMIN)),
    ):
        count = body.blocks if body else 1
        mined = node.mine(max(1, min(count, 1000)))
        return {
            "mined": [
                {
                    "number": b.number,
                    "hash": b.block_hash.hex(),
                    "tx_count": len(b.transactions),
                    "timestamp_s": seconds_str(b.timestamp_us),
                }
                for b in mined
            ]
        }

    @app.get("/report")
    def report(_admin: UserAccount = Depends(require_role(st.ROLE_ADMIN))):
        entries = analytics.entries_from_receipts(
            node.receipts(), node.university_labels()
        )
        overall = analytics.aggregate(entries)
        groups = analytics.group_by_university(entries)
        return analytics.report_json(overall, groups)

    @app.get("/export/receipts.csv")
    def export_receipts(_admin: UserAccount = Depends(require_role(st.ROLE_ADMIN))):
        from .ledger import RECEIPTS_CSV_HEADER

        rows = [RECEIPTS_CSV_HEADER]
        rows += [r.to_csv_row() for r in node.receipts()]
        return Response("\n".join(rows) + "\n", media_type="text/csv")

    if node.config.frontend_dir:
        # mounted last, so every API route above still wins
        app.mount(
            "/",
            StaticFiles(directory=node.config.frontend_dir, html=True),
            name="ui",
        )

    return app


def _node_error_status(code: str) -> int:
    return {
        "FaucetExhausted": 503,
        "UniversityNotYetConfirmed": 409,
        "DuplicateHash": 409,
        "NotYourStudent": 403,
        "NotInitialized": 503,
        "ConfirmationTimeout": 504,
    }.get(code, 400)


def serve(node: Node) -> None:
    import uvicorn

    uvicorn.run(
        create_app(node),
        host=node.config.host,
        port=node.config.port,
        log_level="warning",
    )
