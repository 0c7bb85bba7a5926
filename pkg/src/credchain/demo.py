"""A scripted end-to-end population run against a fresh data directory.

The run is a pure function of the seed: it registers six universities,
enrolls five students each, uploads two generated documents per
student, mines the backlog down, opens one share link per student, and
then re-verifies every digest straight from chain state.  Two runs
with the same seed write byte-identical chain files.
"""

from __future__ import annotations

import random
from dataclasses import replace

from .config import AppConfig
from .node import Node

UNIVERSITY_COUNT = 6
STUDENTS_PER_UNIVERSITY = 5
DOCS_PER_STUDENT = 2

_UNIVERSITIES = [
    ("Aldgate Technical University", "GB"),
    ("Bayview Institute of Science", "US"),
    ("Carenna State University", "IT"),
    ("Deltaport Polytechnic", "NL"),
    ("Eastfield College", "IE"),
    ("Farrow Maritime Academy", "NO"),
]

_FIRST_NAMES = [
    "Asha", "Bruno", "Carmen", "Dmitri", "Elif",
    "Farid", "Grace", "Hana", "Ivan", "June",
]
_LAST_NAMES = [
    "Abbott", "Benali", "Cho", "Dias", "Eriksen",
    "Fontaine", "Gupta", "Hansen", "Ibarra", "Jones",
]


def _document_bytes(rng: random.Random, title: str) -> bytes:
    header = f"%DOC demo\ntitle: {title}\n".encode("utf-8")
    return header + rng.randbytes(rng.randint(200, 900))


def run_demo(config: AppConfig) -> dict:
    """Populate ``config.data_dir`` from scratch and return a summary.
    The directory must not already hold a chain."""
    config = replace(config, auto_mine=False)
    node = Node(config, create=True)
    rng = random.Random(config.seed ^ 0x5EED_D0C5)

    universities = []
    for index, (name, country) in enumerate(_UNIVERSITIES[:UNIVERSITY_COUNT]):
        email = f"registrar{index + 1}@uni{index + 1}.example"
        password = f"uni-pass-{rng.randrange(10**8):08d}"
        user, _tx_hash = node.create_university(email, password, name, country)
        universities.append(user)
    node.mine_until_empty()
    unconfirmed = [u for u in universities if not node.university_confirmed(u)]
    if unconfirmed:
        raise RuntimeError(f"{len(unconfirmed)} universities failed to confirm")

    students = []
    for user in universities:
        for index in range(STUDENTS_PER_UNIVERSITY):
            name = f"{rng.choice(_FIRST_NAMES)} {rng.choice(_LAST_NAMES)}"
            email = f"student{len(students) + 1}@uni{user.user_id}.example"
            password = f"stu-pass-{rng.randrange(10**8):08d}"
            student = node.store.add_student(
                user.user_id,
                email,
                password,
                name,
                enroll_no=f"EN-{len(students) + 1:04d}",
                now_us=node.chain.now_us,
            )
            students.append((user, student))
    node.store.persist()

    digests = []
    for user, student in students:
        for doc_index in range(DOCS_PER_STUDENT):
            doc_type_id = 1 if doc_index == 0 else 2
            title = f"student-{student.student_id}-doc-{doc_index + 1}"
            data = _document_bytes(rng, title)
            doc, _tx_hash = node.upload_document(
                user, student.student_id, doc_type_id, f"{title}.txt", data
            )
            digests.append(doc.digest)
    node.mine_until_empty()

    shares = []
    for _user, student in students:
        docs = node.store.documents_for_student(student.student_id)
        share = node.store.create_share(
            docs[0].doc_id, student.user_id, now_us=node.chain.now_us
        )
        shares.append(share.token)
    node.store.persist()

    verified = sum(1 for d in digests if node.verify_digest(d)["found"])
    receipts = node.receipts()
    total_fee_wei = sum(r.fee_wei for r in receipts)
    summary = {
        "data_dir": str(node.data_dir),
        "seed": config.seed,
        "universities": len(universities),
        "students": len(students),
        "documents": len(digests),
        "shares": len(shares),
        "blocks": node.chain.height,
        "receipts": len(receipts),
        "all_success": all(r.ok for r in receipts),
        "verified": verified,
        "all_verified": verified == len(digests),
        "total_fee_wei": str(total_fee_wei),
        "chain_file": str(node.data_dir / "chain.ndjson"),
    }
    node.close()
    return summary
