"""Desk-scale credential notarization on an embedded proof-of-work ledger.

The package is organized around the flow a certificate takes through the
system: a university account (``wallet``) signs a registry call
(``contract``) that is mined into the embedded chain (``ledger``), while
the private side of the record lives in the off-chain ``store``.  The
``service`` module exposes the role-based HTTP API, ``analytics`` turns
receipt logs into cost/latency reports, and ``cli`` is the operator
surface.  ``node`` ties a data directory's worth of state together.
"""

__version__ = "0.1.0"
