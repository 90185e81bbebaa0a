"""Proof backends for the relations.

Two interchangeable backends produce and check proofs of "I know a witness
for this statement":

- direct: the proof is the canonical witness serialization itself. Complete
  and sound by construction, but reveals the witness; useful as a reference
  and for debugging, never hiding.
- escrow: the proof is a digest of the canonical statement. Proving deposits
  the witness in a process-local table keyed by that digest; verifying looks
  the witness back up and re-checks it. Proofs for the same statement are
  byte-identical regardless of which witness was deposited, which makes the
  witness-indistinguishability of this backend exact, while soundness still
  holds because verification re-runs the relation checker on a real witness.
  A proof replayed against any other statement fails, since the digest
  changes. Escrow verification only works inside the proving process, so it
  is for experiments, not ceremonies.

Both backends raise WitnessError when asked to prove a false statement.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass

from .encoding import canonical_bytes, parse_hex, sha256_hex
from .errors import DecodeError, UsageError, WitnessError

DIRECT_BACKEND_ID = 1
ESCROW_BACKEND_ID = 2


@dataclass(frozen=True)
class Proof:
    backend_id: int
    payload: bytes


def serialize_proof(proof: Proof) -> bytes:
    return bytes([proof.backend_id]) + proof.payload


def parse_proof(data: bytes) -> Proof:
    if not isinstance(data, (bytes, bytearray)) or len(data) < 1:
        raise DecodeError("empty proof")
    backend_id = data[0]
    if backend_id not in (DIRECT_BACKEND_ID, ESCROW_BACKEND_ID):
        raise DecodeError(f"unknown proof backend id {backend_id}")
    return Proof(backend_id, bytes(data[1:]))


def proof_to_hex(proof: Proof) -> str:
    return serialize_proof(proof).hex()


def proof_from_hex(text: str) -> Proof:
    return parse_proof(parse_hex(text, "proof"))


class DirectBackend:
    name = "direct"
    backend_id = DIRECT_BACKEND_ID

    def prove(self, rel, x, w) -> Proof:
        if not rel.check(x, w):
            raise WitnessError("witness does not satisfy the relation")
        return Proof(self.backend_id, canonical_bytes(rel.witness_obj(w)))

    def verify(self, rel, x, proof: Proof) -> bool:
        if proof.backend_id != self.backend_id:
            return False
        try:
            obj = json.loads(proof.payload.decode("utf-8"))
            w = rel.witness_from_obj(obj)
        except (DecodeError, ValueError, UnicodeDecodeError):
            return False
        return rel.check(x, w)


class EscrowBackend:
    name = "escrow"
    backend_id = ESCROW_BACKEND_ID

    def __init__(self):
        self._table: dict[str, object] = {}
        self._lock = threading.Lock()

    @staticmethod
    def _token(rel, x) -> str:
        return sha256_hex(canonical_bytes(rel.statement_obj(x)))

    def prove(self, rel, x, w) -> Proof:
        if not rel.check(x, w):
            raise WitnessError("witness does not satisfy the relation")
        token = self._token(rel, x)
        with self._lock:
            self._table[token] = rel.witness_obj(w)
        return Proof(self.backend_id, bytes.fromhex(token))

    def verify(self, rel, x, proof: Proof) -> bool:
        if proof.backend_id != self.backend_id:
            return False
        token = self._token(rel, x)
        if proof.payload != bytes.fromhex(token):
            return False
        with self._lock:
            obj = self._table.get(token)
        if obj is None:
            return False
        try:
            w = rel.witness_from_obj(obj)
        except DecodeError:
            return False
        return rel.check(x, w)


_ESCROW = EscrowBackend()
_DIRECT = DirectBackend()


def get_backend(name: str):
    if name == "direct":
        return _DIRECT
    if name == "escrow":
        return _ESCROW
    raise UsageError(f"unknown proof backend {name!r}")


def backend_for_proof(proof: Proof):
    if proof.backend_id == DIRECT_BACKEND_ID:
        return _DIRECT
    if proof.backend_id == ESCROW_BACKEND_ID:
        return _ESCROW
    raise DecodeError(f"unknown proof backend id {proof.backend_id}")


def verify_proof(rel, x, proof: Proof) -> bool:
    """Dispatch on the proof's own backend byte; total."""
    try:
        backend = backend_for_proof(proof)
    except DecodeError:
        return False
    return backend.verify(rel, x, proof)
