"""Canonical serialization and deterministic byte-stream utilities.

Everything persisted or hashed goes through canonical_json so that equal
values always produce equal bytes: keys sorted, no whitespace, no NaN.
Deterministic randomness comes in two flavors with different stability
requirements: hash_stream is a counter-fed SHA-256 stream used for key
expansion (must never change across versions), while derive_rng hands out
seeded random.Random instances for experiment sampling.
"""

from __future__ import annotations

import hashlib
import json
import random
from typing import Iterator

from .errors import DecodeError


def canonical_json(obj) -> str:
    """Serialize to the canonical JSON form used for hashing and records."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def canonical_bytes(obj) -> bytes:
    return canonical_json(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def hash_stream(material: bytes) -> Iterator[int]:
    """Unbounded deterministic byte stream: SHA-256 of material + counter."""
    counter = 0
    while True:
        block = hashlib.sha256(material + counter.to_bytes(4, "big")).digest()
        yield from block
        counter += 1


def stream_uniform(stream: Iterator[int], n: int) -> int:
    """Next uniform integer in [0, n) drawn from a byte stream by rejection."""
    if n <= 0:
        raise ValueError("empty range")
    nbits = max((n - 1).bit_length(), 1)
    nbytes = (nbits + 7) // 8
    mask = (1 << nbits) - 1
    while True:
        raw = 0
        for _ in range(nbytes):
            raw = (raw << 8) | next(stream)
        value = raw & mask
        if value < n:
            return value


def derive_bytes(master: bytes, *tags: object) -> bytes:
    """Domain-separated 32-byte subkey of a master seed."""
    h = hashlib.sha256()
    h.update(b"wivote/derive/v1")
    h.update(master)
    for tag in tags:
        h.update(b"\x00")
        h.update(str(tag).encode("utf-8"))
    return h.digest()


def derive_rng(master: bytes, *tags: object) -> random.Random:
    """Seeded RNG for one purpose; independent purposes get independent tags."""
    return random.Random(int.from_bytes(derive_bytes(master, *tags), "big"))


def parse_hex(s: str, what: str = "hex field") -> bytes:
    if not isinstance(s, str):
        raise DecodeError(f"{what}: expected string")
    try:
        return bytes.fromhex(s)
    except ValueError as exc:
        raise DecodeError(f"{what}: invalid hex") from exc
