"""Perfectly binding commitments over the group.

A commitment to value v with randomness (r1, r2) is the triple
(h1^r1, h2^r2, h3^(r1+r2) * g^v). The key (h1, h2, h3) is derived from
the group parameters through a fixed domain-separation tag, so committing
needs no trusted setup input. Binding is unconditional: in the toy
backend the committed value can even be extracted, which the binding
oracles exploit. Hiding is computational in a real group and cosmetic
here; nothing in the verification story depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .encoding import hash_stream, stream_uniform
from .errors import DecodeError, UsageError
from .group import (
    GroupElement,
    GroupParams,
    element,
    g_exp,
    parse_element,
    serialize_element,
)

_KEY_TAG = b"wivote/commit-key/v1"


@dataclass(frozen=True)
class CommitKey:
    h1: GroupElement
    h2: GroupElement
    h3: GroupElement


@dataclass(frozen=True)
class Commitment:
    d1: GroupElement
    d2: GroupElement
    d3: GroupElement


@dataclass(frozen=True)
class CommitOpening:
    value: int
    r1: int
    r2: int


@lru_cache(maxsize=64)
def derive_commit_key(params: GroupParams) -> CommitKey:
    """Deterministic commitment key from the group parameters alone."""
    stream = hash_stream(_KEY_TAG + b"\x00" + str(params.p).encode())
    exps = [stream_uniform(stream, params.p - 1) + 1 for _ in range(3)]
    return CommitKey(*(element(params, e) for e in exps))


def commit(ck: CommitKey, value: int, r1: int, r2: int) -> Commitment:
    p = ck.h1.p
    return Commitment(
        g_exp(ck.h1, r1),
        g_exp(ck.h2, r2),
        GroupElement((ck.h3.exp * (r1 + r2) + value) % p, p),
    )


def commit_rng(ck: CommitKey, value: int, rng) -> tuple[Commitment, CommitOpening]:
    p = ck.h1.p
    r1, r2 = rng.randrange(p), rng.randrange(p)
    return commit(ck, value, r1, r2), CommitOpening(value % p, r1, r2)


def verify_opening(ck: CommitKey, c: Commitment, o: CommitOpening) -> bool:
    p = ck.h1.p
    for v in (o.value, o.r1, o.r2):
        if not 0 <= v < p:
            return False
    return commit(ck, o.value, o.r1, o.r2) == c


def commit_tuple(
    ck: CommitKey, values: Sequence[int], rng
) -> tuple[tuple[Commitment, ...], tuple[CommitOpening, ...]]:
    """Element-wise commitments to a tuple; openings go back to the committer."""
    if not values:
        raise UsageError("empty tuple")
    pairs = [commit_rng(ck, v, rng) for v in values]
    return tuple(c for c, _ in pairs), tuple(o for _, o in pairs)


def committed_value(ck: CommitKey, c: Commitment) -> int:
    """Extract the unique committed value (toy-backend transparency)."""
    p = ck.h1.p
    r1 = (c.d1.exp * pow(ck.h1.exp, -1, p)) % p
    r2 = (c.d2.exp * pow(ck.h2.exp, -1, p)) % p
    return (c.d3.exp - ck.h3.exp * (r1 + r2)) % p


def commitment_to_obj(c: Commitment) -> list:
    return [serialize_element(c.d1), serialize_element(c.d2), serialize_element(c.d3)]


def commitment_from_obj(params: GroupParams, obj) -> Commitment:
    if not isinstance(obj, list) or len(obj) != 3:
        raise DecodeError("malformed commitment record")
    return Commitment(*(parse_element(params, s) for s in obj))


def opening_to_obj(o: CommitOpening) -> list:
    return [o.value, o.r1, o.r2]


def opening_from_obj(params: GroupParams, obj) -> CommitOpening:
    if (
        not isinstance(obj, list)
        or len(obj) != 3
        or not all(isinstance(v, int) and 0 <= v < params.p for v in obj)
    ):
        raise DecodeError("malformed opening record")
    return CommitOpening(*obj)
