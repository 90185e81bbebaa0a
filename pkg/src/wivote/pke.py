"""Linear (three-generator) public-key encryption over the toy group.

Setup expands a byte seed into (g3 exponent, x, y) through a counter-fed
SHA-256 stream with rejection sampling, so key generation is a stable
pure function of (params, seed): the tally relations regenerate keys from
seeds and compare. Decryption is total on arbitrary element triples, and
a well-formed public key determines its secret key uniquely; both facts
carry the verifiability arguments, and both have brute-force oracles
here.

Also home to the plaintext codecs: the vote codec (⊥ at exponent 0,
vote v at exponent v+1) and the signed-range codec used for additive
shares (value s at exponent s mod p, ⊥ parked just outside the range).
"""

from __future__ import annotations

from dataclasses import dataclass

from .encoding import hash_stream, stream_uniform
from .errors import BudgetError, DecodeError, ParameterError, UsageError
from .group import (
    GroupElement,
    GroupParams,
    element,
    g_exp,
    g_mul,
    parse_element,
    serialize_element,
)
from .tally import BOT

_EXPAND_TAG = b"wivote/pke-expand/v1"


class NotInMessageSpace:
    """Decode outcome for group elements outside the codec's code set."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotInMessageSpace"


NOT_IN_MESSAGE_SPACE = NotInMessageSpace()


@dataclass(frozen=True)
class PkePublicKey:
    g1: GroupElement
    g2: GroupElement
    g3: GroupElement


@dataclass(frozen=True)
class PkeSecretKey:
    pk: PkePublicKey
    x: int
    y: int


@dataclass(frozen=True)
class PkeCiphertext:
    c1: GroupElement
    c2: GroupElement
    c3: GroupElement


def expand_seed(params: GroupParams, seed: bytes) -> tuple[int, int, int]:
    """Deterministically expand a seed to (g3 exponent, x, y), each in [1, p)."""
    material = _EXPAND_TAG + b"\x00" + str(params.p).encode() + b"\x00" + seed
    stream = hash_stream(material)
    g3_exp = stream_uniform(stream, params.p - 1) + 1
    x = stream_uniform(stream, params.p - 1) + 1
    y = stream_uniform(stream, params.p - 1) + 1
    return g3_exp, x, y


def pke_setup(params: GroupParams, seed: bytes) -> tuple[PkePublicKey, PkeSecretKey]:
    """Derive a keypair from a seed: g1 = g3^(1/x), g2 = g3^(1/y)."""
    g3_exp, x, y = expand_seed(params, seed)
    p = params.p
    g3 = element(params, g3_exp)
    g1 = g_exp(g3, pow(x, -1, p))
    g2 = g_exp(g3, pow(y, -1, p))
    pk = PkePublicKey(g1, g2, g3)
    return pk, PkeSecretKey(pk, x, y)


def pke_encrypt(pk: PkePublicKey, m: GroupElement, a: int, b: int) -> PkeCiphertext:
    """Encrypt with explicit randomness: (g1^a, g2^b, m * g3^(a+b))."""
    return PkeCiphertext(
        g_exp(pk.g1, a),
        g_exp(pk.g2, b),
        g_mul(m, g_exp(pk.g3, a + b)),
    )


def pke_encrypt_rng(pk: PkePublicKey, m: GroupElement, rng) -> PkeCiphertext:
    p = pk.g3.p
    return pke_encrypt(pk, m, rng.randrange(p), rng.randrange(p))


def pke_decrypt(sk: PkeSecretKey, ct: PkeCiphertext) -> GroupElement:
    """Total decryption: c3 / (c1^x * c2^y). Never fails on garbage triples."""
    p = ct.c1.p
    exp = (ct.c3.exp - ct.c1.exp * sk.x - ct.c2.exp * sk.y) % p
    return GroupElement(exp, p)


def unique_sk_oracle(pk: PkePublicKey) -> list[PkeSecretKey]:
    """All secret keys consistent with pk, by exhausting (x, y) pairs."""
    p = pk.g3.p
    if p > 101:
        raise BudgetError(f"unique-sk enumeration limited to p <= 101, got {p}")
    xs = [x for x in range(1, p) if (pk.g1.exp * x) % p == pk.g3.exp]
    ys = [y for y in range(1, p) if (pk.g2.exp * y) % p == pk.g3.exp]
    return [PkeSecretKey(pk, x, y) for x in xs for y in ys]


def find_seed(
    params: GroupParams, g3_exp: int, x: int, y: int, max_tries: int = 5_000_000
) -> bytes:
    """Search counter seeds until expansion hits the target key material.

    Witnesses that seed expansion is onto the valid key-material triples;
    expected cost (p-1)^3 tries. Oracles use this to manufacture concrete
    witnesses for key statements chosen exponent-first.
    """
    target = (g3_exp, x, y)
    for value in target:
        if not 1 <= value < params.p:
            raise UsageError(f"target component {value} outside [1, p)")
    for i in range(max_tries):
        seed = i.to_bytes(8, "big")
        if expand_seed(params, seed) == target:
            return seed
    raise BudgetError(f"no seed found for {target} within {max_tries} tries")


@dataclass(frozen=True)
class VoteCodec:
    """Votes 0..K-1 at exponents 1..K; ⊥ at exponent 0."""

    p: int
    num_choices: int

    def __post_init__(self):
        if self.num_choices < 1:
            raise ParameterError("need at least one vote choice")
        if self.num_choices + 1 > self.p:
            raise ParameterError("vote codes do not fit in the group")

    @property
    def message_set(self) -> tuple[int, ...]:
        return tuple(range(self.num_choices))

    @property
    def bottom_code(self) -> int:
        return 0

    def vote_code(self, v: int) -> int:
        if v not in self.message_set:
            raise UsageError(f"vote {v!r} outside the message set")
        return v + 1

    def encode(self, v) -> GroupElement:
        if v is BOT:
            return GroupElement(self.bottom_code, self.p)
        return GroupElement(self.vote_code(v), self.p)

    def decode(self, m: GroupElement):
        if m.p != self.p:
            raise UsageError("element from a different group")
        if m.exp == self.bottom_code:
            return BOT
        if 1 <= m.exp <= self.num_choices:
            return m.exp - 1
        return NOT_IN_MESSAGE_SPACE


@dataclass(frozen=True)
class SignedRangeCodec:
    """Signed values -bound..bound at exponent s mod p; ⊥ at bound+1."""

    p: int
    bound: int

    def __post_init__(self):
        if self.bound < 1:
            raise ParameterError("range bound must be positive")
        if self.p <= 2 * self.bound + 2:
            raise ParameterError(
                f"p={self.p} too small for signed range ±{self.bound} plus the BOT code"
            )

    @property
    def message_set(self) -> tuple[int, ...]:
        return tuple(range(-self.bound, self.bound + 1))

    @property
    def bottom_code(self) -> int:
        return self.bound + 1

    def vote_code(self, s: int) -> int:
        if not -self.bound <= s <= self.bound:
            raise UsageError(f"value {s} outside ±{self.bound}")
        return s % self.p

    def encode(self, s) -> GroupElement:
        if s is BOT:
            return GroupElement(self.bottom_code, self.p)
        return GroupElement(self.vote_code(s), self.p)

    def decode(self, m: GroupElement):
        if m.p != self.p:
            raise UsageError("element from a different group")
        if m.exp == self.bottom_code:
            return BOT
        if m.exp <= self.bound:
            return m.exp
        if m.exp >= self.p - self.bound:
            return m.exp - self.p
        return NOT_IN_MESSAGE_SPACE


def pk_to_obj(pk: PkePublicKey) -> dict:
    return {
        "g1": serialize_element(pk.g1),
        "g2": serialize_element(pk.g2),
        "g3": serialize_element(pk.g3),
    }


def pk_from_obj(params: GroupParams, obj) -> PkePublicKey:
    if not isinstance(obj, dict) or set(obj) != {"g1", "g2", "g3"}:
        raise DecodeError("malformed public key record")
    return PkePublicKey(
        parse_element(params, obj["g1"]),
        parse_element(params, obj["g2"]),
        parse_element(params, obj["g3"]),
    )


def sk_to_obj(sk: PkeSecretKey) -> dict:
    return {"pk": pk_to_obj(sk.pk), "x": sk.x, "y": sk.y}


def sk_from_obj(params: GroupParams, obj) -> PkeSecretKey:
    if not isinstance(obj, dict) or set(obj) != {"pk", "x", "y"}:
        raise DecodeError("malformed secret key record")
    x, y = obj["x"], obj["y"]
    for v in (x, y):
        if not isinstance(v, int) or not 1 <= v < params.p:
            raise DecodeError("secret key scalar out of range")
    return PkeSecretKey(pk_from_obj(params, obj["pk"]), x, y)


def ct_to_obj(ct: PkeCiphertext) -> list:
    return [
        serialize_element(ct.c1),
        serialize_element(ct.c2),
        serialize_element(ct.c3),
    ]


def ct_from_obj(params: GroupParams, obj) -> PkeCiphertext:
    if not isinstance(obj, list) or len(obj) != 3:
        raise DecodeError("malformed ciphertext record")
    return PkeCiphertext(*(parse_element(params, s) for s in obj))
