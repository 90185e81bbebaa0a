"""Multi-authority extension: votes split into additive or polynomial shares,
one full-scheme ballot per authority, tallies combined publicly.

Each voter splits v into m shares, one per authority, such that any m-1
shares are (almost) uniform and all m reconstruct v: for m=2 an additive
split over the signed range S = [-p', p'], for larger m evaluations of a
random degree m-1 polynomial with constant term v, resampled until every
share lands in S. Authority k sees only its own share column, tallies it
under its own keys, and proves the share-sum correct against its slot
commitments com_k (honestly all zeros; the commitment grid is what the
trapdoor branch of the combined relations opens instead). Combination is
public arithmetic over the per-authority sums: plain addition for m=2,
Lagrange interpolation at zero for larger m. No authority ever talks to
another.

The share set boundary -p' is the one value whose presence depends on the
vote (only v=0 can put -p' in a share pair at m=2); everything else in S
occurs under both votes, which is the scheme's privacy mechanism stated
concretely.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .commit import (
    CommitOpening,
    Commitment,
    commit,
    commit_rng,
    commitment_from_obj,
    commitment_to_obj,
    derive_commit_key,
    opening_from_obj,
    opening_to_obj,
)
from .encoding import parse_hex
from .errors import DecodeError, ParameterError, UsageError
from .evote import ElectionSk, TallyOutcome, election_sk_from_obj, election_sk_to_obj
from .group import GroupParams, new_group
from .niwi import Proof, get_backend, proof_from_hex, proof_to_hex, verify_proof
from .pke import (
    PkePublicKey,
    PkeSecretKey,
    SignedRangeCodec,
    ct_from_obj,
    ct_to_obj,
    pk_from_obj,
    pk_to_obj,
    pke_encrypt,
    pke_setup,
    sk_from_obj,
    sk_to_obj,
)
from .relations import (
    CtTriple,
    ThresholdDecRelation,
    ThresholdDecStatement,
    ThresholdDecWitnessReal,
    ThresholdEncRelation,
    ThresholdEncStatement,
    ThresholdEncWitnessReal,
    column_votes,
    dec_witness,
    share_tally,
)
from .tally import BOT, TallyConfig

SEED_LEN = 16


@dataclass(frozen=True)
class ThresholdParams:
    m: int
    share_bound: int
    cfg: TallyConfig
    codec: SignedRangeCodec

    def __post_init__(self):
        if self.m < 2:
            raise ParameterError("need at least 2 authorities")
        if self.share_bound < 1:
            raise ParameterError("share bound must be positive")
        if self.codec.bound != self.cfg.num_voters * self.share_bound:
            raise ParameterError(
                "codec range must cover the worst-case share sum N*p'"
            )

    @property
    def p(self) -> int:
        return self.codec.p

    @property
    def params(self) -> GroupParams:
        return new_group(self.codec.p)

    @property
    def share_set(self) -> tuple[int, ...]:
        return tuple(range(-self.share_bound, self.share_bound + 1))

    @property
    def enc_relation(self) -> ThresholdEncRelation:
        return ThresholdEncRelation(
            self.m, self.share_bound, tuple(self.cfg.message_set), self.codec
        )

    @property
    def dec_relation(self) -> ThresholdDecRelation:
        return ThresholdDecRelation(
            self.cfg.num_voters, self.m, self.share_bound, self.codec
        )


@dataclass(frozen=True)
class AuthorityPublic:
    k: int
    pks: tuple[PkePublicKey, PkePublicKey, PkePublicKey]
    z: Commitment
    com: tuple[tuple[Commitment, ...], ...]


@dataclass(frozen=True)
class AuthorityKey:
    public: AuthorityPublic
    sk: ElectionSk
    seeds: tuple[bytes, bytes, bytes]
    sks: tuple[PkeSecretKey, PkeSecretKey, PkeSecretKey]
    com_openings: tuple[tuple[CommitOpening, ...], ...]


@dataclass(frozen=True)
class ThresholdBallot:
    ballots: tuple[CtTriple, ...]
    pi: Optional[Proof]


def centered_mod(p: int, x: int) -> int:
    """Representative of x mod p in (-p/2, p/2]."""
    r = x % p
    return r if r <= (p - 1) // 2 else r - p


def split_vote(tp: ThresholdParams, v: int, rng: random.Random) -> list[int]:
    if v not in tp.cfg.message_set:
        raise UsageError(f"vote {v!r} outside the message set")
    bound = tp.share_bound
    if tp.m == 2:
        while True:
            v1 = rng.randint(-bound, bound)
            v2 = v - v1
            if -bound <= v2 <= bound:
                return [v1, v2]
    p = tp.p
    while True:
        coeffs = [rng.randrange(p) for _ in range(tp.m - 1)]
        shares = []
        for k in range(1, tp.m + 1):
            acc = v
            for i, c in enumerate(coeffs, start=1):
                acc += c * pow(k, i, p)
            shares.append(centered_mod(p, acc))
        if all(-bound <= s <= bound for s in shares):
            return shares


def reconstruct_shares(p: int, shares: Sequence[int]) -> int:
    """Invert split_vote: integer sum for two shares, Lagrange interpolation
    at zero (points 1..m) otherwise."""
    m = len(shares)
    if m < 2:
        raise UsageError("need at least 2 shares")
    if m == 2:
        return shares[0] + shares[1]
    acc = 0
    for k in range(1, m + 1):
        lam = 1
        for l in range(1, m + 1):
            if l != k:
                lam = lam * l % p * pow(l - k, -1, p) % p
        acc = (acc + lam * shares[k - 1]) % p
    return acc


def keygen_threshold(
    tp: ThresholdParams, rng: random.Random
) -> list[AuthorityKey]:
    params = tp.params
    ck = derive_commit_key(params)
    keys = []
    for k in range(1, tp.m + 1):
        seeds = tuple(rng.randbytes(SEED_LEN) for _ in range(3))
        pairs = [pke_setup(params, s) for s in seeds]
        r = (rng.randrange(params.p), rng.randrange(params.p))
        z = commit(ck, 1, r[0], r[1])
        grid_coms = []
        grid_opens = []
        for _ in range(tp.cfg.num_voters):
            row_c = []
            row_o = []
            for _ in range(9):
                c, o = commit_rng(ck, 0, rng)
                row_c.append(c)
                row_o.append(o)
            grid_coms.append(tuple(row_c))
            grid_opens.append(tuple(row_o))
        pub = AuthorityPublic(
            k, tuple(pk for pk, _ in pairs), z, tuple(grid_coms)
        )
        sk = ElectionSk(pairs[0][1], pairs[1][1], seeds[0], seeds[1], r)
        keys.append(
            AuthorityKey(pub, sk, seeds, tuple(s for _, s in pairs), tuple(grid_opens))
        )
    return keys


def _enc_statement(
    tp: ThresholdParams, auth_pubs: Sequence[AuthorityPublic], j: int, ballots
) -> ThresholdEncStatement:
    return ThresholdEncStatement(
        j,
        tuple(ballots),
        tuple(pub.pks for pub in auth_pubs),
        tuple(pub.com[j - 1] for pub in auth_pubs),
    )


def _check_ceremony(tp: ThresholdParams, auth_pubs: Sequence[AuthorityPublic]) -> None:
    if len(auth_pubs) != tp.m:
        raise UsageError(f"expected {tp.m} authority keys, got {len(auth_pubs)}")


def cast_threshold(
    tp: ThresholdParams,
    auth_pubs: Sequence[AuthorityPublic],
    j: int,
    v: int,
    rng: random.Random,
    backend=None,
) -> ThresholdBallot:
    _check_ceremony(tp, auth_pubs)
    if not isinstance(j, int) or not 1 <= j <= tp.cfg.num_voters:
        raise UsageError(f"voter index {j!r} outside 1..{tp.cfg.num_voters}")
    backend = backend or get_backend("direct")
    p = tp.p
    shares = split_vote(tp, v, rng)
    ballots = []
    rands = []
    for pub, share in zip(auth_pubs, shares):
        encoded = tp.codec.encode(share)
        rr = tuple((rng.randrange(p), rng.randrange(p)) for _ in range(3))
        ballots.append(
            tuple(pke_encrypt(pk, encoded, a, b) for pk, (a, b) in zip(pub.pks, rr))
        )
        rands.append(rr)
    x = _enc_statement(tp, auth_pubs, j, ballots)
    w = ThresholdEncWitnessReal(tuple(shares), tuple(rands))
    pi = backend.prove(tp.enc_relation, x, w)
    return ThresholdBallot(tuple(ballots), pi)


def verify_ballot_threshold(
    tp: ThresholdParams, auth_pubs: Sequence[AuthorityPublic], j: int, tblt
) -> bool:
    _check_ceremony(tp, auth_pubs)
    if (
        not isinstance(tblt, ThresholdBallot)
        or tblt.pi is None
        or len(tblt.ballots) != tp.m
        or any(len(b) != 3 for b in tblt.ballots)
    ):
        return False
    x = _enc_statement(tp, auth_pubs, j, tblt.ballots)
    return verify_proof(tp.enc_relation, x, tblt.pi)


def threshold_slot_values(
    tp: ThresholdParams, auth_pubs: Sequence[AuthorityPublic], slots: Sequence
) -> tuple:
    """Per-voter filtered view: the m-tuple of ballot triples for slots whose
    combined proof verifies, ⊥ otherwise. Shared by evaluation and
    verification so both see the same statements."""
    if len(slots) != tp.cfg.num_voters:
        raise UsageError(
            f"expected {tp.cfg.num_voters} slots, got {len(slots)}"
        )
    out = []
    for j, slot in enumerate(slots, start=1):
        if isinstance(slot, ThresholdBallot) and verify_ballot_threshold(
            tp, auth_pubs, j, slot
        ):
            out.append(slot.ballots)
        else:
            out.append(BOT)
    return tuple(out)


def _authority_column(slot_values: Sequence, k: int) -> tuple:
    return tuple(sv if sv is BOT else sv[k - 1] for sv in slot_values)


def eval_tally_authority(
    tp: ThresholdParams,
    k: int,
    auth_key: AuthorityKey,
    auth_pubs: Sequence[AuthorityPublic],
    slots: Sequence,
    backend=None,
) -> TallyOutcome:
    _check_ceremony(tp, auth_pubs)
    if auth_key.public.k != k:
        raise UsageError(f"authority key is for k={auth_key.public.k}, not {k}")
    backend = backend or get_backend("direct")
    values = threshold_slot_values(tp, auth_pubs, slots)
    ballots_k = _authority_column(values, k)
    if all(b is BOT for b in ballots_k):
        return TallyOutcome(BOT, None)
    share_set = set(tp.share_set)
    sk = auth_key.sk
    y1 = share_tally(column_votes(tp.codec, share_set, sk.sk1, ballots_k, 1))
    y2 = share_tally(column_votes(tp.codec, share_set, sk.sk2, ballots_k, 2))
    if y1 != y2:
        return TallyOutcome(BOT, None, anomaly=True)
    x = ThresholdDecStatement(k, ballots_k, auth_key.public.pks, y1, auth_key.public.com)
    w = ThresholdDecWitnessReal(
        dec_witness(sk.sk1, sk.s1, 1, sk.sk2, sk.s2, 2), auth_key.com_openings
    )
    gamma = backend.prove(tp.dec_relation, x, w)
    return TallyOutcome(y1, gamma)


def verify_tally_authority(
    tp: ThresholdParams,
    auth_pubs: Sequence[AuthorityPublic],
    k: int,
    slots: Sequence,
    y,
    gamma,
) -> bool:
    _check_ceremony(tp, auth_pubs)
    if not 1 <= k <= tp.m:
        return False
    values = threshold_slot_values(tp, auth_pubs, slots)
    ballots_k = _authority_column(values, k)
    if y is BOT and all(b is BOT for b in ballots_k):
        return True
    if gamma is None:
        return False
    pub = auth_pubs[k - 1]
    x = ThresholdDecStatement(k, ballots_k, pub.pks, y, pub.com)
    return verify_proof(tp.dec_relation, x, gamma)


def combine_tallies(tp: ThresholdParams, outcomes: Sequence) -> object:
    """Public combination of the per-authority share sums. Any missing or ⊥
    outcome makes the whole tally ⊥, as does a combination that lands outside
    the tally function's result space."""
    ys = []
    for o in outcomes:
        ys.append(o.y if isinstance(o, TallyOutcome) else o)
    if len(ys) != tp.m or any(y is BOT or y is None for y in ys):
        return BOT
    if not all(isinstance(y, int) for y in ys):
        return BOT
    combined = reconstruct_shares(tp.p, ys)
    if combined not in tp.cfg.result_space:
        return BOT
    return combined


def threshold_ballot_to_obj(tblt: ThresholdBallot) -> dict:
    return {
        "ballots": [[ct_to_obj(ct) for ct in b] for b in tblt.ballots],
        "pi": proof_to_hex(tblt.pi) if tblt.pi is not None else None,
    }


def threshold_ballot_from_obj(params: GroupParams, obj) -> ThresholdBallot:
    if not isinstance(obj, dict) or set(obj) != {"ballots", "pi"}:
        raise DecodeError("malformed threshold ballot record")
    ballots = obj["ballots"]
    if not isinstance(ballots, list) or not all(
        isinstance(b, list) and len(b) == 3 for b in ballots
    ):
        raise DecodeError("malformed threshold ballot ciphertexts")
    pi = obj["pi"]
    return ThresholdBallot(
        tuple(tuple(ct_from_obj(params, c) for c in b) for b in ballots),
        proof_from_hex(pi) if pi is not None else None,
    )


def authority_public_to_obj(pub: AuthorityPublic) -> dict:
    return {
        "k": pub.k,
        "pks": [pk_to_obj(pk) for pk in pub.pks],
        "z": commitment_to_obj(pub.z),
        "com": [[commitment_to_obj(c) for c in row] for row in pub.com],
    }


def authority_public_from_obj(params: GroupParams, obj) -> AuthorityPublic:
    if not isinstance(obj, dict) or set(obj) != {"k", "pks", "z", "com"}:
        raise DecodeError("malformed authority public key")
    pks = obj["pks"]
    if not isinstance(pks, list) or len(pks) != 3:
        raise DecodeError("authority key must carry three encryption keys")
    return AuthorityPublic(
        obj["k"],
        tuple(pk_from_obj(params, pk) for pk in pks),
        commitment_from_obj(params, obj["z"]),
        tuple(
            tuple(commitment_from_obj(params, c) for c in row) for row in obj["com"]
        ),
    )


def authority_key_to_obj(key: AuthorityKey) -> dict:
    return {
        "public": authority_public_to_obj(key.public),
        "sk": election_sk_to_obj(key.sk),
        "seeds": [s.hex() for s in key.seeds],
        "sks": [sk_to_obj(s) for s in key.sks],
        "openings": [[opening_to_obj(o) for o in row] for row in key.com_openings],
    }


def authority_key_from_obj(params: GroupParams, obj) -> AuthorityKey:
    if not isinstance(obj, dict) or set(obj) != {"public", "sk", "seeds", "sks", "openings"}:
        raise DecodeError("malformed authority secret key")
    return AuthorityKey(
        authority_public_from_obj(params, obj["public"]),
        election_sk_from_obj(params, obj["sk"]),
        tuple(parse_hex(s, "seed") for s in obj["seeds"]),
        tuple(sk_from_obj(params, s) for s in obj["sks"]),
        tuple(
            tuple(opening_from_obj(params, o) for o in row) for row in obj["openings"]
        ),
    )
