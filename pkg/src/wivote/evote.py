"""The two election schemes: weakly verifiable and fully verifiable.

Both run the same five-phase ceremony (setup, cast, ballot verification,
tally evaluation, tally verification) over three parallel encryptions of
each vote. They differ in what is proven:

- weak: ballots are accepted unchecked, and the tally proof may claim ⊥
  unconditionally. Honest runs verify, but a cheating authority can get a
  false ⊥ accepted; the experiment harness demonstrates this gap.
- full: ballots carry a well-formedness proof checked against the public
  commitment Z, invalid ballots are replaced by ⊥ before tallying, and the
  tally proof must justify its claim even when that claim is ⊥. A claimed
  ⊥ tally verifies either trivially (every slot filtered to ⊥) or through
  a proof that both opened key columns genuinely tally to ⊥.

A voter's slot on the bulletin board is a Ballot, ABSTAIN, or INVALID;
the latter marks rows that failed structural checks upstream. Everything
here is pure given an RNG handle, so parallel casting is safe and fixed
seeds reproduce ceremonies exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .commit import (
    Commitment,
    commit,
    commitment_from_obj,
    commitment_to_obj,
    derive_commit_key,
)
from .encoding import parse_hex
from .errors import DecodeError, ParameterError, UsageError
from .group import GroupParams, new_group
from .niwi import Proof, get_backend, proof_from_hex, proof_to_hex, verify_proof
from .pke import (
    PkePublicKey,
    PkeSecretKey,
    VoteCodec,
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
    DecRelation,
    DecStatement,
    EncRelation,
    EncStatement,
    EncWitnessReal,
    column_votes,
    dec_witness,
)
from .tally import BOT, TallyConfig, eval_tally_fn

SEED_LEN = 16


class _SlotMark:
    _instances: dict = {}

    def __new__(cls, name):
        if name not in cls._instances:
            inst = super().__new__(cls)
            inst._name = name
            cls._instances[name] = inst
        return cls._instances[name]

    def __repr__(self):
        return self._name


ABSTAIN = _SlotMark("ABSTAIN")
INVALID = _SlotMark("INVALID")


@dataclass(frozen=True)
class ElectionPk:
    pks: tuple[PkePublicKey, PkePublicKey, PkePublicKey]
    z: Optional[Commitment]
    cfg: TallyConfig
    codec: VoteCodec

    @property
    def params(self) -> GroupParams:
        return new_group(self.codec.p)

    @property
    def full(self) -> bool:
        return self.z is not None

    @property
    def dec_relation(self) -> DecRelation:
        return DecRelation(self.cfg, self.codec, full=self.full)

    @property
    def enc_relation(self) -> EncRelation:
        return EncRelation(self.codec)


@dataclass(frozen=True)
class ElectionSk:
    sk1: PkeSecretKey
    sk2: PkeSecretKey
    s1: bytes
    s2: bytes
    r: Optional[tuple[int, int]]


@dataclass(frozen=True)
class SetupTranscript:
    """Everything setup generated, including the third key normally discarded.

    The election authority keeps only pk/sk; the extra seeds exist for the
    experiment harness, which needs alternative decryption witnesses.
    """

    pk: ElectionPk
    sk: ElectionSk
    seeds: tuple[bytes, bytes, bytes]
    sks: tuple[PkeSecretKey, PkeSecretKey, PkeSecretKey]


@dataclass(frozen=True)
class Ballot:
    cts: CtTriple
    pi: Optional[Proof]


@dataclass(frozen=True)
class TallyOutcome:
    y: object
    gamma: Optional[Proof]
    anomaly: bool = False


def _check_setup_args(params: GroupParams, cfg: TallyConfig, codec: VoteCodec) -> None:
    if codec.p != params.p:
        raise ParameterError("codec and group parameters disagree on p")
    if tuple(codec.message_set) != tuple(cfg.message_set):
        raise ParameterError("codec and tally config disagree on the message set")


def setup_weak_extended(
    params: GroupParams, cfg: TallyConfig, codec: VoteCodec, rng: random.Random
) -> SetupTranscript:
    _check_setup_args(params, cfg, codec)
    seeds = tuple(rng.randbytes(SEED_LEN) for _ in range(3))
    pairs = [pke_setup(params, s) for s in seeds]
    pk = ElectionPk(tuple(pk for pk, _ in pairs), None, cfg, codec)
    sk = ElectionSk(pairs[0][1], pairs[1][1], seeds[0], seeds[1], None)
    return SetupTranscript(pk, sk, seeds, tuple(s for _, s in pairs))


def setup_weak(
    params: GroupParams, cfg: TallyConfig, codec: VoteCodec, rng: random.Random
) -> tuple[ElectionPk, ElectionSk]:
    tr = setup_weak_extended(params, cfg, codec, rng)
    return tr.pk, tr.sk


def setup_full_extended(
    params: GroupParams,
    cfg: TallyConfig,
    codec: VoteCodec,
    rng: random.Random,
    z_value: int = 1,
) -> SetupTranscript:
    """z_value=1 is the honest binding setup; the privacy games re-run setup
    with z_value=0 to open the trapdoor branch of the ballot relation."""
    _check_setup_args(params, cfg, codec)
    seeds = tuple(rng.randbytes(SEED_LEN) for _ in range(3))
    pairs = [pke_setup(params, s) for s in seeds]
    r = (rng.randrange(params.p), rng.randrange(params.p))
    z = commit(derive_commit_key(params), z_value, r[0], r[1])
    pk = ElectionPk(tuple(pk for pk, _ in pairs), z, cfg, codec)
    sk = ElectionSk(pairs[0][1], pairs[1][1], seeds[0], seeds[1], r)
    return SetupTranscript(pk, sk, seeds, tuple(s for _, s in pairs))


def setup_full(
    params: GroupParams, cfg: TallyConfig, codec: VoteCodec, rng: random.Random
) -> tuple[ElectionPk, ElectionSk]:
    tr = setup_full_extended(params, cfg, codec, rng)
    return tr.pk, tr.sk


def _check_voter_index(pk: ElectionPk, j: int) -> None:
    if not isinstance(j, int) or not 1 <= j <= pk.cfg.num_voters:
        raise UsageError(f"voter index {j!r} outside 1..{pk.cfg.num_voters}")


def cast_weak(pk: ElectionPk, j: int, v, rng: random.Random) -> Ballot:
    _check_voter_index(pk, j)
    if v is not BOT and v not in pk.codec.message_set:
        raise UsageError(f"vote {v!r} outside the message set")
    encoded = pk.codec.encode(v)
    p = pk.codec.p
    cts = tuple(
        pke_encrypt(col_pk, encoded, rng.randrange(p), rng.randrange(p))
        for col_pk in pk.pks
    )
    return Ballot(cts, None)


def cast_full(
    pk: ElectionPk, j: int, v, rng: random.Random, backend=None
) -> Ballot:
    _check_voter_index(pk, j)
    if pk.z is None:
        raise UsageError("full-scheme cast needs a full-scheme public key")
    if v is not BOT and v not in pk.codec.message_set:
        raise UsageError(f"vote {v!r} outside the message set")
    backend = backend or get_backend("direct")
    encoded = pk.codec.encode(v)
    p = pk.codec.p
    rands = tuple((rng.randrange(p), rng.randrange(p)) for _ in range(3))
    cts = tuple(
        pke_encrypt(col_pk, encoded, a, b) for col_pk, (a, b) in zip(pk.pks, rands)
    )
    x = EncStatement(j, cts, pk.pks, pk.z)
    pi = backend.prove(pk.enc_relation, x, EncWitnessReal(v, rands))
    return Ballot(cts, pi)


def verify_ballot_weak(pk: ElectionPk, j: int, blt) -> bool:
    """Accepts anything, including garbage; the weak scheme checks nothing."""
    return True


def verify_ballot_full(pk: ElectionPk, j: int, blt) -> bool:
    if pk.z is None:
        raise UsageError("full-scheme verification needs a full-scheme public key")
    if not isinstance(blt, Ballot) or blt.pi is None or len(blt.cts) != 3:
        return False
    x = EncStatement(j, blt.cts, pk.pks, pk.z)
    return verify_proof(pk.enc_relation, x, blt.pi)


def slot_values(pk: ElectionPk, slots: Sequence, filter_ballots: bool) -> tuple:
    """Map board slots to ciphertext triples, with non-ballots (and, when
    filtering, ballots that fail verification) replaced by ⊥. Evaluation and
    verification both go through here, so they see the same statement."""
    if len(slots) != pk.cfg.num_voters:
        raise UsageError(f"expected {pk.cfg.num_voters} slots, got {len(slots)}")
    out = []
    for j, slot in enumerate(slots, start=1):
        if isinstance(slot, Ballot) and (
            not filter_ballots or verify_ballot_full(pk, j, slot)
        ):
            out.append(slot.cts)
        else:
            out.append(BOT)
    return tuple(out)


def _two_column_tally(pk: ElectionPk, keys: Sequence[tuple[PkeSecretKey, int]], ballots):
    message_set = set(pk.cfg.message_set)
    results = []
    for sk_col, idx in keys:
        votes = column_votes(pk.codec, message_set, sk_col, ballots, idx)
        results.append(eval_tally_fn(pk.cfg, votes))
    return results


def eval_tally_weak(
    pk: ElectionPk, sk: ElectionSk, slots: Sequence, backend=None
) -> TallyOutcome:
    backend = backend or get_backend("direct")
    ballots = slot_values(pk, slots, filter_ballots=False)
    y1, y2 = _two_column_tally(pk, [(sk.sk1, 1), (sk.sk2, 2)], ballots)
    y = y1 if y1 == y2 else BOT
    x = DecStatement(ballots, pk.pks, y)
    w = dec_witness(sk.sk1, sk.s1, 1, sk.sk2, sk.s2, 2)
    gamma = backend.prove(DecRelation(pk.cfg, pk.codec, full=False), x, w)
    return TallyOutcome(y, gamma)


def eval_tally_full(
    pk: ElectionPk, sk: ElectionSk, slots: Sequence, backend=None
) -> TallyOutcome:
    backend = backend or get_backend("direct")
    ballots = slot_values(pk, slots, filter_ballots=True)
    if all(b is BOT for b in ballots):
        return TallyOutcome(BOT, None)
    y1, y2 = _two_column_tally(pk, [(sk.sk1, 1), (sk.sk2, 2)], ballots)
    if y1 != y2:
        return TallyOutcome(BOT, None, anomaly=True)
    x = DecStatement(ballots, pk.pks, y1)
    w = dec_witness(sk.sk1, sk.s1, 1, sk.sk2, sk.s2, 2)
    gamma = backend.prove(DecRelation(pk.cfg, pk.codec, full=True), x, w)
    return TallyOutcome(y1, gamma)


def verify_tally_weak(pk: ElectionPk, slots: Sequence, y, gamma) -> bool:
    if gamma is None:
        return False
    ballots = slot_values(pk, slots, filter_ballots=False)
    x = DecStatement(ballots, pk.pks, y)
    return verify_proof(DecRelation(pk.cfg, pk.codec, full=False), x, gamma)


def verify_tally_full(pk: ElectionPk, slots: Sequence, y, gamma) -> bool:
    ballots = slot_values(pk, slots, filter_ballots=True)
    if y is BOT and all(b is BOT for b in ballots):
        return True
    if gamma is None:
        return False
    x = DecStatement(ballots, pk.pks, y)
    return verify_proof(DecRelation(pk.cfg, pk.codec, full=True), x, gamma)


def eval_tally_with_witness_indices(
    pk: ElectionPk,
    sk_extended: SetupTranscript,
    slots: Sequence,
    i1: int,
    i2: int,
    backend=None,
) -> TallyOutcome:
    """Tally through an arbitrary key-column pair. Harness entry point: the
    hybrid games walk the proof witness across (1,2), (1,3), (2,3)."""
    backend = backend or get_backend("direct")
    if i1 > i2:
        i1, i2 = i2, i1
    if not (1 <= i1 < i2 <= 3):
        raise UsageError(f"bad witness index pair ({i1}, {i2})")
    full = pk.full
    ballots = slot_values(pk, slots, filter_ballots=full)
    if full and all(b is BOT for b in ballots):
        return TallyOutcome(BOT, None)
    keys = [(sk_extended.sks[i1 - 1], i1), (sk_extended.sks[i2 - 1], i2)]
    y1, y2 = _two_column_tally(pk, keys, ballots)
    if y1 != y2:
        if full:
            return TallyOutcome(BOT, None, anomaly=True)
        y = BOT
    else:
        y = y1
    x = DecStatement(ballots, pk.pks, y)
    w = dec_witness(
        sk_extended.sks[i1 - 1],
        sk_extended.seeds[i1 - 1],
        i1,
        sk_extended.sks[i2 - 1],
        sk_extended.seeds[i2 - 1],
        i2,
    )
    gamma = backend.prove(DecRelation(pk.cfg, pk.codec, full=full), x, w)
    return TallyOutcome(y, gamma)


def ballot_to_obj(blt: Ballot) -> dict:
    return {
        "cts": [ct_to_obj(ct) for ct in blt.cts],
        "pi": proof_to_hex(blt.pi) if blt.pi is not None else None,
    }


def ballot_from_obj(params: GroupParams, obj) -> Ballot:
    if not isinstance(obj, dict) or set(obj) != {"cts", "pi"}:
        raise DecodeError("malformed ballot record")
    cts = obj["cts"]
    if not isinstance(cts, list) or len(cts) != 3:
        raise DecodeError("ballot must carry exactly three ciphertexts")
    pi = obj["pi"]
    return Ballot(
        tuple(ct_from_obj(params, c) for c in cts),
        proof_from_hex(pi) if pi is not None else None,
    )


def election_pk_to_obj(pk: ElectionPk) -> dict:
    return {
        "pks": [pk_to_obj(col) for col in pk.pks],
        "z": commitment_to_obj(pk.z) if pk.z is not None else None,
        "cfg": {
            "num_voters": pk.cfg.num_voters,
            "message_set": list(pk.cfg.message_set),
            "fn_id": pk.cfg.fn_id,
        },
        "codec": {"p": pk.codec.p, "num_choices": pk.codec.num_choices},
    }


def election_pk_from_obj(obj) -> ElectionPk:
    if not isinstance(obj, dict) or set(obj) != {"pks", "z", "cfg", "codec"}:
        raise DecodeError("malformed election public key")
    codec_obj = obj["codec"]
    cfg_obj = obj["cfg"]
    try:
        codec = VoteCodec(codec_obj["p"], codec_obj["num_choices"])
        cfg = TallyConfig(
            cfg_obj["num_voters"], tuple(cfg_obj["message_set"]), cfg_obj["fn_id"]
        )
    except (KeyError, TypeError, ParameterError) as exc:
        raise DecodeError(f"bad election configuration: {exc}") from exc
    params = new_group(codec.p)
    pks = obj["pks"]
    if not isinstance(pks, list) or len(pks) != 3:
        raise DecodeError("election key must carry three encryption keys")
    z = obj["z"]
    return ElectionPk(
        tuple(pk_from_obj(params, col) for col in pks),
        commitment_from_obj(params, z) if z is not None else None,
        cfg,
        codec,
    )


def election_sk_to_obj(sk: ElectionSk) -> dict:
    return {
        "sk1": sk_to_obj(sk.sk1),
        "sk2": sk_to_obj(sk.sk2),
        "s1": sk.s1.hex(),
        "s2": sk.s2.hex(),
        "r": list(sk.r) if sk.r is not None else None,
    }


def election_sk_from_obj(params: GroupParams, obj) -> ElectionSk:
    if not isinstance(obj, dict) or set(obj) != {"sk1", "sk2", "s1", "s2", "r"}:
        raise DecodeError("malformed election secret key")
    r = obj["r"]
    if r is not None and not (
        isinstance(r, list) and len(r) == 2 and all(isinstance(v, int) for v in r)
    ):
        raise DecodeError("malformed commitment randomness")
    return ElectionSk(
        sk_from_obj(params, obj["sk1"]),
        sk_from_obj(params, obj["sk2"]),
        parse_hex(obj["s1"], "seed"),
        parse_hex(obj["s2"], "seed"),
        tuple(r) if r is not None else None,
    )
