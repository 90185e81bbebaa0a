"""Statements, witnesses, and checkers for the provable relations.

Four relations are defined here, each as a small context object binding
the election configuration it is about:

- tally-decryption (weak form): the claimed tally matches both selected
  key columns, or the claim is ⊥ (the ⊥ escape is the weak scheme's
  documented soundness gap);
- tally-decryption (full form): identical but without the ⊥ escape, so
  ⊥ is only provable when both selected columns genuinely tally to ⊥;
- ballot well-formedness: either all three ciphertexts encrypt the same
  legal vote (real branch) or the election's Z commits to 0 (trapdoor
  branch);
- the threshold variants of both, over additive shares and per-authority
  tuple commitments.

Checkers are total boolean functions and are the ground truth: proof
backends, compiled circuits, and brute-force oracles all answer to them.
Statement serializations are canonical and double as escrow proof keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .commit import (
    CommitKey,
    CommitOpening,
    Commitment,
    commitment_to_obj,
    derive_commit_key,
    opening_from_obj,
    opening_to_obj,
    verify_opening,
)
from .encoding import canonical_bytes, parse_hex, sha256_hex
from .errors import DecodeError, ParameterError
from .group import new_group
from .pke import (
    PkeCiphertext,
    PkePublicKey,
    PkeSecretKey,
    SignedRangeCodec,
    VoteCodec,
    ct_from_obj,
    ct_to_obj,
    pk_to_obj,
    pke_decrypt,
    pke_encrypt,
    pke_setup,
    sk_from_obj,
    sk_to_obj,
)
from .tally import BOT, Bottom, TallyConfig, eval_tally_fn, tally_from_str, tally_to_str

CtTriple = tuple[PkeCiphertext, PkeCiphertext, PkeCiphertext]
BallotSlotValue = Union[CtTriple, Bottom]


@dataclass(frozen=True)
class DecStatement:
    ballots: tuple[BallotSlotValue, ...]
    pks: tuple[PkePublicKey, PkePublicKey, PkePublicKey]
    y: object


@dataclass(frozen=True)
class DecWitness:
    sk1p: PkeSecretKey
    sk2p: PkeSecretKey
    s1: bytes
    s2: bytes
    i1: int
    i2: int


def dec_witness(
    sk_a: PkeSecretKey, s_a: bytes, i_a: int, sk_b: PkeSecretKey, s_b: bytes, i_b: int
) -> DecWitness:
    """Build a decryption witness with the index pair canonicalized i1 < i2."""
    if i_a > i_b:
        sk_a, s_a, i_a, sk_b, s_b, i_b = sk_b, s_b, i_b, sk_a, s_a, i_a
    return DecWitness(sk_a, sk_b, s_a, s_b, i_a, i_b)


@dataclass(frozen=True)
class EncStatement:
    j: int
    cts: CtTriple
    pks: tuple[PkePublicKey, PkePublicKey, PkePublicKey]
    z: Commitment


@dataclass(frozen=True)
class EncWitnessReal:
    m: object
    rands: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class EncWitnessTrapdoor:
    u: CommitOpening


EncWitness = Union[EncWitnessReal, EncWitnessTrapdoor]


def column_votes(codec, message_set, sk: PkeSecretKey, ballots, col: int) -> list:
    """Per-slot votes read through one key column; anything illegal is ⊥."""
    votes = []
    for blt in ballots:
        if blt is BOT:
            votes.append(BOT)
            continue
        decoded = codec.decode(pke_decrypt(sk, blt[col - 1]))
        if isinstance(decoded, int) and decoded in message_set:
            votes.append(decoded)
        else:
            votes.append(BOT)
    return votes


def _ballot_slot_to_obj(slot: BallotSlotValue):
    if slot is BOT:
        return "BOT"
    return [ct_to_obj(ct) for ct in slot]


def _ballot_slot_from_obj(params, obj) -> BallotSlotValue:
    if obj == "BOT":
        return BOT
    if not isinstance(obj, list) or len(obj) != 3:
        raise DecodeError("malformed ballot slot")
    return tuple(ct_from_obj(params, c) for c in obj)


@dataclass(frozen=True)
class DecRelation:
    """Tally-decryption relation; full=True drops the ⊥ escape in item (d)."""

    cfg: TallyConfig
    codec: VoteCodec
    full: bool = False

    def __post_init__(self):
        if tuple(self.codec.message_set) != tuple(self.cfg.message_set):
            raise ParameterError("codec and tally config disagree on the message set")

    @property
    def rel_id(self) -> str:
        ctx = {
            "kind": "dec-full" if self.full else "dec",
            "n": self.cfg.num_voters,
            "m": list(self.cfg.message_set),
            "fn": self.cfg.fn_id,
            "p": self.codec.p,
            "choices": self.codec.num_choices,
        }
        return f"{ctx['kind']}/v1:{sha256_hex(canonical_bytes(ctx))[:16]}"

    def check(self, x: DecStatement, w: DecWitness) -> bool:
        params = new_group(self.codec.p)
        if not (
            isinstance(w.i1, int) and isinstance(w.i2, int) and 1 <= w.i1 < w.i2 <= 3
        ):
            return False
        if len(x.ballots) != self.cfg.num_voters:
            return False
        if x.y is not BOT and x.y not in self.cfg.result_space:
            return False
        message_set = set(self.cfg.message_set)
        columns = []
        for sk_claim, seed, idx in ((w.sk1p, w.s1, w.i1), (w.sk2p, w.s2, w.i2)):
            pk_gen, sk_gen = pke_setup(params, seed)
            if pk_gen != x.pks[idx - 1]:
                return False
            if sk_claim != sk_gen:
                return False
            columns.append(
                column_votes(self.codec, message_set, sk_gen, x.ballots, idx)
            )
        if x.y is BOT and not self.full:
            return True
        return all(eval_tally_fn(self.cfg, votes) == x.y for votes in columns)

    def statement_obj(self, x: DecStatement) -> dict:
        return {
            "rel": self.rel_id,
            "ballots": [_ballot_slot_to_obj(b) for b in x.ballots],
            "pks": [pk_to_obj(pk) for pk in x.pks],
            "y": tally_to_str(x.y),
        }

    def witness_obj(self, w: DecWitness) -> dict:
        return {
            "sk1": sk_to_obj(w.sk1p),
            "sk2": sk_to_obj(w.sk2p),
            "s1": w.s1.hex(),
            "s2": w.s2.hex(),
            "i1": w.i1,
            "i2": w.i2,
        }

    def witness_from_obj(self, obj) -> DecWitness:
        if not isinstance(obj, dict) or set(obj) != {"sk1", "sk2", "s1", "s2", "i1", "i2"}:
            raise DecodeError("malformed decryption witness")
        params = new_group(self.codec.p)
        i1, i2 = obj["i1"], obj["i2"]
        if not all(isinstance(i, int) and 1 <= i <= 3 for i in (i1, i2)):
            raise DecodeError("witness indices out of range")
        return DecWitness(
            sk_from_obj(params, obj["sk1"]),
            sk_from_obj(params, obj["sk2"]),
            parse_hex(obj["s1"], "seed"),
            parse_hex(obj["s2"], "seed"),
            i1,
            i2,
        )


@dataclass(frozen=True)
class EncRelation:
    """Ballot well-formedness: consistent legal vote, or Z commits to 0."""

    codec: VoteCodec

    @property
    def ck(self) -> CommitKey:
        return derive_commit_key(new_group(self.codec.p))

    @property
    def rel_id(self) -> str:
        ctx = {"kind": "enc-full", "p": self.codec.p, "choices": self.codec.num_choices}
        return f"enc-full/v1:{sha256_hex(canonical_bytes(ctx))[:16]}"

    def check(self, x: EncStatement, w: EncWitness) -> bool:
        p = self.codec.p
        if isinstance(w, EncWitnessReal):
            m = w.m
            if m is not BOT and m not in self.codec.message_set:
                return False
            if len(w.rands) != 3:
                return False
            encoded = self.codec.encode(m)
            for ct, pk, (a, b) in zip(x.cts, x.pks, w.rands):
                if not (
                    isinstance(a, int)
                    and isinstance(b, int)
                    and 0 <= a < p
                    and 0 <= b < p
                ):
                    return False
                if pke_encrypt(pk, encoded, a, b) != ct:
                    return False
            return True
        if isinstance(w, EncWitnessTrapdoor):
            if w.u.value != 0:
                return False
            return verify_opening(self.ck, x.z, w.u)
        return False

    def statement_obj(self, x: EncStatement) -> dict:
        return {
            "rel": self.rel_id,
            "j": x.j,
            "cts": [ct_to_obj(ct) for ct in x.cts],
            "pks": [pk_to_obj(pk) for pk in x.pks],
            "z": commitment_to_obj(x.z),
        }

    def witness_obj(self, w: EncWitness) -> dict:
        if isinstance(w, EncWitnessReal):
            return {
                "branch": "real",
                "m": tally_to_str(w.m),
                "rands": [list(r) for r in w.rands],
            }
        return {"branch": "trapdoor", "u": opening_to_obj(w.u)}

    def witness_from_obj(self, obj) -> EncWitness:
        params = new_group(self.codec.p)
        if not isinstance(obj, dict) or "branch" not in obj:
            raise DecodeError("malformed ballot witness")
        if obj["branch"] == "real":
            if set(obj) != {"branch", "m", "rands"}:
                raise DecodeError("malformed real-branch witness")
            rands = obj["rands"]
            if (
                not isinstance(rands, list)
                or len(rands) != 3
                or not all(
                    isinstance(r, list)
                    and len(r) == 2
                    and all(isinstance(v, int) and 0 <= v < params.p for v in r)
                    for r in rands
                )
            ):
                raise DecodeError("malformed encryption randomness")
            try:
                m = tally_from_str(obj["m"])
            except (ValueError, TypeError) as exc:
                raise DecodeError("malformed witness message") from exc
            return EncWitnessReal(m, tuple((r[0], r[1]) for r in rands))
        if obj["branch"] == "trapdoor":
            if set(obj) != {"branch", "u"}:
                raise DecodeError("malformed trapdoor-branch witness")
            return EncWitnessTrapdoor(opening_from_obj(params, obj["u"]))
        raise DecodeError(f"unknown witness branch {obj['branch']!r}")


def check_dec(cfg: TallyConfig, codec: VoteCodec, x: DecStatement, w: DecWitness) -> bool:
    return DecRelation(cfg, codec, full=False).check(x, w)


def check_dec_full(
    cfg: TallyConfig, codec: VoteCodec, x: DecStatement, w: DecWitness
) -> bool:
    return DecRelation(cfg, codec, full=True).check(x, w)


def check_enc_full(codec: VoteCodec, x: EncStatement, w: EncWitness) -> bool:
    return EncRelation(codec).check(x, w)


def flatten_ballot(slot: BallotSlotValue) -> tuple[int, ...]:
    """Ordered element exponents of a ballot triple; ⊥ flattens to nine zeros."""
    if slot is BOT:
        return (0,) * 9
    return tuple(
        e.exp for ct in slot for e in (ct.c1, ct.c2, ct.c3)
    )


@dataclass(frozen=True)
class ThresholdEncStatement:
    j: int
    ballots: tuple[CtTriple, ...]
    pks: tuple[tuple[PkePublicKey, PkePublicKey, PkePublicKey], ...]
    coms: tuple[tuple[Commitment, ...], ...]


@dataclass(frozen=True)
class ThresholdEncWitnessReal:
    shares: tuple[int, ...]
    rands: tuple[tuple[tuple[int, int], ...], ...]


@dataclass(frozen=True)
class ThresholdEncWitnessTrapdoor:
    openings: tuple[tuple[CommitOpening, ...], ...]


ThresholdEncWitness = Union[ThresholdEncWitnessReal, ThresholdEncWitnessTrapdoor]


@dataclass(frozen=True)
class ThresholdDecStatement:
    k: int
    ballots: tuple[BallotSlotValue, ...]
    pks: tuple[PkePublicKey, PkePublicKey, PkePublicKey]
    y: object
    com: tuple[tuple[Commitment, ...], ...]


@dataclass(frozen=True)
class ThresholdDecWitnessReal:
    dec: DecWitness
    zero_openings: tuple[tuple[CommitOpening, ...], ...]


@dataclass(frozen=True)
class ThresholdDecWitnessTrapdoor:
    openings: tuple[tuple[CommitOpening, ...], ...]


ThresholdDecWitness = Union[ThresholdDecWitnessReal, ThresholdDecWitnessTrapdoor]


def share_tally(shares: Sequence) -> object:
    """Integer share sum with ⊥ counted as 0, forced to ⊥ when all are ⊥."""
    if all(s is BOT for s in shares):
        return BOT
    return sum(0 if s is BOT else s for s in shares)


@dataclass(frozen=True)
class ThresholdEncRelation:
    """Per-voter threshold ballot: legal shares reconstructing a legal vote,
    or every authority's slot commitment opens to the posted ballots."""

    num_authorities: int
    share_bound: int
    message_set: tuple[int, ...]
    codec: SignedRangeCodec

    @property
    def ck(self) -> CommitKey:
        return derive_commit_key(new_group(self.codec.p))

    @property
    def rel_id(self) -> str:
        ctx = {
            "kind": "thr-enc",
            "m": self.num_authorities,
            "bound": self.share_bound,
            "votes": list(self.message_set),
            "p": self.codec.p,
            "range": self.codec.bound,
        }
        return f"thr-enc/v1:{sha256_hex(canonical_bytes(ctx))[:16]}"

    def _reconstruct(self, shares: Sequence[int]) -> int:
        from .threshold import reconstruct_shares

        return reconstruct_shares(self.codec.p, shares)

    def check(self, x: ThresholdEncStatement, w: ThresholdEncWitness) -> bool:
        m = self.num_authorities
        p = self.codec.p
        if len(x.ballots) != m or len(x.pks) != m or len(x.coms) != m:
            return False
        if isinstance(w, ThresholdEncWitnessReal):
            if len(w.shares) != m or len(w.rands) != m:
                return False
            for s in w.shares:
                if not isinstance(s, int) or not -self.share_bound <= s <= self.share_bound:
                    return False
            if self._reconstruct(w.shares) not in self.message_set:
                return False
            for ballot, pks, share, rands in zip(x.ballots, x.pks, w.shares, w.rands):
                if len(rands) != 3:
                    return False
                encoded = self.codec.encode(share)
                for ct, pk, (a, b) in zip(ballot, pks, rands):
                    if not (0 <= a < p and 0 <= b < p):
                        return False
                    if pke_encrypt(pk, encoded, a, b) != ct:
                        return False
            return True
        if isinstance(w, ThresholdEncWitnessTrapdoor):
            if len(w.openings) != m:
                return False
            for ballot, coms, openings in zip(x.ballots, x.coms, w.openings):
                flat = flatten_ballot(ballot)
                if len(coms) != 9 or len(openings) != 9:
                    return False
                for value, com_t, o in zip(flat, coms, openings):
                    if o.value != value or not verify_opening(self.ck, com_t, o):
                        return False
            return True
        return False

    def statement_obj(self, x: ThresholdEncStatement) -> dict:
        return {
            "rel": self.rel_id,
            "j": x.j,
            "ballots": [[ct_to_obj(ct) for ct in b] for b in x.ballots],
            "pks": [[pk_to_obj(pk) for pk in pks] for pks in x.pks],
            "coms": [[commitment_to_obj(c) for c in coms] for coms in x.coms],
        }

    def witness_obj(self, w: ThresholdEncWitness) -> dict:
        if isinstance(w, ThresholdEncWitnessReal):
            return {
                "branch": "real",
                "shares": list(w.shares),
                "rands": [[list(r) for r in rr] for rr in w.rands],
            }
        return {
            "branch": "trapdoor",
            "openings": [[opening_to_obj(o) for o in oo] for oo in w.openings],
        }

    def witness_from_obj(self, obj) -> ThresholdEncWitness:
        params = new_group(self.codec.p)
        if not isinstance(obj, dict) or "branch" not in obj:
            raise DecodeError("malformed threshold ballot witness")
        if obj["branch"] == "real":
            if set(obj) != {"branch", "shares", "rands"}:
                raise DecodeError("malformed real-branch witness")
            shares = obj["shares"]
            rands = obj["rands"]
            if not (
                isinstance(shares, list)
                and all(isinstance(s, int) for s in shares)
                and isinstance(rands, list)
                and all(
                    isinstance(rr, list)
                    and len(rr) == 3
                    and all(
                        isinstance(r, list)
                        and len(r) == 2
                        and all(isinstance(v, int) and 0 <= v < params.p for v in r)
                        for r in rr
                    )
                    for rr in rands
                )
            ):
                raise DecodeError("malformed share witness")
            return ThresholdEncWitnessReal(
                tuple(shares), tuple(tuple((r[0], r[1]) for r in rr) for rr in rands)
            )
        if obj["branch"] == "trapdoor":
            if set(obj) != {"branch", "openings"}:
                raise DecodeError("malformed trapdoor-branch witness")
            return ThresholdEncWitnessTrapdoor(
                tuple(
                    tuple(opening_from_obj(params, o) for o in oo)
                    for oo in obj["openings"]
                )
            )
        raise DecodeError(f"unknown witness branch {obj['branch']!r}")


@dataclass(frozen=True)
class ThresholdDecRelation:
    """Per-authority share tally: the full decryption check plus com_k opening
    to zeros (real), or com_k opening to the posted ballots (trapdoor)."""

    num_voters: int
    num_authorities: int
    share_bound: int
    codec: SignedRangeCodec

    @property
    def ck(self) -> CommitKey:
        return derive_commit_key(new_group(self.codec.p))

    @property
    def rel_id(self) -> str:
        ctx = {
            "kind": "thr-dec",
            "n": self.num_voters,
            "m": self.num_authorities,
            "bound": self.share_bound,
            "p": self.codec.p,
            "range": self.codec.bound,
        }
        return f"thr-dec/v1:{sha256_hex(canonical_bytes(ctx))[:16]}"

    @property
    def sum_bound(self) -> int:
        return self.num_voters * self.share_bound

    def _check_dec_part(self, x: ThresholdDecStatement, w: DecWitness) -> bool:
        params = new_group(self.codec.p)
        if not (
            isinstance(w.i1, int) and isinstance(w.i2, int) and 1 <= w.i1 < w.i2 <= 3
        ):
            return False
        if len(x.ballots) != self.num_voters:
            return False
        if x.y is not BOT and not (
            isinstance(x.y, int) and -self.sum_bound <= x.y <= self.sum_bound
        ):
            return False
        share_set = set(range(-self.share_bound, self.share_bound + 1))
        for sk_claim, seed, idx in ((w.sk1p, w.s1, w.i1), (w.sk2p, w.s2, w.i2)):
            pk_gen, sk_gen = pke_setup(params, seed)
            if pk_gen != x.pks[idx - 1]:
                return False
            if sk_claim != sk_gen:
                return False
            votes = column_votes(self.codec, share_set, sk_gen, x.ballots, idx)
            if share_tally(votes) != x.y:
                return False
        return True

    def check(self, x: ThresholdDecStatement, w: ThresholdDecWitness) -> bool:
        if len(x.com) != self.num_voters or any(len(c) != 9 for c in x.com):
            return False
        if isinstance(w, ThresholdDecWitnessReal):
            if not self._check_dec_part(x, w.dec):
                return False
            if len(w.zero_openings) != self.num_voters:
                return False
            for coms, openings in zip(x.com, w.zero_openings):
                if len(openings) != 9:
                    return False
                for com_t, o in zip(coms, openings):
                    if o.value != 0 or not verify_opening(self.ck, com_t, o):
                        return False
            return True
        if isinstance(w, ThresholdDecWitnessTrapdoor):
            if len(w.openings) != self.num_voters:
                return False
            for slot, coms, openings in zip(x.ballots, x.com, w.openings):
                flat = flatten_ballot(slot)
                if len(openings) != 9:
                    return False
                for value, com_t, o in zip(flat, coms, openings):
                    if o.value != value or not verify_opening(self.ck, com_t, o):
                        return False
            return True
        return False

    def statement_obj(self, x: ThresholdDecStatement) -> dict:
        return {
            "rel": self.rel_id,
            "k": x.k,
            "ballots": [_ballot_slot_to_obj(b) for b in x.ballots],
            "pks": [pk_to_obj(pk) for pk in x.pks],
            "y": tally_to_str(x.y),
            "com": [[commitment_to_obj(c) for c in coms] for coms in x.com],
        }

    def witness_obj(self, w: ThresholdDecWitness) -> dict:
        if isinstance(w, ThresholdDecWitnessReal):
            return {
                "branch": "real",
                "sk1": sk_to_obj(w.dec.sk1p),
                "sk2": sk_to_obj(w.dec.sk2p),
                "s1": w.dec.s1.hex(),
                "s2": w.dec.s2.hex(),
                "i1": w.dec.i1,
                "i2": w.dec.i2,
                "zeros": [[opening_to_obj(o) for o in oo] for oo in w.zero_openings],
            }
        return {
            "branch": "trapdoor",
            "openings": [[opening_to_obj(o) for o in oo] for oo in w.openings],
        }

    def witness_from_obj(self, obj) -> ThresholdDecWitness:
        params = new_group(self.codec.p)
        if not isinstance(obj, dict) or "branch" not in obj:
            raise DecodeError("malformed threshold tally witness")
        if obj["branch"] == "real":
            expected = {"branch", "sk1", "sk2", "s1", "s2", "i1", "i2", "zeros"}
            if set(obj) != expected:
                raise DecodeError("malformed real-branch witness")
            i1, i2 = obj["i1"], obj["i2"]
            if not all(isinstance(i, int) and 1 <= i <= 3 for i in (i1, i2)):
                raise DecodeError("witness indices out of range")
            dec = DecWitness(
                sk_from_obj(params, obj["sk1"]),
                sk_from_obj(params, obj["sk2"]),
                parse_hex(obj["s1"], "seed"),
                parse_hex(obj["s2"], "seed"),
                i1,
                i2,
            )
            zeros = tuple(
                tuple(opening_from_obj(params, o) for o in oo) for oo in obj["zeros"]
            )
            return ThresholdDecWitnessReal(dec, zeros)
        if obj["branch"] == "trapdoor":
            if set(obj) != {"branch", "openings"}:
                raise DecodeError("malformed trapdoor-branch witness")
            return ThresholdDecWitnessTrapdoor(
                tuple(
                    tuple(opening_from_obj(params, o) for o in oo)
                    for oo in obj["openings"]
                )
            )
        raise DecodeError(f"unknown witness branch {obj['branch']!r}")


def check_threshold_enc(
    rel: ThresholdEncRelation, x: ThresholdEncStatement, w: ThresholdEncWitness
) -> bool:
    return rel.check(x, w)


def check_threshold_dec(
    rel: ThresholdDecRelation, x: ThresholdDecStatement, w: ThresholdDecWitness
) -> bool:
    return rel.check(x, w)
