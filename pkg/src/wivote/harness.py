"""Security-experiment harness: privacy games, hybrid chains, and oracles.

The toy group makes every computational-indistinguishability notion false
by construction, so none is measured here. Each game instead asserts the
functional equality its security argument reduces to at desk scale:

- privacy games check that the tally is literally identical under both
  challenge bits whenever the winning conditions hold;
- the hybrid chain walks the encrypted columns and proof witnesses
  through every intermediate assignment and checks the tally never
  moves (conditioned on the mixed-ballot event staying absent) and that
  escrow proofs keep identical bytes across witness switches;
- the mixed-ballot event is shown impossible under a binding Z by an
  exhaustive witness scan, and constructively reachable under Z = Com(0);
- verifiability and correctness are checked by brute-force enumeration
  of the whole (tally, witness) space at tiny parameters.

All randomness flows from explicit master seeds through tagged
sub-generators, so every run is replayable.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .commit import CommitOpening, commit, derive_commit_key, verify_opening
from .encoding import canonical_bytes, derive_rng, sha256_hex
from .errors import BudgetError, DecodeError, ParameterError, UsageError
from .evote import (
    ABSTAIN,
    Ballot,
    ElectionPk,
    SetupTranscript,
    ballot_from_obj,
    ballot_to_obj,
    cast_full,
    cast_weak,
    eval_tally_full,
    eval_tally_weak,
    eval_tally_with_witness_indices,
    setup_full_extended,
    setup_weak_extended,
    slot_values,
    verify_ballot_full,
    verify_ballot_weak,
    verify_tally_full,
    verify_tally_weak,
)
from .group import GroupElement, new_group
from .niwi import get_backend, proof_to_hex
from .pke import (
    PkeCiphertext,
    VoteCodec,
    find_seed,
    pke_decrypt,
    pke_encrypt,
    pke_setup,
    unique_sk_oracle,
)
from .relations import (
    DecRelation,
    DecStatement,
    EncStatement,
    EncWitnessReal,
    EncWitnessTrapdoor,
    dec_witness,
)
from .tally import (
    BOT,
    TallyConfig,
    compatible,
    eval_tally_fn,
    tally_to_str,
    winning_condition_3,
)
from .threshold import (
    ThresholdParams,
    cast_threshold,
    combine_tallies,
    eval_tally_authority,
    keygen_threshold,
    reconstruct_shares,
    verify_ballot_threshold,
    verify_tally_authority,
)

ORACLE_MAX_P = 5
ORACLE_MAX_VOTERS = 2


@dataclass(frozen=True)
class SchemeSpec:
    """A concrete scheme instantiation the games run against."""

    kind: str
    p: int
    cfg: TallyConfig
    backend_name: str = "direct"

    def __post_init__(self):
        if self.kind not in ("weak", "full"):
            raise ParameterError(f"unknown scheme kind {self.kind!r}")
        if tuple(self.cfg.message_set) != tuple(range(len(self.cfg.message_set))):
            raise ParameterError("message set must be 0..K-1 for the vote codec")

    @property
    def full(self) -> bool:
        return self.kind == "full"

    @property
    def params(self):
        return new_group(self.p)

    @property
    def codec(self) -> VoteCodec:
        return VoteCodec(self.p, len(self.cfg.message_set))

    @property
    def backend(self):
        return get_backend(self.backend_name)

    def setup(self, rng, z_value: int = 1) -> SetupTranscript:
        if self.full:
            return setup_full_extended(self.params, self.cfg, self.codec, rng, z_value)
        return setup_weak_extended(self.params, self.cfg, self.codec, rng)

    def cast(self, pk: ElectionPk, j: int, v, rng) -> Ballot:
        if self.full:
            return cast_full(pk, j, v, rng, self.backend)
        return cast_weak(pk, j, v, rng)

    def verify_ballot(self, pk: ElectionPk, j: int, blt) -> bool:
        if self.full:
            return verify_ballot_full(pk, j, blt)
        return verify_ballot_weak(pk, j, blt)

    def eval_tally(self, pk: ElectionPk, sk, slots):
        if self.full:
            return eval_tally_full(pk, sk, slots, self.backend)
        return eval_tally_weak(pk, sk, slots, self.backend)

    def verify_tally(self, pk: ElectionPk, slots, y, gamma) -> bool:
        if self.full:
            return verify_tally_full(pk, slots, y, gamma)
        return verify_tally_weak(pk, slots, y, gamma)


@dataclass(frozen=True)
class Challenge:
    """Adversary output: two vote tuples and the adversarial-slot index set.

    Entries at indices in s are raw ballot bytes taken verbatim; the rest
    are votes in M or ⊥.
    """

    m0: tuple
    m1: tuple
    s: frozenset

    def entry(self, b: int, j: int):
        return (self.m0, self.m1)[b][j - 1]


@dataclass(frozen=True)
class HybridSpec:
    """One stage: how many voters' column-c ciphertexts carry the b=1
    message (switched[c-1]), which key pair backs the tally proof, and
    whether the stage lives in the Com(1) or Com(0) key world."""

    stage: str
    switched: tuple[int, int, int]
    witness: tuple[int, int]
    z_mode: int

    @property
    def gamma_mode(self) -> str:
        return "R" if self.witness == (1, 2) else "T"

    def column_source(self, j: int, col: int) -> int:
        """1 if voter j's column-col ciphertext encrypts the b=1 message."""
        return 1 if j <= self.switched[col - 1] else 0


@dataclass(frozen=True)
class StageRecord:
    stage: str
    y: str
    gamma_hex: str
    view_digest: str
    gamma_mode: str
    skipped: bool = False


@dataclass
class ExperimentReport:
    """Append-only run record: ordered entries plus named pass/fail verdicts."""

    kind: str
    records: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    e1: bool = False
    anomalies: list = field(default_factory=list)

    def add(self, label: str, value) -> None:
        self.records.append((label, value))

    def verdict(self, name: str, ok: bool) -> None:
        self.verdicts[name] = bool(ok)

    def anomaly(self, message: str) -> None:
        self.anomalies.append(message)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values()) and not self.anomalies

    def to_obj(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "verdicts": dict(self.verdicts),
            "e1": self.e1,
            "anomalies": list(self.anomalies),
            "records": [[label, _record_obj(value)] for label, value in self.records],
        }


def _record_obj(value):
    if isinstance(value, StageRecord):
        return {
            "stage": value.stage,
            "y": value.y,
            "gamma": value.gamma_hex,
            "view": value.view_digest,
            "mode": value.gamma_mode,
            "skipped": value.skipped,
        }
    if isinstance(value, (list, tuple)):
        return [_record_obj(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _record_obj(v) for k, v in value.items()}
    if value is BOT:
        return "BOT"
    if isinstance(value, bytes):
        return value.hex()
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return repr(value)


def challenge_problems(scheme: SchemeSpec, ch: Challenge) -> tuple[str, ...]:
    """Reasons this challenge is malformed for the given game; empty if fine."""
    n = scheme.cfg.num_voters
    problems = []
    if len(ch.m0) != n or len(ch.m1) != n:
        problems.append("challenge tuples must have one entry per voter")
        return tuple(problems)
    if any(not (1 <= j <= n) for j in ch.s):
        problems.append("S index out of range")
    if not scheme.full and ch.s:
        problems.append("weak game requires an empty S")
    legal = set(scheme.cfg.message_set)
    for side, tup in (("M0", ch.m0), ("M1", ch.m1)):
        for j, entry in enumerate(tup, start=1):
            if j in ch.s:
                if not isinstance(entry, (bytes, bytearray)):
                    problems.append(f"{side}[{j}] must be raw ballot bytes")
            elif entry is not BOT and entry not in legal:
                problems.append(f"{side}[{j}] is not a vote in M or ⊥")
    return tuple(problems)


def _parse_raw_ballot(pk: ElectionPk, raw):
    try:
        obj = json.loads(bytes(raw).decode("utf-8"))
        return ballot_from_obj(pk.params, obj)
    except (DecodeError, ValueError, UnicodeDecodeError):
        return None


def challenge_slots(scheme: SchemeSpec, pk: ElectionPk, ch: Challenge, b: int, rng):
    """The challenger's board for bit b: S entries verbatim then filtered,
    the rest cast honestly."""
    slots = []
    for j in range(1, scheme.cfg.num_voters + 1):
        entry = ch.entry(b, j)
        if j in ch.s:
            blt = _parse_raw_ballot(pk, entry)
            if blt is None or not scheme.verify_ballot(pk, j, blt):
                slots.append(BOT)
            else:
                slots.append(blt)
        else:
            slots.append(scheme.cast(pk, j, entry, rng))
    return tuple(slots)


def view_digest(pk: ElectionPk, slots, y, gamma) -> str:
    view = {
        "slots": [
            ballot_to_obj(s) if isinstance(s, Ballot) else "BOT" for s in slots
        ],
        "y": tally_to_str(y),
        "gamma": proof_to_hex(gamma) if gamma is not None else None,
    }
    return sha256_hex(canonical_bytes(view))


class FixedChallengeAdversary:
    """Deterministic adversary: emits one fixed challenge, then guesses by
    hashing its view. The guess is a function of public data only, so it
    carries no information beyond what the view itself leaks."""

    def __init__(self, m0, m1, s=()):
        self.m0 = tuple(m0)
        self.m1 = tuple(m1)
        self.s = frozenset(s)

    def challenge(self, pk: ElectionPk) -> Challenge:
        return Challenge(self.m0, self.m1, self.s)

    def guess(self, pk: ElectionPk, slots, y, gamma) -> int:
        return int(view_digest(pk, slots, y, gamma)[-1], 16) & 1


def run_priv_game(scheme: SchemeSpec, adversary, rng) -> ExperimentReport:
    """One play of the privacy game, plus the counterfactual other-bit
    tally so the report can assert the functional invariance directly."""
    report = ExperimentReport(kind=f"priv-{scheme.kind}")
    transcript = scheme.setup(derive_rng(rng.randbytes(16), "setup"))
    pk, sk = transcript.pk, transcript.sk
    b = rng.randrange(2)
    report.add("b", b)
    ch = adversary.challenge(pk)
    problems = challenge_problems(scheme, ch)
    report.verdict("challenge_ok", not problems)
    for problem in problems:
        report.add("challenge_rejected", problem)
    if problems:
        report.verdict("win", False)
        return report
    coins = rng.randbytes(16)
    slots = challenge_slots(scheme, pk, ch, b, derive_rng(coins, "cast", b))
    outcome = scheme.eval_tally(pk, sk, slots)
    report.add("view", view_digest(pk, slots, outcome.y, outcome.gamma))
    report.add("y", tally_to_str(outcome.y))
    guess = adversary.guess(pk, slots, outcome.y, outcome.gamma)
    cond1 = guess == b
    cond2 = all(ch.m0[j - 1] == ch.m1[j - 1] for j in ch.s)
    cond3 = cond2 and winning_condition_3_holds(scheme.cfg, ch)
    report.verdict("cond2", cond2)
    report.verdict("cond3", cond3)
    report.add("cond1", cond1)
    report.verdict("win", bool(cond1 and cond2 and cond3))
    other = challenge_slots(scheme, pk, ch, 1 - b, derive_rng(coins, "cast", 1 - b))
    y_other = scheme.eval_tally(pk, sk, other).y
    report.add("y_other", tally_to_str(y_other))
    if cond2 and cond3:
        report.verdict("tally_invariant", outcome.y == y_other)
    return report


def winning_condition_3_holds(cfg: TallyConfig, ch: Challenge) -> bool:
    return winning_condition_3(cfg, ch.m0, ch.m1, sorted(ch.s))


def hybrid_stages(n: int, z_mode: int) -> tuple[HybridSpec, ...]:
    """The full column/witness walk: H1, H2^0..N, H3, H4^0..N, H5,
    H6^0..N, H7. Column 3 switches first, then 2, then 1; the proof
    witness moves (1,2) → (1,3) → (2,3) → (1,2) between the blocks."""
    stages = [HybridSpec("H1", (0, 0, 0), (1, 2), z_mode)]
    for k in range(n + 1):
        stages.append(HybridSpec(f"H2^{k}", (0, 0, k), (1, 2), z_mode))
    stages.append(HybridSpec("H3", (0, 0, n), (1, 3), z_mode))
    for k in range(n + 1):
        stages.append(HybridSpec(f"H4^{k}", (0, k, n), (1, 3), z_mode))
    stages.append(HybridSpec("H5", (0, n, n), (2, 3), z_mode))
    for k in range(n + 1):
        stages.append(HybridSpec(f"H6^{k}", (k, n, n), (2, 3), z_mode))
    stages.append(HybridSpec("H7", (n, n, n), (1, 2), z_mode))
    return tuple(stages)


def _stage_ballot(scheme, pk, transcript, j, msgs, coin_seed, spec):
    """Challenge ballot with per-column messages. The coins depend only on
    (voter, column, message source), so a stage boundary changes exactly
    the switched ciphertext. Full-scheme proofs use the real witness when
    the columns agree and the Z opening otherwise."""
    p = scheme.p
    codec = scheme.codec
    cts = []
    rands = []
    for col, (src, m) in enumerate(zip(spec_sources(spec, j), msgs), start=1):
        coin_rng = derive_rng(coin_seed, "col", j, col, src)
        a, b = coin_rng.randrange(p), coin_rng.randrange(p)
        rands.append((a, b))
        cts.append(pke_encrypt(pk.pks[col - 1], codec.encode(m), a, b))
    cts = tuple(cts)
    if not scheme.full:
        return Ballot(cts, None)
    x = EncStatement(j, cts, pk.pks, pk.z)
    if msgs[0] == msgs[1] == msgs[2]:
        w = EncWitnessReal(msgs[0], tuple(rands))
    else:
        r1, r2 = transcript.sk.r
        w = EncWitnessTrapdoor(CommitOpening(0, r1, r2))
    pi = scheme.backend.prove(pk.enc_relation, x, w)
    return Ballot(cts, pi)


def spec_sources(spec: HybridSpec, j: int) -> tuple[int, int, int]:
    return tuple(spec.column_source(j, col) for col in (1, 2, 3))


def run_hybrid_chain(scheme: SchemeSpec, challenge, rng) -> ExperimentReport:
    """Run every hybrid stage over one challenge and record tallies, view
    digests, and proofs. `challenge` is either a Challenge or a callable
    (pk, transcript) -> Challenge so adversarial ballots can be crafted
    against the run's own keys."""
    report = ExperimentReport(kind=f"hybrids-{scheme.kind}")
    z_mode = 0 if scheme.full else 1
    transcript = scheme.setup(derive_rng(rng.randbytes(16), "setup"), z_value=z_mode)
    pk = transcript.pk
    if callable(challenge):
        challenge = challenge(pk, transcript)
    problems = challenge_problems(scheme, challenge)
    if problems:
        raise UsageError("hybrid chain needs a well-formed challenge: " + problems[0])
    cond2 = all(challenge.m0[j - 1] == challenge.m1[j - 1] for j in challenge.s)
    if not (cond2 and winning_condition_3_holds(scheme.cfg, challenge)):
        raise UsageError("hybrid chain needs a challenge meeting conditions 2 and 3")
    n = scheme.cfg.num_voters
    coin_seed = rng.randbytes(16)

    s_slots = {}
    for j in sorted(challenge.s):
        blt = _parse_raw_ballot(pk, challenge.m0[j - 1])
        if blt is None or not scheme.verify_ballot(pk, j, blt):
            s_slots[j] = BOT
        else:
            s_slots[j] = blt
    report.e1 = scheme.full and detect_e1(
        pk, transcript.sks, challenge
    )
    if report.e1:
        report.add("e1", "mixed-column adversarial ballot accepted; stages skipped")

    stage_records = []
    for spec in hybrid_stages(n, z_mode):
        if report.e1:
            stage_records.append(
                StageRecord(spec.stage, "", "", "", spec.gamma_mode, skipped=True)
            )
            continue
        slots = []
        for j in range(1, n + 1):
            if j in challenge.s:
                slots.append(s_slots[j])
                continue
            msgs = tuple(
                challenge.entry(src, j) for src in spec_sources(spec, j)
            )
            slots.append(
                _stage_ballot(scheme, pk, transcript, j, msgs, coin_seed, spec)
            )
        outcome = eval_tally_with_witness_indices(
            pk, transcript, slots, *spec.witness, backend=scheme.backend
        )
        if outcome.anomaly:
            report.anomaly(f"{spec.stage}: column tallies disagree")
        gamma_hex = proof_to_hex(outcome.gamma) if outcome.gamma is not None else ""
        stage_records.append(
            StageRecord(
                spec.stage,
                tally_to_str(outcome.y),
                gamma_hex,
                view_digest(pk, slots, outcome.y, outcome.gamma),
                spec.gamma_mode,
            )
        )
    for record in stage_records:
        report.add("stage", record)

    by_stage = {r.stage: r for r in stage_records}
    live = [r for r in stage_records if not r.skipped]
    if live:
        report.verdict("y_constant", len({r.y for r in live}) == 1)
        for lead, base in (("H2^0", "H1"), ("H4^0", "H3"), ("H6^0", "H5")):
            report.verdict(
                f"{lead}_equals_{base}",
                by_stage[lead].view_digest == by_stage[base].view_digest,
            )
        if scheme.backend_name == "escrow":
            for lead, base in (("H3", f"H2^{n}"), ("H5", f"H4^{n}"), ("H7", f"H6^{n}")):
                report.verdict(
                    f"{lead}_gamma_bytes_match_{base}",
                    by_stage[lead].gamma_hex == by_stage[base].gamma_hex,
                )
    return report


def detect_e1(pk: ElectionPk, sks, challenge: Challenge) -> bool:
    """True iff some adversarial slot carries a ballot that passes ballot
    verification yet decrypts to different plaintexts in two columns."""
    for j in sorted(challenge.s):
        if challenge.m0[j - 1] != challenge.m1[j - 1]:
            continue
        blt = _parse_raw_ballot(pk, challenge.m0[j - 1])
        if blt is None or not verify_ballot_full(pk, j, blt):
            continue
        exps = {pke_decrypt(sk, ct).exp for sk, ct in zip(sks, blt.cts)}
        if len(exps) > 1:
            return True
    return False


def e1_witness_scan(p: int, num_choices: int, master_seed: bytes) -> ExperimentReport:
    """Exhaust the ballot-relation witness space under a binding Z=Com(1):
    every real witness induces a ballot whose three columns decrypt
    identically, and no trapdoor opening exists. Any accepted ballot is
    backed by some witness, so no accepted mixed-column ballot can exist."""
    if p > ORACLE_MAX_P:
        raise BudgetError(f"witness scan limited to p <= {ORACLE_MAX_P}, got {p}")
    report = ExperimentReport(kind="e1-scan")
    params = new_group(p)
    codec = VoteCodec(p, num_choices)
    rng = derive_rng(master_seed, "e1", "keys")
    seeds = [rng.randbytes(16) for _ in range(3)]
    pairs = [pke_setup(params, s) for s in seeds]
    pks = tuple(pk for pk, _ in pairs)
    sks = tuple(sk for _, sk in pairs)
    ck = derive_commit_key(params)
    r1, r2 = rng.randrange(p), rng.randrange(p)
    z1 = commit(ck, 1, r1, r2)

    real_checked = 0
    mixed = 0
    for m in (BOT, *range(num_choices)):
        encoded = codec.encode(m)
        for rands in itertools.product(range(p), repeat=6):
            cts = tuple(
                pke_encrypt(pks[i], encoded, rands[2 * i], rands[2 * i + 1])
                for i in range(3)
            )
            exps = {pke_decrypt(sk, ct).exp for sk, ct in zip(sks, cts)}
            real_checked += 1
            if len(exps) > 1:
                mixed += 1
    report.add("real_witnesses", real_checked)
    report.verdict("real_witnesses_column_consistent", mixed == 0)

    trapdoor_hits = sum(
        1
        for t1 in range(p)
        for t2 in range(p)
        if verify_opening(ck, z1, CommitOpening(0, t1, t2))
    )
    report.add("trapdoor_openings_of_com1", trapdoor_hits)
    report.verdict("no_trapdoor_under_com1", trapdoor_hits == 0)
    return report


def craft_mixed_ballot(
    pk: ElectionPk, opening: tuple[int, int], j: int, msgs, rng, backend=None
) -> Ballot:
    """Adversarial ballot whose columns encrypt different messages, proved
    through the trapdoor branch. Needs the Z=Com(0) opening."""
    if pk.z is None:
        raise UsageError("mixed ballots target the full scheme")
    backend = backend or get_backend("direct")
    p = pk.codec.p
    cts = tuple(
        pke_encrypt(
            col_pk, pk.codec.encode(m), rng.randrange(p), rng.randrange(p)
        )
        for col_pk, m in zip(pk.pks, msgs)
    )
    x = EncStatement(j, cts, pk.pks, pk.z)
    w = EncWitnessTrapdoor(CommitOpening(0, opening[0], opening[1]))
    pi = backend.prove(pk.enc_relation, x, w)
    return Ballot(cts, pi)


def raw_ballot_bytes(blt: Ballot) -> bytes:
    return canonical_bytes(ballot_to_obj(blt))


@dataclass(frozen=True)
class OracleReport:
    """Exhaustive-verification result for one board."""

    accepted: tuple
    accepted_non_bot: tuple
    bot_accepted: bool
    compat_ok: bool
    details: tuple

    @property
    def unique_non_bot(self) -> bool:
        return len(self.accepted_non_bot) <= 1

    @property
    def unique_overall(self) -> bool:
        return len(self.accepted) <= 1


def _column_witness_table(pk: ElectionPk):
    """For each key column, the (secret key, seed) pair usable as witness
    material, or None when the column's public key is outside the image of
    key generation (then no decryption witness for it can ever exist)."""
    params = pk.params
    table = []
    for col_pk in pk.pks:
        candidates = unique_sk_oracle(col_pk)
        entry = None
        for sk in candidates:
            g3e = col_pk.g3.exp
            if not (1 <= g3e < params.p and 1 <= sk.x < params.p and 1 <= sk.y < params.p):
                continue
            seed = find_seed(params, g3e, sk.x, sk.y)
            entry = (sk, seed)
            break
        table.append(entry)
    return tuple(table)


def verifiability_oracle(
    scheme: SchemeSpec, pk: ElectionPk, slots, honest=None
) -> OracleReport:
    """Enumerate every (tally, witness) pair a prover could use against
    this board and collect the accepted tallies. Honest votes, when given
    as {voter: vote}, are checked compatible with every accepted tally."""
    if scheme.p > ORACLE_MAX_P:
        raise BudgetError(f"oracle limited to p <= {ORACLE_MAX_P}, got {scheme.p}")
    if scheme.cfg.num_voters > ORACLE_MAX_VOTERS:
        raise BudgetError(
            f"oracle limited to {ORACLE_MAX_VOTERS} voters, got {scheme.cfg.num_voters}"
        )
    if scheme.backend_name != "direct":
        raise UsageError("the oracle enumerates direct-backend proofs only")
    cfg, codec = scheme.cfg, scheme.codec
    rel = DecRelation(cfg, codec, full=scheme.full)
    ballots = slot_values(pk, slots, filter_ballots=scheme.full)
    table = _column_witness_table(pk)
    backend = get_backend("direct")

    accepted = []
    details = []
    ys = [BOT, *cfg.result_space]
    for y in ys:
        witnesses = []
        if scheme.full and y is BOT and all(b is BOT for b in ballots):
            witnesses.append("no-proof")
        x = DecStatement(ballots, pk.pks, y)
        for i1, i2 in ((1, 2), (1, 3), (2, 3)):
            if table[i1 - 1] is None or table[i2 - 1] is None:
                continue
            sk1, seed1 = table[i1 - 1]
            sk2, seed2 = table[i2 - 1]
            w = dec_witness(sk1, seed1, i1, sk2, seed2, i2)
            if not rel.check(x, w):
                continue
            gamma = backend.prove(rel, x, w)
            if not scheme.verify_tally(pk, slots, y, gamma):
                raise UsageError(
                    "relation accepted a witness the verifier rejects"
                )
            witnesses.append((i1, i2))
        if witnesses:
            accepted.append(y)
            details.append((tally_to_str(y), tuple(map(str, witnesses))))

    compat_ok = True
    if honest:
        for y in accepted:
            if not scheme.full and y is BOT:
                continue
            if not compatible(cfg, y, dict(honest)):
                compat_ok = False
    non_bot = tuple(y for y in accepted if y is not BOT)
    return OracleReport(
        accepted=tuple(accepted),
        accepted_non_bot=non_bot,
        bot_accepted=BOT in accepted,
        compat_ok=compat_ok,
        details=tuple(details),
    )


def correctness_suite(scheme: SchemeSpec, master_seed: bytes) -> ExperimentReport:
    """Exhaustive first correctness condition over every vote vector in
    (M ∪ {⊥, Abst})^N, plus the second condition over boards containing
    garbage slots: verification always accepts the evaluated tally."""
    report = ExperimentReport(kind=f"correctness-{scheme.kind}")
    transcript = scheme.setup(derive_rng(master_seed, "corr", "setup"))
    pk, sk = transcript.pk, transcript.sk
    cfg = scheme.cfg
    vote_space = [ABSTAIN, BOT, *cfg.message_set]
    cast_rng = derive_rng(master_seed, "corr", "cast")
    vectors = 0
    failures = []
    for vector in itertools.product(vote_space, repeat=cfg.num_voters):
        vectors += 1
        slots = []
        for j, m in enumerate(vector, start=1):
            if m is ABSTAIN:
                slots.append(BOT)
            else:
                blt = scheme.cast(pk, j, m, cast_rng)
                if not scheme.verify_ballot(pk, j, blt):
                    failures.append(f"ballot for {m!r} at slot {j} rejected")
                slots.append(blt)
        outcome = scheme.eval_tally(pk, sk, slots)
        expected = eval_tally_fn(
            cfg, tuple(BOT if m in (ABSTAIN, BOT) else m for m in vector)
        )
        if outcome.y != expected:
            failures.append(f"{vector}: y={outcome.y!r} expected {expected!r}")
        if not scheme.verify_tally(pk, slots, outcome.y, outcome.gamma):
            failures.append(f"{vector}: tally proof rejected")
    report.add("vectors", vectors)
    report.verdict("condition_1", not failures)

    garbage_failures = 0
    garbage_rng = derive_rng(master_seed, "corr", "garbage")
    for _ in range(25):
        slots = random_board(scheme, pk, transcript, garbage_rng)
        outcome = scheme.eval_tally(pk, sk, slots)
        if not scheme.verify_tally(pk, slots, outcome.y, outcome.gamma):
            garbage_failures += 1
    report.verdict("condition_2", garbage_failures == 0)
    for failure in failures[:5]:
        report.anomaly(failure)
    return report


def garbage_ballot(pk: ElectionPk, rng) -> Ballot:
    """Well-shaped but unprovable ballot: random ciphertext exponents and
    either no proof or a proof lifted from nowhere."""
    p = pk.codec.p
    cts = tuple(
        PkeCiphertext(
            GroupElement(rng.randrange(p), p),
            GroupElement(rng.randrange(p), p),
            GroupElement(rng.randrange(p), p),
        )
        for _ in range(3)
    )
    return Ballot(cts, None)


def random_board(scheme: SchemeSpec, pk: ElectionPk, transcript, rng):
    """Board mixing honest ballots, abstentions, blank votes, and garbage."""
    slots = []
    for j in range(1, scheme.cfg.num_voters + 1):
        kind = rng.randrange(4)
        if kind == 0:
            slots.append(BOT)
        elif kind == 1:
            slots.append(garbage_ballot(pk, rng))
        elif kind == 2:
            slots.append(scheme.cast(pk, j, BOT, rng))
        else:
            slots.append(
                scheme.cast(pk, j, rng.choice(scheme.cfg.message_set), rng)
            )
    return tuple(slots)


def honest_totality_scan(
    scheme: SchemeSpec, boards: int, master_seed: bytes
) -> ExperimentReport:
    """Under the honest binding setup, the full tally never comes out ⊥
    unless every slot was filtered away: garbage is removed by ballot
    verification and every surviving ballot is column-consistent."""
    if not scheme.full:
        raise UsageError("totality scan targets the full scheme")
    report = ExperimentReport(kind="honest-totality")
    transcript = scheme.setup(derive_rng(master_seed, "tot", "setup"))
    pk, sk = transcript.pk, transcript.sk
    rng = derive_rng(master_seed, "tot", "boards")
    bad = 0
    checked = 0
    for _ in range(boards):
        slots = []
        real_votes = 0
        for j in range(1, scheme.cfg.num_voters + 1):
            kind = rng.randrange(3)
            if kind == 0 and real_votes:
                slots.append(BOT)
            elif kind == 1 and real_votes:
                slots.append(garbage_ballot(pk, rng))
            else:
                slots.append(
                    scheme.cast(pk, j, rng.choice(scheme.cfg.message_set), rng)
                )
                real_votes += 1
        checked += 1
        outcome = scheme.eval_tally(pk, sk, slots)
        if outcome.y is BOT or outcome.anomaly:
            bad += 1
    report.add("boards", checked)
    report.verdict("tally_total", bad == 0)
    return report


def threshold_reconstruction_scan(
    p: int, share_bound: int, cfg: TallyConfig, num_authorities: int
) -> ExperimentReport:
    """Exhaust the share-split draw space: reconstruction is exact on every
    accepted draw, and the per-share value supports for different votes
    differ only at the -bound boundary."""
    report = ExperimentReport(kind=f"threshold-split-m{num_authorities}")
    m = num_authorities
    exact = True
    supports = {}
    if m == 2:
        for v in cfg.message_set:
            sup = [set(), set()]
            for v1 in range(-share_bound, share_bound + 1):
                v2 = v - v1
                if -share_bound <= v2 <= share_bound:
                    if v1 + v2 != v:
                        exact = False
                    sup[0].add(v1)
                    sup[1].add(v2)
            supports[v] = tuple(frozenset(s) for s in sup)
    else:
        for v in cfg.message_set:
            sup = [set() for _ in range(m)]
            for coeffs in itertools.product(range(p), repeat=m - 1):
                shares = []
                for k in range(1, m + 1):
                    value = v
                    for i, c in enumerate(coeffs, start=1):
                        value = (value + c * pow(k, i, p)) % p
                    centered = value if value <= (p - 1) // 2 else value - p
                    shares.append(centered)
                if all(-share_bound <= s <= share_bound for s in shares):
                    if reconstruct_shares(p, shares) != v:
                        exact = False
                    for k, s in enumerate(shares):
                        sup[k].add(s)
            supports[v] = tuple(frozenset(s) for s in sup)
    report.verdict("reconstruction_exact", exact)
    votes = list(cfg.message_set)
    if m == 2:
        boundary_only = True
        for va, vb in itertools.combinations(votes, 2):
            for k in range(m):
                diff = supports[va][k] ^ supports[vb][k]
                if any(d != -share_bound for d in diff):
                    boundary_only = False
        report.verdict("supports_differ_only_at_boundary", boundary_only)
    else:
        marginals = {
            (va, vb): [sorted(supports[va][k] ^ supports[vb][k]) for k in range(m)]
            for va, vb in itertools.combinations(votes, 2)
        }
        report.add(
            "marginal_differences",
            {f"{va}vs{vb}": diffs for (va, vb), diffs in marginals.items()},
        )
    report.add(
        "supports",
        {
            str(v): [sorted(s) for s in sup]
            for v, sup in supports.items()
        },
    )
    return report


def threshold_matches_single(
    tp: ThresholdParams, votes, master_seed: bytes, backend_name: str = "direct"
) -> ExperimentReport:
    """Same votes through the threshold pipeline and through one full-scheme
    authority; the combined tally must match the single-authority tally."""
    report = ExperimentReport(kind="threshold-vs-single")
    backend = get_backend(backend_name)
    rng = derive_rng(master_seed, "thr", "keys")
    auth_keys = keygen_threshold(tp, rng)
    auth_pubs = tuple(k.public for k in auth_keys)
    cast_rng = derive_rng(master_seed, "thr", "cast")
    board = []
    for j, v in enumerate(votes, start=1):
        if v is ABSTAIN:
            board.append(BOT)
            continue
        blt = cast_threshold(tp, auth_pubs, j, v, cast_rng, backend)
        if not verify_ballot_threshold(tp, auth_pubs, j, blt):
            report.anomaly(f"threshold ballot {j} rejected")
        board.append(blt)
    board = tuple(board)
    tallies = []
    for k in range(1, tp.m + 1):
        outcome = eval_tally_authority(
            tp, k, auth_keys[k - 1], auth_pubs, board, backend
        )
        if not verify_tally_authority(
            tp, auth_pubs, k, board, outcome.y, outcome.gamma
        ):
            report.anomaly(f"authority {k} tally proof rejected")
        tallies.append(outcome.y)
    combined = combine_tallies(tp, tallies)
    report.add("authority_tallies", [tally_to_str(t) for t in tallies])
    report.add("combined", tally_to_str(combined))

    scheme = SchemeSpec("full", tp.p, tp.cfg, backend_name)
    transcript = scheme.setup(derive_rng(master_seed, "thr", "single"))
    single_rng = derive_rng(master_seed, "thr", "single-cast")
    slots = tuple(
        BOT if v is ABSTAIN else scheme.cast(transcript.pk, j, v, single_rng)
        for j, v in enumerate(votes, start=1)
    )
    single = scheme.eval_tally(transcript.pk, transcript.sk, slots)
    report.add("single", tally_to_str(single.y))
    report.verdict("combined_matches_single", combined == single.y)
    return report
