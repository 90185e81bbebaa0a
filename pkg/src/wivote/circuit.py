"""Relation-to-NAND-circuit compiler and evaluators.

compile_relation lowers the ballot and tally relations to pure NAND
circuits over a fixed input layout: statement bits first, then witness
bits, every field packed big-endian at width ceil(log2 p). The compiled
circuit outputs 1 exactly when the relation checker accepts the decoded
pair, which the tests confirm exhaustively over the witness bit space and
by sampling; the circuit is the shape a circuit-satisfiability proof
system would consume.

Two evaluators: eval_circuit walks one assignment in plain Python;
eval_circuit_packed runs 64 assignments per machine word over numpy
uint64 lanes, which is what makes exhausting a 2^28 witness space
practical. Both commit to the same gate ordering.

Some conventions the compilers rely on:
- statement bits are assumed canonical (every field value < p); witness
  fields are range-checked inside the circuit, so arbitrary witness bit
  patterns decode to either a valid field vector or a rejecting run;
- intermediate words on an invalid witness may hold garbage, which is
  harmless because the validity conjunct masks the final output;
- key-material checks replace seed expansion: a column key (x, y) is
  accepted when multiplying the statement's public elements back gives
  g3, which coincides with seed-based regeneration because every triple
  of nonzero exponents is reachable from some seed (tested via the seed
  search helper).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .commit import derive_commit_key
from .errors import BudgetError, DecodeError, UsageError
from .group import new_group
from .pke import VoteCodec
from .relations import (
    DecRelation,
    DecStatement,
    DecWitness,
    EncRelation,
    EncStatement,
    EncWitnessReal,
    EncWitnessTrapdoor,
)
from .tally import BOT, TallyConfig

CIRCUIT_FORMAT = "wivote-circuit/v1"

MAX_P = 101
MAX_VOTERS = 3


@dataclass(frozen=True)
class BooleanCircuit:
    num_inputs: int
    gates: tuple[tuple[int, int], ...]
    output: int


def eval_circuit(c: BooleanCircuit, bits: Sequence[int]) -> int:
    if len(bits) != c.num_inputs:
        raise UsageError(f"expected {c.num_inputs} input bits, got {len(bits)}")
    wires = [1 if b else 0 for b in bits]
    for a, b in c.gates:
        wires.append(1 - (wires[a] & wires[b]))
    return wires[c.output]


def eval_circuit_packed(c: BooleanCircuit, inputs: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate 64 assignments per lane: inputs[i] is a uint64 array whose
    bit k of word j is input i of assignment 64*j+k. Frees dead wires as it
    goes, so memory stays proportional to the live width, not gate count."""
    if len(inputs) != c.num_inputs:
        raise UsageError(f"expected {c.num_inputs} input lanes, got {len(inputs)}")
    last_use = {}
    for gi, (a, b) in enumerate(c.gates):
        last_use[a] = gi
        last_use[b] = gi
    wires: dict[int, np.ndarray] = {
        i: np.asarray(arr, dtype=np.uint64) for i, arr in enumerate(inputs)
    }
    n = c.num_inputs
    for gi, (a, b) in enumerate(c.gates):
        out = ~(wires[a] & wires[b])
        for src in {a, b}:
            if last_use.get(src) == gi and src != c.output:
                del wires[src]
        wires[n + gi] = out
    return wires[c.output]


def circuit_to_obj(c: BooleanCircuit) -> dict:
    return {
        "format": CIRCUIT_FORMAT,
        "inputs": c.num_inputs,
        "gates": [[c.num_inputs + i, a, b] for i, (a, b) in enumerate(c.gates)],
        "output": c.output,
    }


def circuit_from_obj(obj) -> BooleanCircuit:
    if not isinstance(obj, dict) or obj.get("format") != CIRCUIT_FORMAT:
        raise DecodeError("unrecognized circuit record")
    n = obj["inputs"]
    gates = []
    for i, triple in enumerate(obj["gates"]):
        if len(triple) != 3 or triple[0] != n + i:
            raise DecodeError(f"gate {i} out of order")
        out, a, b = triple
        if not (0 <= a < out and 0 <= b < out):
            raise DecodeError(f"gate {i} uses undefined wires")
        gates.append((a, b))
    output = obj["output"]
    if not 0 <= output < n + len(gates):
        raise DecodeError("output wire undefined")
    return BooleanCircuit(n, tuple(gates), output)


class CircuitBuilder:
    """NAND netlist builder with structural memoization. Words are lists of
    wire indices, least significant bit first."""

    def __init__(self, num_inputs: int):
        self.num_inputs = num_inputs
        self.gates: list[tuple[int, int]] = []
        self._memo: dict[tuple[int, int], int] = {}
        self._c0 = None
        self._c1 = None

    def nand(self, a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        wire = self.num_inputs + len(self.gates)
        self.gates.append(key)
        self._memo[key] = wire
        return wire

    def not_(self, a: int) -> int:
        return self.nand(a, a)

    def and_(self, a: int, b: int) -> int:
        return self.not_(self.nand(a, b))

    def or_(self, a: int, b: int) -> int:
        return self.nand(self.not_(a), self.not_(b))

    def xor(self, a: int, b: int) -> int:
        n = self.nand(a, b)
        return self.nand(self.nand(a, n), self.nand(b, n))

    def mux(self, s: int, t: int, f: int) -> int:
        """t when s=1, f when s=0."""
        return self.nand(self.nand(s, t), self.nand(self.not_(s), f))

    @property
    def const1(self) -> int:
        if self._c1 is None:
            self._c1 = self.nand(0, self.not_(0))
        return self._c1

    @property
    def const0(self) -> int:
        if self._c0 is None:
            self._c0 = self.not_(self.const1)
        return self._c0

    def and_all(self, wires: Sequence[int]) -> int:
        acc = list(wires)
        if not acc:
            return self.const1
        while len(acc) > 1:
            nxt = [
                self.and_(acc[i], acc[i + 1]) if i + 1 < len(acc) else acc[i]
                for i in range(0, len(acc), 2)
            ]
            acc = nxt
        return acc[0]

    def or_all(self, wires: Sequence[int]) -> int:
        acc = list(wires)
        if not acc:
            return self.const0
        while len(acc) > 1:
            nxt = [
                self.or_(acc[i], acc[i + 1]) if i + 1 < len(acc) else acc[i]
                for i in range(0, len(acc), 2)
            ]
            acc = nxt
        return acc[0]

    def const_word(self, value: int, width: int) -> list[int]:
        return [self.const1 if (value >> i) & 1 else self.const0 for i in range(width)]

    def add_words(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        width = max(len(a), len(b))
        a = list(a) + [self.const0] * (width - len(a))
        b = list(b) + [self.const0] * (width - len(b))
        out = []
        carry = self.const0
        for ai, bi in zip(a, b):
            axb = self.xor(ai, bi)
            out.append(self.xor(axb, carry))
            carry = self.or_(self.and_(ai, bi), self.and_(carry, axb))
        out.append(carry)
        return out

    def sub_words(self, a: Sequence[int], b: Sequence[int]) -> tuple[list[int], int]:
        """a - b as (difference bits, borrow); borrow=1 means a < b."""
        width = max(len(a), len(b))
        a = list(a) + [self.const0] * (width - len(a))
        b = list(b) + [self.const0] * (width - len(b))
        out = []
        borrow = self.const0
        for ai, bi in zip(a, b):
            axb = self.xor(ai, bi)
            out.append(self.xor(axb, borrow))
            borrow = self.or_(
                self.and_(self.not_(ai), bi), self.and_(borrow, self.not_(axb))
            )
        return out, borrow

    def geq_const(self, a: Sequence[int], value: int) -> int:
        _, borrow = self.sub_words(a, self.const_word(value, len(a)))
        return self.not_(borrow)

    def lt_const(self, a: Sequence[int], value: int) -> int:
        return self.not_(self.geq_const(a, value))

    def eq_words(self, a: Sequence[int], b: Sequence[int]) -> int:
        width = max(len(a), len(b))
        a = list(a) + [self.const0] * (width - len(a))
        b = list(b) + [self.const0] * (width - len(b))
        return self.and_all([self.not_(self.xor(ai, bi)) for ai, bi in zip(a, b)])

    def eq_const(self, a: Sequence[int], value: int) -> int:
        return self.eq_words(a, self.const_word(value, len(a)))

    def nonzero(self, a: Sequence[int]) -> int:
        return self.or_all(list(a))

    def mux_words(self, s: int, t: Sequence[int], f: Sequence[int]) -> list[int]:
        width = max(len(t), len(f))
        t = list(t) + [self.const0] * (width - len(t))
        f = list(f) + [self.const0] * (width - len(f))
        return [self.mux(s, ti, fi) for ti, fi in zip(t, f)]

    def mask_word(self, s: int, a: Sequence[int]) -> list[int]:
        return [self.and_(s, ai) for ai in a]

    def mod_reduce_once(self, a: Sequence[int], p: int) -> list[int]:
        """a in [0, 2p) -> a mod p, width back to ceil(log2 p)."""
        width = p.bit_length()
        diff, borrow = self.sub_words(a, self.const_word(p, len(a)))
        return self.mux_words(borrow, list(a)[:width], diff[:width])

    def mod_add(self, a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
        return self.mod_reduce_once(self.add_words(a, b), p)

    def mod_sub(self, a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
        neg = self.mux_words(
            self.nonzero(b),
            self.sub_words(self.const_word(p, len(b) + 1), b)[0],
            self.const_word(0, len(b)),
        )
        return self.mod_add(a, neg[: p.bit_length()], p)

    def mod_mul(self, a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
        """Schoolbook double-and-add over the bits of b, most significant
        first. Exact when a < p; garbage-in-garbage-out otherwise, which the
        callers mask with range checks."""
        width = p.bit_length()
        acc = self.const_word(0, width)
        for bit in reversed(list(b)):
            acc = self.mod_add(acc, acc, p)
            acc = self.mod_add(acc, self.mask_word(bit, a), p)
        return acc

    def mod_pow(self, base: Sequence[int], exp: Sequence[int], p: int) -> list[int]:
        """Square-and-multiply; exponent bits most significant first."""
        width = p.bit_length()
        acc = self.const_word(1 % p, width)
        for bit in reversed(list(exp)):
            acc = self.mod_mul(acc, acc, p)
            acc = self.mux_words(bit, self.mod_mul(acc, base, p), acc)
        return acc

    def finish(self, output: int) -> BooleanCircuit:
        return BooleanCircuit(self.num_inputs, tuple(self.gates), output)


def int_bits_be(value: int, width: int) -> list[int]:
    if not 0 <= value < (1 << width):
        raise UsageError(f"value {value} does not fit in {width} bits")
    return [(value >> (width - 1 - k)) & 1 for k in range(width)]


def bits_to_int_be(bits: Sequence[int]) -> int:
    acc = 0
    for b in bits:
        acc = (acc << 1) | (1 if b else 0)
    return acc


class _FieldMap:
    """Tracks the big-endian field layout and hands the builder LSB-first
    wire words for each named field."""

    def __init__(self, width: int):
        self.width = width
        self.fields: list[tuple[str, int, int]] = []
        self.offset = 0

    def add(self, name: str, width: int = None) -> None:
        w = self.width if width is None else width
        self.fields.append((name, self.offset, w))
        self.offset += w

    def slot(self, name: str) -> tuple[int, int]:
        for n, off, w in self.fields:
            if n == name:
                return off, w
        raise KeyError(name)

    def wires(self, name: str) -> list[int]:
        off, w = self.slot(name)
        return list(range(off, off + w))

    def lsb_word(self, name: str) -> list[int]:
        off, w = self.slot(name)
        return [off + w - 1 - i for i in range(w)]


def _check_budget(p: int, num_voters: int = 2) -> None:
    if p > MAX_P:
        raise BudgetError(f"circuit compilation capped at p <= {MAX_P}, got {p}")
    if num_voters > MAX_VOTERS:
        raise BudgetError(
            f"circuit compilation capped at {MAX_VOTERS} voters, got {num_voters}"
        )


@dataclass(frozen=True)
class EncCircuitLayout:
    p: int
    num_choices: int
    width: int
    statement_fields: tuple[tuple[str, int, int], ...]
    witness_fields: tuple[tuple[str, int, int], ...]

    @property
    def num_statement_bits(self) -> int:
        name, off, w = self.statement_fields[-1]
        return off + w

    @property
    def num_witness_bits(self) -> int:
        name, off, w = self.witness_fields[-1]
        return off + w - self.num_statement_bits

    def statement_bits(self, x: EncStatement) -> list[int]:
        vals = {"j": x.j}
        for i, ct in enumerate(x.cts, start=1):
            vals[f"ct{i}.c1"] = ct.c1.exp
            vals[f"ct{i}.c2"] = ct.c2.exp
            vals[f"ct{i}.c3"] = ct.c3.exp
        for i, pk in enumerate(x.pks, start=1):
            vals[f"pk{i}.g1"] = pk.g1.exp
            vals[f"pk{i}.g2"] = pk.g2.exp
            vals[f"pk{i}.g3"] = pk.g3.exp
        vals["z.d1"] = x.z.d1.exp
        vals["z.d2"] = x.z.d2.exp
        vals["z.d3"] = x.z.d3.exp
        bits = []
        for name, _, w in self.statement_fields:
            bits.extend(int_bits_be(vals[name], w))
        return bits

    def witness_field_bits(self, vals: dict[str, int]) -> list[int]:
        bits = []
        for name, _, w in self.witness_fields:
            bits.extend(int_bits_be(vals.get(name, 0), w))
        return bits

    def witness_bits(self, codec: VoteCodec, w) -> list[int]:
        if isinstance(w, EncWitnessReal):
            vals = {"branch": 0, "m": codec.encode(w.m).exp}
            for i, (a, b) in enumerate(w.rands, start=1):
                vals[f"a{i}"] = a
                vals[f"b{i}"] = b
            return self.witness_field_bits(vals)
        if isinstance(w, EncWitnessTrapdoor):
            return self.witness_field_bits(
                {"branch": 1, "r1": w.u.r1, "r2": w.u.r2}
            )
        raise UsageError(f"not a ballot witness: {w!r}")


def compile_enc_relation(codec: VoteCodec) -> tuple[BooleanCircuit, EncCircuitLayout]:
    p = codec.p
    _check_budget(p)
    width = p.bit_length()
    fm = _FieldMap(width)
    fm.add("j")
    for i in range(1, 4):
        fm.add(f"ct{i}.c1")
        fm.add(f"ct{i}.c2")
        fm.add(f"ct{i}.c3")
    for i in range(1, 4):
        fm.add(f"pk{i}.g1")
        fm.add(f"pk{i}.g2")
        fm.add(f"pk{i}.g3")
    fm.add("z.d1")
    fm.add("z.d2")
    fm.add("z.d3")
    statement_fields = tuple(fm.fields)
    fm.add("branch", 1)
    fm.add("m")
    for i in range(1, 4):
        fm.add(f"a{i}")
        fm.add(f"b{i}")
    fm.add("r1")
    fm.add("r2")
    witness_fields = tuple(fm.fields[len(statement_fields):])

    bld = CircuitBuilder(fm.offset)
    word = lambda name: fm.lsb_word(name)

    branch = fm.lsb_word("branch")[0]
    m = word("m")
    real_checks = [
        bld.lt_const(m, p),
        bld.lt_const(m, codec.num_choices + 1),
    ]
    for i in range(1, 4):
        a = word(f"a{i}")
        b = word(f"b{i}")
        g1 = word(f"pk{i}.g1")
        g2 = word(f"pk{i}.g2")
        g3 = word(f"pk{i}.g3")
        real_checks.append(bld.lt_const(a, p))
        real_checks.append(bld.lt_const(b, p))
        real_checks.append(bld.eq_words(word(f"ct{i}.c1"), bld.mod_mul(g1, a, p)))
        real_checks.append(bld.eq_words(word(f"ct{i}.c2"), bld.mod_mul(g2, b, p)))
        mask = bld.mod_add(bld.mod_mul(g3, bld.mod_add(a, b, p), p), m, p)
        real_checks.append(bld.eq_words(word(f"ct{i}.c3"), mask))
    real_ok = bld.and_all(real_checks)

    ck = derive_commit_key(new_group(p))
    r1 = word("r1")
    r2 = word("r2")
    h1 = bld.const_word(ck.h1.exp, width)
    h2 = bld.const_word(ck.h2.exp, width)
    h3 = bld.const_word(ck.h3.exp, width)
    trap_checks = [
        bld.lt_const(r1, p),
        bld.lt_const(r2, p),
        bld.eq_words(word("z.d1"), bld.mod_mul(h1, r1, p)),
        bld.eq_words(word("z.d2"), bld.mod_mul(h2, r2, p)),
        bld.eq_words(word("z.d3"), bld.mod_mul(h3, bld.mod_add(r1, r2, p), p)),
    ]
    trap_ok = bld.and_all(trap_checks)

    out = bld.mux(branch, trap_ok, real_ok)
    layout = EncCircuitLayout(p, codec.num_choices, width, statement_fields, witness_fields)
    return bld.finish(out), layout


@dataclass(frozen=True)
class DecCircuitLayout:
    p: int
    num_choices: int
    num_voters: int
    width: int
    full: bool
    statement_fields: tuple[tuple[str, int, int], ...]
    witness_fields: tuple[tuple[str, int, int], ...]

    @property
    def num_statement_bits(self) -> int:
        name, off, w = self.statement_fields[-1]
        return off + w

    @property
    def num_witness_bits(self) -> int:
        name, off, w = self.witness_fields[-1]
        return off + w - self.num_statement_bits

    def statement_bits(self, x: DecStatement) -> list[int]:
        vals = {}
        for j, slot in enumerate(x.ballots, start=1):
            if slot is BOT:
                vals[f"slot{j}.bot"] = 1
            else:
                for c, ct in enumerate(slot, start=1):
                    vals[f"slot{j}.ct{c}.c1"] = ct.c1.exp
                    vals[f"slot{j}.ct{c}.c2"] = ct.c2.exp
                    vals[f"slot{j}.ct{c}.c3"] = ct.c3.exp
        for i, pk in enumerate(x.pks, start=1):
            vals[f"pk{i}.g1"] = pk.g1.exp
            vals[f"pk{i}.g2"] = pk.g2.exp
            vals[f"pk{i}.g3"] = pk.g3.exp
        if x.y is BOT:
            vals["y.bot"] = 1
        else:
            vals["y.val"] = x.y
        bits = []
        for name, _, w in self.statement_fields:
            bits.extend(int_bits_be(vals.get(name, 0), w))
        return bits

    def witness_field_bits(self, vals: dict[str, int]) -> list[int]:
        bits = []
        for name, _, w in self.witness_fields:
            bits.extend(int_bits_be(vals.get(name, 0), w))
        return bits

    def witness_bits(self, w: DecWitness) -> list[int]:
        sel = {(1, 2): 0, (1, 3): 1, (2, 3): 2}.get((w.i1, w.i2))
        if sel is None:
            raise UsageError(f"bad witness index pair ({w.i1}, {w.i2})")
        return self.witness_field_bits(
            {
                "sel": sel,
                "xa": w.sk1p.x,
                "ya": w.sk1p.y,
                "xb": w.sk2p.x,
                "yb": w.sk2p.y,
            }
        )


def compile_dec_relation(
    cfg: TallyConfig, codec: VoteCodec, full: bool
) -> tuple[BooleanCircuit, DecCircuitLayout]:
    p = codec.p
    n = cfg.num_voters
    _check_budget(p, n)
    width = p.bit_length()
    fm = _FieldMap(width)
    for j in range(1, n + 1):
        fm.add(f"slot{j}.bot", 1)
        for c in range(1, 4):
            fm.add(f"slot{j}.ct{c}.c1")
            fm.add(f"slot{j}.ct{c}.c2")
            fm.add(f"slot{j}.ct{c}.c3")
    for i in range(1, 4):
        fm.add(f"pk{i}.g1")
        fm.add(f"pk{i}.g2")
        fm.add(f"pk{i}.g3")
    fm.add("y.bot", 1)
    fm.add("y.val")
    statement_fields = tuple(fm.fields)
    fm.add("sel", 2)
    fm.add("xa")
    fm.add("ya")
    fm.add("xb")
    fm.add("yb")
    witness_fields = tuple(fm.fields[len(statement_fields):])

    bld = CircuitBuilder(fm.offset)
    word = lambda name: fm.lsb_word(name)

    s1, s0 = fm.wires("sel")
    sel_valid = bld.not_(bld.and_(s1, s0))
    sel_is0 = bld.and_(bld.not_(s1), bld.not_(s0))

    def pick_a(name_by_col):
        """Column for the first witness index: 1 unless sel=2 (pair (2,3))."""
        return bld.mux_words(s1, word(name_by_col(2)), word(name_by_col(1)))

    def pick_b(name_by_col):
        """Column for the second witness index: 2 when sel=0, else 3."""
        return bld.mux_words(sel_is0, word(name_by_col(2)), word(name_by_col(3)))

    y_bot = fm.wires("y.bot")[0]
    y_val = word("y.val")
    y_structural = bld.or_(
        y_bot, bld.or_all([bld.eq_const(y_val, s) for s in cfg.result_space])
    )

    checks = [sel_valid, y_structural]
    matches = []
    for pick in (pick_a, pick_b):
        xk = word("xa" if pick is pick_a else "xb")
        yk = word("ya" if pick is pick_a else "yb")
        g1 = pick(lambda c: f"pk{c}.g1")
        g2 = pick(lambda c: f"pk{c}.g2")
        g3 = pick(lambda c: f"pk{c}.g3")
        checks.append(bld.lt_const(xk, p))
        checks.append(bld.nonzero(xk))
        checks.append(bld.lt_const(yk, p))
        checks.append(bld.nonzero(yk))
        checks.append(bld.nonzero(g3))
        checks.append(bld.eq_words(bld.mod_mul(g1, xk, p), g3))
        checks.append(bld.eq_words(bld.mod_mul(g2, yk, p), g3))
        vote_bots = []
        col_sum = bld.const_word(0, width)
        for j in range(1, n + 1):
            slot_bot = fm.wires(f"slot{j}.bot")[0]
            c1 = pick(lambda c, j=j: f"slot{j}.ct{c}.c1")
            c2 = pick(lambda c, j=j: f"slot{j}.ct{c}.c2")
            c3 = pick(lambda c, j=j: f"slot{j}.ct{c}.c3")
            m = bld.mod_sub(
                bld.mod_sub(c3, bld.mod_mul(c1, xk, p), p),
                bld.mod_mul(c2, yk, p),
                p,
            )
            in_votes = bld.and_(
                bld.nonzero(m), bld.lt_const(m, codec.num_choices + 1)
            )
            vote_bot = bld.or_(slot_bot, bld.not_(in_votes))
            vote_bots.append(vote_bot)
            value = bld.mask_word(
                bld.not_(vote_bot), bld.sub_words(m, bld.const_word(1, width))[0]
            )
            col_sum = bld.mod_add(col_sum, value, p)
        col_bot = bld.and_all(vote_bots)
        match = bld.or_(
            bld.and_(y_bot, col_bot),
            bld.and_all([bld.not_(y_bot), bld.not_(col_bot), bld.eq_words(col_sum, y_val)]),
        )
        matches.append(match)

    both_match = bld.and_(matches[0], matches[1])
    if full:
        out = bld.and_(bld.and_all(checks), both_match)
    else:
        out = bld.and_(bld.and_all(checks), bld.or_(y_bot, both_match))
    layout = DecCircuitLayout(
        p, codec.num_choices, n, width, full, statement_fields, witness_fields
    )
    return bld.finish(out), layout


def compile_relation(rel):
    """Dispatch on the relation context object; returns (circuit, layout)."""
    if isinstance(rel, EncRelation):
        return compile_enc_relation(rel.codec)
    if isinstance(rel, DecRelation):
        return compile_dec_relation(rel.cfg, rel.codec, rel.full)
    raise UsageError(f"no circuit compiler for {type(rel).__name__}")


def pack_assignments(bit_rows: Sequence[Sequence[int]]) -> list[np.ndarray]:
    """Transpose per-assignment bit vectors into per-input uint64 lanes for
    eval_circuit_packed. Assignment k lands in bit (k mod 64) of word k//64."""
    if not bit_rows:
        raise UsageError("no assignments to pack")
    num_inputs = len(bit_rows[0])
    count = len(bit_rows)
    words = (count + 63) // 64
    lanes = [np.zeros(words, dtype=np.uint64) for _ in range(num_inputs)]
    for k, row in enumerate(bit_rows):
        if len(row) != num_inputs:
            raise UsageError("ragged assignment batch")
        w, b = divmod(k, 64)
        for i, bit in enumerate(row):
            if bit:
                lanes[i][w] |= np.uint64(1 << b)
    return lanes


def unpack_outputs(out: np.ndarray, count: int) -> list[int]:
    bits = []
    arr = np.asarray(out, dtype=np.uint64)
    for k in range(count):
        w, b = divmod(k, 64)
        bits.append(int(arr[w] >> np.uint64(b)) & 1)
    return bits
