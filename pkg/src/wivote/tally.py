"""Tally functions, the result-⊥ axiom, and the compatibility predicate.

A tally function F maps N entries of M ∪ {⊥} to a result space Σ ∪ {⊥}
and must return ⊥ exactly when every input is ⊥. The shipped "sum" tally
counts ⊥ as 0 (after forcing the all-⊥ case to ⊥). The compatibility
predicate and the challenge-equivalence predicate are brute-force
enumerations; they are the ground truth the verifiability and privacy
suites measure against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .errors import BudgetError, ParameterError, UsageError

ENUM_BUDGET = 2_000_000


class Bottom:
    """The ⊥ symbol: blank vote, empty slot, or failed tally."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOT"


BOT = Bottom()

TallyFn = Callable[["TallyConfig", tuple], object]

_TALLY_FNS: dict[str, TallyFn] = {}


def register_tally_fn(fn_id: str, fn: TallyFn) -> None:
    """Register a tally function family; configs check the ⊥ axiom on use."""
    if fn_id in _TALLY_FNS:
        raise UsageError(f"tally fn {fn_id!r} already registered")
    _TALLY_FNS[fn_id] = fn


def _sum_tally(cfg: "TallyConfig", votes: tuple) -> object:
    if all(v is BOT for v in votes):
        return BOT
    return sum(0 if v is BOT else v for v in votes)


register_tally_fn("sum", _sum_tally)


@dataclass(frozen=True)
class TallyConfig:
    num_voters: int
    message_set: tuple[int, ...]
    fn_id: str = "sum"

    def __post_init__(self):
        if self.num_voters < 2:
            raise ParameterError("tally requires at least 2 voters")
        if not self.message_set:
            raise ParameterError("empty message set")
        if len(set(self.message_set)) != len(self.message_set):
            raise ParameterError("message set entries must be distinct")
        if self.fn_id not in _TALLY_FNS:
            raise ParameterError(f"unknown tally fn {self.fn_id!r}")
        _check_axiom(self)

    @property
    def result_space(self) -> tuple[int, ...]:
        return _sigma_of(self)


def _vote_space(cfg: TallyConfig) -> tuple:
    return cfg.message_set + (BOT,)


def _raw_eval(cfg: TallyConfig, votes: tuple) -> object:
    return _TALLY_FNS[cfg.fn_id](cfg, votes)


def _check_axiom(cfg: TallyConfig, sample_budget: int = 20_000) -> None:
    """The configured F must output ⊥ iff all inputs are ⊥."""
    space = _vote_space(cfg)
    total = len(space) ** cfg.num_voters
    if total <= 200_000:
        vectors = itertools.product(space, repeat=cfg.num_voters)
    else:
        import random

        rng = random.Random(0)
        vectors = (
            tuple(rng.choice(space) for _ in range(cfg.num_voters))
            for _ in range(sample_budget)
        )
    all_bot = (BOT,) * cfg.num_voters
    for v in vectors:
        out = _raw_eval(cfg, v)
        if (out is BOT) != (v == all_bot):
            raise ParameterError(
                f"tally fn {cfg.fn_id!r} violates the bottom axiom on {v}"
            )
    if _raw_eval(cfg, all_bot) is not BOT:
        raise ParameterError(f"tally fn {cfg.fn_id!r} must map all-bottom to BOT")


@lru_cache(maxsize=128)
def _sigma_of(cfg: TallyConfig) -> tuple[int, ...]:
    """Non-⊥ image of F, by exhausting the vote space."""
    space = _vote_space(cfg)
    if len(space) ** cfg.num_voters > ENUM_BUDGET:
        raise BudgetError("result space enumeration over budget")
    values = set()
    for v in itertools.product(space, repeat=cfg.num_voters):
        out = _raw_eval(cfg, v)
        if out is not BOT:
            values.add(out)
    return tuple(sorted(values))


def eval_tally_fn(cfg: TallyConfig, votes: Sequence) -> object:
    """Apply F to a full-length vote vector over M ∪ {⊥}."""
    votes = tuple(votes)
    if len(votes) != cfg.num_voters:
        raise UsageError(f"expected {cfg.num_voters} votes, got {len(votes)}")
    for v in votes:
        if v is not BOT and v not in cfg.message_set:
            raise UsageError(f"vote {v!r} outside M ∪ {{BOT}}")
    return _raw_eval(cfg, votes)


def compatible(cfg: TallyConfig, y, fixed: Mapping[int, object]) -> bool:
    """True iff some completion of the free slots makes F output y.

    Indices in `fixed` are 1-based. Brute force over the free slots.
    """
    for idx in fixed:
        if not 1 <= idx <= cfg.num_voters:
            raise UsageError(f"index {idx} out of range")
    free = [j for j in range(1, cfg.num_voters + 1) if j not in fixed]
    space = _vote_space(cfg)
    if len(space) ** len(free) > ENUM_BUDGET:
        raise BudgetError("compatibility enumeration over budget")
    for fill in itertools.product(space, repeat=len(free)):
        votes = []
        fill_iter = iter(fill)
        for j in range(1, cfg.num_voters + 1):
            votes.append(fixed[j] if j in fixed else next(fill_iter))
        if _raw_eval(cfg, tuple(votes)) == y:
            return True
    return False


def _normalize_entry(cfg: TallyConfig, entry) -> object:
    """Map anything outside M to ⊥ (raw ballot bytes, blanks, junk)."""
    if isinstance(entry, int) and not isinstance(entry, bool) and entry in cfg.message_set:
        return entry
    return BOT


def winning_condition_3(cfg: TallyConfig, m0: Sequence, m1: Sequence, s: Sequence[int]) -> bool:
    """True iff F agrees on both challenge sides for every fill of the S slots.

    S indices are 1-based; non-S entries outside M are read as ⊥.
    """
    m0, m1 = tuple(m0), tuple(m1)
    if len(m0) != cfg.num_voters or len(m1) != cfg.num_voters:
        raise UsageError("challenge length mismatch")
    s_set = set(s)
    for idx in s_set:
        if not 1 <= idx <= cfg.num_voters:
            raise UsageError(f"S index {idx} out of range")
    space = _vote_space(cfg)
    if len(space) ** len(s_set) > ENUM_BUDGET:
        raise BudgetError("condition-3 enumeration over budget")
    s_order = sorted(s_set)
    for fill in itertools.product(space, repeat=len(s_order)):
        d = dict(zip(s_order, fill))
        sides = []
        for mb in (m0, m1):
            votes = tuple(
                d[j] if j in d else _normalize_entry(cfg, mb[j - 1])
                for j in range(1, cfg.num_voters + 1)
            )
            sides.append(_raw_eval(cfg, votes))
        if sides[0] != sides[1]:
            return False
    return True


def tally_to_str(y) -> str:
    return "BOT" if y is BOT else str(y)


def tally_from_str(s: str):
    if s == "BOT":
        return BOT
    return int(s)
