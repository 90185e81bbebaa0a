"""Prime-order symmetric bilinear group with a toy exponent backend.

Elements of the source group and the pairing target group are stored as
their discrete logs base g (resp. base e(g,g)), reduced mod the prime
order p. That makes discrete log, pairing, and exhaustive enumeration
trivially computable at desk scale, which is exactly what the brute-force
oracles in this library need. The interface mirrors what a real pairing
backend would provide; nothing outside explicitly transparent helpers
(dlog) peeks at exponents.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import sympy

from .errors import DecodeError, ParameterError, UsageError

BACKEND_TOY = "toy"


@dataclass(frozen=True)
class GroupParams:
    p: int
    backend: str = BACKEND_TOY

    def __post_init__(self):
        if self.backend != BACKEND_TOY:
            raise ParameterError(f"unknown group backend: {self.backend!r}")
        if not isinstance(self.p, int) or self.p < 5:
            raise ParameterError(f"group order must be a prime >= 5, got {self.p!r}")
        if not sympy.isprime(self.p):
            raise ParameterError(f"group order must be prime, got {self.p}")


@dataclass(frozen=True)
class GroupElement:
    """Source-group element, stored as its exponent in [0, p)."""

    exp: int
    p: int


@dataclass(frozen=True)
class GtElement:
    """Target-group element, stored as its exponent base e(g,g)."""

    exp: int
    p: int


@lru_cache(maxsize=64)
def new_group(p: int) -> GroupParams:
    """Construct (and validate) group parameters of prime order p."""
    return GroupParams(p)


def element(params: GroupParams, exp: int) -> GroupElement:
    return GroupElement(exp % params.p, params.p)


def identity(params: GroupParams) -> GroupElement:
    return GroupElement(0, params.p)


def generator(params: GroupParams) -> GroupElement:
    return GroupElement(1, params.p)


def _same_group(a, b) -> int:
    if a.p != b.p:
        raise UsageError(f"mismatched group orders: {a.p} vs {b.p}")
    return a.p


def g_mul(a: GroupElement, b: GroupElement) -> GroupElement:
    p = _same_group(a, b)
    return GroupElement((a.exp + b.exp) % p, p)


def g_inv(a: GroupElement) -> GroupElement:
    return GroupElement((-a.exp) % a.p, a.p)


def g_div(a: GroupElement, b: GroupElement) -> GroupElement:
    return g_mul(a, g_inv(b))


def g_exp(a: GroupElement, k: int) -> GroupElement:
    return GroupElement((a.exp * k) % a.p, a.p)


def pair(a: GroupElement, b: GroupElement) -> GtElement:
    p = _same_group(a, b)
    return GtElement((a.exp * b.exp) % p, p)


def gt_mul(a: GtElement, b: GtElement) -> GtElement:
    p = _same_group(a, b)
    return GtElement((a.exp + b.exp) % p, p)


def dlog(a: GroupElement) -> int:
    """Discrete log base g. Transparent in the toy backend; oracle use only."""
    return a.exp


def serialize_element(a: GroupElement) -> str:
    """Canonical encoding: plain decimal of the exponent."""
    return str(a.exp)


def parse_element(params: GroupParams, s: str) -> GroupElement:
    if not isinstance(s, str) or not s.isdigit() or (len(s) > 1 and s[0] == "0"):
        raise DecodeError(f"malformed element string: {s!r}")
    value = int(s)
    if value >= params.p:
        raise DecodeError(f"element exponent {value} out of range for p={params.p}")
    return GroupElement(value, params.p)


def params_to_obj(params: GroupParams) -> dict:
    return {"p": params.p, "backend": params.backend}


def params_from_obj(obj) -> GroupParams:
    if not isinstance(obj, dict) or set(obj) != {"p", "backend"}:
        raise DecodeError("malformed group params record")
    p = obj["p"]
    if isinstance(p, str):
        if not p.isdigit():
            raise DecodeError(f"malformed group order: {p!r}")
        p = int(p)
    if obj["backend"] != BACKEND_TOY:
        raise DecodeError(f"unknown group backend: {obj['backend']!r}")
    try:
        return new_group(p)
    except ParameterError as exc:
        raise DecodeError(str(exc)) from exc
