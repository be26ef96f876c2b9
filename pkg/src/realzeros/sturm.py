"""Exact real-root counting with Sturm chains over the integers.

Float coefficients are dyadic rationals, so scaling by a power of two turns
them into integers without loss. The chain is built with sign-corrected
pseudo-remainders and reduced to primitive parts; dividing by positive
constants never changes a sign variation count.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegreeTooLarge, ZeroPolynomial

MAX_DEGREE = 64


def _to_integer_poly(coeffs: Sequence[float]) -> list[int]:
    """Ascending float coefficients -> descending integer coefficients, trimmed."""
    fr = [Fraction(float(c)) for c in coeffs]
    while fr and fr[-1] == 0:
        fr.pop()
    if not fr:
        raise ZeroPolynomial("all coefficients are zero")
    den = 1
    for f in fr:
        den = max(den, f.denominator)  # denominators are powers of two
    return [int(f * den) for f in reversed(fr)]


def _primitive(p: list[int]) -> list[int]:
    g = 0
    for c in p:
        g = math.gcd(g, c)
    return [c // g for c in p] if g > 1 else p


def _derivative(p: list[int]) -> list[int]:
    d = len(p) - 1
    return [c * (d - i) for i, c in enumerate(p[:-1])]


def _neg_prem(a: list[int], b: list[int]) -> list[int]:
    """A positive multiple of -rem(a, b)."""
    r = list(a)
    lc = b[0]
    db = len(b) - 1
    delta = len(a) - len(b)
    while len(r) - 1 >= db and any(r):
        coef = r[0]
        r = [lc * c for c in r]
        for i in range(len(b)):
            r[i] -= coef * b[i]
        r.pop(0)
    while r and r[0] == 0:
        r.pop(0)
    # prem = lc^(delta + 1) * rem, so undo the sign of that factor.
    flip = -1 if (lc < 0 and (delta + 1) % 2 == 1) else 1
    return [-flip * c for c in r]


def sturm_chain(p: list[int]) -> list[list[int]]:
    chain = [_primitive(p)]
    if len(p) > 1:
        chain.append(_primitive(_derivative(p)))
        while True:
            r = _neg_prem(chain[-2], chain[-1])
            if not r:
                break
            chain.append(_primitive(r))
    return chain


def _sign_at(p: list[int], point) -> int:
    d = len(p) - 1
    if point == math.inf:
        return (p[0] > 0) - (p[0] < 0)
    if point == -math.inf:
        s = (p[0] > 0) - (p[0] < 0)
        return s if d % 2 == 0 else -s
    fr = Fraction(point)
    num, den = fr.numerator, fr.denominator
    # den > 0, so the homogenised value has the sign of p(point).
    total = 0
    for i, c in enumerate(p):
        total += c * num ** (d - i) * den ** i
    return (total > 0) - (total < 0)


def _variations(chain: list[list[int]], point) -> int:
    signs = [s for s in (_sign_at(q, point) for q in chain) if s != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def sturm_count(coeffs: Sequence[float], a: float = -math.inf, b: float = math.inf) -> int:
    """Number of distinct real roots of sum_k coeffs[k] x^k in the open interval (a, b).

    Finite endpoints that are roots are moved one ulp inward.
    """
    p = _to_integer_poly(coeffs)
    if len(p) - 1 > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {len(p) - 1} exceeds {MAX_DEGREE}")
    if not a < b:
        raise ValueError("need a < b")
    if len(p) == 1:
        return 0
    if math.isfinite(a) and _sign_at(p, a) == 0:
        a = float(np.nextafter(a, b))
    if math.isfinite(b) and _sign_at(p, b) == 0:
        b = float(np.nextafter(b, a))
    chain = sturm_chain(p)
    return _variations(chain, a) - _variations(chain, b)
