"""Shared brute-force oracles for the test suite."""

import math

from rmlab.cocycles import RMDivisor, chain_segment
from rmlab.hyperbolic import OrientedGeodesic, cross_segment
from rmlab.rmpoints import QForm, orbit_equivalent


def brute_divisor(base: QForm, gamma, x0, p: int, levels: int) -> RMDivisor:
    """Exhaustive |A|, |B| <= 10 scan of crossing orbit geodesics."""
    segment = chain_segment(gamma, x0)
    if segment is None:
        return RMDivisor()
    out = {}
    d0 = base.disc
    for m in range(-levels, levels + 1):
        if m < 0:
            q = p ** (-2 * m)
            if d0 % q:
                continue
            d = d0 // q
        else:
            d = d0 * p ** (2 * m)
        for A in range(-10, 11):
            if A == 0:
                continue
            for B in range(-10, 11):
                num = B * B - d
                if num % (4 * A):
                    continue
                C = num // (4 * A)
                if math.gcd(math.gcd(abs(A), abs(B)), abs(C)) != 1:
                    continue
                f = QForm(A, B, C)
                if not orbit_equivalent(f, base, p):
                    continue
                sgn = cross_segment(segment, OrientedGeodesic(f))
                if sgn:
                    out[f] = out.get(f, 0) + sgn
    return RMDivisor(out)
