"""Hecke double cosets for SL2(Z[1/p]) inside M2(Z[1/p]) and their actions.

Right cosets carry a canonical Hermite-style key over Z[1/p] (p is a unit,
so upper-triangular representatives have p-free diagonal entries and the
translation part is reduced modulo the p-free part of the lower corner).
Double cosets are keyed by the Z[1/p]-elementary divisors plus the p-adic
valuation of the determinant.

Over this group the p-part of the algebra is degenerate: reduced-norm p
elements form a single right coset, and scaling by p identifies T(p,p)
with the determinant-p^2 coset, which is what relation (c) expresses.
The familiar p+1 representatives survive as the lattice neighbors of the
standard vertex; coset_reps_Tn returns them for n = p with inequivalence
checked at the SL2(Z) level, for consumption by the tree module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cocycles import RMDivisor, RQDivisor, dv_value_on_segment, ChainSquare, \
    d1_candidates, canonical_label, Label
from .errors import Mismatch
from .exact import val_p
from .hyperbolic import GSegment, ez_cross
from .mat2 import (
    IDENT,
    Mat,
    from_ints,
    mat,
    mat_det,
    mat_inv,
    mat_mul,
    p_exponent,
    sl2zp_generators,
)
from .rmpoints import QForm

# ---------------------------------------------------------------------------
# canonical coset keys


def in_gamma(g: Mat, p: int) -> bool:
    """Membership in SL2(Z[1/p]): determinant one, p-power denominators."""
    if mat_det(g) != 1:
        return False
    for row in g:
        for e in row:
            d = e.denominator
            while d % p == 0:
                d //= p
            if d != 1:
                return False
    return True


def right_coset_key(g: Mat, p: int):
    """Canonical key of the left coset SL2(Z[1/p]) * g."""
    det = mat_det(g)
    if det <= 0:
        raise ValueError("positive determinant required")
    # clear denominators in the first column, then integer xgcd row-reduce
    x, y = g[0][0], g[1][0]
    k = 0
    for e in (x, y):
        if e != 0:
            k = max(k, -val_p(e, p))
    xs, ys = int(x * p ** k), int(y * p ** k)
    if ys == 0:
        red = g
    else:
        d = math.gcd(abs(xs), abs(ys))
        u, v = _xgcd(xs, ys, d)
        row_op = mat(u, v, Fraction(-ys, d), Fraction(xs, d))
        assert mat_det(row_op) == 1
        red = mat_mul(row_op, g)
    a, b = red[0]
    c2 = red[1][1]
    assert red[1][0] == 0
    # scale the diagonal by diag(u, 1/u), u = +-p^j: make a positive, p-free
    va = val_p(a, p)
    sign = 1 if a > 0 else -1
    u = Fraction(sign) * Fraction(p) ** (-va)
    scale = mat(u, 0, 0, 1 / u)
    red = mat_mul(scale, red)
    a, b = red[0]
    c2 = red[1][1]
    a_int = int(a)
    t = val_p(c2, p)
    c_free = c2 / Fraction(p) ** t
    assert c_free.denominator == 1 and c_free > 0
    c0 = int(c_free)
    # reduce b modulo c * Z[1/p] = c0 * Z[1/p]
    if c0 == 1:
        b_red = 0
    else:
        s = -val_p(b, p) if b != 0 else 0
        s = max(s, 0)
        beta = int(b * p ** s)
        b_red = beta * pow(p, -s, c0) % c0 if s else beta % c0
    return (a_int, b_red, c0, t)


def _xgcd(x: int, y: int, d: int) -> tuple[int, int]:
    g, u, v = _ext_gcd(abs(x), abs(y))
    assert g == d
    u *= 1 if x >= 0 else -1
    v *= 1 if y >= 0 else -1
    return u, v


def _ext_gcd(a: int, b: int):
    if b == 0:
        return a, 1, 0
    g, u, v = _ext_gcd(b, a % b)
    return g, v, u - (a // b) * v


def key_to_matrix(key, p: int) -> Mat:
    a, b, c0, t = key
    return mat(a, b, 0, c0 * Fraction(p) ** t)


def double_coset_label(g: Mat, p: int):
    """(e1, e2, t): p-free elementary divisors over Z[1/p] and val_p(det)."""
    det = mat_det(g)
    k = 0
    for row in g:
        for e in row:
            if e != 0:
                k = max(k, -val_p(e, p))
    ints = [int(e * p ** k) for row in g for e in row]
    gcd_all = 0
    for v in ints:
        gcd_all = math.gcd(gcd_all, abs(v))
    e1 = _p_free(gcd_all, p)
    n_free = _p_free(det.numerator, p)  # det > 0 rational with p-power denom
    assert _p_free(det.denominator, p) == 1
    e2 = n_free // e1
    t = val_p(det, p)
    return (e1, e2, t)


def _p_free(n: int, p: int) -> int:
    n = abs(n)
    while n and n % p == 0:
        n //= p
    return n


# ---------------------------------------------------------------------------
# coset lists


@dataclass(frozen=True)
class CosetList:
    reps: tuple[Mat, ...]
    n: int
    p: int
    gamma_level: str  # "zp" for genuine SL2(Z[1/p]) cosets, "z" for lattice reps

    def to_json(self):
        return {"n": self.n, "p": self.p, "level": self.gamma_level,
                "reps": [[[str(e) for e in row] for row in g] for g in self.reps]}


def _sigma1(n: int) -> int:
    return sum(d for d in range(1, n + 1) if n % d == 0)


def coset_reps_Tn(n: int, p: int) -> CosetList:
    """Right-coset representatives for the reduced-norm-n Hecke symbol.

    gcd(n, p) = 1: the sigma_1(n) upper-triangular matrices, which stay
    pairwise inequivalent over SL2(Z[1/p]).  n = p: the p+1 lattice
    neighbors (SL2(Z)-level data; over SL2(Z[1/p]) they collapse to the
    single coset of diag(1, p)).  Composite p | n: assembled from the
    coprime part and the p-power part via the algebra relations.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if math.gcd(n, p) == 1:
        reps = []
        for a in range(1, n + 1):
            if n % a:
                continue
            d = n // a
            for b in range(d):
                reps.append(mat(a, b, 0, d))
        out = CosetList(tuple(reps), n, p, "zp")
        _check_pairwise(out)
        assert len(reps) == _sigma1(n)
        return out
    if n == p:
        reps = [mat(1, b, 0, p) for b in range(p)] + [mat(p, 0, 0, 1)]
        return CosetList(tuple(reps), n, p, "z")
    # composite with p | n: T_n = T_{n0} * T_{p^e}; over this group the
    # p-power part contributes the single coset of diag(1, p)^e
    n0, e = n, 0
    while n0 % p == 0:
        n0 //= p
        e += 1
    base = coset_reps_Tn(n0, p)
    pe = mat(1, 0, 0, p ** e)
    reps = tuple(mat_mul(a, pe) for a in base.reps)
    out = CosetList(reps, n, p, "zp")
    _check_pairwise(out)
    return out


def _check_pairwise(cl: CosetList) -> None:
    keys = {right_coset_key(g, cl.p) for g in cl.reps}
    if len(keys) != len(cl.reps):
        raise Mismatch("coset representatives are not pairwise inequivalent")
    for i, a in enumerate(cl.reps):
        for b in cl.reps[i + 1:]:
            if in_gamma(mat_mul(a, mat_inv(b)), cl.p):
                raise Mismatch("alpha_i alpha_j^-1 landed in Gamma")


def tree_neighbor_count(n: int, p: int) -> int:
    """Lattice-count oracle: sublattices of index n (= sigma_1) and the
    p+1 tree neighbors for n = p."""
    if n == p:
        return p + 1
    return _sigma1(n)


# ---------------------------------------------------------------------------
# the Hecke algebra


class HeckeElt:
    """Finite integer combination of double cosets, keyed by
    (e1, e2, val_p det)."""

    __slots__ = ("terms", "p")

    def __init__(self, terms: dict, p: int):
        clean = {k: c for k, c in terms.items() if c != 0}
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "p", p)

    def __setattr__(self, *args):
        raise AttributeError("HeckeElt is immutable")

    @staticmethod
    def Tn(n: int, p: int) -> "HeckeElt":
        """The reduced-norm-n operator: sum of the double cosets of O_n."""
        terms: dict = {}
        n0, e = n, 0
        while n0 % p == 0:
            n0 //= p
            e += 1
        for e1 in _unitary_divisors_pfree(n0):
            if (n0 // e1) % e1:
                continue
            terms[(e1, n0 // e1, e)] = terms.get((e1, n0 // e1, e), 0) + 1
        return HeckeElt(terms, p)

    @staticmethod
    def T_scalar(l: int, p: int) -> "HeckeElt":
        """T(l, l) = Gamma . l . Gamma."""
        lbl = double_coset_label(mat(l, 0, 0, l), p)
        return HeckeElt({lbl: 1}, p)

    @staticmethod
    def one(p: int) -> "HeckeElt":
        return HeckeElt({(1, 1, 0): 1}, p)

    def __add__(self, other: "HeckeElt") -> "HeckeElt":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return HeckeElt(out, self.p)

    def __sub__(self, other: "HeckeElt") -> "HeckeElt":
        return self + other.scale(-1)

    def scale(self, c: int) -> "HeckeElt":
        return HeckeElt({k: c * v for k, v in self.terms.items()}, self.p)

    def __eq__(self, other):
        return isinstance(other, HeckeElt) and self.p == other.p and \
            self.terms == other.terms

    def __repr__(self):
        items = sorted(self.terms.items())
        return "HeckeElt(" + " + ".join(f"{c}*T{k}" for k, c in items) + ")"


def _unitary_divisors_pfree(n0: int):
    return sorted(d for d in range(1, n0 + 1) if n0 % d == 0)


_COSET_CACHE: dict = {}


def cosets_of_label(label, p: int) -> list[Mat]:
    """Right-coset representatives of one double coset, by orbit closure
    under right multiplication with group generators."""
    key = (label, p)
    if key in _COSET_CACHE:
        return _COSET_CACHE[key]
    e1, e2, t = label
    rep = mat(e1, 0, 0, e2 * Fraction(p) ** t)
    gens = sl2zp_generators(p)
    gens = gens + [mat_inv(g) for g in gens]
    seen = {right_coset_key(rep, p): rep}
    frontier = [rep]
    while frontier:
        new = []
        for g in frontier:
            for h in gens:
                gh = mat_mul(g, h)
                k = right_coset_key(gh, p)
                if k not in seen:
                    seen[k] = gh
                    new.append(gh)
        frontier = new
        if len(seen) > 100_000:  # pragma: no cover
            raise Mismatch("coset closure diverged")
    out = [key_to_matrix(k, p) for k in sorted(seen)]
    for g in out:
        assert double_coset_label(g, p) == label
    _COSET_CACHE[key] = out
    return out


def hecke_mul(s: HeckeElt, t: HeckeElt) -> HeckeElt:
    """Product in the double-coset algebra: expand on right cosets,
    re-collect, and certify that multiplicities are constant along each
    double coset."""
    assert s.p == t.p
    p = s.p
    out: dict = {}
    for ls, cs in s.terms.items():
        alphas = cosets_of_label(ls, p)
        for lt, ct in t.terms.items():
            betas = cosets_of_label(lt, p)
            counter: dict = {}
            for a in alphas:
                for b in betas:
                    ab = mat_mul(a, b)
                    counter[right_coset_key(ab, p)] = \
                        counter.get(right_coset_key(ab, p), 0) + 1
            # group by double coset and check constancy
            by_label: dict = {}
            for k, cnt in counter.items():
                lbl = double_coset_label(key_to_matrix(k, p), p)
                by_label.setdefault(lbl, []).append((k, cnt))
            for lbl, pairs in by_label.items():
                counts = {cnt for _, cnt in pairs}
                if len(counts) != 1:
                    raise Mismatch(f"non-constant multiplicity on {lbl}")
                expected = len(cosets_of_label(lbl, p))
                if expected != len(pairs):
                    raise Mismatch(f"double coset {lbl} only partially covered")
                out[lbl] = out.get(lbl, 0) + cs * ct * counts.pop()
    return HeckeElt(out, p)


# ---------------------------------------------------------------------------
# actions on divisor-valued cocycles


def act_on_dv(t: HeckeElt, base: QForm, segment: GSegment | None, p: int,
              levels: int) -> RMDivisor:
    """Value of the Hecke-translated one-variable cocycle on the chain:
    sum over right cosets alpha of alpha^{-1} . (value on alpha . chain)."""
    total = RMDivisor()
    cache: dict = {}
    for lbl, coeff in t.terms.items():
        for alpha in cosets_of_label(lbl, p):
            if segment is None:
                continue
            moved = segment.transported(alpha)
            ainv = mat_inv(alpha)
            ext = 2 * p_exponent(ainv, p)
            val = dv_value_on_segment(base, moved, p, levels + ext, cache)
            total = total + val.act(ainv).scale(coeff)
    return total.restrict_levels(base.disc, p, levels)


def _relabel_left(div: RQDivisor, g: Mat) -> RQDivisor:
    out: dict[Label, int] = {}
    for v, m in div.entries.items():
        w = canonical_label(mat_mul(g, from_ints(v)))
        out[w] = out.get(w, 0) + m
    return RQDivisor(out)


def kudla_millson(n: int, chain: ChainSquare, p: int, radius: int) -> RQDivisor:
    """The reduced-norm-n two-variable divisor value on the chain, computed
    through the Hecke action on the basic cocycle AND by direct orbit
    enumeration; both routes must agree exactly.

    p-power parts are handled by scaling: determinant p^2 elements are p
    times group elements, so they relabel trivially and reduce to the
    coprime part (gcd(n, p) = 1 is required here; even p-powers reduce to
    it, odd ones act through the norm-p coset).
    """
    if math.gcd(n, p) != 1:
        raise ValueError("kudla_millson expects gcd(n, p) = 1; "
                         "p-powers reduce via the scalar relation")
    # route 1: Hecke action on the basic two-variable cocycle
    route1: dict[Label, int] = {}
    for alpha in coset_reps_Tn(n, p).reps:
        moved = ChainSquare(chain.seg1.transported(alpha), chain.seg2)
        ainv = mat_inv(alpha)
        part = _d1_like(moved, p, radius)
        rel = _relabel_left(part, ainv)
        for v, m in rel.entries.items():
            route1[v] = route1.get(v, 0) + m
    r1 = RQDivisor(route1).restrict_p_exponent(p, radius)
    # route 2: direct enumeration of reduced-norm-n elements
    route2: dict[Label, int] = {}
    for lbl in d1_candidates(chain.seg1, chain.seg2, p, radius,
                             det_prime_part=n):
        g = from_ints(lbl)
        s = ez_cross(chain.seg1, chain.seg2, g)
        if s:
            route2[lbl] = route2.get(lbl, 0) + 2 * s
    r2 = RQDivisor(route2)
    if r1 != r2:
        raise Mismatch("Hecke route and direct enumeration disagree")
    return r1


def _d1_like(chain: ChainSquare, p: int, radius: int) -> RQDivisor:
    out: dict[Label, int] = {}
    for lbl in d1_candidates(chain.seg1, chain.seg2, p, radius):
        g = from_ints(lbl)
        s = ez_cross(chain.seg1, chain.seg2, g)
        if s:
            out[lbl] = out.get(lbl, 0) + 2 * s
    return RQDivisor(out)
