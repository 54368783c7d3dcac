"""Exact upper half-plane geometry.

Points carry Fraction or QuadIrr coordinates; every predicate (side of a
geodesic, transversal crossing, crossing orientation, winding number) is
decided by exact sign computations, at worst of the shape u + v*sqrt(e)
with u, v, e in one real quadratic field.

Sign conventions, frozen once for the whole package:

* side(g, z) is the sign of A(x^2+y^2) + Bx + C.
* cross_segment(seg, g) = (side(g, end) - side(g, start)) / 2.
* ez_cross(s1, s2, g) is the sign of det(dir s1, dir g.s2) at the unique
  transversal crossing; equivalently minus the counterclockwise winding
  of the boundary difference loop of the product square.  This choice
  makes the translated-segment sum identity come out as -(n1 - n0) times
  the plain crossing number (see cocycles.theorem_b_chain_check).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import (
    DegenerateConfiguration,
    DegenerateEndpoint,
    MixedDiscriminant,
    SamplesExhausted,
)
from .exact import QuadIrr, quad_sign, sign_plus_root
from .mat2 import Mat, mat_det
from .rmpoints import QForm, _orbit_bfs, class_key

# ---------------------------------------------------------------------------
# scalar helpers


def _parts(v):
    """Decompose a scalar as (a, b, D) with value a + b sqrt(D); D may be None."""
    if isinstance(v, QuadIrr):
        if v.b == 0:
            return v.a, Fraction(0), None
        return v.a, v.b, v.D
    return Fraction(v), Fraction(0), None


def _join_disc(*vals) -> int | None:
    D = None
    for v in vals:
        _, b, d = _parts(v)
        if d is None:
            continue
        if D is None:
            D = d
        elif D != d:
            a1, m1 = _split_sq(D)
            a2, m2 = _split_sq(d)
            if a1 != a2:
                raise MixedDiscriminant(f"unsupported field tower: {D} vs {d}")
            D = a1
    return D


def _split_sq(D: int) -> tuple[int, int]:
    from .exact import square_core

    return square_core(D)


# ---------------------------------------------------------------------------
# points, segments, geodesics


class HPoint:
    """Point x + iy of the upper half-plane, y > 0, exact coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        _join_disc(x, y)  # raises on an unsupported tower
        if not isinstance(x, QuadIrr):
            x = Fraction(x)
        if not isinstance(y, QuadIrr):
            y = Fraction(y)
        y_sign = quad_sign(y) if isinstance(y, QuadIrr) else (y > 0) - (y < 0)
        if y_sign <= 0:
            raise ValueError("points must lie strictly above the real axis")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, *args):
        raise AttributeError("HPoint is immutable")

    def disc(self) -> int | None:
        return _join_disc(self.x, self.y)

    def __eq__(self, other):
        return isinstance(other, HPoint) and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash(("H", str(self.x), str(self.y)))

    def __repr__(self):
        return f"HPoint({self.x}, {self.y})"


def moebius_point(g: Mat, z: HPoint) -> HPoint:
    """Image of z under a positive-determinant rational matrix."""
    det = mat_det(g)
    if det <= 0:
        raise ValueError("need positive determinant")
    a, b = g[0]
    c, d = g[1]
    x, y = z.x, z.y
    den = (x * c + d) * (x * c + d) + y * y * c * c
    num_x = (x * a + b) * (x * c + d) + y * y * a * c
    if isinstance(den, QuadIrr):
        new_x = num_x / den
        new_y = (y * det) / den
    else:
        new_x = num_x / den
        new_y = y * det / den
    return HPoint(new_x, new_y)


class GSegment:
    """Oriented geodesic segment between two distinct points."""

    __slots__ = ("z0", "z1")

    def __init__(self, z0: HPoint, z1: HPoint):
        if z0 == z1:
            raise ValueError("segment endpoints must differ")
        _join_disc(z0.x, z0.y, z1.x, z1.y)  # raises on incompatible towers
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "z1", z1)

    def __setattr__(self, *args):
        raise AttributeError("GSegment is immutable")

    def reversed(self) -> "GSegment":
        return GSegment(self.z1, self.z0)

    def transported(self, g: Mat) -> "GSegment":
        return GSegment(moebius_point(g, self.z0), moebius_point(g, self.z1))

    def __eq__(self, other):
        return isinstance(other, GSegment) and (self.z0, self.z1) == (other.z0, other.z1)

    def __repr__(self):
        return f"GSegment({self.z0}, {self.z1})"


class OrientedGeodesic:
    """Full geodesic of a form, oriented from the conjugate root to the root."""

    __slots__ = ("form",)

    def __init__(self, form: QForm):
        object.__setattr__(self, "form", form)

    def __setattr__(self, *args):
        raise AttributeError("OrientedGeodesic is immutable")

    def coeffs(self):
        return (Fraction(self.form.A), Fraction(self.form.B), Fraction(self.form.C))

    def apex(self) -> HPoint:
        A, B = self.form.A, self.form.B
        return HPoint(Fraction(-B, 2 * A),
                      QuadIrr(0, Fraction(1, 2 * abs(A)), self.form.disc))

    def __repr__(self):
        return f"OrientedGeodesic({self.form!r})"


def point_on_geodesic(form: QForm, t: Fraction) -> HPoint:
    """The point at Moebius parameter t > 0 on the geodesic of the form,
    travelling from the conjugate root (t -> 0) to the root (t -> oo)."""
    t = Fraction(t)
    if t <= 0:
        raise ValueError("parameter must be positive")
    w, wc = form.root(), form.conj_root()
    den = 1 + t * t
    x = (w * (t * t) + wc) / den
    y = (w - wc) * (t / den)
    return HPoint(x, y)


# ---------------------------------------------------------------------------
# side and crossing predicates


def _form_value_sign(A, B, C, z: HPoint) -> int:
    """Exact sign of A(x^2+y^2) + Bx + C for field coefficients and point."""
    E = _join_disc(A, B, C)
    D = z.disc()
    x, y = z.x, z.y
    if E is None or D is None or _split_sq(E)[0] == _split_sq(D)[0]:
        val = A * (x * x + y * y) + B * x + C
        return quad_sign(val) if isinstance(val, QuadIrr) else (val > 0) - (val < 0)
    # genuinely mixed tower: write the value as u + v sqrt(D) over Q(sqrt E)
    s = x * x + y * y
    s0, s1, _ = _parts(s)
    x0, x1, _ = _parts(x)
    u = A * s0 + B * x0 + C
    v = A * s1 + B * x1
    return sign_plus_root(u, v, Fraction(D))


def side(g: OrientedGeodesic, z: HPoint) -> int:
    """Which component of the complement the point lies in (0 = on it)."""
    A, B, C = g.coeffs()
    return _form_value_sign(A, B, C, z)


def cross_segment(seg: GSegment, g: OrientedGeodesic) -> int:
    """Signed transversal crossing count of the segment with the full
    geodesic: (side(end) - side(start)) / 2."""
    s0 = side(g, seg.z0)
    s1 = side(g, seg.z1)
    if s0 == 0 or s1 == 0:
        raise DegenerateEndpoint("segment endpoint on the geodesic")
    return (s1 - s0) // 2


# carrying geodesic of a segment: A(x^2+y^2) + Bx + C = 0 through both points


def carrying_coeffs(seg: GSegment):
    z0, z1 = seg.z0, seg.z1
    n0 = z0.x * z0.x + z0.y * z0.y
    n1 = z1.x * z1.x + z1.y * z1.y
    A = z0.x - z1.x
    B = n1 - n0
    C = n0 * z1.x - n1 * z0.x
    if A == 0:
        # vertical line x = x0: normalize to (0, 1, -x0)
        return (A * 0, A * 0 + 1, -z0.x)
    return (A, B, C)


def _tangent_at(coeffs, z: HPoint):
    """Direction (2Ay, -(2Ax+B)) of the carrying circle at a point on it."""
    A, B, _ = coeffs
    return (2 * A * z.y, -(2 * A * z.x + B))


def _travel_sign(seg: GSegment) -> int:
    """Sign s such that s * tangent points from z0 toward z1 along the arc."""
    coeffs = carrying_coeffs(seg)
    tx, ty = _tangent_at(coeffs, seg.z0)
    dx = seg.z1.x - seg.z0.x
    dy = seg.z1.y - seg.z0.y
    dot = tx * dx + ty * dy
    s = quad_sign(dot) if isinstance(dot, QuadIrr) else (dot > 0) - (dot < 0)
    if s == 0:
        raise DegenerateConfiguration("tangent orthogonal to chord")
    return s


def _sign_of(v) -> int:
    return quad_sign(v) if isinstance(v, QuadIrr) else (v > 0) - (v < 0)


def _proportional(c1, c2) -> bool:
    a1, b1, g1 = c1
    a2, b2, g2 = c2
    return a1 * b2 == a2 * b1 and a1 * g2 == a2 * g1 and b1 * g2 == b2 * g1


def _x_overlap(seg1: GSegment, seg2: GSegment) -> bool:
    lo1, hi1 = sorted([seg1.z0.x, seg1.z1.x], key=_sort_key)
    lo2, hi2 = sorted([seg2.z0.x, seg2.z1.x], key=_sort_key)
    if lo1 == hi1:  # vertical segments: compare y-intervals
        lo1, hi1 = sorted([seg1.z0.y, seg1.z1.y], key=_sort_key)
        lo2, hi2 = sorted([seg2.z0.y, seg2.z1.y], key=_sort_key)
    return not (_lt(hi1, lo2) or _lt(hi2, lo1))


def _sort_key(v):
    return float(v) if isinstance(v, QuadIrr) else float(v)


def _lt(a, b) -> bool:
    d = b - a
    return _sign_of(d) > 0


def ez_cross(seg1: GSegment, seg2: GSegment, g: Mat) -> int:
    """Homology class of the boundary of the product square of seg1 and
    g . seg2 in the punctured product: 0 when the segments are disjoint,
    otherwise the orientation sign of (dir seg1, dir g.seg2) at the
    unique transversal crossing."""
    if mat_det(g) <= 0:
        raise ValueError("need positive determinant")
    t = seg2.transported(g)
    cs = carrying_coeffs(seg1)
    ct = carrying_coeffs(t)
    if _proportional(cs, ct):
        if _x_overlap(seg1, t):
            raise DegenerateConfiguration("segments share their geodesic")
        return 0
    a = _form_value_sign(*ct, seg1.z0)
    b = _form_value_sign(*ct, seg1.z1)
    c = _form_value_sign(*cs, t.z0)
    d = _form_value_sign(*cs, t.z1)
    if a * b > 0 or c * d > 0:
        return 0  # one segment strictly misses the other's geodesic
    if 0 in (a, b, c, d):
        raise DegenerateConfiguration("segment endpoint on the other geodesic")
    w = ct[0] * cs[1] - cs[0] * ct[1]
    sw = _sign_of(w)
    if sw == 0:  # concentric circles or parallel verticals cannot cross
        raise DegenerateConfiguration("tangent configuration")
    return _travel_sign(seg1) * _travel_sign(t) * sw


# ---------------------------------------------------------------------------
# winding-number oracle (independent engine)


class _Piece:
    """One boundary arc of the difference loop: points eps*(x, f(x)) + c
    for x running over [x0, x1] (or a vertical segment parametrized by y)."""

    __slots__ = ("coeffs", "p0", "p1", "eps", "cx", "cy", "vertical")

    def __init__(self, coeffs, p0, p1, eps, cx, cy):
        self.coeffs = coeffs
        self.p0 = p0
        self.p1 = p1
        self.eps = eps
        self.cx = cx
        self.cy = cy
        self.vertical = coeffs[0] == 0


def _loop_pieces(seg1: GSegment, t: GSegment) -> list[_Piece]:
    """The four sides of the product square under (z, w) -> z - w, traversed
    counterclockwise in the parameter square."""
    cs = carrying_coeffs(seg1)
    ct = carrying_coeffs(t)

    def param(seg, z):
        return z.y if carrying_coeffs(seg)[0] == 0 else z.x

    s_a, s_b = param(seg1, seg1.z0), param(seg1, seg1.z1)
    t_a, t_b = param(t, t.z0), param(t, t.z1)
    return [
        _Piece(cs, s_a, s_b, 1, -t.z0.x, -t.z0.y),     # s: 0 -> 1 at t = 0
        _Piece(ct, t_a, t_b, -1, seg1.z1.x, seg1.z1.y),  # t: 0 -> 1 at s = 1
        _Piece(cs, s_b, s_a, 1, -t.z1.x, -t.z1.y),     # s: 1 -> 0 at t = 1
        _Piece(ct, t_b, t_a, -1, seg1.z0.x, seg1.z0.y),  # t: 1 -> 0 at s = 0
    ]


def _piece_crossings(piece: _Piece, q: Fraction) -> list[int] | None:
    """Signed crossings of the piece with the ray {y = qx, x > 0}.

    Returns None when the configuration is degenerate for this ray (retry
    with another slope)."""
    A, B, C = piece.coeffs
    eps, cx, cy = piece.eps, piece.cx, piece.cy
    out: list[int] = []
    travel = _sign_of(piece.p1 - piece.p0)

    def ray_sign(X, Y):
        return _sign_of(Y - q * X)

    if piece.vertical:
        # points: X = eps*x0 + cx constant, Y = eps*y + cy
        x0 = -C / B
        X = eps * x0 + cx
        # W(y) = eps*y + cy - q X ; zero at y*
        ystar = (q * X - cy) / eps
        lo, hi = piece.p0, piece.p1
        s_lo = _sign_of(ystar - lo)
        s_hi = _sign_of(ystar - hi)
        if s_lo == 0 or s_hi == 0:
            return None
        if s_lo * s_hi < 0:
            sX = _sign_of(X)
            if sX == 0:
                return None
            if sX > 0:
                out.append(eps * travel)
        return out
    # circle piece: substitute y = (q x_glob - cy + q cx ... ) into the circle.
    # Global point: X = eps x + cx, Y = eps f(x) + cy with f on the circle.
    # On the ray: eps f(x) + cy = q (eps x + cx)  =>  f(x) = q x + r
    r = (q * cx - cy) / eps
    alpha = A * (1 + q * q)
    beta = 2 * A * q * r + B
    gamma = A * r * r + C
    disc = beta * beta - 4 * alpha * gamma
    sd = _sign_of(disc)
    if sd == 0:
        return None  # tangency: perturb the ray
    if sd < 0:
        return []
    lo, hi = piece.p0, piece.p1
    for sgn in (1, -1):
        # root x* = (-beta + sgn sqrt(disc)) / (2 alpha)
        twoa = 2 * alpha
        sa = _sign_of(twoa)
        # x* - v has the sign of (-beta - twoa*v) + sgn*sqrt(disc), times sign(twoa)
        def cmp_to(v):
            return sa * sign_plus_root(-beta - twoa * v, Fraction(sgn), disc)

        c_lo, c_hi = cmp_to(lo), cmp_to(hi)
        if c_lo == 0 or c_hi == 0:
            return None
        if c_lo * c_hi >= 0:
            continue  # root outside the open parameter interval
        # y-coordinate on the arc must be positive: f(x*) = q x* + r > 0
        # sign of q x* + r: (q(-beta) + r twoa) + q sgn sqrt(disc), over twoa
        y_sign = sa * sign_plus_root(q * (-beta) + r * twoa, q * sgn, disc) \
            if q != 0 else _sign_of(r)
        if y_sign <= 0:
            continue  # crossing happens on the lower half of the circle
        # X > 0: eps x* + cx > 0
        sX = sign_plus_root(eps * (-beta) + cx * twoa, Fraction(eps * sgn), disc) * sa
        if sX == 0:
            return None
        if sX < 0:
            continue
        # direction: sign of dW/dx * eps * travel, where
        # dW/dx = f'(x) - q = -(2A x + B)/(2A f(x)) - q
        # multiply by (2A f(x))^2 > 0: sign of -(2Ax*+B)(2A f(x*)) - q(2A f(x*))^2
        # with f(x*) = q x* + r linear in x*.  Expand in u + v sqrt(disc).
        xu, xv = -beta, Fraction(sgn)  # numerators over twoa
        # work with t = x* = (xu + xv sqrt)/twoa; f = q t + r
        # g1 = 2A t + B ; g2 = 2A f + 0 = 2A q t + 2A r
        g1u = 2 * A * xu + B * twoa
        g1v = 2 * A * xv
        g2u = 2 * A * q * xu + 2 * A * r * twoa
        g2v = 2 * A * q * xv
        # sign of -(g1)(g2) - q (g2)^2  (all over twoa^2 > 0)
        pu = -(g1u * g2u + g1v * g2v * disc) - q * (g2u * g2u + g2v * g2v * disc)
        pv = -(g1u * g2v + g1v * g2u) - q * (2 * g2u * g2v)
        dW = sign_plus_root(pu, pv, disc)
        if dW == 0:
            return None
        out.append(dW * eps * travel)
    return out


def winding_oracle(seg1: GSegment, seg2: GSegment, g: Mat, samples: int = 64) -> int:
    """Winding-number engine for the same class as ez_cross, computed by
    exact signed ray-crossing counts over the boundary difference loop.

    Independent of the local-determinant predicate; shares only the global
    orientation convention (the returned value is minus the raw
    counterclockwise winding).  samples bounds the ray re-draws used to
    escape degenerate ray choices."""
    if mat_det(g) <= 0:
        raise ValueError("need positive determinant")
    t = seg2.transported(g)
    cs = carrying_coeffs(seg1)
    ct = carrying_coeffs(t)
    if _proportional(cs, ct):
        if _x_overlap(seg1, t):
            raise DegenerateConfiguration("segments share their geodesic")
        return 0
    # corner degeneracy: the loop passes through 0 iff an endpoint pair meets
    for za in (seg1.z0, seg1.z1):
        for zb in (t.z0, t.z1):
            if za == zb:
                raise DegenerateConfiguration("shared endpoint in the square")
    pieces = _loop_pieces(seg1, t)
    slopes = [Fraction(0)] + [Fraction(1, pr) for pr in (97, 89, 101, 83, 103, 79)] \
        + [Fraction(-1, pr) for pr in (97, 89, 101, 83, 103, 79)] \
        + [Fraction(2, pr) for pr in (97, 89, 101)]
    tried = 0
    for q in slopes:
        if tried >= samples:
            break
        tried += 1
        total = 0
        ok = True
        for piece in pieces:
            res = _piece_crossings(piece, q)
            if res is None:
                ok = False
                break
            total += sum(res)
        if ok:
            return -total
    raise SamplesExhausted("no ray slope avoided all degeneracies")


# ---------------------------------------------------------------------------
# orbit geodesics crossing a segment


def _seg_box(seg: GSegment):
    xs = sorted([seg.z0.x, seg.z1.x], key=_sort_key)
    ys = sorted([seg.z0.y, seg.z1.y], key=_sort_key)
    return xs[0], xs[1], ys[0]


def _frac_floor(v) -> int:
    if isinstance(v, QuadIrr):
        lo = math.floor(float(v)) - 2
        while not _lt(v, Fraction(lo + 1)):
            lo += 1
        return lo
    return math.floor(v)


def enumerate_crossing_orbit(seg: GSegment, base: QForm, p: int, levels: int,
                             orbit_cache: dict | None = None) -> list[tuple[QForm, int]]:
    """All forms in the SL2(Z[1/p]) orbit of base, of discriminant
    disc * p^(2m) with |m| <= levels, whose geodesic crosses the segment,
    with their crossing signs.

    Completeness: a geodesic (A, B, C) of discriminant d through z = x + iy
    satisfies (2Ax + B)^2 + (2Ay)^2 = d, so over the segment's bounding box
    |A| <= sqrt(d)/(2 y_min) and 2Ax + B is confined to [-sqrt d, sqrt d];
    every candidate in that finite box is tested exactly.
    """
    x_lo, x_hi, y_min = _seg_box(seg)
    d0 = base.disc
    if orbit_cache is None:
        orbit_cache = {}
    key = ("orbit", base.triple(), p, levels)
    if key not in orbit_cache:
        cap = d0 * p ** (2 * (levels + 2))
        visited, _ = _orbit_bfs(base, p, cap)
        orbit_cache[key] = visited
    orbit_nodes = orbit_cache[key]

    def scan_A(task):
        d, A = task
        found = []
        s = math.isqrt(d)
        vals = sorted([2 * A * x_lo, 2 * A * x_hi], key=_sort_key)
        b_lo = _frac_floor(-s - vals[1]) - 1
        b_hi = _frac_floor(s - vals[0]) + 2
        for B in range(b_lo, b_hi + 1):
            num = B * B - d
            if num % (4 * A) != 0:
                continue
            C = num // (4 * A)
            if math.gcd(math.gcd(abs(A), abs(B)), abs(C)) != 1:
                continue
            try:
                f = QForm(A, B, C)
            except ValueError:
                continue
            # cheap rejection first: most candidates miss the segment
            geo = OrientedGeodesic(f)
            s0 = side(geo, seg.z0)
            s1 = side(geo, seg.z1)
            if s0 != 0 and s0 == s1:
                continue
            # only orbit members matter, including for degeneracy
            if (class_key(f), 0) not in orbit_nodes:
                continue
            if s0 == 0 or s1 == 0:
                raise DegenerateEndpoint("segment endpoint on an orbit geodesic")
            sgn = (s1 - s0) // 2
            if sgn == 0:
                continue
            found.append((f, sgn))
        return found

    tasks: list[tuple[int, int]] = []
    for m in range(-levels, levels + 1):
        if m < 0:
            q = p ** (-2 * m)
            if d0 % q != 0:
                continue
            d = d0 // q
        else:
            d = d0 * p ** (2 * m)
        amax_sq = Fraction(d, 4)
        a = 1
        while _sign_of(amax_sq - y_min * y_min * (a * a)) >= 0:
            tasks.append((d, a))
            tasks.append((d, -a))
            a += 1
    from .runtime import pmap

    out: list[tuple[QForm, int]] = []
    for chunk in pmap(scan_A, tasks):
        out.extend(chunk)
    out.sort(key=lambda fs: fs[0].triple())
    return out
