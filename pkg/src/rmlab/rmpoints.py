"""RM points: roots of indefinite integral binary quadratic forms.

A point is identified with its primitive form (A, B, C); the distinguished
root is (-B + sqrt(disc)) / (2A) and the Galois conjugate uses -sqrt(disc).
The module computes automorphs over SL2(Z[1/p]), the eigenvalue map
lambda, and orbit equivalence across discriminants disc * p^(2m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DoesNotStabilize, Mismatch, NotRM
from .exact import QuadIrr, is_square_int, kronecker, quad_sign, square_core, val_p
from .mat2 import (
    IDENT,
    Mat,
    from_ints,
    mat,
    mat_det,
    mat_inv,
    mat_mul,
    mat_scale,
    moebius_quadirr,
    p_exponent,
    primitive_integral,
)


class QForm:
    """Primitive integral indefinite binary quadratic form A x^2 + B xy + C y^2."""

    __slots__ = ("A", "B", "C", "disc")

    def __init__(self, A: int, B: int, C: int):
        if A == 0:
            raise ValueError("A must be nonzero")
        if math.gcd(math.gcd(abs(A), abs(B)), abs(C)) != 1:
            raise ValueError("form must be primitive")
        disc = B * B - 4 * A * C
        if disc <= 0 or is_square_int(disc):
            raise ValueError("discriminant must be positive and not a square")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "disc", disc)

    def __setattr__(self, *args):
        raise AttributeError("QForm is immutable")

    def triple(self) -> tuple[int, int, int]:
        return (self.A, self.B, self.C)

    def root(self) -> QuadIrr:
        return QuadIrr(Fraction(-self.B, 2 * self.A), Fraction(1, 2 * self.A), self.disc)

    def conj_root(self) -> QuadIrr:
        return QuadIrr(Fraction(-self.B, 2 * self.A), Fraction(-1, 2 * self.A), self.disc)

    def value(self, x, y):
        return self.A * x * x + self.B * x * y + self.C * y * y

    def __neg__(self) -> "QForm":
        return QForm(-self.A, -self.B, -self.C)

    def __eq__(self, other):
        return isinstance(other, QForm) and self.triple() == other.triple()

    def __hash__(self):
        return hash(self.triple())

    def __repr__(self):
        return f"QForm{self.triple()}"

    def to_json(self):
        return {"A": self.A, "B": self.B, "C": self.C, "disc": self.disc,
                "root": f"({-self.B}+sqrt({self.disc}))/({2 * self.A})"}

    @staticmethod
    def parse(text: str) -> "QForm":
        parts = [int(t) for t in text.split(",")]
        if len(parts) != 3:
            raise ValueError("expected 'A,B,C'")
        return QForm(*parts)


@dataclass(frozen=True)
class RMPoint:
    form: QForm

    @property
    def root(self) -> QuadIrr:
        return self.form.root()

    @property
    def disc(self) -> int:
        return self.form.disc


@dataclass(frozen=True)
class Automorph:
    gamma: Mat
    eps: QuadIrr


def is_rm_for(form: QForm, p: int) -> bool:
    """True iff p is non-split in Q(sqrt disc): Kronecker (disc/p) != 1."""
    return kronecker(form.disc, p) != 1


def _require_rm(form: QForm, p: int) -> None:
    if not is_rm_for(form, p):
        raise NotRM(f"p={p} splits in the field of disc {form.disc}")


# ---------------------------------------------------------------------------
# transforms and reduction


def form_apply(g: Mat, f: QForm) -> QForm:
    """The primitive form whose distinguished root is g . root(f), for
    g in GL2(Q) with positive determinant."""
    if mat_det(g) <= 0:
        raise ValueError("determinant must be positive")
    a, b, c, d = primitive_integral(g)
    A, B, C = f.triple()
    A2 = f.value(d, -c)
    B2 = -2 * A * b * d + B * (a * d + b * c) - 2 * C * a * c
    C2 = f.value(-b, a)
    g0 = math.gcd(math.gcd(abs(A2), abs(B2)), abs(C2))
    return QForm(A2 // g0, B2 // g0, C2 // g0)


def _is_reduced(f: QForm) -> bool:
    # |sqrt(D) - 2|A|| < B < sqrt(D), decided with floor(sqrt(D)) = s
    s = math.isqrt(f.disc)
    return 0 < f.B <= s and f.B + 2 * abs(f.A) > s and 2 * abs(f.A) - f.B <= s


def _rho(f: QForm) -> tuple[QForm, Mat]:
    """One reduction step; returns (new form, T) with root(new) = T^-1 root(f).

    The residue r = -B mod 2|C| is taken in (sqrt(D) - 2|C|, sqrt(D)) when
    |C| < sqrt(D), and absolutely least otherwise (standard indefinite
    reduction; the second branch is what drives far-out forms inward).
    """
    A, B, C = f.triple()
    s = math.isqrt(f.disc)
    ac = abs(C)
    if ac <= s:
        # largest B2 <= s with B2 = -B mod 2|C|
        B2 = -B + 2 * ac * ((s + B) // (2 * ac))
    else:
        # absolutely least residue: -|C| < B2 <= |C|
        B2 = (-B) % (2 * ac)
        if B2 > ac:
            B2 -= 2 * ac
    t = (B2 + B) // (2 * C)
    C2 = (B2 * B2 - f.disc) // (4 * C)
    g = math.gcd(math.gcd(abs(C), abs(B2)), abs(C2))
    T = mat(0, -1, 1, t)
    return QForm(C // g, B2 // g, C2 // g), T


def reduced_cycle(f: QForm) -> tuple[list[QForm], dict[QForm, Mat]]:
    """The cycle of reduced forms equivalent to f, plus, for each member,
    a matrix sending root(f) to its root.

    rho maps reduced forms bijectively around the cycle, so the first
    reduced form reached already lies on it."""
    cur, conj = f, IDENT
    guard = 4 * f.disc + 64
    while not _is_reduced(cur):
        nxt, T = _rho(cur)
        conj = mat_mul(mat_inv(T), conj)
        cur = nxt
        guard -= 1
        if guard < 0:  # pragma: no cover
            raise RuntimeError("reduction did not terminate")
    start, w = cur, conj
    cyc = [start]
    witnesses = {start: w}
    while True:
        nxt, T = _rho(cur)
        conj = mat_mul(mat_inv(T), conj)
        if nxt == start:
            break
        cyc.append(nxt)
        witnesses[nxt] = conj
        cur = nxt
    return cyc, witnesses


_CLASS_KEY_CACHE: dict[tuple[int, int, int], tuple[int, int, int]] = {}


def class_key(f: QForm) -> tuple[int, int, int]:
    """Canonical representative (minimal triple) of the proper equivalence
    class of f; syntactic key for SL2(Z)-equivalence of oriented roots."""
    t = f.triple()
    hit = _CLASS_KEY_CACHE.get(t)
    if hit is not None:
        return hit
    cyc, _ = reduced_cycle(f)
    key = min(g.triple() for g in cyc)
    for g in cyc:
        _CLASS_KEY_CACHE[g.triple()] = key
    _CLASS_KEY_CACHE[t] = key
    return key


def class_witness(f: QForm, target_triple: tuple[int, int, int]) -> Mat:
    cyc, wit = reduced_cycle(f)
    for g in cyc:
        if g.triple() == target_triple:
            return wit[g]
    raise KeyError("target not in cycle")


# ---------------------------------------------------------------------------
# automorphs


def pell4_fundamental(D: int, cap: int = 10_000_000) -> tuple[int, int]:
    """Minimal (t, u) with t, u > 0 and t^2 - D u^2 = 4."""
    for u in range(1, cap):
        t2 = 4 + D * u * u
        t = math.isqrt(t2)
        if t * t == t2:
            return t, u
    raise RuntimeError(f"Pell search cap reached for D={D}")  # pragma: no cover


def conductor(disc: int) -> tuple[int, int]:
    """disc = f^2 * d_K with d_K the fundamental discriminant; returns (d_K, f)."""
    core, m = square_core(disc)
    if core % 4 == 1:
        return core, m
    # core = 2,3 mod 4: fundamental discriminant is 4*core
    if m % 2 != 0:
        raise ValueError(f"{disc} is not a discriminant")
    return 4 * core, m // 2


def automorph(form: QForm, p: int) -> Automorph:
    """Generator (mod +-1) of the stabilizer of root(form) in SL2(Z[1/p])
    whose eigenvalue on (root, 1) exceeds 1.

    Since p is non-split, the norm-one units of the Z[1/p]-order are those
    of the Z-order with the p-part stripped from the conductor; the Pell
    equation is solved there and the solution rescaled.
    """
    _require_rm(form, p)
    D = form.disc
    _, f = conductor(D)
    a = val_p(f, p) if f % p == 0 else 0
    D_eff = D // p ** (2 * a)
    t, u = pell4_fundamental(D_eff)
    U = Fraction(u, p ** a)  # u * sqrt(D_eff) = U * sqrt(D)
    A, B, C = form.triple()
    gamma = mat(Fraction(t - B * U, 2), -C * U, A * U, Fraction(t + B * U, 2))
    assert mat_det(gamma) == 1
    eps = QuadIrr(Fraction(t, 2), U / 2, D)
    assert quad_sign(eps - 1) > 0
    w = form.root()
    assert moebius_quadirr(gamma, w) == w
    return Automorph(gamma, eps)


def automorph_oracle(form: QForm, p: int, kmax: int, nmax: int) -> Automorph:
    """Exhaustive bounded search for the automorph.

    Every det-1 matrix fixing the root is ((t-BU)/2, -CU; AU, (t+BU)/2)
    with t^2 - disc U^2 = 4, and its eigenvalue grows strictly with U > 0.
    Scanning all U = n / p^k with 1 <= n <= nmax, 0 <= k <= kmax therefore
    certifies minimality inside the box; callers pick nmax large enough
    that the candidate automorph lies inside it.
    """
    _require_rm(form, p)
    D = form.disc
    A, B, C = form.triple()
    w = form.root()
    best: tuple[Fraction, Fraction, Fraction] | None = None  # (U, t)
    for k in range(kmax + 1):
        P = p ** k
        P2 = P * P
        for n in range(1, nmax + 1):
            if k > 0 and n % p == 0:
                continue
            t2num = 4 * P2 + D * n * n
            T = math.isqrt(t2num)
            if T * T != t2num:
                continue
            U = Fraction(n, P)
            if best is None or U < best[0]:
                best = (U, Fraction(T, P))
    if best is None:
        raise RuntimeError("oracle box contained no stabilizer")
    U, t = best
    g = mat((t - B * U) / 2, -C * U, A * U, (t + B * U) / 2)
    assert mat_det(g) == 1
    for row in g:
        for e in row:
            den = e.denominator
            while den % p == 0:
                den //= p
            assert den == 1, "stabilizer entry escaped Z[1/p]"
    eps = QuadIrr(t / 2, U / 2, D)
    assert quad_sign(eps - 1) > 0
    assert moebius_quadirr(g, w) == w
    return Automorph(g, eps)


def lambda_of(gamma: Mat, point: RMPoint) -> QuadIrr:
    """Eigenvalue of gamma on the column (root, 1); gamma must fix the root."""
    w = point.root
    if moebius_quadirr(gamma, w) != w:
        raise DoesNotStabilize("matrix does not fix the point")
    return w * gamma[1][0] + gamma[1][1]


# ---------------------------------------------------------------------------
# orbit equivalence over SL2(Z[1/p])


def _neighbor_moves(p: int) -> list[Mat]:
    return [mat(1, j, 0, p) for j in range(p)] + [mat(p, 0, 0, 1)]


def _orbit_bfs(f: QForm, p: int, disc_cap: int, target=None):
    """BFS over (class key, path parity) nodes via determinant-p moves.

    Returns (visited, parents): parents maps a node to (parent node, move).
    Witnesses are reconstructed lazily by _orbit_witness.  Stops early when
    the target node is reached.
    """
    start_key = class_key(f)
    start = (start_key, 0)
    visited = {start}
    parents: dict = {start: None}
    if target == start:
        return visited, parents
    frontier = [start]
    moves = _neighbor_moves(p)
    while frontier:
        new_frontier = []
        for key, parity in frontier:
            g = QForm(*key)
            for mv in moves:
                h = form_apply(mv, g)
                if h.disc > disc_cap:
                    continue
                node = (class_key(h), 1 - parity)
                if node in visited:
                    continue
                visited.add(node)
                parents[node] = ((key, parity), mv)
                if target is not None and node == target:
                    return visited, parents
                new_frontier.append(node)
        frontier = new_frontier
    return visited, parents


def _orbit_witness(f: QForm, parents: dict, node) -> Mat:
    """Matrix w with w . root(f) = root(key form of node), det w = p^length."""
    chain = []
    cur = node
    while parents[cur] is not None:
        parent, mv = parents[cur]
        chain.append((parent, mv, cur))
        cur = parent
    chain.reverse()
    w = class_witness(f, cur[0])
    form = QForm(*cur[0])
    for parent, mv, child in chain:
        h = form_apply(mv, form)
        w = mat_mul(class_witness(h, child[0]), mat_mul(mv, w))
        form = QForm(*child[0])
    return w


def _witness_search(f1: QForm, f2: QForm, p: int, kmax: int, bound: int):
    """Bounded direct search for gamma in SL2(Z[1/p]) with gamma.w1 = w2.

    Solves the two linear conditions for (a, b) in terms of (c, d) and scans
    a box of (c, d); used as the independent cross-check."""
    w1, w2 = f1.root(), f2.root()
    try:
        prod = w2 * w1
    except Exception:
        return None
    e, fcoef = w1.a, w1.b
    s, t = prod.a, prod.b
    u, v = w2.a, w2.b
    denoms = [Fraction(1)] + [Fraction(1, p ** k) for k in range(1, kmax + 1)]
    for dc in denoms:
        for dd in denoms:
            for cn in range(-bound, bound + 1):
                c = cn * dc
                for dn in range(-bound, bound + 1):
                    d = dn * dd
                    if c == 0 and d == 0:
                        continue
                    a = (c * t + d * v) / fcoef
                    b = c * s + d * u - a * e
                    g = mat(a, b, c, d)
                    if mat_det(g) != 1:
                        continue
                    ok = True
                    for row in g:
                        for ent in row:
                            q = ent.denominator
                            while q % p == 0:
                                q //= p
                            if q != 1:
                                ok = False
                    if ok and moebius_quadirr(g, w1) == w2:
                        return g
    return None


def orbit_equivalent(f1: QForm, f2: QForm, p: int, levels: int | None = None) -> bool:
    """True iff the roots lie in one SL2(Z[1/p]) orbit.

    Necessary condition: disc ratio is an even power of p.  The decision
    runs a class-key BFS over determinant-p moves (with path parity, which
    is the det-valuation obstruction) and cross-checks every positive
    answer by verifying the witness matrix exactly; negative answers are
    cross-checked by a bounded direct matrix search.
    """
    _require_rm(f1, p)
    _require_rm(f2, p)
    if f1 == f2:
        return True
    d1, d2 = f1.disc, f2.disc
    big, small = max(d1, d2), min(d1, d2)
    if big % small != 0:
        return False
    ratio = big // small
    m2 = 0
    while ratio % p == 0:
        ratio //= p
        m2 += 1
    if ratio != 1 or m2 % 2 != 0:
        return False
    if levels is None:
        levels = 2
    cap = max(d1, d2) * p ** (2 * levels)
    target = (class_key(f2), 0)
    visited, parents = _orbit_bfs(f1, p, cap, target=target)
    if target in visited:
        gamma = _finish_conjugator(f1, f2, p, parents, target)
        if mat_det(gamma) != 1 or moebius_quadirr(gamma, f1.root()) != f2.root():
            raise Mismatch("BFS witness failed exact verification")
        return True
    check = _witness_search(f1, f2, p, kmax=min(levels, 2), bound=24)
    if check is not None:
        raise Mismatch("bounded search found a witness the BFS missed")
    return False


def _finish_conjugator(f1: QForm, f2: QForm, p: int, parents, target) -> Mat:
    """Compose the BFS witness with f2's own reduction witness and scale
    the determinant p-power away."""
    w = _orbit_witness(f1, parents, target)
    w2 = class_witness(f2, target[0])  # root(keyform) = w2 . root(f2)
    full = mat_mul(mat_inv(w2), w)
    det = mat_det(full)
    k = 0
    while det % (p * p) == 0:
        det /= p * p
        k += 1
    assert det == 1, "witness determinant is not an even power of p"
    return mat_scale(full, Fraction(1, p ** k))


def orbit_conjugator(f1: QForm, f2: QForm, p: int, levels: int | None = None) -> Mat:
    """A matrix gamma in SL2(Z[1/p]) with gamma . root(f1) = root(f2)."""
    _require_rm(f1, p)
    _require_rm(f2, p)
    d1, d2 = f1.disc, f2.disc
    big, small = max(d1, d2), min(d1, d2)
    if big % small != 0:
        raise NotRM("roots are in different orbits (disc ratio)")
    if levels is None:
        levels = 2
    cap = max(d1, d2) * p ** (2 * levels)
    target = (class_key(f2), 0)
    visited, parents = _orbit_bfs(f1, p, cap, target=target)
    if target not in visited:
        raise Mismatch("no conjugator found; points not equivalent at this level")
    gamma = _finish_conjugator(f1, f2, p, parents, target)
    assert mat_det(gamma) == 1
    assert moebius_quadirr(gamma, f1.root()) == f2.root()
    return gamma


def rm_discs_up_to(bound: int, p: int) -> list[int]:
    """All positive non-square discriminants <= bound with p non-split."""
    out = []
    for d in range(2, bound + 1):
        if d % 4 not in (0, 1) or is_square_int(d):
            continue
        if kronecker(d, p) != 1:
            out.append(d)
    return out


def form_of_disc(d: int) -> QForm:
    """A primitive form of discriminant d (principal-type representative)."""
    if d % 4 == 0:
        return QForm(1, 0, -d // 4)
    return QForm(1, 1, (1 - d) // 4)
