"""Decision procedures for finitely generated subgroups of GL_2(Q).

Virtual solvability is decided constructively: a subgroup of GL_2(Q) is
virtually solvable exactly when it fixes a point of the projective line over
a quadratic extension or permutes a two-point set (for rational 2x2 matrices
the exceptional finite projective groups A4, S4, A5 cannot occur, since -1 is
not a sum of two rational squares). Candidate points come from
eigendirections of short words, and every certificate re-verifies by exact
arithmetic. The negative answer is certified by a ping-pong free pair acting
on the projective line, coordinatized by the slope y/x in Q u {inf}.

All interval computations use exact rational endpoints; the only floating
point in this module lives in the explicitly 'sampled' coarse-density
evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

from .linalg import ProjPoint, QMat, QuadraticNumber, eigen_directions
from .words import Word

Q = Fraction


class _Infinity:
    """The slope of the vertical direction (0 : 1)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = _Infinity()


def slope_of_point(p: ProjPoint):
    """Slope y/x of a projective point; INF for (0 : 1)."""
    if p.x.is_zero():
        return INF
    s = p.y / p.x
    return s.a if s.is_rational() else s


def slopes_equal(s, t) -> bool:
    if s is INF or t is INF:
        return s is t
    s_quad = isinstance(s, QuadraticNumber) and not s.is_rational()
    t_quad = isinstance(t, QuadraticNumber) and not t.is_rational()
    if s_quad != t_quad:
        return False
    if s_quad:
        return s.d == t.d and s.a == t.a and s.b == t.b
    sv = s.a if isinstance(s, QuadraticNumber) else Q(s)
    tv = t.a if isinstance(t, QuadraticNumber) else Q(t)
    return sv == tv


def apply_slope(m: QMat, s):
    """Image of a slope under the projective action of m (columns act)."""
    (a, b), (c, d) = m.rows
    if s is INF:
        num, den = d, b
    else:
        num, den = c + d * s, a + b * s
    if isinstance(num, QuadraticNumber) or isinstance(den, QuadraticNumber):
        num, den = QuadraticNumber.of(num), QuadraticNumber.of(den)
        if den.is_zero():
            return INF
        out = num / den
        return out.a if out.is_rational() else out
    if den == 0:
        return INF
    return num / den


def circle_key(s):
    """Order-preserving chart of the projective circle into [0, 2).

    Nonnegative slopes map to [0, 1), INF to 1, negative slopes to (1, 2);
    rational slopes get rational keys and quadratic slopes quadratic keys,
    so all order comparisons stay exact.
    """
    if s is INF:
        return Q(1)
    if isinstance(s, QuadraticNumber):
        if s.is_rational():
            s = s.a
        elif s.sign() >= 0:
            return s / (1 + s)
        else:
            return QuadraticNumber.of(1) + 1 / (1 - s)
    s = Q(s)
    if s >= 0:
        return s / (1 + s)
    return 1 + Q(1) / (1 - s)


def slope_from_key(k: Q):
    """Inverse of circle_key on rational keys."""
    k = Q(k)
    if k == 1:
        return INF
    if 0 <= k < 1:
        return k / (1 - k)
    return 1 - 1 / (k - 1)


def _key_lt(a, b) -> bool:
    if isinstance(a, QuadraticNumber) or isinstance(b, QuadraticNumber):
        return QuadraticNumber.of(a) < QuadraticNumber.of(b)
    return a < b


def _key_le(a, b) -> bool:
    if isinstance(a, QuadraticNumber) or isinstance(b, QuadraticNumber):
        return QuadraticNumber.of(a) <= QuadraticNumber.of(b)
    return a <= b


def _float_key(k) -> float:
    if isinstance(k, QuadraticNumber):
        if k.d < 0:
            raise ValueError("complex key")
        return float(k.a) + float(k.b) * math.sqrt(float(k.d))
    return float(k)


def rational_key_between(ka, kb) -> Q:
    """Exact rational strictly between two distinct key values."""
    if not _key_lt(ka, kb):
        raise ValueError("empty key gap")
    denom = 4
    while True:
        approx = (_float_key(ka) + _float_key(kb)) / 2
        cand = Q(round(approx * denom), denom)
        if _key_lt(ka, cand) and _key_lt(cand, kb):
            return cand
        # dyadic sweep at this resolution, then refine
        lo_int = math.floor(_float_key(ka) * denom) - 2
        for j in range(lo_int, lo_int + 6 * denom):
            cand = Q(j, denom)
            if _key_lt(ka, cand) and _key_lt(cand, kb):
                return cand
        denom *= 16


@dataclass(frozen=True)
class ProjInterval:
    """Closed arc [lo, hi] of the projective circle, counterclockwise.

    Counterclockwise means increasing circle_key with wraparound:
    0 -> 1 -> INF -> -1 -> 0. Endpoints are rational slopes or INF.
    """

    lo: object
    hi: object

    def contains_slope(self, s) -> bool:
        ka, kx, kb = circle_key(self.lo), circle_key(s), circle_key(self.hi)
        if _key_le(ka, kb):
            return _key_le(ka, kx) and _key_le(kx, kb)
        return _key_le(ka, kx) or _key_le(kx, kb)

    def contains_interval(self, other: "ProjInterval") -> bool:
        base = circle_key(self.lo)

        def offset(s):
            k = circle_key(s) - base
            return k + 2 if _key_lt(k, 0) else k

        oa, ob, od = offset(other.lo), offset(other.hi), offset(self.hi)
        return _key_le(oa, ob) and _key_le(ob, od)

    def disjoint_from(self, other: "ProjInterval") -> bool:
        return not (
            self.contains_slope(other.lo)
            or self.contains_slope(other.hi)
            or other.contains_slope(self.lo)
            or other.contains_slope(self.hi)
        )

    def image(self, m: QMat) -> "ProjInterval":
        a, b = apply_slope(m, self.lo), apply_slope(m, self.hi)
        return ProjInterval(a, b) if m.det() > 0 else ProjInterval(b, a)

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


# --------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class ScalarCertificate:
    """Every generator is a scalar matrix (the group is central, abelian)."""

    def kind(self):
        return "scalar"


@dataclass(frozen=True)
class InvariantLineCertificate:
    point: ProjPoint

    def kind(self):
        return "invariant-line"


@dataclass(frozen=True)
class InvariantPairCertificate:
    points: tuple[ProjPoint, ProjPoint]

    def kind(self):
        return "invariant-pair"


@dataclass(frozen=True)
class FreePairCertificate:
    """Ping-pong witness that <x, y> is free of rank 2.

    The four headline inclusions x^{+-1}(domain_y) <= domain_x and
    y^{+-1}(domain_x) <= domain_y re-verify by exact endpoint arithmetic.
    The trap intervals prove the inclusions for *all* nonzero powers: each
    trap T satisfies g(T) <= T and g(opposite domain) <= T, with T inside the
    player's own domain, so g^k(opposite domain) <= T by induction on k.
    """

    word_x: Word
    word_y: Word
    domain_x: ProjInterval
    domain_y: ProjInterval
    traps_x: tuple[ProjInterval, ProjInterval]  # forward trap, backward trap
    traps_y: tuple[ProjInterval, ProjInterval]

    def kind(self):
        return "free-pair"


@dataclass(frozen=True)
class TitsResult:
    """Tri-state outcome: True/False with certificate, or None (undetermined)."""

    virtually_solvable: Optional[bool]
    certificate: object
    detail: str = ""


def evaluate_word(named_gens: dict, w: Word) -> QMat:
    mats = list(named_gens.values())
    n = mats[0].n if mats else 2
    out = QMat.identity(n)
    for name, exp in w:
        out = out * (named_gens[name] ** exp)
    return out


def _named(gens: Sequence[QMat], names: Optional[Sequence[str]]) -> dict:
    if names is None:
        names = [f"g{i}" for i in range(len(gens))]
    if len(names) != len(gens):
        raise ValueError("generator names do not match generators")
    return dict(zip(names, gens))


def _fixes(g: QMat, p: ProjPoint) -> bool:
    return p.apply(g) == p


def _candidate_pool(named: dict) -> list[tuple[Word, QMat]]:
    """Non-scalar elements among generators, inverses, and ordered length-2
    products.

    This pool is complete for invariant-pair candidates: if the group
    preserves a pair {p, q}, the index-<=2 subgroup fixing p and q pointwise
    is generated, up to conjugation and scalars, by the non-swapping
    generators and pairwise products of swapping ones; and if all of those
    are scalar, every non-scalar element of the group has eigendirections
    exactly {p, q}.
    """
    singles = [(Word([(n, 1)]), m) for n, m in named.items()]
    singles += [(Word([(n, -1)]), m.inverse()) for n, m in named.items()]
    items = list(singles)
    for w1, m1 in singles:
        for w2, m2 in singles:
            items.append((w1 * w2, m1 * m2))
    pool, seen = [], set()
    for w, m in items:
        if m.det() == 0 or m.is_scalar() or m in seen:
            continue
        seen.add(m)
        pool.append((w, m))
    return pool


def virtually_solvable(
    gens: Sequence[QMat],
    names: Optional[Sequence[str]] = None,
    pingpong_power_cap: int = 4096,
) -> TitsResult:
    """Decide virtual solvability of <gens> inside GL_n(Q) (full power at n=2).

    True answers carry a Scalar / InvariantLine / InvariantPair certificate,
    False answers a FreePair certificate; None is returned only when neither
    certificate kind is found within the search bounds.
    """
    named = _named(gens, names)
    mats = list(named.values())
    if any(m.det() == 0 for m in mats):
        raise ValueError("generators must be invertible")
    if all(m.is_scalar() for m in mats):
        return TitsResult(True, ScalarCertificate(), "all generators scalar")
    if mats[0].n != 2:
        return TitsResult(None, None, "undetermined (decision limited to n = 2)")

    pivot = next(m for m in mats if not m.is_scalar())
    for p in eigen_directions(pivot).points:
        if p.x.d < 0 or p.y.d < 0:
            # complex directions are fixed only together with their Galois
            # conjugates; the invariant-pair scan below reports those
            continue
        if all(_fixes(g, p) for g in mats):
            return TitsResult(True, InvariantLineCertificate(p), "common eigendirection")

    seen_pairs = set()
    for _, m in _candidate_pool(named):
        eig = eigen_directions(m)
        if len(eig.points) != 2:
            continue
        pair = frozenset(eig.points)
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        p, q = eig.points
        if all(
            (_fixes(g, p) and _fixes(g, q)) or (p.apply(g) == q and q.apply(g) == p)
            for g in mats
        ):
            return TitsResult(
                True, InvariantPairCertificate((p, q)), "invariant two-point set"
            )

    cert = pingpong_certify(gens, names, power_cap=pingpong_power_cap)
    if cert is not None:
        return TitsResult(False, cert, "free subgroup by ping-pong")
    return TitsResult(
        None,
        None,
        "undetermined: no invariant line or pair, and no free pair within bounds",
    )


# --------------------------------------------------------------------------
# ping-pong search


@dataclass(frozen=True)
class _Player:
    word: Word
    mat: QMat
    kind: str  # 'hyperbolic' | 'parabolic'
    fixed: tuple  # slopes; hyperbolic: (attracting, repelling), parabolic: (f,)


def _classify_player(word: Word, m: QMat) -> Optional[_Player]:
    if m.is_scalar() or m.det() == 0:
        return None
    t, d = m.trace(), m.det()
    disc = t * t - 4 * d
    if disc < 0:
        return None  # elliptic: no real fixed points
    eig = eigen_directions(m)
    if disc == 0:
        return _Player(word, m, "parabolic", (slope_of_point(eig.points[0]),))
    # |lam1| vs |lam2| exactly, via squares (both eigenvalues are real here)
    lam1, lam2 = eig.eigenvalues
    diff = lam1 * lam1 - lam2 * lam2
    if diff.is_zero():
        return None  # equal modulus: finite order in PGL_2, useless for ping-pong
    order = (0, 1) if diff.sign() > 0 else (1, 0)
    return _Player(
        word,
        m,
        "hyperbolic",
        (slope_of_point(eig.points[order[0]]), slope_of_point(eig.points[order[1]])),
    )


def _short_words(named: dict, max_len: int) -> list[tuple[Word, QMat]]:
    n = next(iter(named.values())).n
    letters = []
    for name in named:
        letters.append((Word([(name, 1)]), named[name]))
        letters.append((Word([(name, -1)]), named[name].inverse()))
    out, seen = [], set()
    frontier = [(Word(), QMat.identity(n))]
    for _ in range(max_len):
        nxt = []
        for w, m in frontier:
            for lw, lm in letters:
                w2 = w * lw
                if len(w2) != len(w) + 1:
                    continue  # cancellation: not a reduced extension
                m2 = m * lm
                nxt.append((w2, m2))
                if m2 not in seen:
                    seen.add(m2)
                    out.append((w2, m2))
        frontier = nxt
    return out


def _fixed_slopes_disjoint(a: _Player, b: _Player) -> bool:
    return not any(slopes_equal(s, t) for s in a.fixed for t in b.fixed)


def _sorted_fixed_points(x: _Player, y: _Player) -> Optional[list]:
    """Fixed points of both players in circle order, or None when the blocks
    interleave (no pair of disjoint arcs can then contain them)."""
    pts = []
    for owner, pl in enumerate((x, y)):
        for s in pl.fixed:
            pts.append((circle_key(s), owner))
    pts.sort(key=lambda rec: _float_key(rec[0]))
    for i in range(1, len(pts)):  # exact repair of float-guided sort
        j = i
        while j > 0 and _key_lt(pts[j][0], pts[j - 1][0]):
            pts[j], pts[j - 1] = pts[j - 1], pts[j]
            j -= 1
    owners = [rec[1] for rec in pts]
    changes = sum(1 for i in range(len(owners)) if owners[i] != owners[i - 1])
    return pts if changes <= 2 else None


def _unwrapped_key(pts: list, index: int):
    m = len(pts)
    return pts[index % m][0] + (2 if index >= m else 0)


def _block_cuts(pts: list) -> Optional[tuple]:
    """The two rational separator keys between the owner blocks, unwrapped."""
    m = len(pts)
    cuts = []
    for i in range(m):
        if pts[i][1] == pts[(i + 1) % m][1]:
            continue
        cuts.append((i, rational_key_between(pts[i][0], _unwrapped_key(pts, i + 1))))
    return tuple(cuts) if len(cuts) == 2 else None


def _isolate(domain: ProjInterval, target, avoid: list) -> Optional[ProjInterval]:
    """Rational-endpoint sub-interval of ``domain`` whose interior contains
    ``target`` and which excludes every slope in ``avoid``."""
    if not domain.contains_slope(target):
        return None
    base = circle_key(domain.lo)

    def offset(s):
        k = circle_key(s) - base
        return k + 2 if _key_lt(k, 0) else k

    of = offset(target)
    lo_off, hi_off = Q(0), offset(domain.hi)
    for s in avoid:
        if not domain.contains_slope(s):
            continue
        oa = offset(s)
        if _key_lt(oa, of) and _key_lt(lo_off, oa):
            lo_off = oa
        if _key_lt(of, oa) and _key_lt(oa, hi_off):
            hi_off = oa
    if not (_key_lt(lo_off, of) and _key_lt(of, hi_off)):
        return None
    lo_key = base + rational_key_between(lo_off, of)
    hi_key = base + rational_key_between(of, hi_off)
    return ProjInterval(slope_from_key(lo_key % 2), slope_from_key(hi_key % 2))


def _trap_pair(
    player: _Player, domain: ProjInterval, opposite: ProjInterval, power_cap: int
) -> Optional[tuple[int, ProjInterval, ProjInterval]]:
    """Find a power N and traps proving player^(kN)(opposite) <= domain, k != 0.

    The forward trap T+ satisfies g^N(T+) <= T+ and g^N(opposite) <= T+, the
    backward trap symmetrically for g^-N; both traps sit inside the domain,
    so the inclusion for every power follows by induction.
    """
    m = player.mat
    if player.kind == "hyperbolic":
        att, rep = player.fixed
        candidates = [(_isolate(domain, att, [rep]), _isolate(domain, rep, [att]))]
    else:
        # parabolic: one-sided intervals at the (rational) fixed point; the
        # direction of motion decides which side traps which sign
        (f,) = player.fixed
        if not domain.contains_slope(f):
            return None
        lo_side = ProjInterval(domain.lo, f)
        hi_side = ProjInterval(f, domain.hi)
        candidates = [(hi_side, lo_side), (lo_side, hi_side)]
    power = 1
    while power <= power_cap:
        mp = m ** power
        mq = mp.inverse()
        for trap_fwd, trap_bwd in candidates:
            if trap_fwd is None or trap_bwd is None:
                continue
            if (
                trap_fwd.contains_interval(trap_fwd.image(mp))
                and trap_fwd.contains_interval(opposite.image(mp))
                and trap_bwd.contains_interval(trap_bwd.image(mq))
                and trap_bwd.contains_interval(opposite.image(mq))
            ):
                return power, trap_fwd, trap_bwd
        power *= 2
    return None


def _try_pair(x: _Player, y: _Player, pts: list, power_cap: int):
    cuts = _block_cuts(pts)
    if cuts is None:
        return None
    (i1, k1), (i2, k2) = cuts
    # block A = pts[i1+1 .. i2]; block B = the rest (cyclically contiguous).
    # Each cut is shaved into two nearby rationals so the domains are
    # disjoint closed intervals with the blocks strictly inside.
    owner_a = pts[(i1 + 1) % len(pts)][1]
    k1b = rational_key_between(k1, _unwrapped_key(pts, i1 + 1))
    k2b = rational_key_between(k2, _unwrapped_key(pts, i2 + 1))
    dom_a = ProjInterval(slope_from_key(k1b % 2), slope_from_key(k2 % 2))
    dom_b = ProjInterval(slope_from_key(k2b % 2), slope_from_key(k1 % 2))
    domain_x, domain_y = (dom_a, dom_b) if owner_a == 0 else (dom_b, dom_a)
    if not domain_x.disjoint_from(domain_y):
        return None
    fx = _trap_pair(x, domain_x, domain_y, power_cap)
    if fx is None:
        return None
    fy = _trap_pair(y, domain_y, domain_x, power_cap)
    if fy is None:
        return None
    nx, tx_f, tx_b = fx
    ny, ty_f, ty_b = fy
    return FreePairCertificate(
        x.word ** nx, y.word ** ny, domain_x, domain_y, (tx_f, tx_b), (ty_f, ty_b)
    )


def pingpong_certify(
    gens: Sequence[QMat],
    names: Optional[Sequence[str]] = None,
    power_cap: int = 4096,
    max_word_len: int = 3,
) -> Optional[FreePairCertificate]:
    """Search short words for a certified free pair; None when none found.

    Players are short words with real fixed points and infinite order whose
    fixed-point sets are disjoint and unlinked on the circle; powers are
    escalated until the exact trap inclusions hold. The search order is
    deterministic, so the returned certificate is reproducible.
    """
    named = _named(gens, names)
    if not named or next(iter(named.values())).n != 2:
        return None
    players = []
    for w, m in _short_words(named, max_word_len):
        pl = _classify_player(w, m)
        if pl is not None:
            players.append(pl)
    for i in range(len(players)):
        for j in range(len(players)):
            if i == j:
                continue
            x, y = players[i], players[j]
            if not _fixed_slopes_disjoint(x, y):
                continue
            pts = _sorted_fixed_points(x, y)
            if pts is None:
                continue
            cert = _try_pair(x, y, pts, power_cap)
            if cert is not None:
                return cert
    return None


def verify_free_pair(
    gens: Sequence[QMat],
    cert: FreePairCertificate,
    names: Optional[Sequence[str]] = None,
) -> bool:
    """Re-verify a free-pair certificate from scratch, exactly.

    Checks the four headline inclusions, disjointness, infinite order of the
    players, and the trap conditions that extend the inclusions to all
    nonzero powers.
    """
    named = _named(gens, names)
    mx = evaluate_word(named, cert.word_x)
    my = evaluate_word(named, cert.word_y)
    x1, x2 = cert.domain_x, cert.domain_y
    if not x1.disjoint_from(x2):
        return False
    for m, src, dst in (
        (mx, x2, x1),
        (mx.inverse(), x2, x1),
        (my, x1, x2),
        (my.inverse(), x1, x2),
    ):
        if not dst.contains_interval(src.image(m)):
            return False
    for m, (tf, tb), dom, opp in (
        (mx, cert.traps_x, x1, x2),
        (my, cert.traps_y, x2, x1),
    ):
        mi = m.inverse()
        if not (dom.contains_interval(tf) and dom.contains_interval(tb)):
            return False
        if not (tf.contains_interval(tf.image(m)) and tf.contains_interval(opp.image(m))):
            return False
        if not (tb.contains_interval(tb.image(mi)) and tb.contains_interval(opp.image(mi))):
            return False
        if _classify_player(Word(), m) is None:
            return False  # finite order in PGL_2: not a free generator
    return True


def verify_certificate(
    gens: Sequence[QMat], cert, names: Optional[Sequence[str]] = None
) -> bool:
    """Exact re-verification for any Tits certificate."""
    mats = list(gens)
    if isinstance(cert, ScalarCertificate):
        return all(m.is_scalar() for m in mats)
    if isinstance(cert, InvariantLineCertificate):
        return all(_fixes(g, cert.point) for g in mats)
    if isinstance(cert, InvariantPairCertificate):
        p, q = cert.points
        return all(
            (_fixes(g, p) and _fixes(g, q)) or (p.apply(g) == q and q.apply(g) == p)
            for g in mats
        )
    if isinstance(cert, FreePairCertificate):
        return verify_free_pair(gens, cert, names)
    return False


# --------------------------------------------------------------------------
# closure description


@dataclass(frozen=True)
class ClosureDescription:
    """Shape of the closure of a triangularizable-over-Q matrix group.

    status: 'triangular', 'not available', or 'nonamenable'. In the
    triangular case the group is conjugated (by ``conjugator``) into upper
    triangular form; ``diag_kind`` flags the multiplicative group generated
    by the absolute top-left entries as trivial / cyclic (with generator) /
    dense, and ``unipotent_kind`` flags the additive closure of the
    off-diagonal orbit as trivial / discrete (with generator) / dense.
    """

    status: str
    conjugator: Optional[QMat] = None
    diag_kind: str = ""
    diag_generator: Optional[Q] = None
    unipotent_kind: str = ""
    unipotent_generator: Optional[Q] = None
    window: int = 8
    orbit_sample: tuple = ()
    detail: str = ""


def _prime_exponents(x: Q) -> dict:
    out = {}
    for value, sign in ((abs(x.numerator), 1), (x.denominator, -1)):
        p = 2
        while p * p <= value:
            while value % p == 0:
                out[p] = out.get(p, 0) + sign
                value //= p
            p += 1 if p == 2 else 2
        if value > 1:
            out[value] = out.get(value, 0) + sign
    return {p: e for p, e in out.items() if e}


def _multiplicative_group_shape(values: list[Q]) -> tuple[str, Optional[Q]]:
    """Classify the subgroup of the positive reals generated by positive
    rationals: trivial, infinite cyclic (with its generator > 1), or dense.

    A finitely generated subgroup of (R+, *) is discrete iff cyclic; for
    rationals this is decided exactly on prime exponent vectors.
    """
    vectors, primes = [], set()
    for v in values:
        if v == 1:
            continue
        exp = _prime_exponents(v)
        primes.update(exp)
        vectors.append(exp)
    if not vectors:
        return "trivial", None
    primes = sorted(primes)
    rows = [[vec.get(p, 0) for p in primes] for vec in vectors]
    work = [row[:] for row in rows]
    rank = 0
    for c in range(len(primes)):
        pivot = next((i for i in range(rank, len(work)) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and work[i][c] != 0:
                a, b = work[i][c], work[rank][c]
                g = gcd(a, b)
                work[i] = [u * (b // g) - v * (a // g) for u, v in zip(work[i], work[rank])]
        rank += 1
    if rank >= 2:
        return "dense", None
    # rank 1: every exponent vector is an integer multiple of one primitive
    primitive, mults = None, []
    for row in rows:
        content = 0
        for xv in row:
            content = gcd(content, abs(xv))
        base = [xv // content for xv in row]
        lead = next(i for i, xv in enumerate(base) if xv)
        if base[lead] < 0:
            base = [-xv for xv in base]
        if primitive is None:
            primitive = base
        signed = row[lead] // primitive[lead]
        mults.append(signed)
    g = 0
    for mval in mults:
        g = gcd(g, abs(mval))
    generator = Q(1)
    for p, e in zip(primes, primitive):
        generator *= Q(p) ** (e * g)
    if generator < 1:
        generator = 1 / generator
    return "cyclic", generator


def _additive_group_generator(values: list[Q]) -> Q:
    """gcd of a finite set of rationals (generator of the group they span)."""
    l = 1
    for v in values:
        l = lcm(l, v.denominator)
    g = 0
    for v in values:
        g = gcd(g, int(v * l))
    return Q(g, l)


def closure_describe(
    gens: Sequence[QMat], names: Optional[Sequence[str]] = None, window: int = 8
) -> ClosureDescription:
    """Describe the closure of <gens> in GL_2(R) when it is triangularizable.

    The density flag for the unipotent part is exact: with a nonzero
    off-diagonal value present, its orbit under conjugation by the diagonal
    parts has unbounded denominators iff some diagonal ratio has absolute
    value != 1 (the reported orbit sample uses the stated window).
    """
    named = _named(gens, names)
    mats = list(named.values())
    result = virtually_solvable(gens, names)
    if result.virtually_solvable is False:
        return ClosureDescription(
            status="nonamenable", detail="full or large -- see coarse density"
        )
    if result.virtually_solvable is None:
        return ClosureDescription(status="not available", detail=result.detail)
    cert = result.certificate
    if isinstance(cert, ScalarCertificate):
        conj = QMat.identity(mats[0].n if mats else 2)
        tri = list(mats)
    elif isinstance(cert, InvariantLineCertificate) and cert.point.is_rational():
        p = cert.point
        px, py = p.x.a, p.y.a
        conj = QMat([[px, 0], [py, 1]]) if px != 0 else QMat([[0, 1], [1, 0]])
        conj_inv = conj.inverse()
        tri = [conj_inv * g * conj for g in mats]
    else:
        return ClosureDescription(
            status="not available",
            detail="no rational invariant line (not triangularizable over Q)",
        )
    for t in tri:
        assert t.rows[1][0] == 0, "conjugation did not triangularize"
    diag_kind, diag_gen = _multiplicative_group_shape([abs(t.rows[0][0]) for t in tri])
    # off-diagonal data from short words, conjugated by the diagonal ratios
    pool = list(tri)
    pool += [a * b for a in tri for b in tri]
    pool += [a * b * a.inverse() * b.inverse() for a in tri for b in tri]
    unip_values = []
    for t in pool:
        a, b, d = t.rows[0][0], t.rows[0][1], t.rows[1][1]
        if a == d and b != 0:
            unip_values.append(b / a)
    ratios = [abs(t.rows[0][0] / t.rows[1][1]) for t in tri]
    scaling = next((r for r in ratios if r != 1), None)
    if not unip_values:
        unip_kind, unip_gen, sample = "trivial", None, ()
    elif scaling is not None:
        x = unip_values[0]
        unip_kind, unip_gen = "dense", None
        sample = tuple(x * scaling ** k for k in range(-window, window + 1))
    else:
        unip_kind = "discrete"
        unip_gen = _additive_group_generator(unip_values)
        sample = tuple(unip_values[: 2 * window + 1])
    return ClosureDescription(
        status="triangular",
        conjugator=conj,
        diag_kind=diag_kind,
        diag_generator=diag_gen,
        unipotent_kind=unip_kind,
        unipotent_generator=unip_gen,
        window=window,
        orbit_sample=sample,
        detail="closure = {diagonal value group} x {unipotent part} up to conjugation",
    )


# --------------------------------------------------------------------------
# coarse density


@dataclass(frozen=True)
class CoarseDensityReport:
    verdict: str  # 'coarsely-dense' | 'not-coarsely-dense' | 'undetermined'
    method: str
    detail: str = ""
    sampled: bool = False
    evidence: tuple = ()


def _finite_closure_size(mats: list[QMat], cap: int = 400) -> Optional[int]:
    seen = {QMat.identity(mats[0].n)}
    frontier = list(seen)
    gens = mats + [m.inverse() for m in mats]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = m * g
                if prod not in seen:
                    if len(seen) >= cap:
                        return None
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return len(seen)


def _mu(m: QMat) -> float:
    """Normalized Cartan coordinate: half the log ratio of singular values."""
    mtm = m.transpose() * m
    t = float(mtm.trace())
    d = float(mtm.det())
    disc = max(t * t - 4 * d, 0.0)
    s1sq = (t + math.sqrt(disc)) / 2
    return 0.5 * (math.log(s1sq) - 0.5 * math.log(d))


def _ball_mu_values(mats: list[QMat], radius: int, cap: int = 200000) -> list[float]:
    seen = {QMat.identity(mats[0].n)}
    frontier = list(seen)
    gens = mats + [m.inverse() for m in mats]
    for _ in range(radius):
        nxt = []
        for m in frontier:
            for g in gens:
                prod = m * g
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
                    if len(seen) > cap:
                        raise RuntimeError("sampling ball too large")
        frontier = nxt
    return sorted(_mu(m) for m in seen)


def coarse_density(
    gens: Sequence[QMat],
    names: Optional[Sequence[str]] = None,
    radius: int = 5,
    mesh: float = 0.5,
) -> CoarseDensityReport:
    """Is <gens> at finite Hausdorff distance from all of SL_2(R)?

    Exact fast paths: a finite group is never coarsely dense; a
    triangularizable group is coarsely dense iff its closure has the
    {nontrivial diagonal value group} x {dense unipotent} shape (then it is
    cocompact in the upper triangular subgroup, itself cocompact in
    SL_2(R)); every other virtually solvable closure lies in a conjugate of
    the triangular subgroup or of a torus normalizer and is never cocompact.
    The nonsolvable case reports sampled evidence: normalized Cartan values
    of a word ball hitting every mesh cell of [0, c*radius].
    """
    named = _named(gens, names)
    mats = list(named.values())
    if not mats:
        return CoarseDensityReport("not-coarsely-dense", "trivial-group")
    size = _finite_closure_size(mats)
    if size is not None:
        return CoarseDensityReport(
            "not-coarsely-dense", "finite-group", f"group is finite of order {size}"
        )
    result = virtually_solvable(gens, names)
    if result.virtually_solvable is True:
        desc = closure_describe(gens, names)
        if (
            desc.status == "triangular"
            and desc.diag_kind in ("cyclic", "dense")
            and desc.unipotent_kind == "dense"
        ):
            return CoarseDensityReport(
                "coarsely-dense",
                "exact-closure-shape",
                "closure is cocompact in the upper triangular subgroup of SL_2(R)",
            )
        return CoarseDensityReport(
            "not-coarsely-dense",
            "exact-solvable-shape",
            "solvable closure is not cocompact in SL_2(R)",
        )
    if result.virtually_solvable is None:
        return CoarseDensityReport("undetermined", "no-certificate", result.detail)
    try:
        values = _ball_mu_values(mats, radius)
    except RuntimeError as exc:
        return CoarseDensityReport("undetermined", "sampling-overflow", str(exc))
    c = max(_mu(m) for m in mats)
    if c <= 0:
        return CoarseDensityReport(
            "undetermined", "sampled-cartan", "all generators have trivial Cartan value"
        )
    reach = c * radius
    cells = max(1, int(reach / mesh))
    missed = [
        i for i in range(cells)
        if not any(i * mesh <= v <= (i + 1) * mesh for v in values)
    ]
    if not missed:
        return CoarseDensityReport(
            "coarsely-dense",
            "sampled-cartan",
            f"radius-{radius} ball hits all {cells} Cartan cells of [0, {reach:.2f}]",
            sampled=True,
            evidence=(radius, mesh, cells),
        )
    return CoarseDensityReport(
        "undetermined",
        "sampled-cartan",
        f"Cartan cells {missed} not hit at radius {radius}",
        sampled=True,
        evidence=(radius, mesh, cells),
    )


def cartan_hausdorff_samples(
    gens_a: Sequence[QMat], gens_b: Sequence[QMat], radii=(4, 6, 8)
) -> list[tuple[int, float]]:
    """Sampled symmetric Hausdorff distances between normalized Cartan value
    sets of word balls; evidence only, clearly labeled sampled by callers."""
    out = []
    for r in radii:
        try:
            va = _ball_mu_values(list(gens_a), r)
            vb = _ball_mu_values(list(gens_b), r)
        except RuntimeError:
            break

        def directed(xs, ys):
            return max(min(abs(x - y) for y in ys) for x in xs)

        out.append((r, max(directed(va, vb), directed(vb, va))))
    return out
