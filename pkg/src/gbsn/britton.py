"""Britton normal forms, the word problem, geodesics and distortion.

Supported specs have a single vertex (any number of loops, any rank): the
fundamental group is then an HNN extension of Z^n with one stable letter per
loop, and the classical normal form theorem applies verbatim. An element is
written

    g0 t1^e1 g1 t2^e2 g2 ... tk^ek gk

with integer vectors g_i and stable letters t_i. The canonical form is
Britton-reduced (no pinchable subword t^-1 x t with x in the alpha-image, or
t x t^-1 with x in the omega-image) and, for i >= 1, g_i is the canonical
Hermite residue modulo the image lattice attached to the sign of t_i; excess
lattice parts are pushed to the left and absorbed by g0. Two words represent
the same group element exactly when their canonical forms are equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .gog import GoGSpec, ensure_valid, vertex_letters
from .linalg import QMat, ZMat, hermite_normal_form, lattice_residue
from .words import Word


class UnsupportedSpecError(ValueError):
    pass


@dataclass(frozen=True)
class NormalForm:
    """Canonical alternating form; structural equality decides the word problem."""

    head: tuple  # vector g0
    tail: tuple  # ((edge_name, sign, vector), ...)

    def is_trivial(self) -> bool:
        return not self.tail and all(c == 0 for c in self.head)

    def stable_letter_count(self) -> int:
        return len(self.tail)

    def __str__(self):
        parts = []
        if any(self.head) or not self.tail:
            parts.append("(" + ",".join(str(c) for c in self.head) + ")")
        for name, sign, vec in self.tail:
            parts.append(name if sign > 0 else f"{name}^-1")
            if any(vec):
                parts.append("(" + ",".join(str(c) for c in vec) + ")")
        return " ".join(parts) if parts else "(0)"


@dataclass(frozen=True)
class _LoopData:
    name: str
    mat: QMat        # omega * alpha^-1, the action x -> t^-1 x t
    inv: QMat
    hnf_alpha: ZMat  # column HNF of the alpha-image lattice
    hnf_omega: ZMat


class _Engine:
    """Per-spec tables for normal-form arithmetic (single-vertex specs)."""

    def __init__(self, spec: GoGSpec):
        ensure_valid(spec)
        if len(spec.vertices) != 1:
            raise UnsupportedSpecError(
                "normal forms are implemented for one-vertex graphs of groups"
            )
        self.spec = spec
        self.rank = spec.rank
        vertex = spec.vertices[0]
        self.vletters = {name: i for i, name in enumerate(vertex_letters(spec)[vertex])}
        self.loops = {}
        for e in spec.loop_edges():
            m = e.omega.to_qmat() * e.alpha.to_qmat().inverse()
            self.loops[e.name] = _LoopData(
                e.name, m, m.inverse(), hermite_normal_form(e.alpha), hermite_normal_form(e.omega)
            )
        self.zero = (0,) * self.rank

    def int_apply(self, m: QMat, vec) -> tuple:
        out = m.apply(vec)
        assert all(c.denominator == 1 for c in out)
        return tuple(int(c) for c in out)

    def pinch_lattice(self, loop: _LoopData, sign: int) -> ZMat:
        # t^-1 x t pinches for x in the alpha-image; t x t^-1 for the omega-image
        return loop.hnf_alpha if sign < 0 else loop.hnf_omega

    def pinch_result(self, loop: _LoopData, sign: int, vec) -> tuple:
        return self.int_apply(loop.mat if sign < 0 else loop.inv, vec)


@lru_cache(maxsize=None)
def _engine(spec: GoGSpec) -> _Engine:
    return _Engine(spec)


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def britton_reduce(spec: GoGSpec, w: Word) -> NormalForm:
    """Canonical normal form of the group element spelled by ``w``."""
    eng = _engine(spec)
    head = list(eng.zero)
    tail: list[list] = []  # [name, sign, vector-list]

    def last_vec():
        return tail[-1][2] if tail else head

    for name, step in w.single_letters():
        if name in eng.vletters:
            last_vec()[eng.vletters[name]] += step
        elif name in eng.loops:
            loop = eng.loops[name]
            if tail and tail[-1][0] == name and tail[-1][1] == -step:
                vec = tuple(tail[-1][2])
                lattice = eng.pinch_lattice(loop, -step)
                residue, _ = lattice_residue(lattice, vec)
                if not any(residue):
                    pinched = eng.pinch_result(loop, -step, vec)
                    tail.pop()
                    prev = last_vec()
                    for i, c in enumerate(pinched):
                        prev[i] += c
                    continue
            tail.append([name, step, list(eng.zero)])
        else:
            raise KeyError(f"unknown letter {name!r}")
    # transversal pass: reduce every tail vector modulo the lattice attached
    # to its own letter, pushing lattice parts to the left
    for i in range(len(tail) - 1, -1, -1):
        name, sign, vec = tail[i]
        loop = eng.loops[name]
        lattice = eng.pinch_lattice(loop, sign)
        residue, lat = lattice_residue(lattice, tuple(vec))
        if any(lat):
            tail[i][2] = list(residue)
            pushed = eng.pinch_result(loop, sign, lat)
            target = tail[i - 1][2] if i > 0 else head
            for j, c in enumerate(pushed):
                target[j] += c
    return NormalForm(tuple(head), tuple((n, s, tuple(v)) for n, s, v in tail))


def is_identity(spec: GoGSpec, w: Word) -> bool:
    """Word problem: does ``w`` represent the identity?"""
    return britton_reduce(spec, w).is_trivial()


def _nf_mul_vertex(eng: _Engine, nf: NormalForm, index: int, step: int) -> NormalForm:
    if not nf.tail:
        head = list(nf.head)
        head[index] += step
        return NormalForm(tuple(head), ())
    tail = [list(entry) for entry in nf.tail]
    vec = list(tail[-1][2])
    vec[index] += step
    tail[-1][2] = tuple(vec)
    head = list(nf.head)
    # re-reduce from the last entry leftwards (adding the vertex generator may
    # break the residue condition; pushes cascade toward the head)
    for i in range(len(tail) - 1, -1, -1):
        name, sign, v = tail[i]
        loop = eng.loops[name]
        residue, lat = lattice_residue(eng.pinch_lattice(loop, sign), tuple(v))
        if not any(lat):
            break
        tail[i][2] = tuple(residue)
        pushed = eng.pinch_result(loop, sign, lat)
        if i > 0:
            tail[i - 1][2] = _vec_add(tail[i - 1][2], pushed)
        else:
            head = list(_vec_add(tuple(head), pushed))
    return NormalForm(tuple(head), tuple((n, s, tuple(v)) for n, s, v in tail))


def _nf_mul_stable(eng: _Engine, nf: NormalForm, name: str, step: int) -> NormalForm:
    loop = eng.loops[name]
    if nf.tail:
        last_name, last_sign, last_vec = nf.tail[-1]
        if last_name == name and last_sign == -step and not any(last_vec):
            # pinch: the residue between the opposite letters is zero
            return NormalForm(nf.head, nf.tail[:-1])
    return NormalForm(nf.head, nf.tail + ((name, step, eng.zero),))


def _nf_mul_letter(eng: _Engine, nf: NormalForm, name: str, step: int) -> NormalForm:
    if name in eng.vletters:
        return _nf_mul_vertex(eng, nf, eng.vletters[name], step)
    return _nf_mul_stable(eng, nf, name, step)


def nf_multiply(spec: GoGSpec, nf: NormalForm, w: Word) -> NormalForm:
    """Right-multiply a canonical form by a word, staying canonical."""
    eng = _engine(spec)
    for name, step in w.single_letters():
        if name not in eng.vletters and name not in eng.loops:
            raise KeyError(f"unknown letter {name!r}")
        nf = _nf_mul_letter(eng, nf, name, step)
    return nf


class _FastOps:
    """Normal-form arithmetic on flat integer tuples, for BFS throughput.

    State layout: (g0[0..n-1], then per entry: loop_index, sign, vec[0..n-1]).
    All tables (Hermite columns, push matrices with common denominator) are
    precomputed so the per-letter multiply is pure integer work.
    """

    def __init__(self, eng: _Engine):
        self.eng = eng
        self.n = eng.rank
        self.loop_names = sorted(eng.loops)
        self.loop_index = {name: i for i, name in enumerate(self.loop_names)}
        # per (loop, sign < 0): alpha tables; sign > 0: omega tables
        self.tables = {}
        for idx, name in enumerate(self.loop_names):
            loop = eng.loops[name]
            for sign in (-1, 1):
                hnf = eng.pinch_lattice(loop, sign)
                cols = tuple(tuple(hnf.rows[r][c] for r in range(self.n)) for c in range(self.n))
                mat = loop.mat if sign < 0 else loop.inv
                den = 1
                for row in mat.rows:
                    for x in row:
                        den = den * x.denominator // math.gcd(den, x.denominator)
                push = tuple(
                    tuple(int(x * den) for x in row) for row in mat.rows
                )
                self.tables[(idx, sign)] = (cols, push, den)

    def to_flat(self, nf: NormalForm) -> tuple:
        flat = list(nf.head)
        for name, sign, vec in nf.tail:
            flat.append(self.loop_index[name])
            flat.append(sign)
            flat.extend(vec)
        return tuple(flat)

    def from_flat(self, state: tuple) -> NormalForm:
        n = self.n
        head = state[:n]
        tail = []
        pos = n
        while pos < len(state):
            tail.append(
                (self.loop_names[state[pos]], state[pos + 1], state[pos + 2 : pos + 2 + n])
            )
            pos += n + 2
        return NormalForm(head, tuple(tail))

    def identity(self) -> tuple:
        return (0,) * self.n

    def generator_steps(self):
        """(kind, index, step) triples in the canonical expansion order."""
        steps = []
        for i in range(len(self.eng.vletters)):
            steps.append((0, i, 1))
            steps.append((0, i, -1))
        for i in range(len(self.loop_names)):
            steps.append((1, i, 1))
            steps.append((1, i, -1))
        return steps

    def mul(self, state: tuple, kind: int, index: int, step: int) -> tuple:
        n = self.n
        size = n + 2
        if kind == 1:
            pos = len(state) - size
            if (
                pos >= n
                and state[pos] == index
                and state[pos + 1] == -step
                and not any(state[pos + 2 :])
            ):
                return state[:pos]
            return state + (index, step) + (0,) * n
        # vertex letter: add to the trailing vector, then cascade residues left
        s = list(state)
        s[len(s) - n + index] += step
        pos = len(s) - size
        while pos >= n:
            cols, push, den = self.tables[(s[pos], s[pos + 1])]
            vecpos = pos + 2
            moved = False
            lat = [0] * n
            for i in range(n):
                di = cols[i][i]
                q = s[vecpos + i] // di
                if q:
                    moved = True
                    col = cols[i]
                    for r in range(i, n):
                        delta = q * col[r]
                        s[vecpos + r] -= delta
                        lat[r] += delta
            if not moved:
                break
            target = pos - n if pos >= n + size else 0
            for j in range(n):
                acc = 0
                row = push[j]
                for k in range(n):
                    acc += row[k] * lat[k]
                s[target + j] += acc // den
            pos -= size
        return tuple(s)


@lru_cache(maxsize=None)
def _fast_ops(spec: GoGSpec) -> _FastOps:
    return _FastOps(_engine(spec))


class GeodesicOracle:
    """Exact word-metric distances by breadth-first search on canonical forms.

    The generating set is every vertex letter and every stable letter with
    exponent +-1. A forward ball around the identity is grown once and reused;
    distances beyond it are resolved by a backward search from the target that
    meets the forward ball (still exact: any geodesic of length d <= F + B
    passes through the forward ball at depth F).
    """

    def __init__(self, spec: GoGSpec, forward_cap: int = 8):
        self.ops = _fast_ops(spec)
        self.spec = spec
        self.forward_cap = forward_cap
        self.steps = self.ops.generator_steps()
        identity = self.ops.identity()
        self.dist: dict[tuple, int] = {identity: 0}
        self.frontier = [identity]
        self.depth = 0

    def _grow_forward(self, depth: int):
        mul = self.ops.mul
        dist = self.dist
        while self.depth < depth and self.frontier:
            nxt = []
            d = self.depth + 1
            for state in self.frontier:
                for kind, index, step in self.steps:
                    child = mul(state, kind, index, step)
                    if child not in dist:
                        dist[child] = d
                        nxt.append(child)
            self.frontier = nxt
            self.depth = d

    def distance(self, target: NormalForm, max_radius: int) -> Optional[int]:
        """Exact distance from the identity, or None when it exceeds max_radius."""
        flat_target = self.ops.to_flat(target)
        self._grow_forward(min(max_radius, self.forward_cap))
        if flat_target in self.dist:
            d = self.dist[flat_target]
            return d if d <= max_radius else None
        if self.depth >= max_radius:
            return None
        # backward search from the target; state x at depth l satisfies
        # d(x, target) = l, so a forward-ball hit gives d <= dist[x] + l
        mul = self.ops.mul
        dist = self.dist
        best: Optional[int] = None
        seen = {flat_target}
        frontier = [flat_target]
        level = 0
        limit = max_radius - self.depth
        while frontier and level < limit:
            level += 1
            if best is not None and level + 1 > best:
                break
            nxt = []
            for state in frontier:
                for kind, index, step in self.steps:
                    child = mul(state, kind, index, step)
                    if child in seen:
                        continue
                    seen.add(child)
                    d = dist.get(child)
                    if d is not None:
                        total = d + level
                        if best is None or total < best:
                            best = total
                    nxt.append(child)
            frontier = nxt
        if best is not None and best <= max_radius:
            return best
        return None


def geodesic_length(spec: GoGSpec, w: Word, max_radius: int):
    """Exact geodesic length of ``w``, or the string 'exceeds radius'.

    Never an approximation: the answer is the true distance in the word
    metric for the standard generating set, or an explicit refusal.
    """
    target = britton_reduce(spec, w)
    if target.is_trivial():
        return 0
    oracle = GeodesicOracle(spec, forward_cap=min(max_radius, 8))
    d = oracle.distance(target, max_radius)
    return d if d is not None else "exceeds radius"


@dataclass(frozen=True)
class ProfileEntry:
    power: int
    upper_bound: int
    exact_length: Optional[int]
    ratio_to_log: Optional[float]


@dataclass(frozen=True)
class DistortionProfile:
    element: Word
    entries: tuple[ProfileEntry, ...]
    max_ratio: Optional[float]
    doubling_letter: Optional[str]
    doubling_factor: Optional[int]
    analytic_constant: float
    note: str = field(default="", compare=False)

    def analytic_lower_bound(self, m: int) -> float:
        """Length lower bound log(m)/log(C); C bounds entry growth per letter."""
        if m < 2:
            return 0.0
        return math.log(m) / math.log(self.analytic_constant)


def _vertex_vector(eng: _Engine, element: Word) -> tuple:
    vec = list(eng.zero)
    for name, exp in element:
        if name not in eng.vletters:
            raise ValueError(f"{name!r} is not a vertex letter")
        vec[eng.vletters[name]] += exp
    return tuple(vec)


def _find_doubler(eng: _Engine, vec: tuple):
    """Stable letter whose conjugation scales ``vec`` by an integer >= 2."""
    best = None
    for name in sorted(eng.loops):
        loop = eng.loops[name]
        for sign, mat in ((1, loop.mat), (-1, loop.inv)):
            image = mat.apply(vec)
            ratios = {image[i] / vec[i] for i in range(len(vec)) if vec[i] != 0}
            if len(ratios) != 1:
                continue
            lam = ratios.pop()
            if lam.denominator != 1 or lam < 2:
                continue
            if any(image[i] != 0 for i in range(len(vec)) if vec[i] == 0):
                continue
            residue, _ = lattice_residue(eng.pinch_lattice(loop, -sign), vec)
            if any(residue):
                continue
            lam = int(lam)
            if best is None or lam > best[2]:
                best = (name, sign, lam)
    return best


def distortion_profile(
    spec: GoGSpec,
    element: Word,
    powers,
    bfs_cap: int = 15,
) -> DistortionProfile:
    """Word-length growth of powers m*v of a vertex-group element.

    Upper bounds come from greedy base-lambda rewriting through a stable
    letter that scales v by an integer lambda >= 2 (cost 2 per digit), when
    one exists; exact lengths from BFS whenever the upper bound is within
    ``bfs_cap``. Ratios use the exact length when available, else the upper
    bound; the reported max ratio over the window estimates the limsup of
    |mv| / log m. The analytic lower bound is attached via
    ``analytic_lower_bound`` and is not BFS-verified.
    """
    eng = _engine(spec)
    vec = _vertex_vector(eng, element)
    if not any(vec):
        raise ValueError("element must be a nonzero vertex-group element")
    doubler = _find_doubler(eng, vec)
    memo: dict[int, Word] = {}

    def direct(m: int) -> Word:
        return Word((name, m * vec[i]) for name, i in eng.vletters.items())

    def spell(m: int) -> Word:
        """Cheapest known spelling of m*v: direct, or recurse through the
        scaling letter with a balanced last digit."""
        if m < 0:
            return spell(-m).inverse()
        if m in memo:
            return memo[m]
        best = direct(m)
        if doubler is not None and m >= doubler[2]:
            name, sign, lam = doubler
            q0, r0 = divmod(m, lam)
            branches = [(q0, r0)]
            if r0 > 0 and q0 + 1 < m:
                branches.append((q0 + 1, r0 - lam))
            for q, r in branches:
                cand = Word([(name, -sign)]) * spell(q) * Word([(name, sign)]) * direct(r)
                if len(cand) < len(best):
                    best = cand
        memo[m] = best
        return best

    growth = 2.0
    for loop in eng.loops.values():
        for mat in (loop.mat, loop.inv):
            growth = max(growth, float(mat.max_abs_entry()))

    oracle = GeodesicOracle(spec)
    entries = []
    ratios = []
    for m in powers:
        m = int(m)
        if m < 1:
            raise ValueError("powers must be positive")
        word = spell(m)
        ub = len(word)
        exact = None
        if ub <= bfs_cap:
            target = NormalForm(tuple(m * c for c in vec), ())
            exact = oracle.distance(target, ub)
        length = exact if exact is not None else ub
        ratio = length / math.log(m) if m >= 2 else None
        if ratio is not None:
            ratios.append(ratio)
        entries.append(ProfileEntry(m, ub, exact, ratio))
    note = (
        "upper bounds by greedy base-%d rewriting through %s"
        % (doubler[2], doubler[0])
        if doubler
        else "no scaling letter found; trivial spellings only"
    )
    return DistortionProfile(
        element,
        tuple(entries),
        max(ratios) if ratios else None,
        doubler[0] if doubler else None,
        doubler[2] if doubler else None,
        growth,
        note,
    )
